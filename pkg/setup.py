"""Build the optional compiled kernels.

The package works without them: ``minannuli._kernels`` falls back to the
numpy implementations when the extension is missing.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("MINANNULI_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "minannuli._ckernels",
                    ["src/minannuli/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False, "cdivision": True},
        )

setup(ext_modules=ext_modules)
