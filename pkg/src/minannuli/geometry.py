"""Poincare disk model of H^2 and its isometries.

Points are stored in Cartesian coordinates; polar coordinates are derived
on demand.  The conformal factor of the metric ``4|dz|^2 / (1 - |z|^2)^2`` is
``lambda2`` and its reciprocal ``F = (1 - r^2)^2 / 4`` is the factor that
appears in the graph and flux formulas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "DiskPoint",
    "MetricSample",
    "Isometry",
    "conformal_factor",
    "metric_factor",
    "apply_dilation",
    "apply_rotation",
    "hyperbolic_distance",
]

_ATANH_CLAMP = 1.0 - 1e-15


@dataclass(frozen=True)
class DiskPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.x * self.x + self.y * self.y < 1.0):
            raise DomainError(f"point ({self.x}, {self.y}) is not in the open unit disk")

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        return cls(float(z.real), float(z.imag))

    @classmethod
    def from_polar(cls, r: float, theta: float) -> "DiskPoint":
        return cls(r * math.cos(theta), r * math.sin(theta))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def theta(self) -> float:
        return math.atan2(self.y, self.x)


@dataclass(frozen=True)
class MetricSample:
    lambda2: float
    F: float


def _as_complex(p) -> complex:
    if isinstance(p, DiskPoint):
        return p.z
    return complex(p)


def _check_disk(z: complex, name: str = "point") -> None:
    if not abs(z) < 1.0:
        raise DomainError(f"{name} {z} is not in the open unit disk")


def metric_factor(r):
    """F = (1 - r^2)^2 / 4, vectorized over ``r``."""
    r = np.asarray(r, dtype=float)
    return 0.25 * (1.0 - r * r) ** 2


def conformal_factor(p: DiskPoint | complex) -> MetricSample:
    z = _as_complex(p)
    _check_disk(z)
    s = 1.0 - abs(z) ** 2
    return MetricSample(lambda2=4.0 / (s * s), F=0.25 * s * s)


def apply_dilation(z0: DiskPoint | complex, p: DiskPoint | complex) -> DiskPoint:
    """Horizontal dilation T_{z0}(z) = (z + z0) / (conj(z0) z + 1).

    Maps the origin to ``z0``; ``apply_dilation(-z0, .)`` is its inverse.
    """
    a = _as_complex(z0)
    z = _as_complex(p)
    _check_disk(a, "z0")
    _check_disk(z)
    w = (z + a) / (a.conjugate() * z + 1.0)
    return DiskPoint.from_complex(w)


def dilation_array(z0: complex, z: np.ndarray) -> np.ndarray:
    """Vectorized T_{z0} on complex arrays (no domain checks)."""
    z = np.asarray(z, dtype=complex)
    return (z + z0) / (np.conj(z0) * z + 1.0)


def apply_rotation(zeta: float, p: DiskPoint | complex) -> DiskPoint:
    z = _as_complex(p)
    _check_disk(z)
    return DiskPoint.from_complex(z * complex(math.cos(zeta), math.sin(zeta)))


def hyperbolic_distance(p: DiskPoint | complex, q: DiskPoint | complex) -> float:
    a = _as_complex(p)
    b = _as_complex(q)
    _check_disk(a)
    _check_disk(b)
    x = abs(a - b) / abs(1.0 - b.conjugate() * a)
    return 2.0 * math.atanh(min(x, _ATANH_CLAMP))


@dataclass(frozen=True)
class Isometry:
    """Orientation preserving isometry of H^2 (acting trivially on R).

    ``kind`` is ``"rotation"`` (``param`` = angle), ``"dilation"`` (``param``
    = target point z0) or ``"composition"`` (``parts`` applied right to left,
    i.e. ``parts[-1]`` first).
    """

    kind: str
    param: complex | float = 0.0
    parts: tuple = field(default_factory=tuple)

    @classmethod
    def rotation(cls, zeta: float) -> "Isometry":
        return cls("rotation", float(zeta))

    @classmethod
    def dilation(cls, z0: DiskPoint | complex) -> "Isometry":
        a = _as_complex(z0)
        _check_disk(a, "z0")
        return cls("dilation", a)

    @classmethod
    def compose(cls, *isos: "Isometry") -> "Isometry":
        flat = []
        for iso in isos:
            flat.extend(iso.parts if iso.kind == "composition" else (iso,))
        return cls("composition", parts=tuple(flat))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry.compose(self, other)

    def inverse(self) -> "Isometry":
        if self.kind == "rotation":
            return Isometry.rotation(-self.param)
        if self.kind == "dilation":
            return Isometry.dilation(-self.param)
        return Isometry("composition", parts=tuple(p.inverse() for p in reversed(self.parts)))

    def apply(self, p: DiskPoint | complex) -> DiskPoint:
        if self.kind == "rotation":
            return apply_rotation(self.param, p)
        if self.kind == "dilation":
            return apply_dilation(self.param, p)
        out = p
        for part in reversed(self.parts):
            out = part.apply(out)
        if not isinstance(out, DiskPoint):
            out = DiskPoint.from_complex(_as_complex(out))
        return out

    def apply_many(self, points: Sequence) -> list[DiskPoint]:
        return [self.apply(p) for p in points]
