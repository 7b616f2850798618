"""Horizontal asymptotic curves t = gamma(theta) and pairs of them.

A curve is a real trigonometric polynomial

    gamma(theta) = sum_k a_k cos(k theta) + b_k sin(k theta)

(with b_0 ignored).  Samples on a uniform grid are derived from the
coefficients, and ``from_samples`` goes the other way through an FFT.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError

__all__ = ["BoundaryCurve", "CurvePair", "theta_grid", "apply_tilt"]


def theta_grid(n: int) -> np.ndarray:
    """Uniform periodic grid 2 pi j / n, j = 0..n-1."""
    if n < 1:
        raise DomainError("grid size must be positive")
    return 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class BoundaryCurve:
    """Fourier coefficients {k: (a_k, b_k)}; zero terms are dropped."""

    terms: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, (a, b) in dict(self.terms).items():
            k = int(k)
            if k < 0:
                raise DomainError("Fourier index must be nonnegative")
            a, b = float(a), (0.0 if k == 0 else float(b))
            if not (math.isfinite(a) and math.isfinite(b)):
                raise DomainError("Fourier coefficients must be finite")
            if a != 0.0 or b != 0.0:
                clean[k] = (a, b)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    # construction

    @classmethod
    def constant(cls, c: float) -> "BoundaryCurve":
        return cls({0: (c, 0.0)})

    @classmethod
    def from_terms(cls, terms: Iterable[Mapping]) -> "BoundaryCurve":
        """From a list of {"k": .., "a": .., "b": ..} records (CLI format)."""
        out: dict = {}
        for rec in terms:
            k = int(rec["k"])
            a0, b0 = out.get(k, (0.0, 0.0))
            out[k] = (a0 + float(rec.get("a", 0.0)), b0 + float(rec.get("b", 0.0)))
        return cls(out)

    @classmethod
    def from_samples(cls, values, tol: float = 0.0) -> "BoundaryCurve":
        """Interpolating trigonometric polynomial through uniform samples.

        The Nyquist term of an even-length sample set is kept as a cosine.
        Coefficients below ``tol`` in magnitude are dropped.
        """
        v = np.asarray(values, dtype=float)
        n = len(v)
        if n < 1:
            raise DomainError("need at least one sample")
        c = np.fft.rfft(v) / n
        terms = {0: (c[0].real, 0.0)}
        for k in range(1, len(c)):
            if n % 2 == 0 and k == n // 2:
                terms[k] = (c[k].real, 0.0)
            else:
                terms[k] = (2.0 * c[k].real, -2.0 * c[k].imag)
        if tol > 0:
            terms = {k: ab for k, ab in terms.items() if max(abs(ab[0]), abs(ab[1])) > tol}
        return cls(terms)

    def to_terms(self) -> list:
        return [{"k": k, "a": a, "b": b} for k, (a, b) in self.terms.items()]

    # evaluation

    @property
    def degree(self) -> int:
        return max(self.terms, default=0)

    def mean(self) -> float:
        return self.terms.get(0, (0.0, 0.0))[0]

    def is_constant(self, tol: float = 0.0) -> bool:
        return all(max(abs(a), abs(b)) <= tol for k, (a, b) in self.terms.items() if k > 0)

    def __call__(self, theta, derivative: int = 0):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, (a, b) in self.terms.items():
            if k == 0:
                if derivative == 0:
                    out = out + a
                continue
            # d^p/dtheta^p of a cos + b sin is a rotation of the phase by p pi/2
            phase = k * theta + derivative * np.pi / 2
            out = out + k ** derivative * (a * np.cos(phase) + b * np.sin(phase))
        return out

    def samples(self, n: int) -> np.ndarray:
        return self(theta_grid(n))

    def derivative_samples(self, n: int, order: int = 1) -> np.ndarray:
        return self(theta_grid(n), derivative=order)

    def sup_norm(self, n: int = 512) -> float:
        return float(np.max(np.abs(self.samples(max(n, 8 * self.degree + 8)))))

    # algebra

    def __add__(self, other: "BoundaryCurve | float") -> "BoundaryCurve":
        if not isinstance(other, BoundaryCurve):
            other = BoundaryCurve.constant(float(other))
        terms = dict(self.terms)
        for k, (a, b) in other.terms.items():
            a0, b0 = terms.get(k, (0.0, 0.0))
            terms[k] = (a0 + a, b0 + b)
        return BoundaryCurve(terms)

    __radd__ = __add__

    def __neg__(self) -> "BoundaryCurve":
        return BoundaryCurve({k: (-a, -b) for k, (a, b) in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, BoundaryCurve) else -float(other))

    def scaled(self, c: float) -> "BoundaryCurve":
        return BoundaryCurve({k: (c * a, c * b) for k, (a, b) in self.terms.items()})

    def rotated(self, zeta: float) -> "BoundaryCurve":
        """The curve theta -> gamma(theta - zeta)."""
        terms = {}
        for k, (a, b) in self.terms.items():
            c, s = math.cos(k * zeta), math.sin(k * zeta)
            terms[k] = (a * c - b * s, a * s + b * c)
        return BoundaryCurve(terms)

    def symmetric_under(self, m: int, tol: float = 1e-12) -> bool:
        """Invariance under theta -> theta + 2 pi / m."""
        return all(k % m == 0 or max(abs(a), abs(b)) <= tol for k, (a, b) in self.terms.items())


def apply_tilt(curve: BoundaryCurve, a0: float = 0.0, a1: float = 0.0, a2: float = 0.0) -> BoundaryCurve:
    """gamma + a0 + a1 cos(theta) + a2 sin(theta)."""
    return curve + BoundaryCurve({0: (a0, 0.0), 1: (a1, a2)})


@dataclass(frozen=True)
class CurvePair:
    top: BoundaryCurve
    bottom: BoundaryCurve

    @classmethod
    def constants(cls, top: float, bottom: float) -> "CurvePair":
        return cls(BoundaryCurve.constant(top), BoundaryCurve.constant(bottom))

    @classmethod
    def catenoid(cls, h: float) -> "CurvePair":
        return cls.constants(h, -h)

    def gap(self, n: int) -> np.ndarray:
        return self.top.samples(n) - self.bottom.samples(n)

    def rotated(self, zeta: float) -> "CurvePair":
        return CurvePair(self.top.rotated(zeta), self.bottom.rotated(zeta))

    def tilted(self, a0=0.0, a1=0.0, a2=0.0) -> "CurvePair":
        return CurvePair(apply_tilt(self.top, a0, a1, a2), self.bottom)

    @property
    def degree(self) -> int:
        return max(self.top.degree, self.bottom.degree)

    def symmetric_under(self, m: int, tol: float = 1e-12) -> bool:
        return self.top.symmetric_under(m, tol) and self.bottom.symmetric_under(m, tol)

    def to_dict(self) -> dict:
        return {"top": self.top.to_terms(), "bottom": self.bottom.to_terms()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "CurvePair":
        return cls(BoundaryCurve.from_terms(data["top"]), BoundaryCurve.from_terms(data["bottom"]))
