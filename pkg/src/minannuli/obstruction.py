"""Computable gates on a boundary pair (gamma^+, gamma^-).

* Gap gate: if gamma^+ - gamma^- > pi everywhere, no properly embedded
  minimal annulus has these boundary curves.
* Tilt gate: if after a rotation gamma^+ is non-increasing on [0, pi] and
  non-decreasing on [pi, 2 pi] while gamma^- does the opposite (the curves
  tilt away from each other), and the pair is not constant, no embedded
  minimal annulus fills it.
* Admissibility: the derivative curve theta -> (gamma^+', gamma^-') avoids
  the origin; its winding number classifies the pair.
* Symmetry: the largest m for which both curves are invariant under the
  rotation by 2 pi / m.  Symmetric pairs with gap below pi are fillable.

None of these decide fillability in general; outcomes outside the catenoid
and symmetric cases are reported as passed gates, not as existence claims.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catenoid import kappa_from_half_height
from .curves import CurvePair
from .errors import DomainError

__all__ = [
    "ObstructionReport",
    "gap_check",
    "tilt_monotonicity_check",
    "admissibility",
    "symmetry_detect",
    "classify",
    "NOT_FILLABLE_GAP",
    "NOT_FILLABLE_TILT",
    "GATE_PASSED",
    "CROSSING_PAIR",
]

NOT_FILLABLE_GAP = "NotFillableGap"
NOT_FILLABLE_TILT = "NotFillableTilt"
GATE_PASSED = "GatePassed"
CROSSING_PAIR = "CrossingPair"

EMBEDDEDNESS_NOTE = ("the tilt obstruction also covers Alexandrov-embedded annuli; "
                     "embeddedness classes are not distinguished here")


def _grid_size(pair: CurvePair, n: int | None) -> int:
    base = max(64, 16 * pair.degree + 16)
    n = base if n is None else n
    return n + (n % 2)


def gap_check(pair: CurvePair, n: int | None = None) -> dict:
    """Gap statistics and the partial verdict of the gap gate."""
    n = _grid_size(pair, n)
    gap = pair.gap(n)
    th = 2 * np.pi * np.arange(n) / n
    gmin, gmax = float(gap.min()), float(gap.max())
    out = {"min_gap": gmin, "max_gap": gmax, "theta_min_gap": float(th[np.argmin(gap)]),
           "theta_max_gap": float(th[np.argmax(gap)])}
    if gmin <= 0.0:
        out["band"] = "crossing"
        out["verdict"] = CROSSING_PAIR
    elif gmin > math.pi:
        out["band"] = "above_pi"
        out["verdict"] = NOT_FILLABLE_GAP
    elif gmax < math.pi:
        out["band"] = "below_pi"
        out["verdict"] = GATE_PASSED
    else:
        out["band"] = "inconclusive"
        out["verdict"] = GATE_PASSED
    return out


def _monotone(values, direction, tol):
    d = np.diff(values)
    return bool(np.all(d <= tol)) if direction < 0 else bool(np.all(d >= -tol))


def tilt_monotonicity_check(pair: CurvePair, n: int | None = None, tol: float = 1e-10,
                            constant_tol: float = 1e-12) -> dict:
    """Scan rotations on the theta grid for the tilted-away configuration."""
    n = _grid_size(pair, n)
    top, bot = pair.top.samples(n), pair.bottom.samples(n)
    constant = pair.top.is_constant(constant_tol) and pair.bottom.is_constant(constant_tol)
    half = n // 2
    hits = []
    if not constant:
        for s in range(n):
            t = np.roll(top, -s)
            b = np.roll(bot, -s)
            tw = np.append(t, t[0])
            bw = np.append(b, b[0])
            first, second = slice(0, half + 1), slice(half, n + 1)
            if (_monotone(tw[first], -1, tol) and _monotone(tw[second], +1, tol)
                    and _monotone(bw[first], +1, tol) and _monotone(bw[second], -1, tol)):
                hits.append(s)
    out = {"constant_pair": constant, "shifts": [2 * math.pi * s / n for s in hits]}
    if hits:
        out["verdict"] = NOT_FILLABLE_TILT
        out["shift"] = 2 * math.pi * hits[0] / n
    return out


def admissibility(pair: CurvePair, n: int | None = None, margin_tol: float = 1e-8) -> dict:
    """Winding number of theta -> ((gamma^+)', (gamma^-)') about the origin, if it avoids it."""
    n = max(_grid_size(pair, n), 256)
    dx = pair.top.derivative_samples(n)
    dy = pair.bottom.derivative_samples(n)
    rad = np.hypot(dx, dy)
    margin = float(rad.min())
    if margin <= margin_tol:
        return {"admissible": False, "margin": margin, "winding": None}
    ang = np.unwrap(np.arctan2(dy, dx))
    total = ang[-1] - ang[0] + _wrap(np.arctan2(dy[0], dx[0]) - np.arctan2(dy[-1], dx[-1]))
    winding = int(round(total / (2 * math.pi)))
    return {"admissible": True, "margin": margin, "winding": winding}


def _wrap(a):
    return (a + math.pi) % (2 * math.pi) - math.pi


def symmetry_detect(pair: CurvePair, tol: float = 1e-12, m_max: int = 12) -> dict:
    """Largest m <= m_max with R_m-invariance of both curves, read off the Fourier support."""
    if m_max < 1:
        raise DomainError("m_max must be at least 1")
    m = max(k for k in range(1, m_max + 1) if pair.symmetric_under(k, tol))
    return {"m": m}


@dataclass
class ObstructionReport:
    verdict: str
    witnesses: dict
    gap: dict
    winding: int | None
    winding_margin: float
    symmetry: int
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "witnesses": self.witnesses, "gap": self.gap,
                "winding": self.winding, "winding_margin": self.winding_margin,
                "symmetry": self.symmetry, "notes": list(self.notes)}


def classify(pair: CurvePair, n: int | None = None, tol: float = 1e-10, m_max: int = 12) -> ObstructionReport:
    """Run every gate and combine them into one verdict."""
    gap = gap_check(pair, n)
    tilt = tilt_monotonicity_check(pair, n, tol)
    adm = admissibility(pair, n)
    sym = symmetry_detect(pair, m_max=m_max)["m"]
    notes = [EMBEDDEDNESS_NOTE]
    witnesses: dict = {}
    if gap["verdict"] == CROSSING_PAIR:
        verdict = CROSSING_PAIR
        witnesses["theta_min_gap"] = gap["theta_min_gap"]
    elif gap["verdict"] == NOT_FILLABLE_GAP:
        verdict = NOT_FILLABLE_GAP
        witnesses["min_gap"] = gap["min_gap"]
        witnesses["theta_min_gap"] = gap["theta_min_gap"]
    elif tilt.get("verdict") == NOT_FILLABLE_TILT:
        verdict = NOT_FILLABLE_TILT
        witnesses["shift"] = tilt["shift"]
    else:
        verdict = GATE_PASSED
        if gap["band"] == "inconclusive":
            notes.append("gap crosses pi: neither gate applies, no claim either way")
            witnesses["theta_min_gap"] = gap["theta_min_gap"]
            witnesses["theta_max_gap"] = gap["theta_max_gap"]
        if tilt["constant_pair"] and gap["band"] == "below_pi":
            h = 0.5 * gap["min_gap"]
            witnesses["catenoid"] = {"h": h, "kappa": kappa_from_half_height(h),
                                     "vertical_shift": 0.5 * (pair.top.mean() + pair.bottom.mean())}
        elif sym >= 2 and gap["band"] == "below_pi":
            witnesses["symmetric_fillable"] = sym
            notes.append(f"R_{sym}-invariant pair with gap below pi: fillable")
    return ObstructionReport(verdict=verdict, witnesses=witnesses, gap=gap, winding=adm["winding"],
                             winding_margin=adm["margin"], symmetry=sym, notes=notes)
