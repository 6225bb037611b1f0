"""Phase response curves and their classification.

A PRC is a map f: [0,1] -> R applied on pulse arrival as
phi <- max(0, phi + f(phi)); a result >= 1 fires the receiving node. Curves
here expose a vectorized ``eval_vec`` and the scalar ``eval`` delegates to it,
so every code path shares identical float arithmetic.

Classification checks are grid-based sufficient conditions: a curve that
passes is guaranteed to satisfy the inequality on the grid (non-strict, with
a 1e-12 slack for float noise); coarse grids can only produce false
negatives, never false positives on the grid itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

TOL = 1e-12


@dataclass(frozen=True)
class PrcParams:
    """Model constants the classification checks depend on.

    B is the inhibitory/excitatory breakpoint, kappa the minimum inhibition
    margin, eta the dead zone below phase 1 excluded from the excitatory
    requirement, tau the transmission delay.
    """

    B: float
    kappa: float
    eta: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.B < 1.0):
            raise ValueError(f"B must lie in (0,1), got {self.B}")
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.eta < 0.0 or self.B + self.eta >= 1.0:
            raise ValueError(f"eta must satisfy 0 <= eta < 1-B, got {self.eta}")
        if not (0.0 <= self.tau < 0.5):
            raise ValueError(f"tau must lie in [0, 0.5), got {self.tau}")


@dataclass(frozen=True)
class SttiClass:
    h: int
    m: int
    k: int
    eta: float


class Prc:
    """Base class; concrete curves implement ``eval_vec``."""

    label = "prc"
    breakpoint: Optional[float] = None

    def eval_vec(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eval(self, x: float) -> float:
        return float(self.eval_vec(np.asarray([x], dtype=np.float64))[0])

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class SfPrc(Prc):
    """Strong-firing curve: full reset below B, fire at or above B."""

    B: float = 0.55

    def __post_init__(self):
        if not (0.0 < self.B < 1.0):
            raise ValueError(f"B must lie in (0,1), got {self.B}")

    @property
    def label(self):
        return "sf"

    @property
    def breakpoint(self):
        return self.B

    def eval_vec(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x < self.B, -x, 1.0 - x)

    def to_config(self):
        return {"family": "sf", "B": self.B}


@dataclass(frozen=True)
class SyntheticStiiPrc(Prc):
    """Piecewise synthetic curve built to classify as (h, m).

    Below B: f(x) = -min(B/h, x) - inhibit_margin. At or above B: the constant
    (1-B)/m + excite_margin, which clears every sawtooth tooth of width
    (1-B)/m. Margins keep the grid inequalities strictly satisfied.
    """

    B: float
    h: int
    m: int
    eta: float = 0.0
    inhibit_margin: float = 0.01
    excite_margin: float = 0.01

    def __post_init__(self):
        if not (0.0 < self.B < 1.0):
            raise ValueError(f"B must lie in (0,1), got {self.B}")
        if self.h < 1 or self.m < 1:
            raise ValueError(f"h and m must be >= 1, got h={self.h}, m={self.m}")
        if self.inhibit_margin < 0 or self.excite_margin < 0:
            raise ValueError("margins must be non-negative")
        if self.eta < 0 or self.B + self.eta >= 1.0:
            raise ValueError(f"eta must satisfy 0 <= eta < 1-B, got {self.eta}")

    @property
    def label(self):
        return f"stii_h{self.h}_m{self.m}"

    @property
    def breakpoint(self):
        return self.B

    @property
    def excite_step(self) -> float:
        return (1.0 - self.B) / self.m + self.excite_margin

    def eval_vec(self, x):
        x = np.asarray(x, dtype=np.float64)
        inhibit = -np.minimum(self.B / self.h, x) - self.inhibit_margin
        return np.where(x < self.B, inhibit, self.excite_step)

    def to_config(self):
        return {
            "family": "stii_synthetic",
            "B": self.B,
            "h": self.h,
            "m": self.m,
            "eta": self.eta,
            "inhibit_margin": self.inhibit_margin,
            "excite_margin": self.excite_margin,
        }


@dataclass(frozen=True)
class ChargingCurvePrc(Prc):
    """Excitatory-only curve from a concave charging potential.

    V(x) = ln(1 + (e^b - 1) x) / b with dissipation b > 0, coupling eps > 0.
    Response: f(x) = Vinv(min(1, V(x) + eps)) - x, so a node pushed past the
    potential threshold lands exactly on phase 1 and fires.
    """

    b: float = 3.0
    eps: float = 0.05

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError(f"dissipation b must be positive, got {self.b}")
        if self.eps <= 0:
            raise ValueError(f"coupling eps must be positive, got {self.eps}")

    @property
    def label(self):
        return "charging"

    @property
    def breakpoint(self):
        return None

    def eval_vec(self, x):
        x = np.asarray(x, dtype=np.float64)
        eb = math.expm1(self.b)  # e^b - 1
        v = np.log1p(eb * x) / self.b
        y = np.minimum(1.0, v + self.eps)
        return np.expm1(self.b * y) / eb - x

    def to_config(self):
        return {"family": "charging", "b": self.b, "eps": self.eps}


@dataclass(frozen=True)
class TabulatedPrc(Prc):
    """Linear interpolation through sample points covering [0, 1]."""

    xs: Tuple[float, ...]
    ys: Tuple[float, ...]
    _xarr: np.ndarray = field(init=False, repr=False, compare=False)
    _yarr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        xs = tuple(float(v) for v in self.xs)
        ys = tuple(float(v) for v in self.ys)
        if len(xs) != len(ys):
            raise ValueError("xs and ys must have equal length")
        if len(xs) < 2:
            raise ValueError("table needs at least two points")
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise ValueError(f"table must cover [0,1] exactly, got [{xs[0]}, {xs[-1]}]")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("table x values must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "_xarr", np.asarray(xs, dtype=np.float64))
        object.__setattr__(self, "_yarr", np.asarray(ys, dtype=np.float64))

    @property
    def label(self):
        return "table"

    @property
    def breakpoint(self):
        return None

    def eval_vec(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.interp(x, self._xarr, self._yarr)

    def to_config(self):
        return {"family": "table", "points": [[x, y] for x, y in zip(self.xs, self.ys)]}


@dataclass(frozen=True)
class WeightedPrc(Prc):
    """Per-edge weighted wrapper: response clipped to [-w, w] around B.

    Below B the response is max(-w, f(x)); at or above B it is min(w, f(x))
    (x == B takes the excitatory branch).
    """

    inner: Prc
    w: float
    B: float

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError(f"weight must be positive, got {self.w}")
        if not (0.0 < self.B < 1.0):
            raise ValueError(f"B must lie in (0,1), got {self.B}")

    @property
    def label(self):
        return f"weighted({self.inner.label},w={self.w})"

    @property
    def breakpoint(self):
        return self.B

    def eval_vec(self, x):
        x = np.asarray(x, dtype=np.float64)
        f = self.inner.eval_vec(x)
        return np.where(x < self.B, np.maximum(-self.w, f), np.minimum(self.w, f))

    def to_config(self):
        return {
            "family": "weighted",
            "w": self.w,
            "B": self.B,
            "inner": self.inner.to_config(),
        }


def weighted_wrap(prc: Prc, w: float, params: PrcParams) -> WeightedPrc:
    return WeightedPrc(inner=prc, w=w, B=params.B)


def eval_prc(prc: Prc, x: float) -> float:
    """Raw response f(x); domain validated, no clamping applied."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"phase {x} outside [0,1]")
    return prc.eval(x)


def _grid(lo: float, hi: float, grid: int, knots: Sequence[float] = ()) -> np.ndarray:
    """Sample points in [lo, hi): uniform at `grid` points per unit plus lo,
    any knots inside, and the point just below hi."""
    if hi <= lo:
        return np.empty(0)
    count = max(2, int(math.ceil((hi - lo) * grid)))
    pts = [lo + (hi - lo) * i / count for i in range(count)]
    pts.append(np.nextafter(hi, lo))
    pts.extend(k for k in knots if lo < k < hi)
    arr = np.unique(np.asarray(pts, dtype=np.float64))
    return arr[(arr >= lo) & (arr < hi)]


def _curve_knots(prc: Prc) -> Tuple[float, ...]:
    if isinstance(prc, TabulatedPrc):
        return prc.xs
    if isinstance(prc, WeightedPrc):
        return _curve_knots(prc.inner)
    return ()


def is_stii(prc: Prc, params: PrcParams, grid: int = 10000) -> bool:
    """Membership in the delay-robust type II class.

    Requires f(x) <= -min(x, tau + kappa) on [0, B) and f(x) >= 0 on [B, 1],
    checked on a grid (non-strict comparisons with 1e-12 slack).
    """
    knots = _curve_knots(prc)
    xs = _grid(0.0, params.B, grid, knots)
    if xs.size:
        need = -np.minimum(xs, params.tau + params.kappa)
        if np.any(prc.eval_vec(xs) > need + TOL):
            return False
    xs = _grid(params.B, 1.0, grid, knots)
    xs = np.append(xs, 1.0)
    if np.any(prc.eval_vec(xs) < -TOL):
        return False
    return True


def check_h_inhibitory(prc: Prc, params: PrcParams, h: int, grid: int = 10000) -> bool:
    """True iff f(x) <= -min(B/h, x) on a grid over [0, B)."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    xs = _grid(0.0, params.B, grid, _curve_knots(prc))
    if not xs.size:
        return True
    need = -np.minimum(params.B / h, xs)
    return not np.any(prc.eval_vec(xs) > need + TOL)


def check_m_excitatory(prc: Prc, params: PrcParams, m: int, grid: int = 10000) -> bool:
    """True iff f(x) >= x_{j+1} - x on every sawtooth tooth intersected with
    [B, 1 - eta], where x_j = B + j (1-B)/m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    B, eta = params.B, params.eta
    hi_domain = 1.0 - eta
    knots = _curve_knots(prc)
    width = (1.0 - B) / m
    for j in range(m):
        lo = B + j * width
        hi = B + (j + 1) * width
        if lo > hi_domain:
            break
        xs = _grid(lo, min(hi, hi_domain), grid, knots)
        if hi_domain < hi:
            xs = np.append(xs, hi_domain)  # closed upper end of the domain
        if not xs.size:
            continue
        need = hi - xs
        if np.any(prc.eval_vec(xs) < need - TOL):
            return False
    return True


def classify_stii(
    prc: Prc,
    params: PrcParams,
    h_max: int = 8,
    m_max: int = 8,
    grid: int = 10000,
) -> Optional[SttiClass]:
    """Smallest k = h + m - 1 class passing both checks; ties take smaller h.

    Returns None when no (h, m) within the search bounds passes. Both checks
    are monotone (passing h implies passing h+1, same for m), so the minimal
    passing m per h is found by linear scan.
    """
    best: Optional[SttiClass] = None
    for h in range(1, h_max + 1):
        if not check_h_inhibitory(prc, params, h, grid):
            continue
        for m in range(1, m_max + 1):
            if check_m_excitatory(prc, params, m, grid):
                k = h + m - 1
                if best is None or k < best.k:
                    best = SttiClass(h=h, m=m, k=k, eta=params.eta)
                break
    return best


def prc_from_config(cfg: dict) -> Prc:
    """Build a curve from its JSON config dict (inverse of to_config)."""
    if "family" not in cfg:
        raise ValueError("prc config missing 'family'")
    family = cfg["family"]
    if family == "sf":
        return SfPrc(B=float(cfg.get("B", 0.55)))
    if family == "stii_synthetic":
        return SyntheticStiiPrc(
            B=float(cfg.get("B", 0.55)),
            h=int(cfg["h"]),
            m=int(cfg["m"]),
            eta=float(cfg.get("eta", 0.0)),
            inhibit_margin=float(cfg.get("inhibit_margin", 0.01)),
            excite_margin=float(cfg.get("excite_margin", 0.01)),
        )
    if family == "charging":
        return ChargingCurvePrc(b=float(cfg.get("b", 3.0)), eps=float(cfg.get("eps", 0.05)))
    if family == "table":
        pts = cfg.get("points")
        if not pts:
            raise ValueError("table prc config needs 'points'")
        xs, ys = zip(*pts)
        return TabulatedPrc(xs=tuple(xs), ys=tuple(ys))
    if family == "weighted":
        return WeightedPrc(
            inner=prc_from_config(cfg["inner"]),
            w=float(cfg["w"]),
            B=float(cfg["B"]),
        )
    raise ValueError(f"unknown prc family {family!r}")


def load_prc_table(path: str) -> TabulatedPrc:
    """Parse a tabulated-PRC CSV: rows ``x,f(x)`` with x strictly increasing
    and endpoints 0 and 1 present. Comment/blank lines are skipped."""
    xs: List[float] = []
    ys: List[float] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x,f(x)', got {line!r}")
            try:
                xs.append(float(parts[0]))
                ys.append(float(parts[1]))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
    try:
        return TabulatedPrc(xs=tuple(xs), ys=tuple(ys))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
