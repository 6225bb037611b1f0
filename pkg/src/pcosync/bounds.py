"""Closed-form convergence lower bounds and thresholds.

Everything here is a pure function of scalars or a degree sequence. The
quantity s = max(B, 1 - B + 2 tau) is the complement of the collapse-window
length: a node whose phase starts in [s, 1] fires inside the window, and a
node with an in-window firing predecessor receives a pulse there. Per-node
guarantees combine into whole-graph bounds two ways, a union bound (can go
negative, reported raw) and a product bound; the product always dominates.

Vacuous regimes are values, not errors: a node whose expected in-window
signal count is below the required k contributes a bound of 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .graph import Graph


@dataclass(frozen=True)
class BoundReport:
    """Per-node lower bounds with their union/product aggregates.

    union_bound is 1 - sum(1 - b_i), kept raw (possibly negative) so the
    Weierstrass relation product >= union stays observable; union_clamped
    is the usable value.
    """

    per_node: Tuple[float, ...]
    union_bound: float
    product_bound: float
    params: Dict[str, float]

    @property
    def union_clamped(self) -> float:
        return max(0.0, self.union_bound)

    def to_json_dict(self) -> dict:
        out = dict(self.params)
        out.update(
            union=self.union_bound,
            union_clamped=self.union_clamped,
            product=self.product_bound,
            per_node=list(self.per_node),
            params=dict(self.params),
        )
        return out


def _aggregate(per_node: Sequence[float], params: Dict[str, float]) -> BoundReport:
    union = 1.0 - sum(1.0 - b for b in per_node)
    product = 1.0
    for b in per_node:
        product *= b
    return BoundReport(per_node=tuple(per_node), union_bound=union,
                       product_bound=product, params=params)


def compute_s(B: float, tau: float) -> float:
    """s = max(B, 1 - B + 2 tau). Values >= 1 make every bound here vacuous
    (the collapse window has zero length); callers that need s < 1 must
    check."""
    if not (0.0 < B < 1.0):
        raise ValueError(f"B must lie in (0,1), got {B}")
    if not (0.0 <= tau < 0.5):
        raise ValueError(f"tau must lie in [0, 0.5), got {tau}")
    return max(B, 1.0 - B + 2.0 * tau)


def _check_s(s: float) -> None:
    if not (0.0 < s < 1.0):
        raise ValueError(f"s must lie in (0,1) for a non-vacuous bound, got {s}")


def sf_node_bound(d: int, s: float) -> float:
    """P(node collapses in the one-shot window) >= 1 - s^(d+1) under the
    strong-firing curve, for indegree d and uniform initial phases."""
    _check_s(s)
    if d < 0:
        raise ValueError(f"indegree must be >= 0, got {d}")
    return 1.0 - s ** (d + 1)


def sf_graph_bounds(g: Graph, s: float) -> BoundReport:
    per_node = [sf_node_bound(d, s) for d in g.indegrees()]
    return _aggregate(per_node, {"s": s})


def delta_n(p: float, s: float, n: int) -> float:
    """Minimum uniform indegree making the union bound reach p on n nodes:
    ln(1-p)/ln(s) - ln(n)/ln(s)."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0,1), got {p}")
    _check_s(s)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.log(1.0 - p) / math.log(s) - math.log(n) / math.log(s)


def delta_n_coefficients(p: float, s: float) -> Tuple[float, float]:
    """(a, b) with delta_n(p, s, n) = a + b ln(n)."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0,1), got {p}")
    _check_s(s)
    return math.log(1.0 - p) / math.log(s), -1.0 / math.log(s)


def stii_node_bound(d: int, q: float, k: int) -> float:
    """Hoeffding-style lower bound 1 - exp(-(qd-k-1)^2 / (2qd)) on the
    per-node collapse event for a k-signal curve; 0 when qd < k + 1 (the
    bound is vacuous there, not an error)."""
    if d < 0:
        raise ValueError(f"indegree must be >= 0, got {d}")
    if not (0.0 < q <= 1.0):
        raise ValueError(f"q must lie in (0,1], got {q}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    qd = q * d
    if qd < k + 1:
        return 0.0
    return 1.0 - math.exp(-((qd - k - 1) ** 2) / (2.0 * qd))


def stii_graph_bound(g: Graph, q: Union[float, Sequence[float]], k: int) -> BoundReport:
    """Product/union aggregates of stii_node_bound; q may be shared or
    per-node. Any vacuous node zeroes the product."""
    degs = g.indegrees()
    if isinstance(q, (int, float)):
        qs = [float(q)] * g.n
    else:
        qs = [float(v) for v in q]
        if len(qs) != g.n:
            raise ValueError(f"got {len(qs)} q values for {g.n} nodes")
    per_node = [stii_node_bound(d, qi, k) for d, qi in zip(degs, qs)]
    params: Dict[str, float] = {"k": float(k)}
    if isinstance(q, (int, float)):
        params["q"] = float(q)
    return _aggregate(per_node, params)


def ready_probability(s: float, eta: float = 0.0) -> float:
    """Default per-neighbor in-window firing probability q = 1 - (s + eta)
    for uniform initial phases."""
    _check_s(s)
    if eta < 0.0 or s + eta >= 1.0:
        raise ValueError(f"need 0 <= eta < 1 - s, got eta={eta} at s={s}")
    return 1.0 - (s + eta)


def stii_degree_requirement(k: int, n: int, p: float) -> float:
    """Value v such that d_i * q_i >= v for all nodes pushes the union bound
    to at least p: k - 1 + c_n + sqrt(c_n^2 + 4 (k-1) c_n) with
    c_n = ln(n) - ln(1-p)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0,1), got {p}")
    c_n = math.log(n) - math.log(1.0 - p)
    return k - 1 + c_n + math.sqrt(c_n * c_n + 4.0 * (k - 1) * c_n)


def _rgg_threshold_f(c: float, s: float) -> float:
    # The defining relation multiplied through by c:
    #   c - 1 + (2/ln s) - (2/ln s) ln(-2/(c ln s)) = 0
    ls = math.log(s)
    return c - 1.0 + 2.0 / ls - (2.0 / ls) * math.log(-2.0 / (c * ls))


def rgg_threshold_residual(c: float, s: float) -> float:
    """Residual of the defining relation in its original 1/c form."""
    ls = math.log(s)
    u = -2.0 / (c * ls)
    return 1.0 / c - (1.0 + 2.0 / (c * ls) - (2.0 / (c * ls)) * math.log(u))


def rgg_c_threshold(s: float, c_lo: float = 1e-6, c_hi: float = 1e3,
                    scan_points: int = 4000) -> float:
    """Larger positive root c of
    1/c = 1 + 2/(c ln s) - (2/(c ln s)) ln(-2/(c ln s)).

    A geometric sign-change scan over (c_lo, c_hi) brackets every root; the
    rightmost bracket is bisected. The function tends to +inf at both ends,
    so two roots exist whenever any do and the rightmost is the wanted one.
    """
    _check_s(s)
    grid = [c_lo * (c_hi / c_lo) ** (i / (scan_points - 1)) for i in range(scan_points)]
    vals = [_rgg_threshold_f(c, s) for c in grid]
    bracket: Optional[Tuple[float, float]] = None
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa == 0.0:
            bracket = (a, a)
        if fa * fb < 0.0:
            bracket = (a, b)  # keep scanning: the LAST sign change wins
    if bracket is None:
        raise RuntimeError(
            f"no root of the radius-threshold relation in ({c_lo}, {c_hi}) for s={s}"
        )
    a, b = bracket
    if a == b:
        return a
    fa = _rgg_threshold_f(a, s)
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        fm = _rgg_threshold_f(mid, s)
        if fm == 0.0:
            return mid
        if fa * fm < 0.0:
            b = mid
        else:
            a, fa = mid, fm
    c = 0.5 * (a + b)
    res = rgg_threshold_residual(c, s)
    if abs(res) >= 1e-10:
        raise RuntimeError(f"threshold solver residual {res:.3e} too large at c={c}")
    return c


def rgg_radius_for_c(n: int, dim: int, c: float) -> float:
    """Radius giving expected degree c ln(n) on the unit torus:
    r = (c ln n / (n theta))^(1/dim) with theta the unit-ball volume."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if c <= 0.0:
        raise ValueError(f"c must be positive, got {c}")
    theta = math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)
    r = (c * math.log(n) / (n * theta)) ** (1.0 / dim)
    if r > math.sqrt(dim) / 2.0:
        warnings.warn(
            f"radius {r:.4g} exceeds the torus diameter bound sqrt(dim)/2 = "
            f"{math.sqrt(dim) / 2.0:.4g}; the graph is complete",
            stacklevel=2,
        )
    return r


def er_limit_probability(n: int, gamma: float) -> float:
    """Asymptote (1 - 1/n) exp(1/n^(1-gamma)) for dense-enough ER graphs.

    Documentation-grade: this is a limit expression, not a per-graph bound,
    and can exceed 1 at small n; reported raw."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0,1), got {gamma}")
    return (1.0 - 1.0 / n) * math.exp(1.0 / n ** (1.0 - gamma))
