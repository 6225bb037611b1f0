"""Monte Carlo estimation of convergence probability.

Two estimators share one trial protocol: draw i.i.d. uniform initial phases
from a per-trial RNG seeded as (master_seed, trial_index), run, count
successes, report a 95% Wilson interval. The certificate estimator runs a
single period and asks whether the critical-range certificate was granted;
the full estimator integrates up to max_periods and asks for exact
synchrony. Per-index seeding makes trials order-independent: estimates over
disjoint index ranges pool exactly, and any trial can be replayed alone.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bounds import ready_probability, sf_graph_bounds, stii_graph_bound
from .graph import Graph, RggSpec, generate_rgg
from .prc import Prc, PrcParams, SfPrc, classify_stii
from .sim import (ModelParams, SimulationCapError, run_one_period,
                  run_to_synchrony, sample_spreads)

WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class TrialPlan:
    trials: int
    seed: int
    max_periods: float = 50.0
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.max_periods < 1:
            raise ValueError(f"max_periods must be >= 1, got {self.max_periods}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")


@dataclass(frozen=True)
class Estimate:
    successes: int
    trials: int
    point: float
    ci_low: float
    ci_high: float
    wall_time: float = field(compare=False, default=0.0)

    def to_json_dict(self) -> dict:
        # wall_time deliberately omitted: output files must be byte-identical
        # across reruns of the same seed
        return {
            "successes": self.successes,
            "trials": self.trials,
            "point": self.point,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
        }


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> Tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not (0 <= successes <= trials):
        raise ValueError(f"successes {successes} outside [0, {trials}]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = phat + z2 / (2.0 * trials)
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    # center - half vanishes identically at the boundary counts; return the
    # exact endpoint instead of its float residue
    lo = 0.0 if successes == 0 else max(0.0, (center - half) / denom)
    hi = 1.0 if successes == trials else min(1.0, (center + half) / denom)
    return lo, hi


def trial_phases(seed: int, idx: int, n: int) -> np.ndarray:
    """The idx-th trial's initial phases: uniform [0,1), reproducible and
    order-independent."""
    return np.random.default_rng([seed, idx]).random(n)


def count_successes(g: Graph, params: ModelParams, seed: int, lo: int, hi: int,
                    mode: str, max_periods: float = 50.0,
                    engine: str = "auto") -> int:
    """Successes among trial indices [lo, hi). mode is 'certificate' or
    'full'.

    A trial that trips the event cap counts as a failure: a runaway cascade
    did not converge within its budget, and curves with positive advance
    everywhere can legitimately produce one on dense graphs.
    """
    if mode not in ("certificate", "full"):
        raise ValueError(f"unknown estimator mode {mode!r}")
    n = g.n
    successes = 0
    for idx in range(lo, hi):
        phases = trial_phases(seed, idx, n)
        try:
            if mode == "certificate":
                ok = run_one_period(phases, g, params, engine=engine).granted
            else:
                ok = run_to_synchrony(phases, g, params, max_periods=max_periods,
                                      engine=engine).synced
        except SimulationCapError:
            ok = False
        if ok:
            successes += 1
    return successes


def _count_job(args) -> int:
    g, params, seed, lo, hi, mode, max_periods, engine = args
    return count_successes(g, params, seed, lo, hi, mode, max_periods, engine)


def _estimate(g: Graph, params: ModelParams, plan: TrialPlan, mode: str,
              engine: str = "auto") -> Estimate:
    start = time.perf_counter()
    n_trials = plan.trials
    if plan.jobs == 1:
        successes = count_successes(g, params, plan.seed, 0, n_trials, mode,
                                    plan.max_periods, engine)
    else:
        jobs = min(plan.jobs, n_trials)
        bounds_ = [round(i * n_trials / jobs) for i in range(jobs + 1)]
        chunks = [
            (g, params, plan.seed, lo, hi, mode, plan.max_periods, engine)
            for lo, hi in zip(bounds_, bounds_[1:])
            if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            successes = sum(pool.map(_count_job, chunks))
    lo, hi = wilson_interval(successes, n_trials)
    return Estimate(
        successes=successes,
        trials=n_trials,
        point=successes / n_trials,
        ci_low=lo,
        ci_high=hi,
        wall_time=time.perf_counter() - start,
    )


def estimate_certificate(g: Graph, params: ModelParams, plan: TrialPlan,
                         engine: str = "auto") -> Estimate:
    """P(single-period certificate granted) over random uniform initials."""
    return _estimate(g, params, plan, "certificate", engine)


def estimate_full(g: Graph, params: ModelParams, plan: TrialPlan,
                  engine: str = "auto") -> Estimate:
    """P(exact synchrony within plan.max_periods) over the same trial
    protocol (shared seeds pair trials with estimate_certificate)."""
    return _estimate(g, params, plan, "full", engine)


def analytic_bound_for(prc: Prc, g: Graph, tau: float,
                       kappa: float = 0.01) -> float:
    """Product-form lower bound matched to the curve: the strong-firing
    bound for the SF curve, else the k-signal bound at the curve's minimal
    classified k (0.0 when the curve does not classify)."""
    from .bounds import compute_s

    if isinstance(prc, SfPrc):
        s = compute_s(prc.B, tau)
        if s >= 1.0:
            return 0.0
        return sf_graph_bounds(g, s).product_bound
    B = prc.breakpoint
    if B is None:
        return 0.0
    eta = float(getattr(prc, "eta", 0.0))
    cls = classify_stii(prc, PrcParams(B=B, kappa=kappa, eta=eta, tau=tau))
    if cls is None:
        return 0.0
    s = compute_s(B, tau)
    if s + cls.eta >= 1.0:
        return 0.0
    q = ready_probability(s, cls.eta)
    return stii_graph_bound(g, q, cls.k).product_bound


@dataclass(frozen=True)
class SweepRow:
    radius: float
    graph_seed: int
    prc_label: str
    analytic_bound: float
    cert: Estimate
    full: Estimate

    def csv_fields(self) -> List[str]:
        return [
            repr(self.radius),
            str(self.graph_seed),
            self.prc_label,
            repr(self.analytic_bound),
            repr(self.cert.point),
            repr(self.cert.ci_low),
            repr(self.cert.ci_high),
            repr(self.full.point),
            repr(self.full.ci_low),
            repr(self.full.ci_high),
            f"{self.cert.trials}/{self.full.trials}",
        ]


SWEEP_CSV_HEADER = ("radius,graph_seed,prc,analytic_bound,"
                    "cert_point,cert_lo,cert_hi,full_point,full_lo,full_hi,trials")


def sweep_radius(n: int, dim: int, radii: Sequence[float], prcs: Sequence[Prc],
                 tau: float, plan: TrialPlan, full_trials: Optional[int] = None,
                 replicates: int = 1, rho0: Optional[float] = None,
                 engine: str = "auto") -> List[SweepRow]:
    """Certificate + full estimates across a geometric-graph radius sweep.

    One fresh graph per (radius, replicate), shared by all curves so the
    curves are compared on identical instances. Trial seeds are derived per
    row from plan.seed; graph seeds are plan.seed*1000 + replicate, recorded
    in each row for replay.
    """
    if not radii:
        raise ValueError("need at least one radius")
    if not prcs:
        raise ValueError("need at least one curve")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    n_full = full_trials if full_trials is not None else plan.trials
    rows: List[SweepRow] = []
    row_idx = 0
    for radius in radii:
        for rep in range(replicates):
            graph_seed = plan.seed * 1000 + rep
            g = generate_rgg(RggSpec(n=n, dim=dim, radius=radius), seed=graph_seed)
            for prc in prcs:
                params = ModelParams(tau=tau, prc=prc, rho0=rho0)
                bound = analytic_bound_for(prc, g, tau)
                row_seed = plan.seed + 7919 * (row_idx + 1)
                cert = estimate_certificate(
                    g, params,
                    TrialPlan(trials=plan.trials, seed=row_seed,
                              max_periods=plan.max_periods, jobs=plan.jobs),
                    engine=engine,
                )
                full = estimate_full(
                    g, params,
                    TrialPlan(trials=n_full, seed=row_seed,
                              max_periods=plan.max_periods, jobs=plan.jobs),
                    engine=engine,
                )
                rows.append(SweepRow(radius=radius, graph_seed=graph_seed,
                                     prc_label=prc.label, analytic_bound=bound,
                                     cert=cert, full=full))
                row_idx += 1
    return rows


def save_sweep_csv(rows: Sequence[SweepRow], path: str,
                   header_comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        fh.write(SWEEP_CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(row.csv_fields()) + "\n")


QUANTILE_CSV_HEADER = "t,mean,q25,q50,q75"


def sample_grid(sample_dt: float, horizon: float) -> List[float]:
    if sample_dt <= 0.0:
        raise ValueError(f"sample_dt must be positive, got {sample_dt}")
    count = int(math.floor(horizon / sample_dt + 1e-12)) + 1
    return [i * sample_dt for i in range(count)]


def spread_matrix(g: Graph, params: ModelParams, plan: TrialPlan,
                  times: Sequence[float], engine: str = "auto") -> np.ndarray:
    """trials x len(times) matrix of circular spreads, one row per trial."""
    mat = np.empty((plan.trials, len(times)), dtype=np.float64)
    for idx in range(plan.trials):
        phases = trial_phases(plan.seed, idx, g.n)
        mat[idx, :] = sample_spreads(phases, g, params, times, engine=engine)
    return mat


def quantile_rows(times: Sequence[float], mat: np.ndarray
                  ) -> List[Tuple[float, float, float, float, float]]:
    mean = mat.mean(axis=0)
    q25, q50, q75 = np.percentile(mat, [25.0, 50.0, 75.0], axis=0)
    return [(times[i], float(mean[i]), float(q25[i]), float(q50[i]), float(q75[i]))
            for i in range(len(times))]


def trajectory_quantiles(g: Graph, params: ModelParams, plan: TrialPlan,
                         sample_dt: float, t_end: Optional[float] = None,
                         engine: str = "auto") -> List[Tuple[float, float, float, float, float]]:
    """Spread statistics over trials at t = 0, dt, 2dt, ...: rows
    (t, mean, q25, q50, q75)."""
    horizon = t_end if t_end is not None else plan.max_periods
    times = sample_grid(sample_dt, horizon)
    mat = spread_matrix(g, params, plan, times, engine=engine)
    return quantile_rows(times, mat)


def save_quantiles_csv(rows: Sequence[Tuple[float, float, float, float, float]],
                       path: str, header_comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        fh.write(QUANTILE_CSV_HEADER + "\n")
        for t, mean, q25, q50, q75 in rows:
            fh.write(f"{t:.17g},{mean:.17g},{q25:.17g},{q50:.17g},{q75:.17g}\n")
