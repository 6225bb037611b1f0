"""Handlers: one plain function per endpoint, request model in, response
model out. All validation errors surface as ValueError (the app maps them
to 400, the CLI to exit code 2)."""

from __future__ import annotations

import warnings
from typing import List, Optional

from .. import bounds as bounds_mod
from ..graph import validate_structure
from ..mc import (
    Estimate,
    TrialPlan,
    analytic_bound_for,
    estimate_certificate,
    estimate_full,
    quantile_rows,
    sample_grid,
    spread_matrix,
    sweep_radius,
    trial_phases,
)
from ..prc import PrcParams, classify_stii, is_stii
from ..sim import run_one_period, run_to_synchrony, run_until, sample_spreads
from .models import (
    BoundReportModel,
    BoundRequest,
    BoundResponse,
    ClassifyRequest,
    ClassifyResponse,
    DegreeBound,
    DeltaNResult,
    EstimateModel,
    EstimateRequest,
    EstimateResponse,
    EventRow,
    GenGraphRequest,
    GenGraphResponse,
    QuantileRow,
    RggThresholdResult,
    SimulateRequest,
    SimulateResponse,
    SimulateSummary,
    StructureModel,
    SweepRequest,
    SweepResponse,
    SweepRowModel,
    TrajectorySample,
)


def _estimate_model(est: Estimate) -> EstimateModel:
    return EstimateModel(successes=est.successes, trials=est.trials,
                         point=est.point, ci_low=est.ci_low, ci_high=est.ci_high)


def handle_simulate(req: SimulateRequest) -> SimulateResponse:
    if req.trials < 1:
        raise ValueError(f"trials must be >= 1, got {req.trials}")
    g = req.graph.build(req.seed)
    prc = req.prc.to_prc()
    params = req.model.build(prc)
    if req.quantiles:
        times = sample_grid(req.sample_dt, req.max_periods)
        plan = TrialPlan(trials=req.trials, seed=req.seed,
                         max_periods=req.max_periods)
        mat = spread_matrix(g, params, plan, times, engine=req.engine)
        rows = quantile_rows(times, mat)
        synced_fraction = float((mat[:, -1] <= params.sync_eps).mean())
        last = rows[-1]
        summary = SimulateSummary(
            mode="quantiles", trials=req.trials,
            synced_fraction=synced_fraction, final_spread=last[1],
        )
        return SimulateResponse(
            summary=summary,
            quantiles=[QuantileRow(t=r[0], mean=r[1], q25=r[2], q50=r[3], q75=r[4])
                       for r in rows],
        )
    phases = trial_phases(req.seed, 0, g.n)
    times = sample_grid(req.sample_dt, req.max_periods)
    spreads = sample_spreads(phases, g, params, times, engine=req.engine)
    outcome = run_to_synchrony(phases, g, params, max_periods=req.max_periods,
                               engine=req.engine)
    cert = run_one_period(phases, g, params, engine=req.engine)
    events: Optional[List[EventRow]] = None
    if req.record_events:
        horizon = outcome.periods_used if outcome.synced else req.max_periods
        state = run_until(phases, g, params, t_end=horizon, record_log=True,
                          engine="reference")
        events = [EventRow(t=t, kind=kind, node=node, src=src)
                  for (t, kind, node, src) in (state.log or ())]
    summary = SimulateSummary(
        mode="trajectory", trials=1, synced=outcome.synced,
        periods_used=outcome.periods_used, final_spread=outcome.spread,
        certificate_granted=cert.granted,
        certificate_time=cert.time if cert.granted else None,
    )
    return SimulateResponse(
        summary=summary,
        trajectory=[TrajectorySample(t=t, spread=sp)
                    for t, sp in zip(times, spreads)],
        events=events,
    )


def handle_estimate(req: EstimateRequest) -> EstimateResponse:
    g = req.graph.build(req.seed)
    prc = req.prc.to_prc()
    params = req.model.build(prc)
    plan = TrialPlan(trials=req.trials, seed=req.seed,
                     max_periods=req.max_periods, jobs=req.jobs)
    if req.estimator == "certificate":
        est = estimate_certificate(g, params, plan, engine=req.engine)
    else:
        est = estimate_full(g, params, plan, engine=req.engine)
    return EstimateResponse(estimator=req.estimator, estimate=_estimate_model(est))


def handle_bound(req: BoundRequest) -> BoundResponse:
    resp = BoundResponse()
    s = req.s
    if s is None and req.B is not None and req.tau is not None:
        s = bounds_mod.compute_s(req.B, req.tau)
    resp.s = s
    if s is not None and s >= 1.0:
        resp.warnings.append(
            f"s = {s} >= 1: the collapse window vanishes and graph bounds are vacuous"
        )
    if req.graph is not None:
        if s is None:
            raise ValueError("graph bounds need either s or both B and tau")
        g = req.graph.build(req.seed)
        if 0.0 < s < 1.0:
            resp.sf = BoundReportModel.from_report(bounds_mod.sf_graph_bounds(g, s))
            if req.k is not None:
                q = req.q
                if q is None:
                    if s + req.eta >= 1.0:
                        resp.warnings.append(
                            f"s + eta = {s + req.eta} >= 1: no default q; "
                            "k-signal bound skipped"
                        )
                    else:
                        q = bounds_mod.ready_probability(s, req.eta)
                if q is not None:
                    resp.stii = BoundReportModel.from_report(
                        bounds_mod.stii_graph_bound(g, q, req.k))
    if req.delta_n is not None:
        if s is None:
            raise ValueError("delta_n needs either s or both B and tau")
        value = bounds_mod.delta_n(req.delta_n.p, s, req.delta_n.n)
        const, log_coef = bounds_mod.delta_n_coefficients(req.delta_n.p, s)
        resp.delta_n = DeltaNResult(p=req.delta_n.p, n=req.delta_n.n, s=s,
                                    value=value, coeff_const=const,
                                    coeff_log=log_coef)
    if req.rgg_threshold is not None:
        if s is None:
            raise ValueError("rgg threshold needs either s or both B and tau")
        c = bounds_mod.rgg_c_threshold(s)
        residual = bounds_mod.rgg_threshold_residual(c, s)
        result = RggThresholdResult(s=s, c=c, residual=residual,
                                    n=req.rgg_threshold.n, dim=req.rgg_threshold.dim)
        if req.rgg_threshold.n is not None and req.rgg_threshold.dim is not None:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                result.r = bounds_mod.rgg_radius_for_c(
                    req.rgg_threshold.n, req.rgg_threshold.dim, c)
            resp.warnings.extend(str(w.message) for w in caught)
        resp.rgg_threshold = result
    if resp.sf is None and resp.delta_n is None and resp.rgg_threshold is None \
            and not resp.warnings:
        raise ValueError("bound request selects nothing: give a graph, "
                         "a delta_n query, or an rgg_threshold query")
    return resp


def handle_classify(req: ClassifyRequest) -> ClassifyResponse:
    prc = req.prc.to_prc()
    B = req.B if req.B is not None else prc.breakpoint
    if B is None:
        raise ValueError("classification needs a breakpoint B (curve has none; "
                         "pass B explicitly)")
    params = PrcParams(B=B, kappa=req.kappa, eta=req.eta, tau=req.tau)
    member = is_stii(prc, params, grid=req.grid)
    resp = ClassifyResponse(label=prc.label, is_stii=member)
    if not member:
        return resp
    cls = classify_stii(prc, params, h_max=req.h_max, m_max=req.m_max,
                        grid=req.grid)
    if cls is None:
        resp.warnings.append(
            f"curve passes the membership test but no (h <= {req.h_max}, "
            f"m <= {req.m_max}) classification was found"
        )
        return resp
    resp.h, resp.m, resp.k, resp.eta = cls.h, cls.m, cls.k, cls.eta
    s = bounds_mod.compute_s(B, req.tau)
    if s + cls.eta < 1.0:
        q = bounds_mod.ready_probability(s, cls.eta)
        resp.q = q
        degrees = req.degrees if req.degrees else list(range(1, 41))
        resp.degree_bounds = [
            DegreeBound(d=d, bound=bounds_mod.stii_node_bound(d, q, cls.k))
            for d in degrees
        ]
    else:
        resp.warnings.append(
            f"s + eta = {s + cls.eta} >= 1: per-degree bounds are vacuous"
        )
    return resp


def handle_sweep(req: SweepRequest) -> SweepResponse:
    plan = TrialPlan(trials=req.trials, seed=req.seed,
                     max_periods=req.max_periods, jobs=req.jobs)
    prcs = [spec.to_prc() for spec in req.prcs]
    rows = sweep_radius(req.n, req.dim, req.radii, prcs, req.tau, plan,
                        full_trials=req.full_trials, replicates=req.replicates,
                        rho0=req.rho0, engine=req.engine)
    return SweepResponse(rows=[
        SweepRowModel(radius=r.radius, graph_seed=r.graph_seed, prc=r.prc_label,
                      analytic_bound=r.analytic_bound,
                      cert=_estimate_model(r.cert), full=_estimate_model(r.full))
        for r in rows
    ])


def handle_gen_graph(req: GenGraphRequest) -> GenGraphResponse:
    g = req.graph.build(req.seed)
    rep = validate_structure(g)
    return GenGraphResponse(
        n=g.n,
        m=g.m,
        edges=[(s, d, w) for (s, d, w) in g.edges],
        structure=StructureModel(strongly_connected=rep.strongly_connected,
                                 aperiodic=rep.aperiodic,
                                 scc_count=rep.scc_count),
        meta=g.meta,
    )


def handle_analytic_bound(prc_spec, graph_spec, tau: float, seed: int = 0) -> float:
    """Convenience used by tests: the sweep's per-curve analytic bound."""
    g = graph_spec.build(seed)
    return analytic_bound_for(prc_spec.to_prc(), g, tau)
