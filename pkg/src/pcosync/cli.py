"""Command-line surface.

Subcommands: simulate | estimate | bound | classify | sweep | gen-graph,
plus serve (HTTP app). Each command builds a request model, executes it via
the in-process handlers (or POSTs it to --server when given), and writes
CSV/JSON outputs. Every output embeds the resolved config: CSV files carry
a leading `# config: {...}` comment line, JSON documents a "config" key, so
a result file can always be regenerated.

Option precedence: command-line flag, then --config file key, then default.
Exit codes: 0 success, 2 usage or validation, 3 runtime failure (safety
cap, solver, server error).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click
import pydantic

from .graph import load_edge_list, save_edge_list, save_rgg_meta
from .prc import load_prc_table
from .sim import EVENT_ARRIVE, EVENT_FIRE, EVENT_RESET, SimulationCapError  # noqa: F401
from .mc import QUANTILE_CSV_HEADER, SWEEP_CSV_HEADER
from .service import handlers
from .service.models import (
    BoundRequest,
    BoundResponse,
    ClassifyRequest,
    ClassifyResponse,
    DeltaNQuery,
    EstimateRequest,
    EstimateResponse,
    GenGraphRequest,
    GenGraphResponse,
    GraphSpec,
    ModelSpec,
    PrcSpec,
    RggThresholdQuery,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
)

_ENDPOINTS = {
    SimulateRequest: ("/simulate", SimulateResponse, handlers.handle_simulate),
    EstimateRequest: ("/estimate", EstimateResponse, handlers.handle_estimate),
    BoundRequest: ("/bound", BoundResponse, handlers.handle_bound),
    ClassifyRequest: ("/classify", ClassifyResponse, handlers.handle_classify),
    SweepRequest: ("/sweep", SweepResponse, handlers.handle_sweep),
    GenGraphRequest: ("/gen-graph", GenGraphResponse, handlers.handle_gen_graph),
}


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _execute(req, server: Optional[str]):
    """Run a request in-process, or against a remote server when given."""
    path, resp_model, handler = _ENDPOINTS[type(req)]
    if server is None:
        try:
            return handler(req)
        except (ValueError, pydantic.ValidationError) as exc:
            _fail(2, str(exc))
        except (SimulationCapError, RuntimeError) as exc:
            _fail(3, str(exc))
    import httpx

    url = server.rstrip("/") + path
    try:
        r = httpx.post(url, json=req.model_dump(mode="json"), timeout=None)
    except httpx.HTTPError as exc:
        _fail(3, f"request to {url} failed: {exc}")
    if r.status_code in (400, 422):
        _fail(2, f"server rejected request: {r.text}")
    if r.status_code != 200:
        _fail(3, f"server error {r.status_code}: {r.text}")
    return resp_model.model_validate(r.json())


class _Resolver:
    """Flag > config-file key > default, recording every resolved value so
    outputs can embed the full effective config."""

    def __init__(self, config_path: Optional[str]):
        self.cfg = {}
        if config_path:
            try:
                with open(config_path) as fh:
                    self.cfg = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise click.UsageError(f"cannot read config {config_path}: {exc}")
            if not isinstance(self.cfg, dict):
                raise click.UsageError(f"config {config_path} must hold a JSON object")
        self.resolved = {}

    def get(self, name, flag_val, default=None, required=False):
        val = flag_val if flag_val is not None else self.cfg.get(name, default)
        if required and val is None:
            raise click.UsageError(
                f"missing required option --{name.replace('_', '-')} "
                f"(or config key {name!r})")
        self.resolved[name] = val
        return val

    def flag(self, name, flag_val) -> bool:
        val = bool(flag_val) or bool(self.cfg.get(name, False))
        self.resolved[name] = val
        return val

    def path(self, name, flag_val):
        """Resolve an output destination without recording it: where a file
        lands does not affect its contents, and the embedded config must be
        identical for identical data."""
        return flag_val if flag_val is not None else self.cfg.get(name)


def _config_comment(resolved: dict) -> str:
    return "config: " + json.dumps(resolved, sort_keys=True)


def _parse_kv(body: str, spec: str) -> dict:
    out = {}
    if not body:
        return out
    for part in body.split(","):
        if "=" not in part:
            raise click.UsageError(f"bad spec {spec!r}: expected key=value, got {part!r}")
        key, val = part.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _parse_graph_spec(spec: str, default_seed: int) -> GraphSpec:
    """complete:n=K | er:n=..,p=..[,seed=..] | rgg:n=..,dim=..,r=..[,seed=..]
    | file:PATH"""
    kind, _, body = spec.partition(":")
    try:
        if kind == "complete":
            kv = _parse_kv(body, spec)
            return GraphSpec(kind="complete", n=int(kv["n"]))
        if kind == "er":
            kv = _parse_kv(body, spec)
            return GraphSpec(kind="er", n=int(kv["n"]), p=float(kv["p"]),
                             seed=int(kv.get("seed", default_seed)))
        if kind == "rgg":
            kv = _parse_kv(body, spec)
            return GraphSpec(kind="rgg", n=int(kv["n"]), dim=int(kv["dim"]),
                             r=float(kv["r"]), seed=int(kv.get("seed", default_seed)))
        if kind == "file":
            if not body:
                raise click.UsageError(f"bad graph spec {spec!r}: file: needs a path")
            g = load_edge_list(body)
            return GraphSpec(kind="edges", n=g.n,
                             edges=[(s, d, w) for (s, d, w) in g.edges])
    except KeyError as exc:
        raise click.UsageError(f"graph spec {spec!r} missing key {exc}")
    except ValueError as exc:
        raise click.UsageError(f"bad graph spec {spec!r}: {exc}")
    raise click.UsageError(
        f"unknown graph spec kind {kind!r} (use complete:|er:|rgg:|file:)")


def _parse_prc_spec(spec: str) -> PrcSpec:
    """sf[:B=..] | stii:h=..,m=..[,B=..,eta=..,inhibit_margin=..,
    excite_margin=..] | charging[:b=..,eps=..] | table:PATH | config:PATH"""
    kind, _, body = spec.partition(":")
    try:
        if kind == "sf":
            kv = _parse_kv(body, spec)
            return PrcSpec(family="sf", B=float(kv.get("B", 0.55)))
        if kind == "stii":
            kv = _parse_kv(body, spec)
            return PrcSpec(
                family="stii_synthetic",
                B=float(kv.get("B", 0.55)),
                h=int(kv["h"]),
                m=int(kv["m"]),
                eta=float(kv.get("eta", 0.0)),
                inhibit_margin=float(kv.get("inhibit_margin", kv.get("im", 0.01))),
                excite_margin=float(kv.get("excite_margin", kv.get("em", 0.01))),
            )
        if kind == "charging":
            kv = _parse_kv(body, spec)
            return PrcSpec(family="charging", b=float(kv.get("b", 3.0)),
                           eps=float(kv.get("eps", 0.05)))
        if kind == "table":
            if not body:
                raise click.UsageError(f"bad prc spec {spec!r}: table: needs a path")
            prc = load_prc_table(body)
            return PrcSpec(family="table",
                           points=[(x, y) for x, y in zip(prc.xs, prc.ys)])
        if kind == "config":
            if not body:
                raise click.UsageError(f"bad prc spec {spec!r}: config: needs a path")
            with open(body) as fh:
                return PrcSpec.model_validate(json.load(fh))
    except KeyError as exc:
        raise click.UsageError(f"prc spec {spec!r} missing key {exc}")
    except (ValueError, OSError, pydantic.ValidationError) as exc:
        raise click.UsageError(f"bad prc spec {spec!r}: {exc}")
    raise click.UsageError(
        f"unknown prc spec kind {kind!r} (use sf|stii:|charging|table:|config:)")


def _parse_radii(text: str) -> list:
    """Comma list `0.06,0.08` or inclusive range `lo:hi:step`."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise click.UsageError(f"bad radii range {text!r}: expected lo:hi:step")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise click.UsageError(f"bad radii range {text!r}")
        out = []
        k = 0
        while True:
            r = lo + k * step
            if r > hi + 1e-12:
                break
            out.append(round(r, 12))
            k += 1
        return out
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad radii list {text!r}: {exc}")


def _write_json(out: Optional[str], payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _write_lines(out: Optional[str], lines) -> None:
    text = "".join(line + "\n" for line in lines)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _model_json(model) -> dict:
    return json.loads(model.model_dump_json())


# ---------------------------------------------------------------------------

@click.group()
@click.version_option(package_name="artifact", prog_name="pcosync")
def main():
    """Pulse-coupled oscillator synchronization: simulation, certification,
    and analytic convergence bounds."""


_graph_opt = click.option("--graph", "graph_spec", default=None,
                          help="complete:n=.. | er:n=..,p=.. | rgg:n=..,dim=..,r=.. | file:PATH")
_prc_opt = click.option("--prc", "prc_spec", default=None,
                        help="sf | stii:h=..,m=.. | charging | table:PATH | config:PATH")
_seed_opt = click.option("--seed", type=int, default=None, help="master seed (default 0)")
_out_opt = click.option("--out", default=None, help="output file (default stdout)")
_config_opt = click.option("--config", "config_path", default=None,
                           help="JSON file with default option values")
_server_opt = click.option("--server", default=None,
                           help="base URL of a running service; POST instead of running in-process")
_jobs_opt = click.option("--jobs", type=int, default=None,
                         help="parallel trial workers (default 1)")
_engine_opt = click.option("--engine", default=None,
                           type=click.Choice(["auto", "reference", "fast"]),
                           help="simulation engine (default auto)")


def _model_opts(res: _Resolver, tau, B, rho0, sync_eps, use_weights) -> ModelSpec:
    tau = res.get("tau", tau, required=True)
    return ModelSpec(
        tau=float(tau),
        B=res.get("B", B),
        rho0=res.get("rho0", rho0),
        sync_eps=float(res.get("sync_eps", sync_eps, default=1e-9)),
        use_weights=res.flag("use_weights", use_weights),
    )


@main.command()
@_graph_opt
@_prc_opt
@click.option("--tau", type=float, default=None, help="pulse transmission delay")
@click.option("--B", "B", type=float, default=None, help="breakpoint override")
@click.option("--rho0", type=float, default=None, help="critical range override")
@click.option("--sync-eps", type=float, default=None)
@click.option("--use-weights", is_flag=True, default=False)
@click.option("--trials", type=int, default=None, help="ensemble size (default 1)")
@click.option("--quantiles", is_flag=True, default=False,
              help="emit spread quantiles over the ensemble instead of one trajectory")
@click.option("--sample-dt", type=float, default=None, help="sampling step (default 0.25)")
@click.option("--max-periods", type=float, default=None, help="horizon (default 50)")
@click.option("--log-events", default=None,
              help="write the event log CSV here (single-trajectory only)")
@_seed_opt
@_out_opt
@_engine_opt
@_config_opt
@_server_opt
def simulate(graph_spec, prc_spec, tau, B, rho0, sync_eps, use_weights, trials,
             quantiles, sample_dt, max_periods, log_events, seed, out, engine,
             config_path, server):
    """Run one trajectory (spread samples + outcome) or a quantile ensemble."""
    res = _Resolver(config_path)
    seed = int(res.get("seed", seed, default=0))
    graph_spec = res.get("graph", graph_spec, required=True)
    prc_spec = res.get("prc", prc_spec, required=True)
    model = _model_opts(res, tau, B, rho0, sync_eps, use_weights)
    trials = int(res.get("trials", trials, default=1))
    quantiles = res.flag("quantiles", quantiles)
    sample_dt = float(res.get("sample_dt", sample_dt, default=0.25))
    max_periods = float(res.get("max_periods", max_periods, default=50.0))
    log_events = res.path("log_events", log_events)
    engine = res.get("engine", engine, default="auto")
    out = res.path("out", out)
    if quantiles and log_events:
        raise click.UsageError("--log-events needs a single trajectory, not --quantiles")
    try:
        req = SimulateRequest(
            graph=_parse_graph_spec(graph_spec, seed),
            prc=_parse_prc_spec(prc_spec),
            model=model,
            seed=seed,
            trials=trials,
            quantiles=quantiles,
            sample_dt=sample_dt,
            max_periods=max_periods,
            record_events=bool(log_events),
            engine=engine,
        )
    except pydantic.ValidationError as exc:
        _fail(2, str(exc))
    resp = _execute(req, server)
    comment = _config_comment(res.resolved)
    summary = {"config": res.resolved, "summary": _model_json(resp.summary)}
    if resp.quantiles is not None:
        lines = [f"# {comment}", QUANTILE_CSV_HEADER]
        lines += [f"{r.t:.17g},{r.mean:.17g},{r.q25:.17g},{r.q50:.17g},{r.q75:.17g}"
                  for r in resp.quantiles]
    else:
        lines = [f"# {comment}", "t,spread"]
        lines += [f"{r.t:.17g},{r.spread:.17g}" for r in (resp.trajectory or [])]
    if out:
        _write_lines(out, lines)
        _write_json(str(Path(out).with_suffix(".summary.json")), summary)
    else:
        _write_json(None, summary)
    if log_events and resp.events is not None:
        ev_lines = [f"# {comment}", "t,kind,node,src"]
        ev_lines += [f"{e.t:.17g},{e.kind},{e.node},{e.src}" for e in resp.events]
        _write_lines(log_events, ev_lines)


@main.command()
@_graph_opt
@_prc_opt
@click.option("--estimator", type=click.Choice(["certificate", "full"]), default=None)
@click.option("--trials", type=int, default=None)
@click.option("--tau", type=float, default=None)
@click.option("--B", "B", type=float, default=None)
@click.option("--rho0", type=float, default=None)
@click.option("--sync-eps", type=float, default=None)
@click.option("--use-weights", is_flag=True, default=False)
@click.option("--max-periods", type=float, default=None)
@_seed_opt
@_out_opt
@_jobs_opt
@_engine_opt
@_config_opt
@_server_opt
def estimate(graph_spec, prc_spec, estimator, trials, tau, B, rho0, sync_eps,
             use_weights, max_periods, seed, out, jobs, engine, config_path,
             server):
    """Monte Carlo convergence probability with a 95% Wilson interval."""
    res = _Resolver(config_path)
    seed = int(res.get("seed", seed, default=0))
    graph_spec = res.get("graph", graph_spec, required=True)
    prc_spec = res.get("prc", prc_spec, required=True)
    estimator = res.get("estimator", estimator, required=True)
    trials = res.get("trials", trials, required=True)
    model = _model_opts(res, tau, B, rho0, sync_eps, use_weights)
    max_periods = float(res.get("max_periods", max_periods, default=50.0))
    jobs = int(res.get("jobs", jobs, default=1))
    engine = res.get("engine", engine, default="auto")
    out = res.path("out", out)
    try:
        req = EstimateRequest(
            graph=_parse_graph_spec(graph_spec, seed),
            prc=_parse_prc_spec(prc_spec),
            model=model,
            estimator=estimator,
            trials=int(trials),
            seed=seed,
            max_periods=max_periods,
            jobs=jobs,
            engine=engine,
        )
    except pydantic.ValidationError as exc:
        _fail(2, str(exc))
    resp = _execute(req, server)
    payload = {"config": res.resolved}
    payload.update(_model_json(resp))
    _write_json(out, payload)


@main.command()
@_graph_opt
@click.option("--B", "B", type=float, default=None)
@click.option("--tau", type=float, default=None)
@click.option("--s", "s_val", type=float, default=None, help="window complement override")
@click.option("--k", type=int, default=None, help="required signal count for the k-signal bound")
@click.option("--q", type=float, default=None, help="per-neighbor ready probability")
@click.option("--eta", type=float, default=None)
@click.option("--delta-n", "delta_n_flag", is_flag=True, default=False,
              help="compute the minimum-indegree law at --p, --n")
@click.option("--p", type=float, default=None, help="target probability for --delta-n")
@click.option("--n", "n_val", type=int, default=None)
@click.option("--dim", type=int, default=None)
@click.option("--rgg-threshold", "rgg_flag", is_flag=True, default=False,
              help="solve the geometric-graph threshold constant (and radius with --n/--dim)")
@_seed_opt
@_out_opt
@_config_opt
@_server_opt
def bound(graph_spec, B, tau, s_val, k, q, eta, delta_n_flag, p, n_val, dim,
          rgg_flag, seed, out, config_path, server):
    """Closed-form lower bounds: per-node/graph aggregates, degree law,
    geometric threshold."""
    res = _Resolver(config_path)
    seed = int(res.get("seed", seed, default=0))
    graph_spec = res.get("graph", graph_spec)
    B = res.get("B", B)
    tau = res.get("tau", tau)
    s_val = res.get("s", s_val)
    k = res.get("k", k)
    q = res.get("q", q)
    eta = float(res.get("eta", eta, default=0.0))
    delta_n_flag = res.flag("delta_n", delta_n_flag)
    rgg_flag = res.flag("rgg_threshold", rgg_flag)
    p = res.get("p", p)
    n_val = res.get("n", n_val)
    dim = res.get("dim", dim)
    out = res.path("out", out)
    dn = None
    if delta_n_flag:
        if p is None or n_val is None:
            raise click.UsageError("--delta-n needs --p and --n")
        dn = DeltaNQuery(p=float(p), n=int(n_val))
    rgg = None
    if rgg_flag:
        rgg = RggThresholdQuery(n=int(n_val) if n_val is not None else None,
                                dim=int(dim) if dim is not None else None)
    try:
        req = BoundRequest(
            graph=_parse_graph_spec(graph_spec, seed) if graph_spec else None,
            seed=seed,
            B=float(B) if B is not None else None,
            tau=float(tau) if tau is not None else None,
            s=float(s_val) if s_val is not None else None,
            k=int(k) if k is not None else None,
            q=float(q) if q is not None else None,
            eta=eta,
            delta_n=dn,
            rgg_threshold=rgg,
        )
    except pydantic.ValidationError as exc:
        _fail(2, str(exc))
    resp = _execute(req, server)
    payload = {"config": res.resolved}
    payload.update(_model_json(resp))
    _write_json(out, payload)


@main.command()
@_prc_opt
@click.option("--B", "B", type=float, default=None)
@click.option("--kappa", type=float, default=None, help="inhibition margin (default 0.01)")
@click.option("--eta", type=float, default=None)
@click.option("--tau", type=float, default=None, help="delay used in membership (default 0)")
@click.option("--h-max", type=int, default=None)
@click.option("--m-max", type=int, default=None)
@click.option("--grid", type=int, default=None)
@click.option("--degrees", default=None, help="comma list for the per-degree bound table")
@_out_opt
@_config_opt
@_server_opt
def classify(prc_spec, B, kappa, eta, tau, h_max, m_max, grid, degrees, out,
             config_path, server):
    """Type II membership and minimal (h, m, k) classification of a curve."""
    res = _Resolver(config_path)
    prc_spec = res.get("prc", prc_spec, required=True)
    degrees_val = res.get("degrees", degrees)
    if isinstance(degrees_val, str):
        try:
            degrees_val = [int(v) for v in degrees_val.split(",") if v.strip()]
        except ValueError as exc:
            raise click.UsageError(f"bad --degrees: {exc}")
    try:
        req = ClassifyRequest(
            prc=_parse_prc_spec(prc_spec),
            B=res.get("B", B),
            kappa=float(res.get("kappa", kappa, default=0.01)),
            eta=float(res.get("eta", eta, default=0.0)),
            tau=float(res.get("tau", tau, default=0.0)),
            h_max=int(res.get("h_max", h_max, default=8)),
            m_max=int(res.get("m_max", m_max, default=8)),
            grid=int(res.get("grid", grid, default=10000)),
            degrees=degrees_val,
        )
    except pydantic.ValidationError as exc:
        _fail(2, str(exc))
    out = res.path("out", out)
    resp = _execute(req, server)
    payload = {"config": res.resolved}
    payload.update(_model_json(resp))
    _write_json(out, payload)


@main.command()
@click.option("--n", "n_val", type=int, default=None, help="nodes per graph")
@click.option("--dim", type=int, default=None, help="torus dimension (default 2)")
@click.option("--radii", default=None, help="comma list or lo:hi:step range")
@click.option("--prc", "prc_specs", multiple=True,
              help="curve spec; repeat for several curves")
@click.option("--tau", type=float, default=None)
@click.option("--trials", type=int, default=None, help="certificate trials per row")
@click.option("--full-trials", type=int, default=None,
              help="full-run trials per row (default: same as --trials)")
@click.option("--replicates", type=int, default=None, help="graphs per radius (default 1)")
@click.option("--max-periods", type=float, default=None)
@click.option("--rho0", type=float, default=None)
@_seed_opt
@_out_opt
@_jobs_opt
@_engine_opt
@_config_opt
@_server_opt
def sweep(n_val, dim, radii, prc_specs, tau, trials, full_trials, replicates,
          max_periods, rho0, seed, out, jobs, engine, config_path, server):
    """Certificate/full estimates and analytic bounds across a radius sweep."""
    res = _Resolver(config_path)
    seed = int(res.get("seed", seed, default=0))
    n_val = res.get("n", n_val, required=True)
    dim = int(res.get("dim", dim, default=2))
    radii = res.get("radii", radii, required=True)
    if isinstance(radii, str):
        radii = _parse_radii(radii)
    if not radii:
        raise click.UsageError("radius list is empty")
    prc_list = list(prc_specs) or res.cfg.get("prcs") or []
    res.resolved["prcs"] = prc_list
    if not prc_list:
        raise click.UsageError("need at least one --prc")
    trials = res.get("trials", trials, required=True)
    full_trials = res.get("full_trials", full_trials)
    replicates = int(res.get("replicates", replicates, default=1))
    max_periods = float(res.get("max_periods", max_periods, default=50.0))
    rho0 = res.get("rho0", rho0)
    jobs = int(res.get("jobs", jobs, default=1))
    engine = res.get("engine", engine, default="auto")
    tau = float(res.get("tau", tau, required=True))
    out = res.path("out", out)
    try:
        req = SweepRequest(
            n=int(n_val),
            dim=dim,
            radii=[float(r) for r in radii],
            prcs=[_parse_prc_spec(s) if isinstance(s, str) else PrcSpec.model_validate(s)
                  for s in prc_list],
            tau=tau,
            trials=int(trials),
            full_trials=int(full_trials) if full_trials is not None else None,
            seed=seed,
            max_periods=max_periods,
            replicates=replicates,
            rho0=float(rho0) if rho0 is not None else None,
            jobs=jobs,
            engine=engine,
        )
    except pydantic.ValidationError as exc:
        _fail(2, str(exc))
    resp = _execute(req, server)
    lines = [f"# {_config_comment(res.resolved)}", SWEEP_CSV_HEADER]
    for r in resp.rows:
        lines.append(",".join([
            repr(r.radius), str(r.graph_seed), r.prc, repr(r.analytic_bound),
            repr(r.cert.point), repr(r.cert.ci_low), repr(r.cert.ci_high),
            repr(r.full.point), repr(r.full.ci_low), repr(r.full.ci_high),
            f"{r.cert.trials}/{r.full.trials}",
        ]))
    _write_lines(out, lines)


@main.command(name="gen-graph")
@_graph_opt
@click.option("--meta-out", default=None,
              help="write generator metadata JSON (positions for rgg)")
@_seed_opt
@_out_opt
@_config_opt
def gen_graph(graph_spec, meta_out, seed, out, config_path):
    """Generate a graph, write its edge list, report structure."""
    res = _Resolver(config_path)
    seed = int(res.get("seed", seed, default=0))
    graph_spec = res.get("graph", graph_spec, required=True)
    meta_out = res.path("meta_out", meta_out)
    out = res.path("out", out)
    spec = _parse_graph_spec(graph_spec, seed)
    try:
        g = spec.build(seed)
    except ValueError as exc:
        _fail(2, str(exc))
    req = GenGraphRequest(graph=spec, seed=seed)
    resp = handlers.handle_gen_graph(req)
    comment = _config_comment(res.resolved)
    if out:
        save_edge_list(g, out, header_comments=[comment])
    if meta_out:
        try:
            save_rgg_meta(g, meta_out)
        except ValueError as exc:
            _fail(2, str(exc))
    payload = {"config": res.resolved, "n": resp.n, "m": resp.m,
               "structure": _model_json(resp.structure)}
    _write_json(None, payload)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
