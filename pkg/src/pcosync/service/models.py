"""Pydantic request/response models shared by the HTTP app and the CLI.

Graphs travel either as generator specs (rebuilt server-side from the seed)
or as inline edge lists; file paths never cross the boundary.
"""

from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .. import bounds as bounds_mod
from ..graph import Graph, RggSpec, complete_graph, generate_er, generate_rgg
from ..prc import Prc, prc_from_config
from ..sim import ModelParams


class GraphSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["complete", "er", "rgg", "edges"]
    n: Optional[int] = None
    p: Optional[float] = None
    dim: Optional[int] = None
    r: Optional[float] = None
    seed: Optional[int] = None
    edges: Optional[List[Tuple[int, int, float]]] = None

    def build(self, default_seed: int = 0) -> Graph:
        seed = self.seed if self.seed is not None else default_seed
        if self.kind == "complete":
            if self.n is None:
                raise ValueError("complete graph needs n")
            return complete_graph(self.n)
        if self.kind == "er":
            if self.n is None or self.p is None:
                raise ValueError("er graph needs n and p")
            return generate_er(self.n, self.p, seed)
        if self.kind == "rgg":
            if self.n is None or self.dim is None or self.r is None:
                raise ValueError("rgg needs n, dim, and r")
            return generate_rgg(RggSpec(n=self.n, dim=self.dim, radius=self.r), seed)
        if self.edges is None:
            raise ValueError("edges graph needs an edge list")
        n = self.n
        if n is None:
            n = 1 + max((max(s, d) for s, d, _ in self.edges), default=-1)
        return Graph(n=n, edges=tuple((s, d, w) for s, d, w in self.edges))


class PrcSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: str
    B: Optional[float] = None
    h: Optional[int] = None
    m: Optional[int] = None
    eta: Optional[float] = None
    inhibit_margin: Optional[float] = None
    excite_margin: Optional[float] = None
    b: Optional[float] = None
    eps: Optional[float] = None
    points: Optional[List[Tuple[float, float]]] = None
    w: Optional[float] = None
    inner: Optional["PrcSpec"] = None

    def to_prc(self) -> Prc:
        def strip(d: Dict[str, Any]) -> Dict[str, Any]:
            return {k: (strip(v) if isinstance(v, dict) else v)
                    for k, v in d.items() if v is not None}

        return prc_from_config(strip(self.model_dump()))

    @classmethod
    def from_prc(cls, prc: Prc) -> "PrcSpec":
        return cls.model_validate(prc.to_config())


class ModelSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tau: float
    B: Optional[float] = None
    rho0: Optional[float] = None
    sync_eps: float = 1e-9
    use_weights: bool = False

    def build(self, prc: Prc) -> ModelParams:
        return ModelParams(tau=self.tau, prc=prc, B=self.B, rho0=self.rho0,
                           sync_eps=self.sync_eps, use_weights=self.use_weights)


class EstimateModel(BaseModel):
    successes: int
    trials: int
    point: float
    ci_low: float
    ci_high: float


class BoundReportModel(BaseModel):
    per_node: List[float]
    union: float
    union_clamped: float
    product: float
    params: Dict[str, float]

    @classmethod
    def from_report(cls, rep: bounds_mod.BoundReport) -> "BoundReportModel":
        return cls(per_node=list(rep.per_node), union=rep.union_bound,
                   union_clamped=rep.union_clamped, product=rep.product_bound,
                   params=dict(rep.params))


class EventRow(BaseModel):
    t: float
    kind: str
    node: int
    src: int


class TrajectorySample(BaseModel):
    t: float
    spread: float


class QuantileRow(BaseModel):
    t: float
    mean: float
    q25: float
    q50: float
    q75: float


# -- simulate ---------------------------------------------------------------

class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graph: GraphSpec
    prc: PrcSpec
    model: ModelSpec
    seed: int = 0
    trials: int = 1
    quantiles: bool = False
    sample_dt: float = 0.25
    max_periods: float = 50.0
    record_events: bool = False
    engine: str = "auto"


class SimulateSummary(BaseModel):
    mode: Literal["trajectory", "quantiles"]
    trials: int
    synced: Optional[bool] = None
    periods_used: Optional[float] = None
    final_spread: Optional[float] = None
    synced_fraction: Optional[float] = None
    certificate_granted: Optional[bool] = None
    certificate_time: Optional[float] = None


class SimulateResponse(BaseModel):
    summary: SimulateSummary
    trajectory: Optional[List[TrajectorySample]] = None
    quantiles: Optional[List[QuantileRow]] = None
    events: Optional[List[EventRow]] = None


# -- estimate ---------------------------------------------------------------

class EstimateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graph: GraphSpec
    prc: PrcSpec
    model: ModelSpec
    estimator: Literal["certificate", "full"]
    trials: int
    seed: int = 0
    max_periods: float = 50.0
    jobs: int = 1
    engine: str = "auto"


class EstimateResponse(BaseModel):
    estimator: str
    estimate: EstimateModel


# -- bound ------------------------------------------------------------------

class DeltaNQuery(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: float
    n: int


class RggThresholdQuery(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: Optional[int] = None
    dim: Optional[int] = None


class BoundRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graph: Optional[GraphSpec] = None
    seed: int = 0
    B: Optional[float] = None
    tau: Optional[float] = None
    s: Optional[float] = None
    k: Optional[int] = None
    q: Optional[float] = None
    eta: float = 0.0
    delta_n: Optional[DeltaNQuery] = None
    rgg_threshold: Optional[RggThresholdQuery] = None


class DeltaNResult(BaseModel):
    p: float
    n: int
    s: float
    value: float
    coeff_const: float
    coeff_log: float


class RggThresholdResult(BaseModel):
    s: float
    c: float
    residual: float
    n: Optional[int] = None
    dim: Optional[int] = None
    r: Optional[float] = None


class BoundResponse(BaseModel):
    s: Optional[float] = None
    sf: Optional[BoundReportModel] = None
    stii: Optional[BoundReportModel] = None
    delta_n: Optional[DeltaNResult] = None
    rgg_threshold: Optional[RggThresholdResult] = None
    warnings: List[str] = Field(default_factory=list)


# -- classify ---------------------------------------------------------------

class ClassifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    prc: PrcSpec
    B: Optional[float] = None
    kappa: float = 0.01
    eta: float = 0.0
    tau: float = 0.0
    h_max: int = 8
    m_max: int = 8
    grid: int = 10000
    degrees: Optional[List[int]] = None


class DegreeBound(BaseModel):
    d: int
    bound: float


class ClassifyResponse(BaseModel):
    label: str
    is_stii: bool
    h: Optional[int] = None
    m: Optional[int] = None
    k: Optional[int] = None
    eta: Optional[float] = None
    q: Optional[float] = None
    degree_bounds: Optional[List[DegreeBound]] = None
    warnings: List[str] = Field(default_factory=list)


# -- sweep ------------------------------------------------------------------

class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    dim: int
    radii: List[float]
    prcs: List[PrcSpec]
    tau: float
    trials: int
    full_trials: Optional[int] = None
    seed: int = 0
    max_periods: float = 50.0
    replicates: int = 1
    rho0: Optional[float] = None
    jobs: int = 1
    engine: str = "auto"


class SweepRowModel(BaseModel):
    radius: float
    graph_seed: int
    prc: str
    analytic_bound: float
    cert: EstimateModel
    full: EstimateModel


class SweepResponse(BaseModel):
    rows: List[SweepRowModel]


# -- gen-graph --------------------------------------------------------------

class GenGraphRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graph: GraphSpec
    seed: int = 0


class StructureModel(BaseModel):
    strongly_connected: bool
    aperiodic: bool
    scc_count: int


class GenGraphResponse(BaseModel):
    n: int
    m: int
    edges: List[Tuple[int, int, float]]
    structure: StructureModel
    meta: Optional[Dict[str, Any]] = None
