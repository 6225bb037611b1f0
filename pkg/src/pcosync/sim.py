"""Event-driven simulation of delayed pulse-coupled oscillator networks.

Dynamics: phases drift at unit rate on [0,1]; a node reaching phase 1 fires,
resets to 0, and sends a pulse to every successor that arrives after delay
tau. A pulse arriving at phase x applies phi <- max(0, x + f(x)); a result
>= 1 (exact equality included) fires the receiver immediately. Events at one
instant are consumed in queue order: pulse arrivals first, (src, dst)
lexicographic, each seeing the already-updated phase, then pending drift
firings in node-index order; cascades continue until the instant is quiet.

Two engines implement these semantics. The reference engine processes one
arrival at a time (supports single-instant stepping and event logs). The
fast engine batches the simultaneous arrival wave emitted by each firing
instant and vectorizes the per-destination update; it requires tau > 0
(with zero delay, cascade pulses re-enter the same instant and ordering is
pinned by the merged event queue of the reference engine). Both engines
share the same float arithmetic and produce bit-identical states; the test
suite asserts this on randomized instances.

Internally a node is stored as the anchor time theta = t - phase, so drift
needs no per-event phase updates and firing times (theta + 1) are exact.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .graph import Graph
from .prc import Prc

EVENT_FIRE = "fire"
EVENT_ARRIVE = "arrive"
EVENT_RESET = "reset"

# Waves smaller than this are processed by the scalar path inside the fast
# engine; numpy's fixed per-call overhead dominates below roughly this size.
_SMALL_WAVE_LIMIT = 16


class SimulationCapError(RuntimeError):
    """Raised when a run exceeds its event safety cap (runaway cascade)."""


@dataclass(frozen=True)
class ModelParams:
    """Simulation constants: delay, response curve, certificate radius.

    rho0 defaults to min(B - tau, 1 - B + tau) where B comes from the curve's
    breakpoint (or must be given explicitly for curves without one).
    use_weights applies the per-edge weighted clip max(-w, f) / min(w, f)
    around B. event_cap_factor scales the runaway-cascade guard
    (factor * (m + n) events per simulated period).
    """

    tau: float
    prc: Prc
    B: Optional[float] = None
    rho0: Optional[float] = None
    sync_eps: float = 1e-9
    use_weights: bool = False
    event_cap_factor: int = 100

    def __post_init__(self):
        if not (0.0 <= self.tau < 0.5):
            raise ValueError(f"tau must lie in [0, 0.5), got {self.tau}")
        if self.B is None:
            object.__setattr__(self, "B", self.prc.breakpoint)
        if self.rho0 is None:
            if self.B is None:
                raise ValueError("rho0 required when the curve has no breakpoint B")
            object.__setattr__(self, "rho0", min(self.B - self.tau, 1.0 - self.B + self.tau))
        if self.rho0 <= 0.0:
            raise ValueError(f"rho0 must be positive, got {self.rho0} (is B > tau?)")
        if self.sync_eps <= 0.0:
            raise ValueError(f"sync_eps must be positive, got {self.sync_eps}")
        if self.use_weights and self.B is None:
            raise ValueError("use_weights requires a breakpoint B for the clip")
        if self.event_cap_factor < 1:
            raise ValueError("event_cap_factor must be >= 1")


@dataclass(frozen=True)
class SimState:
    """Snapshot between instants: time, phases, pulses in flight.

    queue entries are (arrival_time, src, dst), sorted. log, when present,
    holds (t, kind, node, src) event tuples accumulated so far.
    """

    t: float
    phases: Tuple[float, ...]
    queue: Tuple[Tuple[float, int, int], ...] = ()
    log: Optional[Tuple[Tuple[float, str, int, int], ...]] = None


@dataclass(frozen=True)
class Certificate:
    granted: bool
    time: float
    spread: float
    pulses_in_flight: int


@dataclass(frozen=True)
class SyncOutcome:
    synced: bool
    periods_used: float
    spread: float


def circular_spread(phases: Sequence[float]) -> float:
    """1 minus the largest gap between consecutive phases on the unit circle.

    Rotation invariant; 0 for a single oscillator. Phase 1.0 is identified
    with 0.0.
    """
    arr = np.asarray(phases, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("need at least one phase")
    arr = np.where(arr >= 1.0, arr - 1.0, arr)
    arr = np.sort(arr)
    if arr.size == 1:
        return 0.0
    wrap = arr[0] + 1.0 - arr[-1]
    return float(1.0 - max(np.max(np.diff(arr)), wrap))


def _spread_sorted(ph: np.ndarray) -> float:
    ph.sort()
    if ph.size == 1:
        return 0.0
    wrap = ph[0] + 1.0 - ph[-1]
    gap = max(np.max(np.diff(ph)), wrap) if ph.size > 1 else 1.0
    return float(1.0 - gap)


class _RefEngine:
    """Per-arrival heap engine; the semantic source of truth.

    Heap entries: (time, 0, src, dst, weight) for pulse arrivals and
    (time, 1, node, epoch) for tentative drift firings. Tuple order gives
    arrivals-before-fires at an instant, (src, dst) order within arrivals,
    node-index order within fires. A node's pending fire entry is invalidated
    (lazily, via the epoch counter) whenever an arrival moves its phase.
    """

    def __init__(self, g: Graph, params: ModelParams, phases, t0: float = 0.0,
                 queue=(), record_log: bool = False, window=None):
        n = g.n
        if len(phases) != n:
            raise ValueError(f"got {len(phases)} phases for {n} nodes")
        for p in phases:
            if not (0.0 <= p < 1.0):
                raise ValueError(f"initial phases must lie in [0,1), got {p}")
        self.g = g
        self.params = params
        self.prc = params.prc
        self.n = n
        self.t = t0
        self.theta = [t0 - float(p) for p in phases]
        self.epoch = [0] * n
        self.heap: list = []
        self.inflight = 0
        self.events = 0
        self.max_events = None
        self.log = [] if record_log else None
        self.window = window  # (lo, hi) for fired/received recording
        self.fired_in_window = [False] * n
        self.received_in_window = [False] * n
        self._succ = g.succ
        self._succ_w = g.succ_weights
        self._use_w = params.use_weights
        self._B = params.B
        self._cur: dict = {}
        for i in range(n):
            heapq.heappush(self.heap, (self.theta[i] + 1.0, 1, i, 0))
        for (at, src, dst) in queue:
            w = 1.0
            if self._use_w:
                w = dict(zip(g.succ[src], g.succ_weights[src])).get(dst, 1.0)
            heapq.heappush(self.heap, (float(at), 0, int(src), int(dst), w))
            self.inflight += 1

    def next_time(self) -> Optional[float]:
        return self.heap[0][0] if self.heap else None

    def _bump(self, k: int = 1):
        self.events += k
        if self.max_events is not None and self.events > self.max_events:
            raise SimulationCapError(
                f"event cap {self.max_events} exceeded at t={self.t} "
                f"(runaway cascade; check the curve and weights)"
            )

    def _fire(self, node: int):
        t = self.t
        self.theta[node] = t
        self._cur[node] = 0.0
        self.epoch[node] += 1
        heapq.heappush(self.heap, (t + 1.0, 1, node, self.epoch[node]))
        w = self.window
        if w is not None and w[0] <= t <= w[1]:
            self.fired_in_window[node] = True
        if self.log is not None:
            self.log.append((t, EVENT_FIRE, node, -1))
        succ = self._succ[node]
        if succ:
            at = t + self.params.tau
            if self._use_w:
                for dst, wt in zip(succ, self._succ_w[node]):
                    heapq.heappush(self.heap, (at, 0, node, dst, wt))
            else:
                for dst in succ:
                    heapq.heappush(self.heap, (at, 0, node, dst, 1.0))
            self.inflight += len(succ)
        self._bump()

    def process_next_instant(self) -> float:
        """Consume every event at the next instant; returns its time."""
        t = self.heap[0][0]
        self.t = t
        theta = self.theta
        prc_eval = self.prc.eval
        win = self.window
        # Phase values carried across the instant so consecutive same-instant
        # arrivals compose on the exact running value rather than re-rounding
        # through theta; theta itself is rounded once per write.
        cur = self._cur = {}
        while self.heap and self.heap[0][0] == t:
            entry = heapq.heappop(self.heap)
            if entry[1] == 0:
                _, _, src, dst, wt = entry
                self.inflight -= 1
                x = cur.get(dst)
                if x is None:
                    x = t - theta[dst]
                    if x > 1.0:
                        x = 1.0  # float guard at fire-tie instants
                fx = prc_eval(x)
                if self._use_w:
                    fx = max(-wt, fx) if x < self._B else min(wt, fx)
                if win is not None and win[0] <= t <= win[1]:
                    self.received_in_window[dst] = True
                if self.log is not None:
                    self.log.append((t, EVENT_ARRIVE, dst, src))
                v = x + fx
                if v >= 1.0:
                    self._fire(dst)
                else:
                    nv = v if v > 0.0 else 0.0
                    cur[dst] = nv
                    theta[dst] = t - nv
                    self.epoch[dst] += 1
                    heapq.heappush(self.heap, (theta[dst] + 1.0, 1, dst, self.epoch[dst]))
                    if nv == 0.0 and self.log is not None:
                        self.log.append((t, EVENT_RESET, dst, src))
                self._bump()
            else:
                _, _, node, ep = entry
                if ep != self.epoch[node]:
                    continue  # superseded by an arrival since it was scheduled
                self._fire(node)
        return t

    def phases(self) -> List[float]:
        return [min(1.0, max(0.0, self.t - th)) for th in self.theta]

    def spread(self) -> float:
        ph = np.asarray(self.phases(), dtype=np.float64)
        ph = np.where(ph >= 1.0, ph - 1.0, ph)
        return _spread_sorted(ph)

    def pending_arrivals(self) -> List[Tuple[float, int, int]]:
        return sorted((e[0], e[2], e[3]) for e in self.heap if e[1] == 0)


class _FastEngine:
    """Wave-batched engine: one heap entry per simultaneous arrival wave.

    All pulses emitted at a firing instant t arrive together at t + tau; the
    wave is expanded through the CSR successor arrays, grouped by destination
    (stable sort keeps src order within each destination), and applied by
    iterating the update vector-wise up to the maximum multiplicity. A node
    firing mid-wave resets to 0 and later arrivals in the same wave hit the
    reset phase, exactly as in the sequential semantics. Small waves take a
    scalar path when the curve exposes pure-arithmetic scalar eval.
    """

    def __init__(self, g: Graph, params: ModelParams, phases, t0: float = 0.0,
                 queue=(), window=None):
        if params.tau <= 0.0:
            raise ValueError("fast engine requires tau > 0")
        n = g.n
        if len(phases) != n:
            raise ValueError(f"got {len(phases)} phases for {n} nodes")
        ph = np.asarray(phases, dtype=np.float64)
        if ph.size and (ph.min() < 0.0 or ph.max() >= 1.0):
            raise ValueError("initial phases must lie in [0,1)")
        self.g = g
        self.params = params
        self.prc = params.prc
        self.n = n
        self.t = t0
        self.theta = t0 - ph
        self.epoch = np.zeros(n, dtype=np.int64)
        self.heap: list = []
        self.inflight = 0
        self.events = 0
        self.max_events = None
        self.window = window
        self.fired_in_window = np.zeros(n, dtype=bool)
        self.received_in_window = np.zeros(n, dtype=bool)
        self._indptr, self._dst, self._w = g.csr()
        self._succ = g.succ
        self._succ_w = g.succ_weights
        self._use_w = params.use_weights
        self._B = params.B
        self._py_eval = _scalar_eval(params.prc)
        self._wave_seq = 0
        self._wave_buf: dict = {}
        self._wave_at: dict = {}
        fire_times = self.theta + 1.0
        for i in range(n):
            # plain floats in the heap: every later time derives from these
            heapq.heappush(self.heap, (float(fire_times[i]), 1, i, 0))
        for (at, src, dst) in sorted(queue):
            self._enqueue_wave(float(at), [int(src)], single_dst=int(dst))

    # A restored queue can contain lone (src, dst) pulses rather than whole
    # waves; represent each as a wave carrying an explicit destination.
    def _enqueue_wave(self, at: float, srcs, single_dst=None):
        key = at
        if key not in self._wave_at:
            self._wave_seq += 1
            seq = self._wave_seq
            self._wave_at[key] = seq
            self._wave_buf[seq] = []
            heapq.heappush(self.heap, (at, 0, seq))
        seq = self._wave_at[key]
        if single_dst is not None:
            self._wave_buf[seq].append((srcs[0], single_dst))
            self.inflight += 1
        else:
            indptr = self._indptr
            cnt = 0
            for s in srcs:
                cnt += int(indptr[s + 1] - indptr[s])
            if cnt:
                self._wave_buf[seq].extend((s, -1) for s in srcs)
                self.inflight += cnt

    def next_time(self) -> Optional[float]:
        return self.heap[0][0] if self.heap else None

    def _bump(self, k: int):
        self.events += k
        if self.max_events is not None and self.events > self.max_events:
            raise SimulationCapError(
                f"event cap {self.max_events} exceeded at t={self.t} "
                f"(runaway cascade; check the curve and weights)"
            )

    def process_next_instant(self) -> float:
        t = self.heap[0][0]
        self.t = t
        fired: List[int] = []
        while self.heap and self.heap[0][0] == t:
            entry = heapq.heappop(self.heap)
            if entry[1] == 0:
                seq = entry[2]
                del self._wave_at[t]
                buf = self._wave_buf.pop(seq)
                self._process_wave(t, buf, fired)
            else:
                _, _, node, ep = entry
                if ep != self.epoch[node]:
                    continue
                self.theta[node] = t
                self.epoch[node] += 1
                heapq.heappush(self.heap, (t + 1.0, 1, node, self.epoch[node]))
                fired.append(node)
                self._bump(1)
        if fired:
            win = self.window
            if win is not None and win[0] <= t <= win[1]:
                self.fired_in_window[np.asarray(fired, dtype=np.int64)] = True
            self._enqueue_wave(t + self.params.tau, sorted(fired))
        return t

    def _expand(self, buf):
        """Expand a wave buffer into parallel (src, dst, weight) arrays in
        (src, dst) lexicographic order (explicit-dst entries preserved)."""
        singles = [(s, d) for s, d in buf if d >= 0]
        srcs = sorted(s for s, d in buf if d < 0)
        parts_dst = []
        parts_w = []
        parts_src = []
        if srcs:
            sa = np.asarray(srcs, dtype=np.int64)
            starts = self._indptr[sa]
            counts = self._indptr[sa + 1] - starts
            total = int(counts.sum())
            if total:
                cum = np.cumsum(counts)
                idx = np.arange(total, dtype=np.int64) + np.repeat(
                    starts - np.concatenate(([0], cum[:-1])), counts
                )
                parts_dst.append(self._dst[idx])
                parts_w.append(self._w[idx])
                parts_src.append(np.repeat(sa, counts))
        if singles:
            singles.sort()
            parts_src.append(np.asarray([s for s, _ in singles], dtype=np.int64))
            parts_dst.append(np.asarray([d for _, d in singles], dtype=np.int64))
            ws = []
            for s, d in singles:
                w = 1.0
                if self._use_w:
                    w = dict(zip(self._succ[s], self._succ_w[s])).get(d, 1.0)
                ws.append(w)
            parts_w.append(np.asarray(ws, dtype=np.float64))
        if not parts_dst:
            return None
        if len(parts_dst) == 2:
            # merge the two sorted-by-src blocks to restore global src order
            src_all = np.concatenate(parts_src)
            dst_all = np.concatenate(parts_dst)
            w_all = np.concatenate(parts_w)
            order = np.lexsort((dst_all, src_all))
            return src_all[order], dst_all[order], w_all[order]
        return parts_src[0], parts_dst[0], parts_w[0]

    def _process_wave(self, t: float, buf, fired_out: List[int]):
        expanded = self._expand(buf)
        if expanded is None:
            return
        src_all, dst_all, w_all = expanded
        total = int(dst_all.size)
        self.inflight -= total
        self._bump(total)
        win_on = self.window is not None and self.window[0] <= t <= self.window[1]
        if total < _SMALL_WAVE_LIMIT and self._py_eval is not None:
            self._wave_scalar(t, src_all, dst_all, w_all, fired_out, win_on)
        else:
            self._wave_vector(t, dst_all, w_all, fired_out, win_on)

    def _wave_scalar(self, t, src_all, dst_all, w_all, fired_out, win_on):
        theta = self.theta
        feval = self._py_eval
        B = self._B
        use_w = self._use_w
        cur: dict = {}
        for i in range(dst_all.size):
            dst = int(dst_all[i])
            x = cur.get(dst)
            if x is None:
                x = t - theta[dst]
                if x > 1.0:
                    x = 1.0
            fx = feval(x)
            if use_w:
                wt = w_all[i]
                fx = (-wt if -wt > fx else fx) if x < B else (wt if wt < fx else fx)
            if win_on:
                self.received_in_window[dst] = True
            v = x + fx
            if v >= 1.0:
                cur[dst] = 0.0
                fired_out.append(dst)
                if win_on:
                    self.fired_in_window[dst] = True
                self._bump(1)
            else:
                cur[dst] = v if v > 0.0 else 0.0
        for dst, xv in cur.items():
            theta[dst] = t - xv
            self.epoch[dst] += 1
            heapq.heappush(self.heap,
                           (float(theta[dst]) + 1.0, 1, dst, int(self.epoch[dst])))

    def _wave_vector(self, t, dst_all, w_all, fired_out, win_on):
        order = np.argsort(dst_all, kind="stable")
        dst_sorted = dst_all[order]
        boundary = np.empty(dst_sorted.size, dtype=bool)
        boundary[0] = True
        np.not_equal(dst_sorted[1:], dst_sorted[:-1], out=boundary[1:])
        run_starts = np.nonzero(boundary)[0]
        uniq = dst_sorted[run_starts]
        k = np.diff(np.append(run_starts, dst_sorted.size))
        if win_on:
            self.received_in_window[uniq] = True
        x = t - self.theta[uniq]
        np.minimum(x, 1.0, out=x)
        w_sorted = w_all[order] if self._use_w else None
        kmax = int(k.max())
        eval_vec = self.prc.eval_vec
        B = self._B
        fires_round = 0
        for j in range(1, kmax + 1):
            active = k >= j
            xa = x[active]
            f = eval_vec(xa)
            if self._use_w:
                wj = w_sorted[run_starts[active] + (j - 1)]
                f = np.where(xa < B, np.maximum(-wj, f), np.minimum(wj, f))
            v = xa + f
            fired_mask = v >= 1.0
            xa = np.where(fired_mask, 0.0, np.maximum(0.0, v))
            x[active] = xa
            if fired_mask.any():
                nodes = uniq[active][fired_mask]
                fires_round += nodes.size
                fired_out.extend(nodes.tolist())
                if win_on:
                    self.fired_in_window[nodes] = True
        if fires_round:
            self._bump(fires_round)
        self.theta[uniq] = t - x
        self.epoch[uniq] += 1
        theta = self.theta
        epoch = self.epoch
        for nd in uniq.tolist():
            heapq.heappush(self.heap, (float(theta[nd]) + 1.0, 1, nd, int(epoch[nd])))

    def phases(self) -> List[float]:
        ph = np.minimum(1.0, np.maximum(0.0, self.t - self.theta))
        return [float(v) for v in ph]

    def spread(self) -> float:
        ph = self.t - self.theta
        ph = np.where(ph >= 1.0, ph - 1.0, ph)
        return _spread_sorted(ph)

    def spread_quick(self, eps: float) -> Optional[float]:
        """Cheap synchrony prefilter: returns the spread when it may be
        <= eps, else None without sorting."""
        ph = self.t - self.theta
        lin = float(ph.max() - ph.min())
        if lin <= eps or (1.0 - lin) <= 2.0 * eps:
            ph = np.where(ph >= 1.0, ph - 1.0, ph)
            return _spread_sorted(ph)
        return None

    def pending_arrivals(self) -> List[Tuple[float, int, int]]:
        out = []
        for at, seq in self._wave_at.items():
            for s, d in self._wave_buf[seq]:
                if d >= 0:
                    out.append((at, s, d))
                else:
                    for dst in self._succ[s]:
                        out.append((at, s, dst))
        return sorted(out)


def _scalar_eval(prc: Prc):
    """Pure-python scalar eval matching eval_vec bit-for-bit, when the curve
    uses only arithmetic/min/max (transcendental curves return None and always
    take the vector path)."""
    from . import prc as prcmod

    if isinstance(prc, prcmod.SfPrc):
        B = prc.B

        def f(x, _B=B):
            return -x if x < _B else 1.0 - x

        return f
    if isinstance(prc, prcmod.SyntheticStiiPrc):
        B = prc.B
        c0 = B / prc.h
        im = prc.inhibit_margin
        step = prc.excite_step

        def f(x, _B=B, _c0=c0, _im=im, _step=step):
            if x < _B:
                return -(_c0 if _c0 < x else x) - _im
            return _step

        return f
    if isinstance(prc, prcmod.WeightedPrc):
        inner = _scalar_eval(prc.inner)
        if inner is None:
            return None
        # weighting is applied by the engine itself; the wrapped curve alone
        # is what the engine evaluates when use_weights is off
        B = prc.B
        w = prc.w

        def f(x, _inner=inner, _B=B, _w=w):
            v = _inner(x)
            if x < _B:
                return v if v > -_w else -_w
            return v if v < _w else _w

        return f
    return None


def _make_engine(g: Graph, params: ModelParams, phases, t0=0.0, queue=(),
                 record_log=False, window=None, engine: str = "auto"):
    if engine not in ("auto", "reference", "fast"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "fast" and (record_log or params.tau <= 0.0):
        raise ValueError("fast engine supports neither event logs nor tau == 0")
    use_fast = engine == "fast" or (
        engine == "auto" and not record_log and params.tau > 0.0
    )
    if use_fast:
        return _FastEngine(g, params, phases, t0=t0, queue=queue, window=window)
    return _RefEngine(g, params, phases, t0=t0, queue=queue,
                      record_log=record_log, window=window)


def _cap_for(g: Graph, params: ModelParams, horizon: float) -> int:
    per_period = params.event_cap_factor * (g.m + g.n)
    return int(per_period * max(1.0, math.ceil(horizon)))


def state_from_engine(eng, t: Optional[float] = None) -> SimState:
    t = eng.t if t is None else t
    log = getattr(eng, "log", None)
    return SimState(
        t=t,
        phases=tuple(min(1.0, max(0.0, t - th)) for th in
                     (eng.theta if isinstance(eng.theta, list) else eng.theta.tolist())),
        queue=tuple(eng.pending_arrivals()),
        log=None if log is None else tuple(log),
    )


def step_to_next_event(state: SimState, g: Graph, params: ModelParams,
                       record_log: bool = False) -> SimState:
    """Advance to the next event instant and process everything due there.

    Functional: returns a new SimState. Uses the reference engine. If a log
    is requested (or present on the input state) it is carried forward with
    this instant's events appended.
    """
    keep_log = record_log or state.log is not None
    eng = _RefEngine(g, params, state.phases, t0=state.t, queue=state.queue,
                     record_log=keep_log)
    eng.max_events = _cap_for(g, params, 1.0)
    if eng.next_time() is None:
        return state
    eng.process_next_instant()
    new = state_from_engine(eng)
    if keep_log and state.log:
        new = SimState(t=new.t, phases=new.phases, queue=new.queue,
                       log=tuple(state.log) + (new.log or ()))
    return new


def run_until(phases: Sequence[float], g: Graph, params: ModelParams,
              t_end: float, t0: float = 0.0, queue=(), record_log: bool = False,
              engine: str = "auto") -> SimState:
    """Process every event instant with time <= t_end (inclusive); returns
    the state advanced to exactly t_end."""
    if t_end < t0:
        raise ValueError(f"t_end {t_end} before start time {t0}")
    eng = _make_engine(g, params, phases, t0=t0, queue=queue,
                       record_log=record_log, engine=engine)
    eng.max_events = _cap_for(g, params, t_end - t0)
    while True:
        nt = eng.next_time()
        if nt is None or nt > t_end:
            break
        eng.process_next_instant()
    return state_from_engine(eng, t=t_end)


def run_one_period(phases: Sequence[float], g: Graph, params: ModelParams,
                   engine: str = "auto") -> Certificate:
    """Single-period certification run over t in [0, 1 + 2 tau].

    After every processed instant with no pulses in flight (and at t=0), the
    circular spread is evaluated; the certificate is granted at the first
    instant with spread strictly below rho0. Once granted the rest of the
    horizon is irrelevant and the run stops.
    """
    horizon = 1.0 + 2.0 * params.tau
    eng = _make_engine(g, params, phases, engine=engine)
    eng.max_events = _cap_for(g, params, horizon)
    rho0 = params.rho0
    sp = eng.spread()
    if sp < rho0:
        return Certificate(granted=True, time=0.0, spread=sp, pulses_in_flight=0)
    while True:
        nt = eng.next_time()
        if nt is None or nt > horizon:
            break
        t = eng.process_next_instant()
        if eng.inflight == 0:
            sp = eng.spread()
            if sp < rho0:
                return Certificate(granted=True, time=t, spread=sp, pulses_in_flight=0)
    return Certificate(granted=False, time=horizon, spread=eng.spread(),
                       pulses_in_flight=eng.inflight)


def run_to_synchrony(phases: Sequence[float], g: Graph, params: ModelParams,
                     max_periods: float = 50.0, engine: str = "auto") -> SyncOutcome:
    """Run until circular spread <= sync_eps with an empty pulse queue, or
    until t exceeds max_periods. Reports the first synchrony time."""
    eng = _make_engine(g, params, phases, engine=engine)
    eng.max_events = _cap_for(g, params, max_periods)
    eps = params.sync_eps
    sp = eng.spread()
    if sp <= eps:
        return SyncOutcome(synced=True, periods_used=0.0, spread=sp)
    quick = getattr(eng, "spread_quick", None)
    while True:
        nt = eng.next_time()
        if nt is None or nt > max_periods:
            break
        t = eng.process_next_instant()
        if eng.inflight == 0:
            if quick is not None:
                sp = quick(eps)
                if sp is not None and sp <= eps:
                    return SyncOutcome(synced=True, periods_used=t, spread=sp)
            else:
                sp = eng.spread()
                if sp <= eps:
                    return SyncOutcome(synced=True, periods_used=t, spread=sp)
    return SyncOutcome(synced=False, periods_used=max_periods, spread=eng.spread())


def _window_params(params: ModelParams) -> Tuple[float, float, float]:
    from .bounds import compute_s

    if params.B is None:
        raise ValueError("one-shot window needs a breakpoint B")
    s = compute_s(params.B, params.tau)
    if s >= 1.0:
        raise ValueError(f"s = {s} >= 1: the one-shot window vanishes")
    return s, params.tau, 1.0 - s + params.tau


def one_shot_window_check(phases: Sequence[float], g: Graph, params: ModelParams,
                          engine: str = "auto") -> List[bool]:
    """Simulated one-shot flags: E_i is true iff node i fires or receives at
    least one pulse during the closed window [tau, 1 - s + tau]."""
    s, lo, hi = _window_params(params)
    eng = _make_engine(g, params, phases, window=(lo, hi), engine=engine)
    eng.max_events = _cap_for(g, params, hi)
    while True:
        nt = eng.next_time()
        if nt is None or nt > hi:
            break
        eng.process_next_instant()
    fired = eng.fired_in_window
    received = eng.received_in_window
    return [bool(fired[i]) or bool(received[i]) for i in range(g.n)]


def one_shot_static_predictor(phases: Sequence[float], g: Graph,
                              params: ModelParams) -> List[bool]:
    """Initial-condition predictor for the one-shot flags: E_i is predicted
    true iff some predecessor starts in [s, 1] or node i itself starts in
    [s - tau, 1 - tau]. Predicted-true implies simulated-true for curves that
    never inhibit at or above B."""
    s, _, _ = _window_params(params)
    tau = params.tau
    out = []
    for i in range(g.n):
        own = s - tau <= phases[i] <= 1.0 - tau
        out.append(own or any(phases[j] >= s for j in g.pred[i]))
    return out


def sample_spreads(phases: Sequence[float], g: Graph, params: ModelParams,
                   sample_times: Sequence[float], engine: str = "auto") -> List[float]:
    """Circular spread at each sample time (post-event convention: a sample
    falling on an event instant sees the state after that instant). Spread is
    constant between events since all phases drift at the same rate, so only
    event instants are simulated."""
    times = list(sample_times)
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("sample times must be non-decreasing")
    if not times:
        return []
    eng = _make_engine(g, params, phases, engine=engine)
    eng.max_events = _cap_for(g, params, times[-1])
    out: List[float] = []
    for ts in times:
        while True:
            nt = eng.next_time()
            if nt is None or nt > ts:
                break
            eng.process_next_instant()
        out.append(eng.spread())
    return out


def save_event_log(log: Sequence[Tuple[float, str, int, int]], path: str,
                   header_comments: Sequence[str] = ()) -> None:
    """Event-log CSV: rows t,kind,node,src with t at 17 significant digits."""
    with open(path, "w") as fh:
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        fh.write("t,kind,node,src\n")
        for t, kind, node, src in log:
            fh.write(f"{t:.17g},{kind},{node},{src}\n")
