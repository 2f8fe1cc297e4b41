"""Incremental update versus full recompute on seeded arrival streams."""

from __future__ import annotations

import csv
import io
import random
import statistics
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

from .decomp import rebuild_decompositions
from .dynamic import apply_arrival
from .instance import ArrivalEvent, Instance, InstanceError, Side
from .static import rmm_solve

CSV_COLUMNS = ("event_index", "mode", "wall_ns", "edges_touched", "signature")
MODES = ("update", "recompute", "both")


class BenchMismatch(RuntimeError):
    """Update and recompute disagree on a signature."""


@dataclass(frozen=True)
class BenchScenario:
    """Generator parameters.

    ``density`` is the probability of each applicant-post pair, so the
    expected edge count is ``density * n * posts``; an arriving vertex gets
    ``round(density * other_side)`` edges.  Ranks are uniform in ``1..r``.
    """

    n: int
    posts: int
    r: int
    density: float
    events: int
    seed: int = 0
    mode: str = "both"

    def __post_init__(self):
        if self.n < 0 or self.posts < 0 or self.r < 1 or self.events < 0:
            raise InstanceError("n, posts, events must be >= 0 and r >= 1")
        if self.posts == 0 and self.n > 0:
            raise InstanceError("zero posts with a nonzero number of applicants")
        if not 0.0 <= self.density <= 1.0:
            raise InstanceError("density must lie in [0, 1]")
        if self.mode not in MODES:
            raise InstanceError(f"mode must be one of {', '.join(MODES)}")


def generate_scenario(sc: BenchScenario) -> tuple[Instance, list[ArrivalEvent]]:
    """Deterministic instance and arrival stream for ``sc``."""
    rng = random.Random(sc.seed)
    total = sc.n * sc.posts
    m = min(total, round(sc.density * total))
    pairs = rng.sample(range(total), m) if total else []
    edges = tuple((x // sc.posts, x % sc.posts, rng.randint(1, sc.r)) for x in sorted(pairs))
    inst = Instance(sc.n, sc.posts, sc.r, edges)
    na, np_ = sc.n, sc.posts
    events = []
    for _ in range(sc.events):
        side = Side.APPLICANT if rng.random() < 0.5 or na == 0 else Side.POST
        other = np_ if side is Side.APPLICANT else na
        k = min(other, round(sc.density * other))
        partners = sorted(rng.sample(range(other), k))
        idx = na if side is Side.APPLICANT else np_
        events.append(ArrivalEvent(side, idx, tuple((p, rng.randint(1, sc.r)) for p in partners)))
        if side is Side.APPLICANT:
            na += 1
        else:
            np_ += 1
    return inst, events


@dataclass
class BenchRow:
    event_index: int
    mode: str
    wall_ns: int
    edges_touched: int
    signature: str
    vertices: int = 0
    edges: int = 0
    label_changes: int = 0


@dataclass
class BenchReport:
    scenario: BenchScenario
    rows: list[BenchRow] = field(default_factory=list)
    initial_work: int = 0

    def of(self, mode: str) -> list[BenchRow]:
        return [r for r in self.rows if r.mode == mode]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.event_index, r.mode, r.wall_ns, r.edges_touched, r.signature])
        return buf.getvalue()

    def summary(self) -> dict[str, float]:
        out: dict[str, float] = {"events": self.scenario.events, "initial_work": self.initial_work}
        for mode in ("update", "recompute"):
            rows = self.of(mode)
            if rows:
                out[f"{mode}_work"] = sum(r.edges_touched for r in rows)
                out[f"{mode}_max_work"] = max(r.edges_touched for r in rows)
                out[f"{mode}_mean_ns"] = statistics.fmean(r.wall_ns for r in rows)
        if "update_work" in out and "recompute_work" in out:
            out["work_ratio"] = out["update_work"] / max(1, out["recompute_work"])
            out["speedup"] = out["recompute_mean_ns"] / max(1.0, out["update_mean_ns"])
        return out

    def format_summary(self) -> str:
        parts = []
        for k, v in self.summary().items():
            parts.append(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}")
        return " ".join(parts)


def _sig(s: Sequence[int], r: int) -> str:
    return "(" + ",".join(str(x) for x in tuple(s) + (0,) * (r - len(s))) + ")"


def run_bench(sc: BenchScenario, instance: Instance | None = None, events: Sequence[ArrivalEvent] | None = None) -> BenchReport:
    """Run the scenario; raises :class:`BenchMismatch` if the modes disagree."""
    if instance is None or events is None:
        instance, events = generate_scenario(sc)
    rep = BenchReport(sc)
    do_update = sc.mode in ("update", "both")
    do_recompute = sc.mode in ("recompute", "both")
    state = rmm_solve(instance)
    rep.initial_work = state.counter.edges
    grown = instance
    for k, ev in enumerate(events):
        grown = grown.with_arrival(ev)
        r = grown.max_rank
        sig_u = sig_r = None
        if do_update:
            t0 = time.perf_counter_ns()
            n_r, _, trace = apply_arrival(state, ev, inplace=True)
            state = rebuild_decompositions(state, trace, n_r)
            wall = time.perf_counter_ns() - t0
            sig_u = _sig(state.signature, r)
            changes = sum(len(ph) for ph, _ in trace.h_changes.values())
            rep.rows.append(BenchRow(k, "update", wall, trace.counter.edges, sig_u, state.num_vids, state.num_edges, changes))
        if do_recompute:
            t0 = time.perf_counter_ns()
            ref = rmm_solve(grown)
            wall = time.perf_counter_ns() - t0
            sig_r = _sig(ref.signature, r)
            changes = sum(len(ref.ch_phase[v]) for v in range(ref.num_vids))
            rep.rows.append(BenchRow(k, "recompute", wall, ref.counter.edges, sig_r, ref.num_vids, ref.num_edges, changes))
        if sig_u is not None and sig_r is not None and sig_u != sig_r:
            raise BenchMismatch(f"event {k}: update signature {sig_u} != recompute signature {sig_r}")
    return rep
