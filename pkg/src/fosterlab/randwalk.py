"""Monte Carlo first-passage times for the conductance-weighted random walk.

Replications are processed in fixed blocks; block ``b`` of pair ``(i, j)``
draws from a Philox stream keyed by ``(seed, i, j, b)``, so any replication's
trajectory depends only on those four numbers. Step tallies are integers,
which keeps the accumulated mean independent of processing order.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .graph import Graph, GraphError

BLOCK = 4096


class StepCapError(RuntimeError):
    def __init__(self, capped: int, cap: int):
        super().__init__(f"{capped} replication(s) exceeded the step cap of {cap}")
        self.capped = capped
        self.cap = cap


@dataclass(frozen=True)
class WalkSimConfig:
    seed: int = 0
    replications: int = 100_000
    step_cap: int = 10_000_000

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.step_cap < 1:
            raise ValueError("step cap must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass
class HitEstimate:
    pair: tuple[int, int]
    mean: float
    stderr: float
    replications: int

    def to_dict(self) -> dict:
        return {"pair": list(self.pair), "mean": self.mean, "stderr": self.stderr, "replications": self.replications}


@dataclass
class CommuteReport:
    pair: tuple[int, int]
    forward: HitEstimate
    backward: HitEstimate
    simulated: float
    stderr: float
    expected: Fraction
    z: float

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "forward": self.forward.to_dict(),
            "backward": self.backward.to_dict(),
            "simulated_commute": self.simulated,
            "stderr": self.stderr,
            "expected_commute": f"{self.expected.numerator}/{self.expected.denominator}",
            "expected_commute_float": float(self.expected),
            "z": self.z,
        }


class _Stepper:
    """CSR transition tables for vectorised neighbour sampling."""

    def __init__(self, g: Graph):
        self.indptr = np.zeros(g.n + 1, dtype=np.int64)
        nbrs, cum = [], []
        for v in range(g.n):
            adj = g.adjacency[v]
            ws = np.array([float(g.conductances[e]) for _, e in adj])
            c = np.cumsum(ws) / ws.sum() if len(ws) else ws
            nbrs.extend(w for w, _ in adj)
            cum.extend(c)
            self.indptr[v + 1] = len(nbrs)
        self.nbrs = np.asarray(nbrs, dtype=np.int64)
        self.cum = np.asarray(cum)
        self.maxdeg = int(np.diff(self.indptr).max()) if g.n else 0

    def step(self, pos: np.ndarray, u: np.ndarray) -> np.ndarray:
        start = self.indptr[pos]
        last = self.indptr[pos + 1] - start - 1
        idx = np.zeros_like(pos)
        for t in range(self.maxdeg - 1):
            idx += (t < last) & (self.cum[np.minimum(start + t, len(self.cum) - 1)] < u)
        return self.nbrs[start + idx]


def _stream(seed: int, i: int, j: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, i, j, block])))


def _check_pair(g: Graph, i: int, j: int) -> None:
    g._check_vertex(i)
    g._check_vertex(j)
    if i == j:
        raise GraphError("hitting time needs two distinct vertices")
    if not g.is_connected():
        raise exact.DisconnectedGraphError("graph is disconnected")


def hit_step_counts(g: Graph, i: int, j: int, cfg: WalkSimConfig, stepper: _Stepper | None = None) -> np.ndarray:
    """Per-replication first-passage times from ``i`` to ``j``."""
    _check_pair(g, i, j)
    stepper = stepper or _Stepper(g)
    out = np.empty(cfg.replications, dtype=np.int64)
    capped = 0
    for b, lo in enumerate(range(0, cfg.replications, BLOCK)):
        size = min(BLOCK, cfg.replications - lo)
        rng = _stream(cfg.seed, i, j, b)
        pos = np.full(size, i, dtype=np.int64)
        steps = np.zeros(size, dtype=np.int64)
        live = np.arange(size)
        while live.size:
            u = rng.random(live.size)
            pos[live] = stepper.step(pos[live], u)
            steps[live] += 1
            done = (pos[live] == j) | (steps[live] >= cfg.step_cap)
            capped += int(np.count_nonzero((pos[live] != j) & (steps[live] >= cfg.step_cap)))
            live = live[~done]
        out[lo : lo + size] = steps
    if capped:
        raise StepCapError(capped, cfg.step_cap)
    return out


def simulate_hit(g: Graph, i: int, j: int, cfg: WalkSimConfig | None = None) -> HitEstimate:
    """Monte Carlo estimate of ``E_i T_j`` with its standard error."""
    cfg = cfg or WalkSimConfig()
    counts = hit_step_counts(g, i, j, cfg)
    n = cfg.replications
    s1 = int(counts.sum())
    s2 = sum(c * c for c in counts.tolist())
    mean = s1 / n
    if n > 1:
        var = max((s2 - Fraction(s1 * s1, n)) / (n - 1), 0)
        stderr = math.sqrt(float(var) / n)
    else:
        stderr = 0.0
    return HitEstimate((i, j), mean, stderr, n)


def commute_check(g: Graph, i: int, j: int, cfg: WalkSimConfig | None = None) -> CommuteReport:
    """Simulated ``E_i T_j + E_j T_i`` against ``C R_ij`` from the exact oracle."""
    cfg = cfg or WalkSimConfig()
    fwd = simulate_hit(g, i, j, cfg)
    bwd = simulate_hit(g, j, i, cfg)
    expected = g.total_conductance() * exact.exact_resistance(g, i, j)
    sim = fwd.mean + bwd.mean
    se = math.hypot(fwd.stderr, bwd.stderr)
    diff = sim - float(expected)
    z = 0.0 if diff == 0 else (math.inf if se == 0 else abs(diff) / se)
    return CommuteReport((i, j), fwd, bwd, sim, se, expected, z)


def empirical_distribution(g: Graph, start: int, steps: int, seed: int = 0) -> np.ndarray:
    """Fraction of time a single long trajectory spends at each vertex."""
    g._check_vertex(start)
    nbrs = [[w for w, _ in adj] for adj in g.adjacency]
    cums = []
    for v in range(g.n):
        ws = [float(g.conductances[e]) for _, e in g.adjacency[v]]
        tot = sum(ws)
        cums.append(list(itertools.accumulate(w / tot for w in ws)))
    rng = _stream(seed, start, start, 0)
    visits = [0] * g.n
    pos = start
    done = 0
    while done < steps:
        us = rng.random(min(65536, steps - done)).tolist()
        for u in us:
            nb = nbrs[pos]
            pos = nb[min(bisect.bisect_right(cums[pos], u), len(nb) - 1)]
            visits[pos] += 1
        done += len(us)
    return np.asarray(visits) / steps
