"""K-means and k-medians over fixed-point words.

Centroid updates come in two flavors: per-dimension arithmetic mean rounded
half-to-even onto the word grid, or per-dimension bit-serial median (the
lower median for even membership) computed by the bit-plane engine, either
directly or through the tiled simulator with its cost ledger.

All distances are exact integer arithmetic on the encoded words, so runs are
bit-deterministic and the reference and simulated engines produce identical
models.  The metric defaults pair with the centroid rule that minimizes them:
squared Euclidean with the mean, Manhattan (L1) with the median; with that
pairing the objective never increases from one iteration to the next.  Ties
everywhere break toward the lowest index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from . import bitplane
from .errors import KError, RangeError
from .pimsim import CostLedger, TileConfig, partition, simulated_median, streaming_baseline_cost

__all__ = [
    "ClusterConfig",
    "ClusterModel",
    "IterationStats",
    "MedianEngine",
    "SweepResult",
    "SweepRow",
    "assign",
    "distance",
    "init_centroids",
    "objective",
    "recompute_mean",
    "recompute_median",
    "run",
    "silhouette_score",
    "sweep_k",
]

MODES = ("mean", "median")
METRICS = ("sqeuclidean", "manhattan")
ENGINES = ("reference", "simulated")


def _dist_sq(a, b) -> int:
    s = 0
    for x, y in zip(a, b):
        d = x - y
        s += d * d
    return s


def _dist_l1(a, b) -> int:
    s = 0
    for x, y in zip(a, b):
        s += x - y if x >= y else y - x
    return s


_DIST = {"sqeuclidean": _dist_sq, "manhattan": _dist_l1}


def distance(a, b, metric: str) -> int:
    """Exact word-domain distance between two coordinate tuples."""
    return _DIST[metric](a, b)


@dataclass(frozen=True)
class ClusterConfig:
    """Knobs for one clustering run.

    ``metric=None`` pairs the metric with the centroid mode (squared
    Euclidean for mean, Manhattan for median).  ``convergence_epsilon`` is a
    fraction of the minimum pairwise distance between the initial centroids;
    0 means exact fixed-point equality.  ``width`` is the bit width of the
    encoded words.  ``tile`` configures the simulated engine.
    """

    k: int
    seed: int = 1
    max_iters: int = 100
    centroid_mode: str = "median"
    metric: str | None = None
    convergence_epsilon: float = 0.0
    engine: str = "reference"
    width: int = 64
    tile: TileConfig | None = None

    def __post_init__(self):
        if self.centroid_mode not in MODES:
            raise ValueError(f"centroid_mode must be one of {MODES}")
        if self.metric is not None and self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.convergence_epsilon < 0:
            raise ValueError("convergence_epsilon must be >= 0")

    @property
    def resolved_metric(self) -> str:
        if self.metric is not None:
            return self.metric
        return "sqeuclidean" if self.centroid_mode == "mean" else "manhattan"


@dataclass(frozen=True)
class IterationStats:
    """End-of-iteration snapshot: word-domain objective and reassignments."""

    objective: int
    moved: int


@dataclass
class ClusterModel:
    config: ClusterConfig
    centroids: tuple[tuple[int, ...], ...]
    assignments: tuple[int, ...]
    iterations_run: int
    converged: bool
    trace: tuple[IterationStats, ...]
    ledger: CostLedger | None = None


def init_centroids(data, k: int, seed: int):
    """Copies of k distinct rows chosen by a seeded partial Fisher-Yates."""
    n = len(data)
    if not 1 <= k <= n:
        raise KError(f"k must be in 1..{n}, got {k}")
    rng = random.Random(seed)
    idx = list(range(n))
    for i in range(k):
        j = rng.randrange(i, n)
        idx[i], idx[j] = idx[j], idx[i]
    return [tuple(data[idx[i]]) for i in range(k)]


def assign(data, centroids, metric: str = "sqeuclidean"):
    """Label each row with its nearest centroid (ties to the lowest index)."""
    dist = _DIST[metric]
    labels = []
    for row in data:
        best = 0
        best_d = dist(row, centroids[0])
        for j in range(1, len(centroids)):
            dj = dist(row, centroids[j])
            if dj < best_d:
                best, best_d = j, dj
        labels.append(best)
    return labels


def _div_round_half_even(num: int, den: int) -> int:
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q % 2):
        q += 1
    return q


def _reseed(data, centroid, metric: str):
    """Deterministic replacement for an emptied cluster: the row farthest
    from the cluster's current centroid (ties to the lowest index)."""
    dist = _DIST[metric]
    best = 0
    best_d = dist(data[0], centroid)
    for i in range(1, len(data)):
        di = dist(data[i], centroid)
        if di > best_d:
            best, best_d = i, di
    return tuple(data[best])


def recompute_mean(data, labels, k: int, centroids, metric: str = "sqeuclidean"):
    """Per-cluster, per-dimension mean rounded half-to-even onto the grid.

    The rounded mean is the word minimizing the within-cluster squared error,
    so with the squared-Euclidean metric this step never increases the
    objective.  Empty clusters are reseeded (see :func:`_reseed`).
    """
    d = len(data[0])
    sums = [[0] * d for _ in range(k)]
    counts = [0] * k
    for row, lab in zip(data, labels):
        counts[lab] += 1
        s = sums[lab]
        for j in range(d):
            s[j] += row[j]
    out = []
    for c in range(k):
        if counts[c] == 0:
            out.append(_reseed(data, centroids[c], metric))
        else:
            out.append(
                tuple(_div_round_half_even(s, counts[c]) for s in sums[c])
            )
    return out


class MedianEngine:
    """Per-dimension bit-plane matrices over one dataset, reused across
    iterations; masks select cluster members.  With a tile config the
    selections run through the simulator and accumulate a ledger (plus the
    streaming baseline for the same selections)."""

    def __init__(self, data, width: int, tile: TileConfig | None = None):
        d = len(data[0])
        self.width = width
        self.matrices = [
            bitplane.build_bitplanes([row[j] for row in data], width)
            for j in range(d)
        ]
        self.plans = [partition(m, tile) for m in self.matrices] if tile else None
        self.ledger = CostLedger() if tile else None

    def median(self, dim: int, mask: int) -> int:
        if self.plans is None:
            return bitplane.median(self.matrices[dim], mask)
        word, _ = simulated_median(self.plans[dim], mask, self.ledger)
        streaming_baseline_cost(mask.bit_count(), self.width, self.ledger)
        return word


def recompute_median(
    data,
    labels,
    k: int,
    centroids,
    engine: MedianEngine,
    metric: str = "manhattan",
):
    """Per-cluster, per-dimension bit-serial median of the members.

    The lower median is an L1 minimizer over the grid, so with the Manhattan
    metric this step never increases the objective.  Empty clusters are
    reseeded as in the mean mode.
    """
    d = len(data[0])
    masks = [0] * k
    for i, lab in enumerate(labels):
        masks[lab] |= 1 << i
    out = []
    for c in range(k):
        if masks[c] == 0:
            out.append(_reseed(data, centroids[c], metric))
        else:
            out.append(tuple(engine.median(j, masks[c]) for j in range(d)))
    return out


def run(data, cfg: ClusterConfig) -> ClusterModel:
    """Alternate assignment and centroid recomputation until convergence.

    Convergence: every centroid moved a distance of exactly 0 (always), or
    strictly less than ``epsilon * min_initial_separation`` when epsilon > 0.
    Stops at ``max_iters`` regardless.  The returned assignments are argmin
    against the final centroids.  The first iteration's ``moved`` count is n.
    """
    data = [tuple(r) for r in data]
    n = len(data)
    if n == 0:
        raise KError("cannot cluster an empty dataset")
    metric = cfg.resolved_metric
    dist = _DIST[metric]

    cents = init_centroids(data, cfg.k, cfg.seed)
    minsep = 0
    if cfg.k >= 2:
        minsep = min(
            dist(cents[a], cents[b])
            for a in range(cfg.k)
            for b in range(a + 1, cfg.k)
        )
    threshold = cfg.convergence_epsilon * minsep

    engine = None
    ledger = None
    if cfg.centroid_mode == "median":
        tile = (cfg.tile or TileConfig()) if cfg.engine == "simulated" else None
        engine = MedianEngine(data, cfg.width, tile)
        ledger = engine.ledger
    elif cfg.engine == "simulated":
        ledger = CostLedger()  # mean mode performs no in-situ selections

    labels = None
    trace = []
    converged = False
    it = 0
    while it < cfg.max_iters and not converged:
        it += 1
        new_labels = assign(data, cents, metric)
        moved = (
            n if labels is None else sum(a != b for a, b in zip(labels, new_labels))
        )
        labels = new_labels
        if cfg.centroid_mode == "mean":
            new_cents = recompute_mean(data, labels, cfg.k, cents, metric)
        else:
            new_cents = recompute_median(data, labels, cfg.k, cents, engine, metric)
        obj = 0
        for row, lab in zip(data, labels):
            obj += dist(row, new_cents[lab])
        trace.append(IterationStats(obj, moved))
        moves = [dist(o, c) for o, c in zip(cents, new_cents)]
        cents = new_cents
        if all(mv == 0 for mv in moves):
            converged = True
        elif cfg.convergence_epsilon > 0 and max(moves) < threshold:
            converged = True

    final_labels = assign(data, cents, metric)
    return ClusterModel(
        config=cfg,
        centroids=tuple(cents),
        assignments=tuple(final_labels),
        iterations_run=it,
        converged=converged,
        trace=tuple(trace),
        ledger=ledger,
    )


def objective(data, model: ClusterModel, metric: str | None = None) -> int:
    """Sum of word-domain distances from each row to its assigned centroid."""
    dist = _DIST[metric or model.config.resolved_metric]
    total = 0
    for row, lab in zip(data, model.assignments):
        total += dist(tuple(row), model.centroids[lab])
    return total


def silhouette_score(data, labels, metric: str = "manhattan") -> float:
    """Mean silhouette over all points.

    Per point: a = mean distance to its own cluster's other members, b = the
    smallest mean distance to any other non-empty cluster; s = (b-a)/max(a,b).
    Points in singleton clusters score 0, as do points where max(a,b) = 0.
    """
    dist = _DIST[metric]
    data = [tuple(r) for r in data]
    k = max(labels) + 1
    members = [[] for _ in range(k)]
    for i, lab in enumerate(labels):
        members[lab].append(i)
    total = 0.0
    for i, row in enumerate(data):
        own = labels[i]
        if len(members[own]) <= 1:
            continue  # defined as 0
        a = sum(dist(row, data[j]) for j in members[own] if j != i) / (
            len(members[own]) - 1
        )
        b = None
        for c in range(k):
            if c == own or not members[c]:
                continue
            m = sum(dist(row, data[j]) for j in members[c]) / len(members[c])
            if b is None or m < b:
                b = m
        if b is None:
            continue  # single non-empty cluster
        denom = max(a, b)
        if denom > 0:
            total += (b - a) / denom
    return total / len(data)


@dataclass
class SweepRow:
    k: int
    objective: int
    iterations: int
    converged: bool
    silhouette: float | None = None


@dataclass
class SweepResult:
    k_opt: int | None
    rows: list[SweepRow] = field(default_factory=list)


def sweep_k(
    data,
    cfg: ClusterConfig,
    k_min: int,
    k_max: int,
    quality: str = "silhouette",
) -> SweepResult:
    """Run the clustering for every k strictly between k_min and k_max.

    With ``quality="silhouette"`` the best k is the mean-silhouette argmax
    (ties to the smallest k).  With ``quality="objective"`` the per-k
    objectives are reported without an automatic pick (elbow reading is up
    to the caller).
    """
    if quality not in ("silhouette", "objective"):
        raise ValueError("quality must be 'silhouette' or 'objective'")
    n = len(data)
    if not 1 <= k_min < k_max <= n:
        raise RangeError(f"need 1 <= k_min < k_max <= {n}, got [{k_min}, {k_max}]")
    candidates = range(k_min + 1, k_max)
    if not candidates:
        raise RangeError(f"no k strictly between {k_min} and {k_max}")
    metric = cfg.resolved_metric
    result = SweepResult(k_opt=None)
    for k in candidates:
        model = run(data, replace(cfg, k=k))
        row = SweepRow(
            k=k,
            objective=objective(data, model),
            iterations=model.iterations_run,
            converged=model.converged,
        )
        if quality == "silhouette":
            row.silhouette = silhouette_score(data, model.assignments, metric)
        result.rows.append(row)
    if quality == "silhouette":
        best = max(result.rows, key=lambda r: (r.silhouette, -r.k))
        result.k_opt = best.k
    return result
