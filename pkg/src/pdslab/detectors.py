"""Detection tests for the planted dense subgraph problem.

Two primitive statistics drive everything here: the total edge count (a
linear-time test) and the maximum edge count over all K-vertex subsets (the
scan statistic, exponential to compute exactly).  Their thresholds are

    tau_lin  = C(N,2) q + C(K,2) (p - q) / 2
    tau_scan = C(K,2) (p + q) / 2

and every comparison against a threshold is strict: ties go to H0.

Exact scan enumeration is budgeted by the number of subsets visited (not by
wall time, so runs are reproducible); above budget callers must fall back
to the restart hill-climbing heuristic, whose value never exceeds the true
maximum.  Derived detectors wrap user-supplied subgraph finders: one
thresholds the density of a densest-K-subgraph approximation, the other
runs a recovery algorithm over a sequence of progressively resampled graphs
and scans the recovered sets' edge counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .errors import (
    BudgetExceededError,
    ContractViolationError,
    InvalidParameterError,
    PreconditionViolationError,
    TooLargeError,
    VertexCountMismatchError,
)
from .graphmodels import Graph, PdsParams, subgraph_edge_count
from .randkit import Seed, as_seed

__all__ = [
    "H0",
    "H1",
    "TestOutcome",
    "ErrorEstimate",
    "DEFAULT_SCAN_BUDGET",
    "t_lin",
    "tau_lin",
    "t_scan_exact",
    "t_scan_heuristic",
    "tau_scan",
    "combined_test",
    "prop2_bound_lin",
    "dks_detector",
    "recovery_detector",
    "estimate_errors",
    "is_monotone",
]

H0 = "H0"
H1 = "H1"

DEFAULT_SCAN_BUDGET = 10_000_000

# Subset tables are memoized only above this size; smaller ones are cheap
# to rebuild and not worth the memory.
_COMBO_CACHE_MIN = 500_000
_combo_cache: dict = {}


def _comb2(x: float) -> float:
    return x * (x - 1) / 2.0


@dataclass(frozen=True)
class TestOutcome:
    """A test statistic, its threshold, and the resulting decision.

    The decision is H1 exactly when statistic > threshold (strictly).  For
    the combined test the statistic is the larger of the two margins and
    the threshold is zero, which preserves that invariant.
    """

    statistic: float
    threshold: float
    decision: str
    parts: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        want = H1 if self.statistic > self.threshold else H0
        if self.decision != want:
            raise InvalidParameterError(
                f"decision {self.decision} inconsistent with statistic/threshold"
            )


@dataclass(frozen=True)
class ErrorEstimate:
    """Monte Carlo Type-I/Type-II rates with 95% normal-approx radii."""

    type1: float
    type2: float
    trials: int
    ci_radius: tuple

    @staticmethod
    def from_rates(type1: float, type2: float, trials: int) -> "ErrorEstimate":
        def radius(r):
            return 1.96 * math.sqrt(r * (1.0 - r) / trials)

        return ErrorEstimate(type1, type2, trials, (radius(type1), radius(type2)))


def t_lin(g: Graph) -> int:
    """Linear statistic: the total number of edges."""
    return g.num_edges


def tau_lin(params: PdsParams) -> float:
    """Threshold for the linear test, halfway up the planted mean shift."""
    return _comb2(params.N) * params.q + _comb2(params.K) * (params.p - params.q) / 2.0


def tau_scan(K: int, p: float, q: float) -> float:
    """Threshold for the scan test: C(K,2) times the midpoint density."""
    if K < 1:
        raise InvalidParameterError("need K >= 1")
    return _comb2(K) * (p + q) / 2.0


def _subset_table(N: int, K: int, total: int) -> np.ndarray:
    key = (N, K)
    cached = _combo_cache.get(key)
    if cached is not None:
        return cached
    dtype = np.uint8 if N <= 255 else np.int32
    flat = np.fromiter(
        (v for combo in combinations(range(N), K) for v in combo),
        dtype=dtype,
        count=total * K,
    )
    table = flat.reshape(total, K)
    if total >= _COMBO_CACHE_MIN:
        _combo_cache.clear()  # keep at most one large table resident
        _combo_cache[key] = table
    return table


def t_scan_exact(g: Graph, K: int, budget: int = DEFAULT_SCAN_BUDGET):
    """Maximum edge count over all K-subsets, plus the first argmax.

    Subsets are enumerated in lexicographic order, so the returned set is
    the lexicographically smallest among ties.  Raises BudgetExceededError
    when C(N, K) exceeds the subset budget.
    """
    N = g.num_vertices
    if not (0 <= K <= N):
        raise InvalidParameterError(f"need 0 <= K <= N, got K={K}, N={N}")
    if K <= 1:
        return 0, tuple(range(K))
    total = math.comb(N, K)
    if total > budget:
        raise BudgetExceededError(
            f"C({N},{K}) = {total} subsets exceeds the budget of {budget}"
        )
    combos = _subset_table(N, K, total)
    a_flat = g.adjacency_matrix().reshape(-1)
    acc_dtype = np.uint8 if _comb2(K) <= 255 else np.int32
    acc = np.zeros(total, dtype=acc_dtype)
    for a, b in combinations(range(K), 2):
        idx = combos[:, a].astype(np.int64) * N + combos[:, b]
        acc += a_flat[idx].astype(acc_dtype)
    best = int(np.argmax(acc))
    return int(acc[best]), tuple(int(v) for v in combos[best])


def t_scan_heuristic(g: Graph, K: int, restarts: int, seed):
    """Best-of-restarts steepest-ascent 1-swap search for a dense K-subset.

    Always a lower bound on the exact scan statistic.  Deterministic given
    the seed: each restart uses its own derived stream, swap candidates are
    scanned in sorted vertex order, and ties keep the earliest candidate.
    """
    N = g.num_vertices
    if not (1 <= K <= N):
        raise InvalidParameterError(f"need 1 <= K <= N, got K={K}, N={N}")
    if K == 1:
        return 0, (0,)
    if restarts < 1:
        raise InvalidParameterError("need at least one restart")
    A = g.adjacency_matrix().astype(np.int64)
    root = as_seed(seed)
    best_count = -1
    best_set = None
    for r in range(restarts):
        rng = root.child(r).rng()
        in_s = np.zeros(N, dtype=bool)
        in_s[rng.permutation(N)[:K]] = True
        deg_s = A @ in_s
        count = int(deg_s[in_s].sum()) // 2
        while True:
            members = np.nonzero(in_s)[0]
            outside = np.nonzero(~in_s)[0]
            if outside.size == 0:
                break
            gains = deg_s[outside][None, :] - deg_s[members][:, None] - A[np.ix_(members, outside)]
            flat = int(np.argmax(gains))
            gain = int(gains.reshape(-1)[flat])
            if gain <= 0:
                break
            u = int(members[flat // outside.size])
            v = int(outside[flat % outside.size])
            in_s[u] = False
            in_s[v] = True
            deg_s += A[:, v] - A[:, u]
            count += gain
        cand = tuple(int(x) for x in np.nonzero(in_s)[0])
        if count > best_count or (count == best_count and cand < best_set):
            best_count, best_set = count, cand
    return best_count, best_set


def combined_test(
    g: Graph,
    params: PdsParams,
    scan_mode: str = "exact",
    restarts: int = 20,
    seed=None,
    budget: int = DEFAULT_SCAN_BUDGET,
) -> TestOutcome:
    """Declare H1 when either the linear or the scan statistic clears its
    threshold.  The outcome statistic is the larger threshold margin."""
    lin = t_lin(g)
    t1 = tau_lin(params)
    if scan_mode == "exact":
        scan, _ = t_scan_exact(g, params.K, budget=budget)
    elif scan_mode == "heuristic":
        scan, _ = t_scan_heuristic(g, params.K, restarts, Seed(0) if seed is None else seed)
    else:
        raise InvalidParameterError(f"unknown scan_mode {scan_mode!r}")
    t2 = tau_scan(params.K, params.p, params.q)
    margin = max(lin - t1, scan - t2)
    decision = H1 if margin > 0.0 else H0
    parts = {
        "t_lin": lin,
        "tau_lin": t1,
        "t_scan": scan,
        "tau_scan": t2,
        "scan_mode": scan_mode,
    }
    return TestOutcome(statistic=margin, threshold=0.0, decision=decision, parts=parts)


def prop2_bound_lin(params: PdsParams):
    """Explicit Bernstein-style error bounds for the linear test.

    Type-I: exp(-(C(K,2)^2 (p-q)^2 / 4) / (2 C(N,2) q + C(K,2)(p-q)/3)).
    Type-II evaluates the matching Chernoff expression at the conditioning
    boundary K' = 0.9 K and adds the exp(-K/200) conditioning term.  Both
    are clamped into (0, 1]; a vacuous bound reports as 1.
    """
    N, K, p, q = params.N, params.K, params.p, params.q
    gap = p - q

    num1 = _comb2(K) ** 2 * gap**2 / 4.0
    den1 = 2.0 * _comb2(N) * q + _comb2(K) * gap / 3.0
    if num1 == 0.0:
        type1 = 1.0
    elif den1 <= 0.0:
        type1 = 0.0
    else:
        type1 = math.exp(-num1 / den1)

    kp = 0.9 * K
    num2 = (2.0 * _comb2(kp) - _comb2(K)) ** 2 * gap**2
    den2 = 8.0 * (_comb2(N) * q + _comb2(kp) * gap)
    if num2 == 0.0 or den2 <= 0.0:
        main2 = 1.0
    else:
        main2 = math.exp(-num2 / den2)
    type2 = min(1.0, main2 + math.exp(-K / 200.0))
    return min(1.0, type1), type2


def dks_detector(
    dks_alg: Callable[[Graph], object],
    eta: float,
    epsilon: float,
    params: PdsParams,
) -> Callable[[Graph], str]:
    """Turn any densest-K-subgraph approximation into a detector.

    The wrapped algorithm must return a K-vertex set; H1 is declared when
    the density of that set strictly exceeds (1 + epsilon) q.
    """
    if params.q <= 0.0:
        raise InvalidParameterError("dks detector needs q > 0")
    c = params.p / params.q
    if not ((1.0 - epsilon) * c > (1.0 + epsilon) * eta):
        raise InvalidParameterError(
            f"need (1-eps)c > (1+eps)eta, got c={c}, eta={eta}, eps={epsilon}"
        )
    cutoff = (1.0 + epsilon) * params.q
    pairs = _comb2(params.K)

    def test(g: Graph) -> str:
        s_hat = list(dks_alg(g))
        if len(set(s_hat)) != params.K:
            raise ContractViolationError(
                f"dks algorithm returned {len(set(s_hat))} vertices, expected {params.K}"
            )
        density = subgraph_edge_count(g, s_hat) / pairs
        return H1 if density > cutoff else H0

    return test


def recovery_detector(
    recovery_alg: Callable[[Graph], object],
    params: PdsParams,
    epsilon: float,
    seed,
) -> Callable[[Graph], str]:
    """Detector built from a planted-set recovery algorithm.

    On input G it draws a uniform random vertex order, resamples vertices
    one at a time (each replacement reconnects to all others independently
    with probability q), runs the recovery algorithm on every intermediate
    graph, and declares H1 as soon as a recovered set's edge count strictly
    exceeds tau * C(K,2) with tau = q + (1-eps)^2 (p-q)/2.

    Resampling randomness is derived from the captured seed and a digest of
    the input graph, so repeated calls on the same graph are reproducible
    and distinct inputs get fresh coins.
    """
    if epsilon >= 1.0:
        raise PreconditionViolationError("need epsilon < 1")
    tau = recovery_threshold(params.q, params.p, epsilon)
    cutoff = tau * _comb2(params.K)
    root = as_seed(seed)

    def test(g: Graph) -> str:
        N = params.N
        if g.num_vertices != N:
            raise VertexCountMismatchError(
                f"graph has {g.num_vertices} vertices, parameters say {N}"
            )
        rng = root.child(g.fingerprint()).rng()
        order = rng.permutation(N)
        adj = g.adjacency_matrix().copy()
        for t in range(N):
            v = int(order[t])
            row = (rng.random(N) < params.q).astype(np.uint8)
            row[v] = 0
            adj[v, :] = row
            adj[:, v] = row
            iu, iv = np.nonzero(np.triu(adj, 1))
            g_t = Graph(N, np.column_stack([iu, iv]))
            recovered = list(recovery_alg(g_t))
            if len(set(recovered)) != params.K:
                raise ContractViolationError(
                    f"recovery returned {len(set(recovered))} vertices, expected {params.K}"
                )
            # max_i only matters through the threshold, so stop at first hit
            if subgraph_edge_count(g_t, recovered) > cutoff:
                return H1
        return H0

    return test


def recovery_threshold(q: float, p: float, epsilon: float) -> float:
    """tau = q + (1-eps)^2 (p-q) / 2, the recovery detector's density cut."""
    return q + (1.0 - epsilon) ** 2 * (p - q) / 2.0


def estimate_errors(
    null_gen: Callable[[Seed], Graph],
    alt_gen: Callable[[Seed], Graph],
    test: Callable[[Graph], object],
    trials: int,
    seed,
    workers: int = 1,
) -> ErrorEstimate:
    """Empirical Type-I/Type-II rates over independent trials.

    Generators are callables Seed -> Graph.  Trial i of each arm uses its
    own derived seed, so results do not depend on execution order or on the
    worker count.
    """
    if trials < 1:
        raise InvalidParameterError("need at least one trial")
    root = as_seed(seed)
    null_root = root.child(0)
    alt_root = root.child(1)

    def run_null(i: int) -> bool:
        return _decision(test(null_gen(null_root.child(i)))) == H1

    def run_alt(i: int) -> bool:
        return _decision(test(alt_gen(alt_root.child(i)))) == H0

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            false_alarms = list(pool.map(run_null, range(trials)))
            misses = list(pool.map(run_alt, range(trials)))
    else:
        false_alarms = [run_null(i) for i in range(trials)]
        misses = [run_alt(i) for i in range(trials)]
    return ErrorEstimate.from_rates(sum(false_alarms) / trials, sum(misses) / trials, trials)


def _decision(result) -> str:
    if isinstance(result, TestOutcome):
        return result.decision
    if result in (H0, H1):
        return result
    raise ContractViolationError(f"test returned {result!r}, expected H0/H1 or TestOutcome")


def is_monotone(test: Callable[[Graph], object], N: int) -> bool:
    """Exhaustively check that H1 decisions survive edge additions.

    Enumerates all 2^C(N,2) graphs and every single-edge addition; only
    feasible for N <= 5.
    """
    if N > 5:
        raise TooLargeError("exhaustive monotonicity check is capped at N = 5")
    pairs = list(combinations(range(N), 2))
    n_pairs = len(pairs)
    decisions = np.empty(1 << n_pairs, dtype=bool)
    for mask in range(1 << n_pairs):
        edges = [pairs[i] for i in range(n_pairs) if mask >> i & 1]
        decisions[mask] = _decision(test(Graph(N, edges))) == H1
    for mask in range(1 << n_pairs):
        if not decisions[mask]:
            continue
        for i in range(n_pairs):
            if not mask >> i & 1 and not decisions[mask | (1 << i)]:
                return False
    return True
