"""Numeric verification of the supporting lemmas by exact computation.

Every check here reduces a proved inequality or identity to finite
arithmetic: PMF summation, exhaustive enumeration of ball-in-bin
assignments, or enumeration of the full graph space at tiny sizes.  Checks
return :class:`CheckReport` records and never assert; the CLI and the test
suite decide what a failure means.  Exhaustive enumerations are capped near
10^7 elementary outcomes and raise instead of silently sampling.

The negative-association check exercises a fixed battery of non-decreasing
functions; it can falsify the product bound but (being a finite battery)
cannot prove it, and its report name says so.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable

import numpy as np

from .errors import (
    InvalidParameterError,
    PreconditionViolationError,
    TooLargeError,
)
from .graphmodels import Graph
from .randkit import Pmf, binom_pmf, hyper_pmf, tv_distance
from .reduction import KernelTable, ReductionParams, build_pprime, build_qprime, m0_of

__all__ = [
    "CheckReport",
    "CHECK_TOL",
    "check_mixture_identity",
    "check_pprime_tv",
    "default_kernel_grid",
    "chi2_planted_vs_null_exact",
    "chi2_bruteforce",
    "check_decoupling",
    "check_binom_dominance",
    "check_negative_association",
    "hyper_mgf",
    "er_law_exact",
    "pds_law_exact",
    "pds_fixed_law_exact",
    "reduced_law_exact",
    "reduction_null_tv_exact",
    "reduction_alt_tv_exact",
    "reduction_null_tv_bipartite_exact",
    "battery_kernel",
    "battery_lemmas",
    "battery_reduction_exact",
]

CHECK_TOL = 1e-10

_ENUMERATION_CAP = 10_000_000


@dataclass(frozen=True)
class CheckReport:
    """One verified inequality: satisfied means lhs <= rhs + CHECK_TOL."""

    name: str
    params: dict = field(compare=False)
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs + CHECK_TOL

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "params": self.params,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "satisfied": self.satisfied,
                "slack": self.slack,
            },
            sort_keys=True,
        )


# ---------------------------------------------------------------------------
# kernel identity and closeness
# ---------------------------------------------------------------------------


def default_kernel_grid(
    sizes: Iterable[int] = range(1, 7),
    qs: Iterable[float] = (1e-3, 1e-2),
    gammas: Iterable[float] = (0.5, 0.25),
):
    """The standard (ls, lt, q, gamma, ell) grid with ell = max(ls, lt),
    filtered by the validity condition 16 q ell^2 <= 1."""
    grid = []
    sizes = list(sizes)
    for ls, lt, q, gamma in product(sizes, sizes, qs, gammas):
        ell = max(ls, lt)
        if 16.0 * q * ell**2 <= 1.0:
            grid.append((ls, lt, q, gamma, ell))
    return grid


def check_mixture_identity(grid) -> list:
    """Pointwise deviation of (1-gamma) Q' + gamma P' from Binom(ls*lt, q)."""
    reports = []
    for ls, lt, q, gamma, _ell in grid:
        p_prime, _ = build_pprime(ls, lt, q, gamma)
        q_prime = build_qprime(ls, lt, q, gamma)
        target = binom_pmf(ls * lt, q)
        mix = (1.0 - gamma) * q_prime.probs + gamma * p_prime.probs
        deviation = float(np.max(np.abs(mix - target.probs)))
        reports.append(
            CheckReport(
                name="kernel-mixture-identity",
                params={"ls": ls, "lt": lt, "q": q, "gamma": gamma},
                lhs=deviation,
                rhs=1e-12,
            )
        )
    return reports


def check_pprime_tv(grid) -> list:
    """tv(P', Binom(ls*lt, 2q)) against the 4 (8 q ell^2)^(m0+1) bound."""
    reports = []
    for ls, lt, q, gamma, ell in grid:
        p_prime, _ = build_pprime(ls, lt, q, gamma)
        target = binom_pmf(ls * lt, 2.0 * q)
        bound = 4.0 * (8.0 * q * ell**2) ** (m0_of(gamma) + 1)
        reports.append(
            CheckReport(
                name="kernel-pprime-tv",
                params={"ls": ls, "lt": lt, "q": q, "gamma": gamma, "ell": ell},
                lhs=tv_distance(p_prime, target),
                rhs=bound,
            )
        )
    return reports


# ---------------------------------------------------------------------------
# chi-square identity for the planted model
# ---------------------------------------------------------------------------


def chi2_planted_vs_null_exact(N: int, Kp: int, p: float, q: float) -> float:
    """chi^2 of the size-Kp planted law from the null, via the overlap
    identity: E[(1 + (p-q)^2 / (q(1-q)))^C(H,2)] - 1, H hypergeometric."""
    if not (1 <= Kp <= N):
        raise InvalidParameterError(f"need 1 <= Kp <= N, got Kp={Kp}, N={N}")
    if not (0.0 < q < 1.0):
        raise InvalidParameterError("need 0 < q < 1 for the chi-square reference")
    ratio = 1.0 + (p - q) ** 2 / (q * (1.0 - q))
    overlap = hyper_pmf(N, Kp, Kp)
    total = math.fsum(
        overlap[h] * ratio ** (h * (h - 1) // 2) for h in range(overlap.max_value + 1)
    )
    return total - 1.0


def _graph_space(N: int):
    pairs = list(combinations(range(N), 2))
    n_pairs = len(pairs)
    if 1 << n_pairs > _ENUMERATION_CAP:
        raise TooLargeError(f"graph space 2^{n_pairs} exceeds the enumeration cap")
    return pairs, n_pairs


def er_law_exact(N: int, q: float) -> np.ndarray:
    """G(N, q) law as a vector over all edge masks (lex pair order)."""
    pairs, n_pairs = _graph_space(N)
    masks = np.arange(1 << n_pairs, dtype=np.int64)
    pop = _popcount(masks)
    return q**pop * (1.0 - q) ** (n_pairs - pop)


def pds_fixed_law_exact(N: int, Kp: int, p: float, q: float) -> np.ndarray:
    """Planted law conditional on a uniform size-Kp planted set."""
    pairs, n_pairs = _graph_space(N)
    masks = np.arange(1 << n_pairs, dtype=np.int64)
    law = np.zeros(masks.size)
    subsets = list(combinations(range(N), Kp))
    for subset in subsets:
        law += _planted_given_set(masks, pairs, set(subset), p, q)
    return law / len(subsets)


def pds_law_exact(N: int, K: int, p: float, q: float) -> np.ndarray:
    """Planted law with independent Bernoulli(K/N) memberships."""
    pairs, n_pairs = _graph_space(N)
    masks = np.arange(1 << n_pairs, dtype=np.int64)
    law = np.zeros(masks.size)
    rho = K / N
    for bits in range(1 << N):
        subset = {v for v in range(N) if bits >> v & 1}
        weight = rho ** len(subset) * (1.0 - rho) ** (N - len(subset))
        law += weight * _planted_given_set(masks, pairs, subset, p, q)
    return law


def _planted_given_set(masks, pairs, subset, p, q):
    inside = np.array([u in subset and v in subset for u, v in pairs])
    present = np.stack([(masks >> i) & 1 for i in range(len(pairs))], axis=1).astype(bool)
    probs = np.where(
        inside[None, :],
        np.where(present, p, 1.0 - p),
        np.where(present, q, 1.0 - q),
    )
    return probs.prod(axis=1)


def chi2_bruteforce(N: int, Kp: int, p: float, q: float) -> float:
    """Graph-space chi-square, the independent cross-check of the identity."""
    p1 = pds_fixed_law_exact(N, Kp, p, q)
    p0 = er_law_exact(N, q)
    return float(np.sum((p1 - p0) ** 2 / p0))


def _popcount(masks: np.ndarray) -> np.ndarray:
    out = np.zeros_like(masks)
    work = masks.copy()
    while np.any(work):
        out += work & 1
        work >>= 1
    return out


# ---------------------------------------------------------------------------
# lemma checks
# ---------------------------------------------------------------------------


def check_decoupling(ell: int, tau: float, lam: float) -> CheckReport:
    """E[exp(lam T(T-1))] <= exp(16 lam ell^2 tau^2) for T ~ Binom(ell, tau),
    valid whenever lam * ell <= 1/16."""
    if lam * ell > 1.0 / 16.0:
        raise PreconditionViolationError(f"need lam*ell <= 1/16, got {lam * ell:g}")
    dist = binom_pmf(ell, tau)
    lhs = math.fsum(dist[t] * math.exp(lam * t * (t - 1)) for t in range(ell + 1))
    rhs = math.exp(16.0 * lam * ell**2 * tau**2)
    return CheckReport(
        name="decoupling-mgf",
        params={"ell": ell, "tau": tau, "lam": lam},
        lhs=lhs,
        rhs=rhs,
    )


def check_binom_dominance(K: int, k: int, ell: int) -> list:
    """Pointwise Binom(1.5K, 1/k^2) <= Binom(3 ell, e/k) on 1..2*ell-1, plus
    the tail comparison at 2*ell.  1.5K is floored when fractional (the
    dominated overlap count never exceeds floor(1.5K))."""
    if K != k * ell:
        raise PreconditionViolationError(f"need K = k*ell, got K={K}, k*ell={k * ell}")
    if k < 6.0 * math.e * ell:
        raise PreconditionViolationError(f"need k >= 6e*ell, got k={k}, 6e*ell={6 * math.e * ell:g}")
    x = binom_pmf(math.floor(1.5 * K), 1.0 / k**2)
    y = binom_pmf(3 * ell, math.e / k)
    base = {"K": K, "k": k, "ell": ell}
    reports = []
    for m in range(1, 2 * ell):
        reports.append(
            CheckReport(
                name="binom-dominance-point",
                params={**base, "m": m},
                lhs=x[m],
                rhs=y[m],
            )
        )
    tail = math.fsum(x[m] for m in range(2 * ell, x.max_value + 1)) if x.max_value >= 2 * ell else 0.0
    reports.append(
        CheckReport(
            name="binom-dominance-tail",
            params={**base, "m": f">={2 * ell}"},
            lhs=tail,
            rhs=y[2 * ell] if y.max_value >= 2 * ell else 0.0,
        )
    )
    return reports


_NA_BATTERY = (
    ("identity", lambda x: x.astype(np.float64)),
    ("square", lambda x: x.astype(np.float64) ** 2),
    ("exp-quadratic", lambda x: np.exp(0.1 * x.astype(np.float64) ** 2)),
    ("threshold-at-2", lambda x: (x >= 2).astype(np.float64)),
)


def check_negative_association(k: int, S_size: int) -> CheckReport:
    """Product-form bound for overlap counts of two independent uniform
    ball-in-bin assignments, checked exhaustively on a fixed battery of
    non-decreasing functions.  A finite battery can only falsify the
    property, never prove it; the report records the worst violation."""
    if k > 3 or S_size > 6:
        raise TooLargeError("exhaustive check capped at k <= 3, S_size <= 6")
    if k < 1 or S_size < 1:
        raise InvalidParameterError("need k >= 1 and S_size >= 1")
    assignments = np.array(list(product(range(k), repeat=S_size)), dtype=np.int64)
    n_assign = assignments.shape[0]
    counts = np.zeros((n_assign, n_assign, k * k), dtype=np.int16)
    for ball in range(S_size):
        cell = assignments[:, ball][:, None] * k + assignments[None, :, ball]
        for c in range(k * k):
            counts[:, :, c] += cell == c
    worst = -math.inf
    worst_fn = None
    for fn_name, fn in _NA_BATTERY:
        vals = fn(counts)
        lhs = float(vals.prod(axis=2).mean())
        rhs = float(vals.reshape(-1, k * k).mean(axis=0).prod())
        if lhs - rhs > worst:
            worst = lhs - rhs
            worst_fn = fn_name
    return CheckReport(
        name="negative-association-battery",
        params={"k": k, "S_size": S_size, "worst_fn": worst_fn},
        lhs=worst,
        rhs=0.0,
    )


def hyper_mgf(pop: int, m: int, lam: float) -> float:
    """E[exp(lam H^2)] for H ~ Hypergeometric(pop, m, m), by summation."""
    if not (0 <= m <= pop):
        raise InvalidParameterError(f"need 0 <= m <= pop, got m={m}, pop={pop}")
    if lam < 0:
        raise InvalidParameterError("need lam >= 0")
    dist = hyper_pmf(pop, m, m)
    return math.fsum(dist[h] * math.exp(lam * h * h) for h in range(dist.max_value + 1))


# ---------------------------------------------------------------------------
# exact reduction-law oracles
# ---------------------------------------------------------------------------


def _block_factor(masks: np.ndarray, slot_ids: list, dist: Pmf) -> np.ndarray:
    """Probability factor of one block across all edge masks: the block's
    count law divided by the number of uniform placements."""
    m = np.zeros(masks.size, dtype=np.int64)
    for i in slot_ids:
        m += (masks >> i) & 1
    n_slots = len(slot_ids)
    weights = np.array([dist[c] / math.comb(n_slots, c) for c in range(n_slots + 1)])
    return weights[m]


def _unipartite_blocks(assignment, n: int, N: int, pair_index: dict):
    members = [[v for v in range(N) if assignment[v] == s] for s in range(n)]
    blocks = []
    for s in range(n):
        for t in range(s, n):
            if s == t:
                ids = [pair_index[u, v] for u, v in combinations(members[s], 2)]
                if ids:
                    blocks.append((s, t, len(members[s]), len(members[t]), ids))
            else:
                ids = [
                    pair_index[min(u, v), max(u, v)]
                    for u in members[s]
                    for v in members[t]
                ]
                if ids:
                    blocks.append((s, t, len(members[s]), len(members[t]), ids))
    return blocks


def reduced_law_exact(g_in: Graph, params: ReductionParams) -> np.ndarray:
    """Exact output law of the reduction for one fixed input graph, as a
    vector over all 2^C(N,2) edge masks.  Sums over every parent
    assignment; only viable for tiny n and ell."""
    n, N = params.n, params.N
    if g_in.num_vertices != n:
        raise InvalidParameterError("input graph size does not match params.n")
    pairs, n_pairs = _graph_space(N)
    if n**N * (1 << n_pairs) > _ENUMERATION_CAP:
        raise TooLargeError("assignment x graph space exceeds the enumeration cap")
    pair_index = {pair: i for i, pair in enumerate(pairs)}
    masks = np.arange(1 << n_pairs, dtype=np.int64)
    table = KernelTable.for_params(params)
    law = np.zeros(masks.size)
    weight = 1.0 / n**N
    for assignment in product(range(n), repeat=N):
        factor = np.full(masks.size, weight)
        for s, t, ls, lt, ids in _unipartite_blocks(assignment, n, N, pair_index):
            if s == t:
                dist = table.plain(len(ids))
            else:
                dist = table.edge_distribution(g_in.has_edge(s, t), ls, lt)
            factor *= _block_factor(masks, ids, dist)
        law += factor
    return law


def reduction_null_tv_exact(params: ReductionParams) -> float:
    """Exact TV between the reduced law of an Erdos-Renyi(gamma) input and
    the target null G(N, q).

    Input edges are independent, and each off-diagonal block consumes a
    distinct input edge, so mixing over the input replaces each block law
    by (1-gamma) Q' + gamma P' analytically; no input enumeration needed.
    """
    n, N, gamma = params.n, params.N, params.gamma
    pairs, n_pairs = _graph_space(N)
    if n**N * (1 << n_pairs) > _ENUMERATION_CAP:
        raise TooLargeError("assignment x graph space exceeds the enumeration cap")
    pair_index = {pair: i for i, pair in enumerate(pairs)}
    masks = np.arange(1 << n_pairs, dtype=np.int64)
    table = KernelTable.for_params(params)
    law = np.zeros(masks.size)
    weight = 1.0 / n**N
    for assignment in product(range(n), repeat=N):
        factor = np.full(masks.size, weight)
        for s, t, ls, lt, ids in _unipartite_blocks(assignment, n, N, pair_index):
            if s == t:
                dist = table.plain(len(ids))
            elif max(ls, lt) > 2 * params.ell:
                dist = table.plain(ls * lt)
            else:
                p_prime, q_prime, _ = table.cell(ls, lt)
                dist = Pmf((1.0 - gamma) * q_prime.probs + gamma * p_prime.probs)
            factor *= _block_factor(masks, ids, dist)
        law += factor
    target = er_law_exact(N, params.q)
    return 0.5 * float(np.abs(law - target).sum())


def reduction_alt_tv_exact(params: ReductionParams) -> float:
    """Exact TV between the reduced law of the full-clique input (k = n)
    and the target planted model with mean size K = N."""
    if params.k != params.n:
        raise InvalidParameterError("the exact alternative oracle needs k = n (clique on all of [n])")
    n = params.n
    complete = Graph(n, list(combinations(range(n), 2)))
    law = reduced_law_exact(complete, params)
    target = pds_law_exact(params.N, params.K, params.p, params.q)
    return 0.5 * float(np.abs(law - target).sum())


def _bipartite_reduced_tv(params: ReductionParams, block_dist, target_rate: float) -> float:
    """Shared enumeration: TV between the bipartite reduced law (block
    count laws supplied by `block_dist(ls, lt)`) and a product Bernoulli
    law at `target_rate`."""
    n, N = params.n, params.N
    n_slots = N * N
    if (n**N) ** 2 * (1 << n_slots) > 20 * _ENUMERATION_CAP:
        raise TooLargeError("bipartite assignment x graph space exceeds the cap")
    masks = np.arange(1 << n_slots, dtype=np.int64)
    law = np.zeros(masks.size)
    weight = 1.0 / float(n ** (2 * N))
    assignments = list(product(range(n), repeat=N))
    for top_assign in assignments:
        tops = [[u for u in range(N) if top_assign[u] == s] for s in range(n)]
        for bottom_assign in assignments:
            bottoms = [[v for v in range(N) if bottom_assign[v] == t] for t in range(n)]
            factor = np.full(masks.size, weight)
            for s in range(n):
                if not tops[s]:
                    continue
                for t in range(n):
                    if not bottoms[t]:
                        continue
                    ids = [u * N + v for u in tops[s] for v in bottoms[t]]
                    factor *= _block_factor(masks, ids, block_dist(len(tops[s]), len(bottoms[t])))
            law += factor
    pop = _popcount(masks)
    target = target_rate**pop * (1.0 - target_rate) ** (n_slots - pop)
    return 0.5 * float(np.abs(law - target).sum())


def reduction_null_tv_bipartite_exact(params: ReductionParams) -> float:
    """Bipartite analogue of the null exactness oracle (same analytic
    mixing over input edges; every block is off-diagonal)."""
    gamma = params.gamma
    table = KernelTable.for_params(params)
    cache: dict = {}

    def mixed(ls, lt):
        key = ls * lt
        if key not in cache:
            if max(ls, lt) > 2 * params.ell:
                cache[key] = table.plain(key)
            else:
                p_prime, q_prime, _ = table.cell(ls, lt)
                cache[key] = Pmf((1.0 - gamma) * q_prime.probs + gamma * p_prime.probs)
        return cache[key]

    return _bipartite_reduced_tv(params, mixed, params.q)


def reduction_alt_tv_bipartite_exact(params: ReductionParams) -> float:
    """Exact TV between the bipartite reduced law of a full bi-clique
    input (k = n) and the target planted law with K = N per side.  With no
    diagonal blocks, the whole gap comes from the modified kernel, so this
    trend isolates the (8 q ell^2)^(m0+1) term."""
    if params.k != params.n:
        raise InvalidParameterError("the exact bipartite alternative oracle needs k = n")
    table = KernelTable.for_params(params)
    return _bipartite_reduced_tv(
        params, lambda ls, lt: table.edge_distribution(True, ls, lt), params.p
    )


# ---------------------------------------------------------------------------
# batteries (what `phaselab verify` runs)
# ---------------------------------------------------------------------------


def battery_kernel() -> list:
    grid = default_kernel_grid()
    return check_mixture_identity(grid) + check_pprime_tv(grid)


def battery_lemmas() -> list:
    reports = []
    for ell in range(1, 13):
        lam = 1.0 / (16.0 * ell)
        for tau in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]:
            reports.append(check_decoupling(ell, tau, lam))
    reports.extend(check_binom_dominance(17, 17, 1))
    reports.extend(check_binom_dominance(66, 33, 2))
    for k, s in [(1, 3), (2, 2), (2, 4), (3, 3), (3, 5), (3, 6)]:
        reports.append(check_negative_association(k, s))
    for n_vertices in range(2, 5):
        for kp in range(1, n_vertices + 1):
            for p in (0.25, 0.5):
                for q in (0.25, 0.5):
                    identity = chi2_planted_vs_null_exact(n_vertices, kp, p, q)
                    brute = chi2_bruteforce(n_vertices, kp, p, q)
                    reports.append(
                        CheckReport(
                            name="chi2-identity-vs-bruteforce",
                            params={"N": n_vertices, "Kp": kp, "p": p, "q": q},
                            lhs=abs(identity - brute),
                            rhs=1e-10,
                        )
                    )
    return reports


def battery_reduction_exact() -> list:
    reports = []
    params = ReductionParams(n=2, k=2, gamma=0.5, ell=2, q=0.01)
    reports.append(
        CheckReport(
            name="reduction-null-exactness",
            params={"n": 2, "ell": 2, "gamma": 0.5, "q": 0.01},
            lhs=reduction_null_tv_exact(params),
            rhs=1e-12,
        )
    )
    # the reduced alternative law tightens as q shrinks; the O(q^2) kernel
    # scaling is only isolated in the bipartite variant (no diagonal blocks)
    tv_hi = reduction_alt_tv_exact(params)
    tv_lo = reduction_alt_tv_exact(ReductionParams(n=2, k=2, gamma=0.5, ell=2, q=0.001))
    reports.append(
        CheckReport(
            name="reduction-alt-tv-decreasing",
            params={"q_hi": 0.01, "q_lo": 0.001, "tv_hi": tv_hi, "tv_lo": tv_lo},
            lhs=tv_lo,
            rhs=tv_hi,
        )
    )
    bip_hi = reduction_alt_tv_bipartite_exact(params)
    bip_lo = reduction_alt_tv_bipartite_exact(ReductionParams(n=2, k=2, gamma=0.5, ell=2, q=0.001))
    ratio = bip_hi / bip_lo
    reports.append(
        CheckReport(
            name="reduction-alt-fidelity-ratio-bipartite-upper",
            params={"q_hi": 0.01, "q_lo": 0.001, "ratio": ratio},
            lhs=ratio,
            rhs=200.0,
        )
    )
    reports.append(
        CheckReport(
            name="reduction-alt-fidelity-ratio-bipartite-lower",
            params={"q_hi": 0.01, "q_lo": 0.001, "ratio": ratio},
            lhs=50.0,
            rhs=ratio,
        )
    )
    reports.append(
        CheckReport(
            name="reduction-null-exactness-bipartite",
            params={"n": 2, "ell": 2, "gamma": 0.5, "q": 0.01},
            lhs=reduction_null_tv_bipartite_exact(params),
            rhs=1e-12,
        )
    )
    return reports
