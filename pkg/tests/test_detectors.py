import math
from itertools import combinations

import numpy as np
import pytest

from conftest import recursive_scan_max
from pdslab.detectors import (
    H0,
    H1,
    ErrorEstimate,
    TestOutcome,
    combined_test,
    dks_detector,
    estimate_errors,
    is_monotone,
    prop2_bound_lin,
    recovery_detector,
    recovery_threshold,
    t_lin,
    t_scan_exact,
    t_scan_heuristic,
    tau_lin,
    tau_scan,
)
from pdslab.errors import (
    BudgetExceededError,
    ContractViolationError,
    InvalidParameterError,
    PreconditionViolationError,
    TooLargeError,
)
from pdslab.graphmodels import (
    Graph,
    PdsParams,
    gen_er,
    gen_pds_random_size,
    gen_planted_clique,
)
from pdslab.randkit import Seed

PATH4 = Graph(4, [(0, 1), (1, 2), (2, 3)])
K4 = Graph(4, list(combinations(range(4), 2)))


class TestStatisticsAndThresholds:
    def test_t_lin(self):
        assert t_lin(Graph(5, [])) == 0
        assert t_lin(K4) == 6
        assert t_lin(PATH4) == 3

    def test_tau_lin(self):
        assert tau_lin(PdsParams(10, 4, 0.5, 0.25)) == pytest.approx(12.0, abs=1e-12)
        assert tau_lin(PdsParams(10, 4, 0.25, 0.25)) == pytest.approx(45 * 0.25)
        assert tau_lin(PdsParams(10, 1, 0.5, 0.25)) == pytest.approx(45 * 0.25)

    def test_tau_scan(self):
        assert tau_scan(4, 0.2, 0.1) == pytest.approx(0.9, abs=1e-12)
        assert tau_scan(1, 0.5, 0.2) == 0.0
        assert tau_scan(5, 0.3, 0.3) == pytest.approx(10 * 0.3)


class TestScanExact:
    def test_complete_and_empty(self):
        assert t_scan_exact(K4, 3)[0] == 3
        assert t_scan_exact(Graph(6, []), 3)[0] == 0

    def test_path_argmax(self):
        value, argmax = t_scan_exact(PATH4, 3)
        assert value == 2 and argmax == (0, 1, 2)

    def test_budget(self):
        g = gen_er(30, 0.2, Seed(1))
        with pytest.raises(BudgetExceededError):
            t_scan_exact(g, 10, budget=100_000)

    def test_matches_recursive_enumerator(self):
        # independent oracle, 100 random graphs with N <= 10, K <= 4
        rng = Seed(17).rng()
        for i in range(100):
            n = int(rng.integers(4, 11))
            k = int(rng.integers(2, 5))
            g = gen_er(n, float(rng.random()), Seed(18).child(i))
            got_v, got_s = t_scan_exact(g, k)
            want_v, want_s = recursive_scan_max(g, k)
            assert got_v == want_v
            assert got_s == want_s  # both pick the lexicographically first argmax


class TestScanHeuristic:
    def test_complete_graph_always_optimal(self):
        for i in range(5):
            value, _ = t_scan_heuristic(K4, 3, 1, Seed(i))
            assert value == 3

    def test_never_exceeds_exact(self):
        rng = Seed(19).rng()
        for i in range(100):
            n = int(rng.integers(5, 13))
            k = int(rng.integers(2, 5))
            g = gen_er(n, float(rng.random()), Seed(20).child(i))
            exact, _ = t_scan_exact(g, k)
            heur, _ = t_scan_heuristic(g, k, 3, Seed(21).child(i))
            assert heur <= exact

    def test_deterministic(self):
        g = gen_er(40, 0.3, Seed(22))
        assert t_scan_heuristic(g, 8, 5, Seed(23)) == t_scan_heuristic(g, 8, 5, Seed(23))

    def test_planted_clique_recovery_rate(self):
        # frozen regression: 100/100 recoveries at these parameters
        hits = 0
        for i in range(100):
            inst = gen_planted_clique(60, 10, 0.2, Seed(100).child(i))
            value, _ = t_scan_heuristic(inst.graph, 10, 50, Seed(200).child(i))
            hits += value == 45
        assert hits == 100
        assert hits / 100 >= 0.9


class TestCombined:
    def test_empty_graph(self):
        out = combined_test(Graph(6, []), PdsParams(6, 3, 0.5, 0.2))
        assert out.decision == H0

    def test_complete_graph(self):
        out = combined_test(K4, PdsParams(4, 3, 0.5, 0.2))
        assert out.decision == H1
        assert out.parts["t_lin"] == 6 and out.parts["t_scan"] == 3

    def test_outcome_invariant_enforced(self):
        with pytest.raises(InvalidParameterError):
            TestOutcome(statistic=1.0, threshold=2.0, decision=H1)

    def test_ties_go_to_null(self):
        # statistic equal to threshold is H0 under strict comparison
        params = PdsParams(4, 2, 1.0, 0.5)  # tau_lin = 3 + 0.25 -> not a tie; craft one
        out = TestOutcome(statistic=0.0, threshold=0.0, decision=H0)
        assert out.decision == H0

    def test_edge_addition_never_flips_to_null(self):
        params = PdsParams(5, 3, 0.6, 0.2)
        pairs = list(combinations(range(5), 2))
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            if combined_test(Graph(5, edges), params).decision != H1:
                continue
            for extra in pairs:
                if extra in edges:
                    continue
                assert combined_test(Graph(5, edges + [extra]), params).decision == H1


class TestProp2Bounds:
    def test_type1_fixture(self):
        b1, _ = prop2_bound_lin(PdsParams(10, 4, 0.5, 0.25))
        assert b1 == pytest.approx(math.exp(-0.5625 / 23.0), abs=1e-12)
        assert b1 == pytest.approx(0.97584, abs=5e-6)

    def test_degenerate_gap(self):
        assert prop2_bound_lin(PdsParams(10, 4, 0.25, 0.25)) == (1.0, 1.0)

    def test_bounds_in_unit_interval(self):
        for params in [
            PdsParams(50, 10, 0.5, 0.1),
            PdsParams(500, 100, 0.02, 0.01),
            PdsParams(10, 2, 1.0, 0.0),
        ]:
            b1, b2 = prop2_bound_lin(params)
            assert 0.0 < b1 <= 1.0
            assert 0.0 < b2 <= 1.0


class TestMonotone:
    def test_trivial_tests(self):
        assert is_monotone(lambda g: H0, 4)
        assert not is_monotone(lambda g: H1 if g.num_edges % 2 == 0 else H0, 4)

    def test_statistics_monotone_exhaustive_n5(self):
        pairs = list(combinations(range(5), 2))
        n_pairs = len(pairs)
        lin = np.empty(1 << n_pairs, dtype=np.int64)
        scan = np.empty(1 << n_pairs, dtype=np.int64)
        for mask in range(1 << n_pairs):
            g = Graph(5, [pairs[i] for i in range(n_pairs) if mask >> i & 1])
            lin[mask] = t_lin(g)
            scan[mask] = t_scan_exact(g, 3)[0]
        for mask in range(1 << n_pairs):
            for i in range(n_pairs):
                if not mask >> i & 1:
                    bigger = mask | (1 << i)
                    assert lin[bigger] >= lin[mask]
                    assert scan[bigger] >= scan[mask]

    def test_size_cap(self):
        with pytest.raises(TooLargeError):
            is_monotone(lambda g: H0, 6)


class TestDksDetector:
    def test_parameter_gate(self):
        with pytest.raises(InvalidParameterError):
            dks_detector(lambda g: range(4), eta=3.0, epsilon=0.2, params=PdsParams(10, 4, 0.2, 0.1))

    def test_complete_graph_fires(self):
        params = PdsParams(6, 3, 0.6, 0.3)
        det = dks_detector(lambda g: t_scan_exact(g, 3)[1], eta=1.2, epsilon=0.2, params=params)
        assert det(gen_er(6, 1.0, Seed(1))) == H1

    def test_empty_graph_quiet(self):
        params = PdsParams(6, 3, 0.6, 0.3)
        det = dks_detector(lambda g: t_scan_exact(g, 3)[1], eta=1.2, epsilon=0.2, params=params)
        assert det(Graph(6, [])) == H0

    def test_wrong_size_output(self):
        params = PdsParams(6, 3, 0.6, 0.3)
        det = dks_detector(lambda g: [0, 1], eta=1.2, epsilon=0.2, params=params)
        with pytest.raises(ContractViolationError):
            det(Graph(6, []))

    def test_desk_scale_rates_frozen(self):
        # honest Monte Carlo at (N=60, K=8, p=0.9, q=0.1, eps=0.2) with the
        # restart heuristic as the subgraph finder: the planted side always
        # fires, and so does the null side — the densest 8-subgraph of
        # G(60, 0.1) always has density far above (1+eps)q at this scale
        params = PdsParams(60, 8, 0.9, 0.1)
        alg = lambda g: t_scan_heuristic(g, 8, 10, Seed(55).child(g.fingerprint()))[1]
        det = dks_detector(alg, eta=1.0, epsilon=0.2, params=params)
        est = estimate_errors(
            lambda s: gen_er(60, 0.1, s),
            lambda s: gen_pds_random_size(params, s).graph,
            det,
            trials=200,
            seed=Seed(808),
        )
        assert 1.0 - est.type2 >= 0.95  # planted side detected
        assert est.type1 == 1.0  # null side always fires at desk scale


class TestRecoveryDetector:
    def test_threshold_formula(self):
        assert recovery_threshold(0.1, 0.2, 0.5) == pytest.approx(0.1125, abs=1e-15)

    def test_epsilon_gate(self):
        with pytest.raises(PreconditionViolationError):
            recovery_detector(lambda g: range(3), PdsParams(6, 3, 0.5, 0.2), 1.0, Seed(0))

    def test_constant_recovery_on_empty_noiseless_graph(self):
        # q = 0 resampling keeps every intermediate graph empty
        params = PdsParams(6, 3, 0.2, 0.0)
        det = recovery_detector(lambda g: (0, 1, 2), params, 0.5, Seed(5))
        assert det(Graph(6, [])) == H0

    def test_wrong_size_recovery(self):
        params = PdsParams(6, 3, 0.2, 0.0)
        det = recovery_detector(lambda g: (0, 1), params, 0.5, Seed(5))
        with pytest.raises(ContractViolationError):
            det(Graph(6, []))

    def test_reproducible_per_graph(self):
        params = PdsParams(12, 3, 0.8, 0.2)
        det = recovery_detector(lambda g: t_scan_exact(g, 3)[1], params, 0.5, Seed(7))
        g = gen_er(12, 0.2, Seed(8))
        assert det(g) == det(g)


class TestEstimateErrors:
    def test_degenerate_tests(self):
        null_gen = lambda s: gen_er(5, 0.5, s)
        est = estimate_errors(null_gen, null_gen, lambda g: H0, 40, Seed(1))
        assert (est.type1, est.type2) == (0.0, 1.0)
        est = estimate_errors(null_gen, null_gen, lambda g: H1, 40, Seed(1))
        assert (est.type1, est.type2) == (1.0, 0.0)

    def test_ci_radius(self):
        est = ErrorEstimate.from_rates(0.2, 0.5, 100)
        assert est.ci_radius[0] == pytest.approx(1.96 * math.sqrt(0.16 / 100))
        assert est.ci_radius[1] == pytest.approx(1.96 * math.sqrt(0.25 / 100))

    def test_worker_invariance(self):
        params = PdsParams(30, 10, 0.8, 0.2)
        test = lambda g: combined_test(g, params, scan_mode="heuristic", restarts=4, seed=Seed(9))
        args = (
            lambda s: gen_er(30, 0.2, s),
            lambda s: gen_pds_random_size(params, s).graph,
            test,
            40,
            Seed(2),
        )
        assert estimate_errors(*args) == estimate_errors(*args, workers=4)

    def test_same_distribution_consistency(self):
        # with p = q the two arms are identically distributed, so the H1
        # rate on the null matches the H1 rate on the alternative
        params = PdsParams(30, 8, 0.2, 0.2)
        test = lambda g: combined_test(g, params, scan_mode="heuristic", restarts=3, seed=Seed(3))
        est = estimate_errors(
            lambda s: gen_er(30, 0.2, s),
            lambda s: gen_pds_random_size(params, s).graph,
            test,
            300,
            Seed(4),
        )
        assert abs(est.type1 - (1.0 - est.type2)) <= 2 * (est.ci_radius[0] + est.ci_radius[1])

    def test_deep_simple_regime_linear_test(self):
        # frozen regression: the linear test alone nails (500, 150, .1, .05)
        params = PdsParams(500, 150, 0.1, 0.05)
        threshold = tau_lin(params)
        test = lambda g: H1 if t_lin(g) > threshold else H0
        est = estimate_errors(
            lambda s: gen_er(500, 0.05, s),
            lambda s: gen_pds_random_size(params, s).graph,
            test,
            500,
            Seed(607),
        )
        assert est.type1 + est.type2 <= 0.05

    def test_combined_desk_scale_scan_fires_on_null(self):
        # honest regression for the same parameters with the combined test:
        # the heuristic scan statistic of a null G(500, 0.05) sits far above
        # tau_scan = C(150,2)(p+q)/2, so the combined test's Type-I is 1
        params = PdsParams(500, 150, 0.1, 0.05)
        test = lambda g: combined_test(
            g, params, scan_mode="heuristic", restarts=4, seed=Seed(61).child(g.fingerprint())
        )
        est = estimate_errors(
            lambda s: gen_er(500, 0.05, s),
            lambda s: gen_pds_random_size(params, s).graph,
            test,
            30,
            Seed(606),
        )
        assert est.type1 >= 0.9
        assert est.type2 == 0.0
