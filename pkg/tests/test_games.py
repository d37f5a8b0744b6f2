import numpy as np
import pytest

from cdsim.errors import DomainError
from cdsim.games import (
    CoevolutionParams,
    CoordinationParams,
    PggParams,
    PopulationState,
    best_response_set,
    coevolution_payoff,
    coordination_matrix,
    coordination_payoff,
    network_matrix_payoff,
    opinion_payoff,
    pgg_payoff,
)
from cdsim.graph import Graph, erdos_renyi_graph, row_normalize

from util import example1_graph, example1_profile


def identity_matrix_game():
    return coordination_matrix(0.0)


class TestNetworkMatrixPayoff:
    def test_full_coordination_stochastic(self):
        g = row_normalize(example1_graph())
        x = np.ones(6, dtype=np.int8)
        assert network_matrix_payoff(g, identity_matrix_game(), 0, 1, x) == pytest.approx(1.0, abs=1e-12)

    def test_two_vs_three_neighborhood(self):
        g = example1_graph()
        x = example1_profile()
        for alpha in (0.0, 0.5, 1.0, 2.3):
            m = coordination_matrix(alpha)
            assert network_matrix_payoff(g, m, 0, 1, x) == pytest.approx(2 * (1 + alpha), abs=1e-12)
            assert network_matrix_payoff(g, m, 0, -1, x) == pytest.approx(3.0, abs=1e-12)

    def test_zero_out_row(self):
        g = Graph(np.zeros((3, 3)))
        assert network_matrix_payoff(g, identity_matrix_game(), 0, 1, [1, 1, 1]) == 0.0

    def test_node_out_of_range(self):
        g = example1_graph()
        with pytest.raises(DomainError):
            network_matrix_payoff(g, identity_matrix_game(), 9, 1, example1_profile())


class TestCoordinationPayoff:
    def test_matches_matrix_form_everywhere(self):
        rng = np.random.Generator(np.random.PCG64(12))
        for _ in range(1000):
            g = erdos_renyi_graph(8, 0.5, rng)
            alpha = float(rng.uniform(-0.9, 3.0))
            x = np.where(rng.random(8) < 0.5, 1, -1).astype(np.int8)
            i = int(rng.integers(8))
            a = 1 if rng.random() < 0.5 else -1
            direct = coordination_payoff(g, CoordinationParams(alpha), i, a, x)
            viamatrix = network_matrix_payoff(g, coordination_matrix(alpha), i, a, x)
            assert abs(direct - viamatrix) < 1e-12

    def test_exact_tie_at_half(self):
        g = example1_graph()
        x = example1_profile()
        p = CoordinationParams(0.5)
        assert coordination_payoff(g, p, 0, 1, x) == pytest.approx(3.0, abs=1e-12)
        assert coordination_payoff(g, p, 0, -1, x) == pytest.approx(3.0, abs=1e-12)

    def test_advantage_one_breaks_tie(self):
        g = example1_graph()
        x = example1_profile()
        p = CoordinationParams(1.0)
        assert coordination_payoff(g, p, 0, 1, x) == pytest.approx(4.0, abs=1e-12)
        assert coordination_payoff(g, p, 0, -1, x) == pytest.approx(3.0, abs=1e-12)


class TestPggPayoff:
    def test_all_defect_zero(self):
        p = PggParams(r=3.0, n=8)
        x = -np.ones(8)
        assert pgg_payoff(p, 2, -1, x) == 0.0

    def test_all_cooperate_r_minus_one(self):
        p = PggParams(r=3.0, n=8)
        x = np.ones(8)
        assert pgg_payoff(p, 2, 1, x) == pytest.approx(3.0 - 1.0, abs=1e-12)

    def test_free_rider_value(self):
        p = PggParams(r=5.0, n=10)
        x = np.ones(10)
        x[4] = -1
        assert pgg_payoff(p, 4, -1, x) == pytest.approx(4.5, abs=1e-12)

    def test_defection_dominance_identity(self):
        # the identity is algebraically state-independent; floats realize it
        # up to the single rounding of the cooperator branch's final addition
        rng = np.random.Generator(np.random.PCG64(4))
        for _ in range(200):
            n = int(rng.integers(3, 40))
            r = float(rng.uniform(1.0 + 1e-6, n - 1e-6))
            p = PggParams(r=r, n=n)
            x = np.where(rng.random(n) < 0.5, 1, -1)
            i = int(rng.integers(n))
            gap = pgg_payoff(p, i, -1, x) - pgg_payoff(p, i, 1, x)
            assert gap == pytest.approx(1.0 - r / n, abs=1e-13)
            assert gap > 0

    def test_dominance_exact_for_integer_multiplier(self):
        rng = np.random.Generator(np.random.PCG64(14))
        for _ in range(100):
            n = int(rng.integers(3, 50))
            r = float(rng.integers(2, n))
            p = PggParams(r=r, n=n)
            x = np.where(rng.random(n) < 0.5, 1, -1)
            assert pgg_payoff(p, 0, -1, -np.ones(n)) == 0.0
            assert pgg_payoff(p, 0, 1, np.ones(n)) == r - 1.0

    def test_outside_dilemma_warns(self):
        with pytest.warns(UserWarning):
            PggParams(r=0.5, n=10)
        with pytest.warns(UserWarning):
            PggParams(r=20.0, n=10)


class TestOpinionPayoff:
    def test_agreement_is_maximum(self):
        g = row_normalize(example1_graph())
        y = np.full(6, 0.3)
        assert opinion_payoff(g, 0, 0.3, y) == pytest.approx(0.0, abs=1e-15)

    def test_two_sided_neighbors(self):
        w = np.array([[0.0, 0.5, 0.5], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        g = Graph(w, row_stochastic=True)
        y = np.array([0.0, -1.0, 1.0])
        assert opinion_payoff(g, 0, 0.0, y) == pytest.approx(-0.5, abs=1e-15)

    def test_maximizer_is_weighted_average(self):
        rng = np.random.Generator(np.random.PCG64(2))
        w = rng.random((5, 5)) + 0.1
        g = Graph(w / w.sum(axis=1, keepdims=True), row_stochastic=True)
        y = rng.uniform(-1, 1, 5)
        star = float(g.matrix[1] @ y)
        best = opinion_payoff(g, 1, star, y)
        for s in np.linspace(-1, 1, 41):
            assert best >= opinion_payoff(g, 1, float(s), y) - 1e-12


class TestCoevolutionPayoff:
    def setup_method(self):
        self.g = row_normalize(example1_graph())

    def test_full_consensus_returns_gamma(self):
        params = CoevolutionParams(n=6, gamma=2.5, beta=1.0, lam=1.0)
        state = PopulationState(-np.ones(6), -np.ones(6))
        val = coevolution_payoff(self.g, self.g, params, 0, (-1, -1.0), state)
        assert val == pytest.approx(2.5, abs=1e-12)

    def test_consistency_penalty_alone(self):
        params = CoevolutionParams(n=6, gamma=0.0, beta=0.0, lam=1.5)
        state = PopulationState(-np.ones(6), -np.ones(6))
        val = coevolution_payoff(self.g, self.g, params, 0, (1, -1.0), state)
        assert val == pytest.approx(-0.5 * 1.5 * 4.0, abs=1e-12)

    def test_single_neighbor_branches(self):
        w = np.array([[0.0, 1.0], [1.0, 0.0]])
        g = Graph(w, row_stochastic=True)
        params = CoevolutionParams(n=2, gamma=1.0, beta=1.0, lam=1.0)
        state = PopulationState(np.array([-1, 1]), np.array([-1.0, 1.0]))
        up = coevolution_payoff(g, g, params, 0, (1, 1.0), state)
        down = coevolution_payoff(g, g, params, 0, (-1, -1.0), state)
        assert up == pytest.approx(1.0, abs=1e-12)
        assert down == pytest.approx(-2.0, abs=1e-12)

    def test_opinion_out_of_range(self):
        params = CoevolutionParams(n=6)
        state = PopulationState(-np.ones(6), -np.ones(6))
        with pytest.raises(DomainError):
            coevolution_payoff(self.g, self.g, params, 0, (1, 1.5), state)

    def test_convention_switch_scales_opinion_term(self):
        g = self.g
        state = PopulationState(-np.ones(6), np.linspace(-1, 1, 6))
        base = CoevolutionParams(n=6, gamma=0.0, beta=2.0, lam=0.5)
        alt = CoevolutionParams(n=6, gamma=0.0, beta=2.0, lam=0.5,
                                opinion_weight_convention="beta_times_one_minus_lambda")
        v_base = coevolution_payoff(g, g, base, 0, (-1, 0.0), state)
        v_alt = coevolution_payoff(g, g, alt, 0, (-1, 0.0), state)
        consistency = -0.5 * 0.5 * 1.0
        assert v_alt - consistency == pytest.approx((v_base - consistency) * 0.5, abs=1e-12)


class TestCoevolutionParams:
    def test_zero_divisor_rejected(self):
        with pytest.raises(DomainError):
            CoevolutionParams(n=3, beta=0.0, lam=0.0)

    def test_alt_convention_needs_lambda_below_one(self):
        with pytest.raises(DomainError):
            CoevolutionParams(n=3, beta=1.0, lam=1.5,
                              opinion_weight_convention="beta_times_one_minus_lambda")

    def test_pgg_inner_needs_r(self):
        with pytest.raises(DomainError):
            CoevolutionParams(n=3, inner="pgg")


class TestBestResponseSet:
    def test_example_neighborhood_with_clear_advantage(self):
        g = example1_graph()
        x = example1_profile()
        p = CoordinationParams(0.6)
        br = best_response_set(lambda a: coordination_payoff(g, p, 0, a, x))
        assert br == [1]

    def test_exact_tie_reports_both(self):
        g = example1_graph()
        x = example1_profile()
        p = CoordinationParams(0.5)
        br = best_response_set(lambda a: coordination_payoff(g, p, 0, a, x))
        assert br == [-1, 1]

    def test_pgg_always_defect(self):
        rng = np.random.Generator(np.random.PCG64(8))
        for _ in range(50):
            n = int(rng.integers(3, 30))
            p = PggParams(r=float(rng.uniform(1.01, n - 0.01)), n=n)
            x = np.where(rng.random(n) < 0.5, 1, -1)
            br = best_response_set(lambda a: pgg_payoff(p, 0, a, x))
            assert br == [-1]

    def test_consensus_profiles_are_nash(self):
        rng = np.random.Generator(np.random.PCG64(21))
        for _ in range(30):
            g = erdos_renyi_graph(7, 0.6, rng)
            alpha = float(rng.uniform(-0.9, 2.0))
            p = CoordinationParams(alpha)
            for consensus in (np.ones(7, dtype=np.int8), -np.ones(7, dtype=np.int8)):
                for i in range(7):
                    br = best_response_set(
                        lambda a: coordination_payoff(g, p, i, a, consensus)
                    )
                    assert int(consensus[i]) in br


class TestPopulationState:
    def test_rejects_bad_actions(self):
        with pytest.raises(DomainError):
            PopulationState(np.array([0, 1]))

    def test_rejects_out_of_range_opinion(self):
        with pytest.raises(DomainError):
            PopulationState(np.array([1, -1]), np.array([0.0, 1.5]))

    def test_zeta(self):
        s = PopulationState(np.array([1, -1, 1, -1]))
        assert s.zeta == 0.5 and s.adopters == 2
