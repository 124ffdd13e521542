import math

import numpy as np
import pytest

from qgs.entangled import decoherence_gap, entanglement_report, ges_solve, is_ges
from qgs.game import GameDefinition, Product, build_artificial_game, check_equilibrium, payoff
from qgs.linalg import eig_hermitian, random_density

from conftest import BB, BS, CLASSICAL_MIX, RHO_GES, RHO_GES_ANTI, SB, SS, basis_state, random_state


def in_ges_state(report, expected):
    return np.max(np.abs(report.state.matrix - expected)) <= 1e-12


class TestGesSolve:
    def test_coordination(self, game21):
        rep = ges_solve(game21)
        assert rep.payoffs == pytest.approx((4.0, 4.0), abs=1e-9)
        assert in_ges_state(rep, RHO_GES)
        assert rep.common and not rep.degenerate
        assert max(abs(m) for m in rep.global_margin) <= 1e-12

    def test_anti_coordination(self, game12):
        rep = ges_solve(game12)
        assert rep.payoffs == pytest.approx((4.0, 4.0), abs=1e-9)
        assert in_ges_state(rep, RHO_GES_ANTI)

    def test_diagonal_operator(self):
        h = np.diag([1.0, 2.0, 3.0, 4.0])
        rep = ges_solve(GameDefinition((("B", "S"), ("B", "S")), (h, h)))
        assert in_ges_state(rep, basis_state(SS))
        assert rep.payoffs == pytest.approx((4.0, 4.0), abs=1e-12)
        assert entanglement_report(rep.state, (2, 2)).is_product

    @pytest.mark.parametrize("e1, e2", [(2, 1), (3, 1), (5, 2), (0.5, 4)])
    def test_payoff_paths_agree(self, e1, e2):
        g = build_artificial_game(e1, e2)
        rep = ges_solve(g)
        assert rep.payoffs[0] == eig_hermitian(g.payoffs[0]).top_value
        for i in range(2):
            assert abs(rep.payoffs[i] - payoff(rep.state, g, i)) <= 1e-12

    @pytest.mark.parametrize("e1, e2", [(2, 1), (1, 2), (7, 0.5), (0.1, 0.2)])
    def test_spectrum(self, e1, e2):
        ev = eig_hermitian(build_artificial_game(e1, e2).payoffs[0]).eigenvalues
        expected = sorted([2 * max(e1, e2), 2 * min(e1, e2), 0, 0], reverse=True)
        assert np.allclose(ev, expected, atol=1e-10)

    def test_degenerate_flag(self):
        h = np.diag([4.0, 1.0, 1.0, 4.0])
        rep = ges_solve(GameDefinition((("B", "S"), ("B", "S")), (h, h)))
        assert rep.degenerate and rep.common

    def test_no_common_maximizer(self):
        h1 = np.diag([4.0, 0.0, 0.0, 1.0])
        h2 = np.diag([1.0, 0.0, 0.0, 4.0])
        rep = ges_solve(GameDefinition((("B", "S"), ("B", "S")), (h1, h2)))
        assert not rep.common
        assert rep.payoffs == pytest.approx((4.0, 1.0))
        assert rep.global_margin[1] == pytest.approx(-3.0)


class TestIsGes:
    def test_ges_passes(self, game21):
        check = is_ges(RHO_GES, game21)
        assert check.is_ges and not check.sample_beaten
        assert max(abs(m) for m in check.margins) <= 1e-12

    @pytest.mark.parametrize("k", [BB, BS, SB, SS])
    def test_classical_pure_profiles_fail(self, game21, k):
        check = is_ges(basis_state(k), game21, n_samples=20)
        assert not check.is_ges
        assert check.margins[0] < -1

    def test_examples(self, game21):
        assert is_ges(basis_state(BB), game21, n_samples=10).margins == pytest.approx((-2.0, -2.0), abs=1e-12)
        check = is_ges(np.eye(4) / 4, game21, n_samples=10)
        assert not check.is_ges
        assert check.margins == pytest.approx((-2.5, -2.5), abs=1e-12)

    @pytest.mark.parametrize("e1, e2", [(2, 1), (3, 1), (5, 2)])
    def test_sampling_bound(self, e1, e2):
        g = build_artificial_game(e1, e2)
        check = is_ges(ges_solve(g).state, g, n_samples=200, seed=42)
        assert max(check.sample_max) <= 2 * e1 + 1e-9
        assert check.is_ges

    def test_samples_are_valid_and_seeded(self):
        a, b = random_density(4, 7), random_density(4, 7)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, random_density(4, 8))
        assert abs(np.trace(a) - 1) <= 1e-12 and np.linalg.eigvalsh(a).min() >= -1e-12


class TestEntanglement:
    def test_bell_state(self):
        rep = entanglement_report(RHO_GES, (2, 2))
        assert rep.purities == pytest.approx((0.5, 0.5), abs=1e-12)
        assert rep.product_distance == pytest.approx(math.sqrt(0.75), abs=1e-12)
        assert not rep.is_product

    def test_pure_product(self):
        rep = entanglement_report(basis_state(BB), (2, 2))
        assert rep.purities == (1.0, 1.0) and rep.product_distance == 0.0 and rep.is_product

    def test_classical_mixture(self):
        rep = entanglement_report(CLASSICAL_MIX, (2, 2))
        assert rep.purities == pytest.approx((0.5, 0.5), abs=1e-12)
        assert rep.product_distance == pytest.approx(0.5, abs=1e-12)
        assert not rep.is_product

    def test_random_products(self, rng):
        for _ in range(20):
            rep = entanglement_report(Product([random_state(rng, 2), random_state(rng, 3)]), (2, 3))
            assert rep.is_product
            assert all(1 / d - 1e-12 <= p <= 1 + 1e-12 for p, d in zip(rep.purities, (2, 3)))


class TestDecoherenceGap:
    @pytest.mark.parametrize("e1, e2", [(2, 1), (3, 1), (5, 2)])
    def test_ges_gap(self, e1, e2):
        g = build_artificial_game(e1, e2)
        gap = decoherence_gap(ges_solve(g).state, g)
        expected = 2 * e1 - (e1 + e2) / 2
        assert gap == pytest.approx((expected, expected), abs=1e-9)
        assert min(gap) > 0

    def test_product_has_no_gap(self, game21, rng):
        for _ in range(10):
            gap = decoherence_gap(Product([random_state(rng, 2), random_state(rng, 2)]), game21)
            assert max(abs(x) for x in gap) <= 1e-12

    def test_classical_mixture_gap(self, game21):
        assert decoherence_gap(CLASSICAL_MIX, game21) == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_ges_passes_extended_check(self, game21):
        rep = check_equilibrium(ges_solve(game21).state, game21)
        assert rep.is_equilibrium and rep.is_global
        for m in rep.margins:
            assert m == pytest.approx(2.5, abs=1e-9)
