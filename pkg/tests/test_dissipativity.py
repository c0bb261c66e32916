import numpy as np
import pytest

from pidissipativity.benchmark import K_STAR, sweep_gains
from pidissipativity.dissipativity import (HEATMAP_REGION, BENCHMARK_REGIONS, Region,
                                           assemble, closed_loop_matrix, common_P_audit,
                                           construct_common_P, gamma_from_indices,
                                           gamma_lmi_from_indices, gamma_star_closed_form,
                                           gamma_star_lmi, heatmap, hji_matrix, lmi_block,
                                           pointwise_index, region_index, report,
                                           width_from_scan, zero_line_crossings,
                                           zero_line_width)
from pidissipativity.linalg import (NotHurwitzError, is_negative_semidefinite,
                                    solve_lyapunov, spectral_abscissa)
from pidissipativity.plant import UavParams, linear_plant, uav_model
from pidissipativity.sim import PiGains

from test_linalg import A_KSTAR0, ABSCISSA_KSTAR0

UAV = uav_model()
OMEGA4 = BENCHMARK_REGIONS["Omega4"]


class TestRegion:
    def test_origin_anchor_contains_zero_and_ends(self):
        r = Region((-0.12, -0.05), (0.1, 0.05), (0.05, 0.01))
        ax = r.axis(0)
        np.testing.assert_allclose(ax, [-0.12, -0.1, -0.05, 0.0, 0.05, 0.1])
        assert 0.0 in r.axis(1)

    def test_nested_grids(self):
        small = set(map(tuple, OMEGA4.points()))
        big = set(map(tuple, BENCHMARK_REGIONS["Omega3"].points()))
        assert small <= big

    def test_lower_anchor(self):
        ax = HEATMAP_REGION.axis(1, anchor="lower")
        assert ax[0] == -np.pi / 6 and len(ax) == 105

    @pytest.mark.parametrize("lo, hi, step", [
        ((0.1,), (-0.1,), (0.01,)),
        ((0.1,), (0.2,), (0.01,)),
        ((-0.1,), (0.1,), (0.0,)),
        ((-0.1, 0.0), (0.1,), (0.01,)),
    ])
    def test_invalid(self, lo, hi, step):
        with pytest.raises(ValueError):
            Region(lo, hi, step)

    def test_single_point(self):
        r = Region((0.0, 0.0), (0.0, 0.0), (0.1, 0.1))
        np.testing.assert_array_equal(r.points(), [[0.0, 0.0]])


class TestAssemble:
    def test_decomposition_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            K = PiGains.from_stacked(rng.normal(size=(2, 4)))
            e = rng.uniform(-0.5, 0.5, 2)
            sys = assemble(UAV, K, e)
            np.testing.assert_array_equal(sys.A_K, sys.D1 + sys.D2 @ K.K)
            assert sys.D1.shape == (4, 4) and sys.D2.shape == (4, 2) and sys.G.shape == (4, 2)

    def test_zero_gain(self):
        sys = assemble(UAV, PiGains(np.zeros((2, 2)), np.zeros((2, 2))), np.array([0.1, 0.2]))
        np.testing.assert_array_equal(sys.A_K, sys.D1)

    def test_G(self):
        np.testing.assert_array_equal(assemble(UAV, K_STAR, np.zeros(2)).G,
                                      np.vstack([-np.eye(2), np.zeros((2, 2))]))

    def test_benchmark_matrix(self):
        np.testing.assert_allclose(closed_loop_matrix(UAV, K_STAR, np.zeros(2)), A_KSTAR0,
                                   atol=1e-12)

    def test_wrong_gain_shape(self):
        with pytest.raises(ValueError):
            assemble(UAV, PiGains(np.zeros((1, 2)), np.zeros((1, 2))), np.zeros(2))


class TestIndices:
    def test_origin_is_abscissa(self):
        assert pointwise_index(UAV, K_STAR, np.zeros(2)) == pytest.approx(ABSCISSA_KSTAR0,
                                                                          abs=1e-12)

    def test_independent_of_e_chi(self):
        v = [pointwise_index(UAV, K_STAR, np.array([ec, 0.0])) for ec in (-0.5, 0.0, 0.5)]
        assert max(v) - min(v) <= 1e-12
        a = pointwise_index(UAV, K_STAR, np.array([0.7, 0.13]))
        b = pointwise_index(UAV, K_STAR, np.array([-0.2, 0.13]))
        assert a == pytest.approx(b, abs=1e-12)

    def test_perturbation_term_symmetric_when_level(self):
        # with gamma_c = 0 the Jacobian entry is odd in e_gamma: ||A_K(e) - A_K(0)||
        # is even, the abscissa is not
        level = uav_model(UavParams(gamma_c=0.0))
        A0 = closed_loop_matrix(level, K_STAR, np.zeros(2))
        for eg in (0.05, 0.2, 0.4):
            a = closed_loop_matrix(level, K_STAR, np.array([0.0, eg])) - A0
            b = closed_loop_matrix(level, K_STAR, np.array([0.0, -eg])) - A0
            np.testing.assert_allclose(a, -b, atol=1e-15)

    def test_near_symmetric_in_e_gamma(self):
        # climbing reference breaks the symmetry slightly
        for eg in (0.05, 0.2, 0.4):
            a = pointwise_index(UAV, K_STAR, np.array([0.0, eg]))
            b = pointwise_index(UAV, K_STAR, np.array([0.0, -eg]))
            assert abs(a - b) < 0.05

    def test_index_bounds_abscissa(self):
        rng = np.random.default_rng(1)
        for e in rng.uniform([-1, -0.5], [1, 0.5], size=(30, 2)):
            assert pointwise_index(UAV, K_STAR, e) >= spectral_abscissa(
                closed_loop_matrix(UAV, K_STAR, e))

    def test_non_hurwitz(self):
        bad = K_STAR.shifted(10.0)
        with pytest.raises(NotHurwitzError):
            pointwise_index(UAV, bad, np.zeros(2))
        with pytest.raises(NotHurwitzError):
            region_index(UAV, bad, OMEGA4)

    def test_degenerate_region(self):
        L, S, M0 = region_index(UAV, K_STAR, Region((0.0, 0.0), (0.0, 0.0), (0.1, 0.1)))
        assert S == 0.0
        assert L == pytest.approx(ABSCISSA_KSTAR0, abs=1e-12)
        assert M0 >= 1.0

    def test_e_chi_slice(self):
        full = region_index(UAV, K_STAR, OMEGA4)
        sl = region_index(UAV, K_STAR, Region((0.0, -0.06), (0.0, 0.06), (0.05, 0.01)))
        assert full[0] == pytest.approx(sl[0], abs=1e-12)

    def test_monotone_under_inclusion(self):
        names = ["Omega4", "Omega3", "Omega2", "Omega1"]
        Ls = [region_index(UAV, K_STAR, BENCHMARK_REGIONS[n])[0] for n in names]
        assert all(a <= b for a, b in zip(Ls, Ls[1:]))
        gammas = [gamma_star_closed_form(UAV, K_STAR, BENCHMARK_REGIONS[n]) for n in names]
        assert all(a <= b for a, b in zip(gammas, gammas[1:]))

    def test_k4_omega1_feasible(self):
        K4 = sweep_gains()[3]
        L, _, _ = region_index(UAV, K4, BENCHMARK_REGIONS["Omega1"])
        assert L < 0

    def test_k4_omega4_loose(self):
        # reference value 5.07; M and norm conventions allow only a loose comparison
        g = gamma_star_closed_form(UAV, sweep_gains()[3], OMEGA4)
        assert g == pytest.approx(5.07, rel=0.5)

    def test_k_star_frozen(self):
        assert gamma_star_closed_form(UAV, K_STAR, OMEGA4) == pytest.approx(3.1319098103,
                                                                            rel=1e-9)


class TestGamma:
    def test_trivial_case(self):
        G = np.vstack([np.eye(2), np.zeros((2, 2))])
        assert gamma_from_indices(0.0, -1.0, np.eye(4), G) == pytest.approx(2.0)
        assert gamma_lmi_from_indices(0.0, -1.0, np.eye(4), G, tol=1e-9) == pytest.approx(
            2.0, abs=1e-9)

    def test_infeasible(self):
        assert gamma_from_indices(0.1, 0.0, np.eye(2), np.eye(2)) is None
        assert gamma_lmi_from_indices(0.1, 0.2, np.eye(2), np.eye(2)) is None

    def test_homogeneous_in_G(self):
        rng = np.random.default_rng(2)
        B = rng.normal(size=(4, 4))
        P = B @ B.T + np.eye(4)
        G = rng.normal(size=(4, 2))
        base = gamma_from_indices(0.3, -0.7, P, G)
        for c in (0.5, 3.0, 17.0):
            assert gamma_from_indices(0.3, -0.7, P, c * G) == pytest.approx(c * base, rel=1e-12)

    def test_lmi_agrees_on_random_instances(self):
        rng = np.random.default_rng(4)
        tol = 1e-8
        for _ in range(50):
            B = rng.normal(size=(4, 4))
            P = B @ B.T + 0.1 * np.eye(4)
            G = rng.normal(size=(4, 2))
            S, L = rng.uniform(0, 2), -rng.uniform(0.05, 2)
            a = gamma_from_indices(S, L, P, G)
            b = gamma_lmi_from_indices(S, L, P, G, tol=tol)
            assert abs(a - b) <= 1e-6 + tol

    def test_below_gamma_infeasible(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            B = rng.normal(size=(4, 4))
            P = B @ B.T + np.eye(4)
            G = rng.normal(size=(4, 2))
            g = gamma_from_indices(0.2, -0.5, P, G)
            M = lmi_block(0.2, -0.5, P, G)
            assert not is_negative_semidefinite(M - 0.99 * g * np.eye(6), tol=0.0)
            assert is_negative_semidefinite(M - 1.0000001 * g * np.eye(6), tol=0.0)

    def test_model_lmi_matches_closed_form(self):
        for K in [K_STAR] + sweep_gains()[:3]:
            a = gamma_star_closed_form(UAV, K, OMEGA4)
            b = gamma_star_lmi(UAV, K, OMEGA4, tol=1e-8)
            assert abs(a - b) <= 1e-6 + 1e-8

    def test_model_infeasible(self):
        K6 = sweep_gains()[5]
        assert gamma_star_closed_form(UAV, K6, BENCHMARK_REGIONS["Omega1"]) is None
        assert gamma_star_lmi(UAV, K6, BENCHMARK_REGIONS["Omega1"]) is None


class TestCommonP:
    def test_linear_limit(self):
        # constant Jacobians give S = 0, so P = 2 P~
        model = linear_plant(-np.eye(2), -np.eye(2))
        K = PiGains(np.eye(2), np.eye(2))
        P = construct_common_P(model, K, OMEGA4)
        A0 = closed_loop_matrix(model, K, np.zeros(2))
        np.testing.assert_allclose(P, 2 * solve_lyapunov(A0, np.eye(4)), rtol=1e-12)

    def test_spd(self):
        P = construct_common_P(UAV, K_STAR, OMEGA4)
        np.testing.assert_array_equal(P, P.T)
        assert np.linalg.eigvalsh(P).min() > 0

    def test_rejects(self):
        with pytest.raises(ValueError):
            construct_common_P(UAV, K_STAR, OMEGA4, eps_K=1.0)
        with pytest.raises(ValueError):
            construct_common_P(UAV, sweep_gains()[5], BENCHMARK_REGIONS["Omega1"])

    def test_audit_benchmark(self):
        P = construct_common_P(UAV, K_STAR, OMEGA4)
        audit = common_P_audit(UAV, K_STAR, OMEGA4, P, eps=2.0)
        assert audit.fraction >= 0.99
        assert len(audit.residual_points) == round((1 - audit.fraction) * len(audit.points))

    def test_hji_where_storage_inequality_holds(self):
        gamma = gamma_star_closed_form(UAV, K_STAR, OMEGA4)
        P = construct_common_P(UAV, K_STAR, OMEGA4)
        audit = common_P_audit(UAV, K_STAR, OMEGA4, P, eps=2.0)
        G = assemble(UAV, K_STAR, np.zeros(2)).G
        rng = np.random.default_rng(6)
        checked = 0
        for e, top in zip(audit.points, audit.max_eigenvalues):
            if top > 0:
                continue
            H = hji_matrix(P, closed_loop_matrix(UAV, K_STAR, e), G, gamma)
            assert is_negative_semidefinite(H, tol=1e-9)
            s = rng.normal(size=(100, 4))
            assert np.all(np.einsum("ij,jk,ik->i", s, H, s) <= 1e-9)
            checked += 1
        assert checked > 0


class TestZeroLine:
    def test_full_span(self):
        coords = np.linspace(-np.pi / 6, np.pi / 6, 11)
        assert width_from_scan(coords, -np.ones(11)) == pytest.approx(np.pi / 3)

    def test_positive_origin(self):
        coords = np.linspace(-1, 1, 5)
        assert width_from_scan(coords, np.ones(5)) == 0.0

    def test_interpolation(self):
        coords = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        vals = np.array([1.0, 1.0, -1.0, -1.0, 3.0])
        assert zero_line_crossings(coords, vals) == [-0.5, 1.25]
        assert width_from_scan(coords, vals) == pytest.approx(1.75)

    def test_connected_run_only(self):
        coords = np.arange(-3.0, 4.0)
        vals = np.array([-1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0])
        assert width_from_scan(coords, vals) == pytest.approx(1.0)

    def test_non_hurwitz(self):
        assert zero_line_width(UAV, K_STAR.shifted(10.0), HEATMAP_REGION) == 0.0

    def test_benchmark_two_crossings(self):
        assert zero_line_width(UAV, K_STAR, HEATMAP_REGION) == pytest.approx(0.937, abs=1e-3)


class TestHeatmap:
    def test_shape_and_rows(self):
        hm = heatmap(UAV, K_STAR)
        rows_chi = int(np.floor(2 * np.pi / 3 / 0.05)) + 1
        rows_gamma = int(np.floor(np.pi / 3 / 0.01)) + 1
        assert hm.values.shape == (rows_chi, rows_gamma) == (42, 105)
        rows = hm.rows()
        assert rows.shape == (42 * 105, 3)
        assert np.ptp(hm.values, axis=0).max() <= 1e-9

    def test_single_point(self):
        hm = heatmap(UAV, K_STAR, Region((0.0, 0.0), (0.0, 0.0), (0.1, 0.1)))
        assert hm.rows().shape == (1, 3)

    def test_parallel_matches_serial(self):
        r = BENCHMARK_REGIONS["Omega3"]
        a = heatmap(UAV, K_STAR, r).values
        b = heatmap(UAV, K_STAR, r, workers=4).values
        np.testing.assert_array_equal(a, b)


class TestReport:
    def test_feasible(self):
        rep = report(UAV, K_STAR, OMEGA4, width_region=HEATMAP_REGION)
        assert rep.feasible and rep.hurwitz and rep.L < 0
        assert rep.gamma_star == pytest.approx(3.1319098103, rel=1e-9)
        d = rep.to_dict()
        assert d["gamma_star"] == rep.gamma_star

    def test_non_hurwitz(self):
        rep = report(UAV, K_STAR.shifted(10.0), OMEGA4, width_region=HEATMAP_REGION)
        assert not rep.feasible and not rep.hurwitz and rep.W == 0.0
        assert rep.gamma_star is None
