import numpy as np
import pytest

from pidissipativity.plant import (PlantEvaluationError, UavParams, check_jacobians,
                                    disturbance, linear_plant, make_plant, uav_model)

K = 9.81 / 25.0


@pytest.fixture(scope="module")
def uav():
    return uav_model()


class TestUav:
    def test_shapes(self, uav):
        assert (uav.n, uav.m, uav.l) == (2, 2, 2)
        np.testing.assert_array_equal(uav.Gamma, -np.eye(2))

    @pytest.mark.parametrize("e, expected", [
        ((0.0, 0.0), (0.0, np.cos(np.pi / 12))),
        ((1.0, np.pi / 12), (0.0, 1.0)),
        ((0.0, np.pi / 12 - np.pi / 2), (0.0, 0.0)),
    ])
    def test_trim_examples(self, uav, e, expected):
        np.testing.assert_allclose(uav.trim(np.array(e)), expected, atol=1e-15)

    def test_trim_is_equilibrium_on_grid(self, uav):
        for ec in np.linspace(-1, 1, 5):
            for eg in np.linspace(-0.5, 0.5, 11):
                e = np.array([ec, eg])
                np.testing.assert_allclose(uav.f(e, uav.trim(e)), 0.0, atol=1e-15)

    def test_jacobians_at_trim(self, uav):
        Je, Ju = uav.jacobians(np.zeros(2))
        np.testing.assert_allclose(Ju, -K * np.eye(2), atol=1e-15)
        assert K == pytest.approx(0.3924)
        np.testing.assert_allclose(Je, [[0.0, 0.0], [0.0, K * np.sin(np.pi / 12)]])
        assert Je[1, 1] == pytest.approx(0.10157, abs=1e-5)

    def test_jacobians_match_finite_differences(self, uav):
        rng = np.random.default_rng(3)
        for _ in range(100):
            e = rng.uniform([-np.pi / 3, -np.pi / 6], [np.pi / 3, np.pi / 6])
            u = rng.uniform([-np.pi / 4, -2.1], [np.pi / 4, 2.1])
            assert check_jacobians(uav, e, u, h=1e-5) <= 1e-6

    def test_rejects_zero_step(self, uav):
        with pytest.raises(ValueError):
            check_jacobians(uav, np.zeros(2), np.zeros(2), h=0.0)

    def test_refuses_vertical_roll(self, uav):
        with pytest.raises(PlantEvaluationError):
            uav.f(np.zeros(2), np.array([np.pi / 2, 1.0]))
        with pytest.raises(PlantEvaluationError):
            uav.jacobians(np.zeros(2), np.array([-2.0, 1.0]))

    def test_reference_linearization(self):
        m = uav_model(linearize_at="reference")
        np.testing.assert_array_equal(m.linearization_input(np.array([0.3, 0.1])), [0.0, 0.0])
        _, Ju = m.jacobians(np.zeros(2))
        np.testing.assert_allclose(Ju, [[-K, 0.0], [0.0, -K]])

    def test_bad_linearization(self):
        with pytest.raises(ValueError):
            uav_model(linearize_at="somewhere")

    def test_offset_is_trim_at_origin(self, uav):
        np.testing.assert_allclose(uav.input_offset(), [0.0, np.cos(np.pi / 12)])


class TestParams:
    def test_initial_conditions(self):
        p = UavParams()
        np.testing.assert_allclose(p.initial_error(), [-np.pi / 3, np.pi / 12 - np.pi / 4])
        np.testing.assert_allclose(p.initial_input(), [np.pi / 3, 1.0])

    def test_round_trip(self):
        p = UavParams(V=30.0)
        assert UavParams.from_dict(p.to_dict()) == p

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            UavParams.from_dict({"speed": 3})

    @pytest.mark.parametrize("kw", [{"V": 0.0}, {"g": -1.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            UavParams(**kw)

    def test_make_plant(self):
        model, p = make_plant("uav", {"V": 50.0})
        _, Ju = model.jacobians(np.zeros(2))
        assert Ju[0, 0] == pytest.approx(-9.81 / 50.0)
        with pytest.raises(ValueError):
            make_plant("quadrotor")


class TestDisturbance:
    def test_at_zero(self):
        d, dd = disturbance(UavParams(), 0.0)
        np.testing.assert_allclose(d, [0.0, 0.1], atol=1e-15)
        np.testing.assert_allclose(dd, [0.015, 0.0], atol=1e-15)

    def test_peak(self):
        d, dd = disturbance(UavParams(), np.pi / 0.3)
        assert d[0] == pytest.approx(0.1)
        assert dd[0] == pytest.approx(0.0, abs=1e-15)

    def test_derivative_matches_difference(self):
        p = UavParams()
        for variant in ("sinusoid", "decaying"):
            for t in (0.3, 2.0, 17.5):
                h = 1e-6
                fd = (disturbance(p, t + h, variant)[0] - disturbance(p, t - h, variant)[0]) / (2 * h)
                np.testing.assert_allclose(disturbance(p, t, variant)[1], fd, atol=1e-9)

    def test_decaying_and_none(self):
        p = UavParams()
        d, _ = disturbance(p, 40.0, "decaying")
        assert np.abs(d).max() < 1e-17
        d, dd = disturbance(p, 3.0, "none")
        assert not d.any() and not dd.any()
        with pytest.raises(ValueError):
            disturbance(p, 0.0, "gusty")


def test_linear_plant_exact():
    A = np.array([[0.0, 1.0], [-2.0, -3.0]])
    B = np.array([[0.0], [1.0]])
    model = linear_plant(A, B)
    Je, Ju = model.jacobians(np.array([0.4, -0.2]))
    np.testing.assert_array_equal(Je, A)
    np.testing.assert_array_equal(Ju, B)
    assert check_jacobians(model, np.array([1.0, 2.0]), np.array([0.5])) < 1e-9
