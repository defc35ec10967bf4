import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from tanhqi.experiments import build_qlf, example_config
from tanhqi.kernels import RadialKernel
from tanhqi.quasi import (
    ErrorReport,
    QuasiInterpolant,
    QuasiLagrange,
    convergence_sweep,
    error_report,
    quasi_interpolate,
    reproduction_residual,
    uniform_grid,
    write_error_csv,
)

RADII = (10, 20, 40)


def qlf_for(example, label):
    q, _, M, _ = build_qlf(example_config(example), label)
    return q, M


@pytest.fixture(scope="module")
def ex1_g2():
    return qlf_for("example1", "g2")[0]


def halving(series):
    """Each residual is at most half the previous one, or at the rounding floor."""
    return all(b.residual <= max(a.residual / 2, b.floor) for a, b in zip(series, series[1:]))


# ---------------------------------------------------------------- reproduction

CONSTRUCTED = [("example1", "g1"), ("example1", "g2"), ("example3", "g1"), ("example3", "g2")]


@pytest.mark.parametrize("example,label", CONSTRUCTED)
def test_partition_of_unity_decreases_with_truncation(example, label):
    q, _ = qlf_for(example, label)
    series = [reproduction_residual(q, 0, R) for R in RADII]
    assert halving(series), [r.residual for r in series]
    assert series[-1].residual < 1e-6


@pytest.mark.parametrize("example,label", CONSTRUCTED)
def test_polynomial_reproduction_to_certified_degree(example, label):
    q, M = qlf_for(example, label)
    assert M == 3
    for d in range(1, M + 1):
        series = [reproduction_residual(q, d, R) for R in RADII]
        assert halving(series), (d, [r.residual for r in series])
        assert all(r.within(10.0) for r in series)


@pytest.mark.xfail(strict=True, reason="the series-built psi has a slowly decaying tail: "
                   "its truncated lattice sums drift away from 1 as the radius grows")
@pytest.mark.parametrize("label", ["g1", "g2"])
def test_partition_of_unity_series_construction(label):
    q, _ = qlf_for("example2", label)
    assert halving([reproduction_residual(q, 0, R) for R in RADII])


def test_constant_and_cubic_reproduction(ex1_g2):
    qi = QuasiInterpolant(ex1_g2.kernel, h=0.01, coeffs=ex1_g2.coeffs, truncation_radius=60)
    qi.fit_function(np.ones_like, -1, 1)
    assert qi.predict(np.array([[0.0]]))[0] == pytest.approx(1.0, abs=1e-6)
    qi.fit_function(lambda x: x ** 3, -2, 2)
    X = np.linspace(-1, 1, 11)[:, None]
    np.testing.assert_allclose(qi.predict(X), X[:, 0] ** 3, atol=1e-8)


def test_linear_is_reproduced_at_noise_level(ex1_g2):
    qi = QuasiInterpolant(ex1_g2.kernel, h=0.05, coeffs=ex1_g2.coeffs, truncation_radius=40)
    qi.fit_function(lambda x: 2 * x - 1, -4, 4)
    rep, _, _ = error_report(qi, uniform_grid(-1, 1, 41), lambda x: 2 * x - 1)
    assert rep.max_error < 1e-7


# ---------------------------------------------------------------- psi

def test_psi_values_and_decay(ex1_g2):
    assert ex1_g2(0.0) == pytest.approx(1.10787984, rel=1e-8)
    x = np.array([5.0, 10.0, 20.0])
    # exponentially small beyond the coefficient support, down to rounding of the sum
    assert np.all(np.abs(ex1_g2(x)) < np.array([5e-3, 5e-6, 1e-10]))
    assert ex1_g2(-2.5) == pytest.approx(ex1_g2(2.5), rel=1e-13)


def test_psi_decay_multiquadric():
    q, _ = qlf_for("example1", "g1")
    assert q.decay_exponent == 5
    x = np.array([10.0, 20.0, 40.0])
    v = np.abs(q(x))
    # O(|x|^-5): doubling x gains at least a factor 16 (beyond 40 the sum is at rounding level)
    assert np.all(v[1:] * 16 < v[:-1])


def test_build_matches_experiment_route():
    k = RadialKernel.tanh_power(3.0)
    q = QuasiLagrange.build(k, 1, delta_set=range(-4, 5))
    ref, _ = qlf_for("example1", "g2")
    np.testing.assert_allclose(q.coeffs.values, ref.coeffs.values, atol=1e-14)
    with pytest.raises(ValueError):
        QuasiLagrange(k, q.coeffs, 2)


def test_two_dimensional_psi_is_symmetric():
    q, _ = qlf_for("example3", "g1")
    p = np.array([[0.3, 1.7], [1.7, 0.3], [-0.3, 1.7], [0.3, -1.7]])
    v = q(p)
    np.testing.assert_allclose(v, v[0], rtol=1e-12)


# ---------------------------------------------------------------- estimator

def test_sklearn_params_and_clone(ex1_g2):
    qi = QuasiInterpolant(ex1_g2.kernel, h=0.1, coeffs=ex1_g2.coeffs, truncation_radius=30)
    params = qi.get_params()
    assert params["h"] == 0.1 and params["truncation_radius"] == 30
    c = clone(qi)
    assert c.get_params()["h"] == 0.1 and not hasattr(c, "qlf_")
    c.set_params(h=0.2)
    assert c.h == 0.2


def test_fit_predict_matches_direct_sum(ex1_g2):
    h = 0.1
    X = np.arange(-30, 31)[:, None] * h
    y = np.sin(X[:, 0])
    qi = QuasiInterpolant(ex1_g2.kernel, h=h, coeffs=ex1_g2.coeffs).fit(X, y)
    x = np.array([0.123, -0.77])
    direct = [np.sum(y * ex1_g2(xi / h - np.arange(-30, 31))) for xi in x]
    np.testing.assert_allclose(qi.predict(x[:, None]), direct, rtol=1e-10, atol=1e-12)
    assert qi.score(X[20:40], y[20:40]) > 0.999


def test_shift_equivariance(ex1_g2):
    h, k = 0.05, 7
    f = lambda x: np.exp(-x * x)
    a = QuasiInterpolant(ex1_g2.kernel, h=h, coeffs=ex1_g2.coeffs, truncation_radius=30)
    b = clone(a)
    a.fit_function(f, -4, 4)
    b.fit_function(lambda x: f(x - k * h), -4 + k * h, 4 + k * h)
    x = np.array([-0.31, 0.0, 0.4217])
    np.testing.assert_allclose(b.predict((x + k * h)[:, None]), a.predict(x[:, None]), rtol=1e-10, atol=1e-12)


def test_off_lattice_fit_rejected(ex1_g2):
    qi = QuasiInterpolant(ex1_g2.kernel, h=0.1, coeffs=ex1_g2.coeffs)
    with pytest.raises(ValueError, match="not on the lattice"):
        qi.fit(np.array([[0.0], [0.15]]), [1.0, 2.0])
    with pytest.raises(ValueError):
        qi.fit(np.array([[0.0], [0.1]]), [1.0])
    with pytest.raises(ValueError):
        QuasiInterpolant(ex1_g2.kernel, h=-1.0).fit(np.array([[0.0]]), [1.0])
    with pytest.raises(TypeError):
        QuasiInterpolant("tanh", h=1.0).fit(np.array([[0.0]]), [1.0])


def test_empty_truncation_ball_raises(ex1_g2):
    qi = QuasiInterpolant(ex1_g2.kernel, h=0.1, coeffs=ex1_g2.coeffs, truncation_radius=5)
    qi.fit_function(np.cos, -1, 1)
    assert np.isfinite(quasi_interpolate(qi, 0.2))
    with pytest.raises(ValueError, match="truncation radius"):
        quasi_interpolate(qi, 3.0)


def test_interior_mask(ex1_g2):
    qi = QuasiInterpolant(ex1_g2.kernel, h=0.1, coeffs=ex1_g2.coeffs, truncation_radius=5)
    qi.fit_function(np.cos, -2, 2)
    mask = qi.interior_mask(np.array([[0.0], [1.2], [1.5]]))
    assert mask.tolist() == [True, True, False]
    qi.predict(np.array([[0.0], [1.5]]))
    assert qi.last_complete_.tolist() == [True, False]


def test_two_dimensional_fit_predict():
    q, _ = qlf_for("example3", "g2")
    h = 0.1
    qi = QuasiInterpolant(q.kernel, h=h, dim=2, coeffs=q.coeffs, truncation_radius=20)
    f = lambda x, y: np.cos(x) * np.sin(y + 0.3)
    qi.fit_function(f, -3, 3)
    rep, _, _ = error_report(qi, uniform_grid(-0.5, 0.5, 5, 2), f)
    assert rep.max_error < 1e-3
    assert rep.excluded == 0


# ---------------------------------------------------------------- convergence

def test_cos_convergence_rate(ex1_g2):
    R = 30
    grid = uniform_grid(-1, 1, 201)

    def make(h):
        return QuasiInterpolant(ex1_g2.kernel, h=h, coeffs=ex1_g2.coeffs, truncation_radius=R)

    res = convergence_sweep(make, np.cos, [0.04, 0.02, 0.01], grid, -1 - (R + 2) * 0.04, 1 + (R + 2) * 0.04)
    assert 3.5 <= res.slope <= 4.5, res


@pytest.mark.xfail(strict=True, reason="series-built psi does not reproduce constants under "
                   "truncation, so halving h does not reduce the error")
def test_series_construction_convergence_rate():
    q, _ = qlf_for("example2", "g1")
    bump = lambda x: np.clip(1 - x * x, 0, None) ** 3

    def make(h):
        return QuasiInterpolant(q.kernel, h=h, coeffs=q.coeffs)

    res = convergence_sweep(make, bump, [0.08, 0.04, 0.02], uniform_grid(-1.5, 1.5, 401), -1, 1)
    assert 1.6 <= res.slope <= 2.4, res


def test_convergence_needs_three_spacings(ex1_g2):
    with pytest.raises(ValueError):
        convergence_sweep(lambda h: None, np.cos, [0.1, 0.05], uniform_grid(-1, 1, 3), -1, 1)


# ---------------------------------------------------------------- reports

@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=50))
@settings(max_examples=100, deadline=None)
def test_rmse_never_exceeds_max(errs):
    e = np.abs(np.array(errs))
    rep = ErrorReport(float(e.max()), float(np.sqrt(np.mean(e * e))), "random", len(e))
    assert rep.rmse <= rep.max_error * (1 + 1e-12)


def test_error_report_rejects_inconsistent():
    with pytest.raises(ValueError):
        ErrorReport(1e-5, 2e-5, "bad", 3)
    assert ErrorReport(1.0, 0.5, "ok", 2, meta={"kernel": "g1"}).to_dict()["kernel"] == "g1"


def test_write_error_csv(tmp_path):
    grid = uniform_grid(0, 1, 3, 2)
    fx = np.arange(9.0)
    Qf = fx + 0.1
    path = tmp_path / "err.csv"
    write_error_csv(path, grid, fx, Qf)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,f,Qf,abs_err"
    assert len(lines) == 10
    assert float(lines[-1].split(",")[-1]) == pytest.approx(0.1)
