import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tanhqi.kernels import (
    Family,
    RadialKernel,
    admissible_note,
    one_minus_tanh_power,
    split,
    v_remainder_series,
)

R = np.array([0.0, 1e-8, 0.3, 1.0, 2.5, 10.0, 40.0])


def test_power_and_tanh_power_values():
    g = RadialKernel.tanh_power(3.0)
    np.testing.assert_allclose(g(R), R ** 3 * np.tanh(R), rtol=1e-15)
    assert RadialKernel.power(3)(2.0) == 8.0


def test_multiquadric_values():
    g = RadialKernel.multiquadric(0.5, 1.5)
    np.testing.assert_allclose(g(R), (0.25 + R ** 2) ** 1.5, rtol=1e-15)


def test_shifted_tps_matches_written_form():
    c = 0.5
    g = RadialKernel.shifted_tps(c)
    r = R[1:]
    q = c * c + r * r
    ref = q * np.log(np.sqrt(q)) - c * c * math.log(c) - r * r * math.log(c)
    np.testing.assert_allclose(g(r), ref, rtol=1e-12, atol=1e-15)
    assert g(0.0) == 0.0


def test_tanh_power_log_with_correction():
    gam = 0.5772156649015329
    g = RadialKernel.tanh_power_log(2.0, correction=gam)
    r = R[1:]
    np.testing.assert_allclose(g(r), (r * r * np.log(r) + gam * r * r) * np.tanh(r), rtol=1e-14)
    assert g(0.0) == 0.0


def test_scalar_in_scalar_out():
    assert isinstance(RadialKernel.tanh_power(3.0)(1.0), float)


def test_negative_distance_rejected():
    with pytest.raises(ValueError):
        RadialKernel.power(3)(np.array([-1.0]))


@pytest.mark.parametrize("kwargs", [
    dict(family="tanh_power", beta=1.0, alpha=-1.0),
    dict(family="tanh_power", beta=-1.0, alpha=0.5),
    dict(family="tanh_power_log", beta=3.0),
    dict(family="gen_multiquadric", c=0.0, mq_gamma=0.5),
    dict(family="gen_multiquadric", c=1.0, mq_gamma=2.0),
    dict(family="gen_multiquadric", c=1.0, mq_beta=0.0),
    dict(family="gen_tps_log", c=1.0, mq_gamma=0.0),
    dict(family="shifted_tps", c=-1.0),
    dict(family="power", beta=float("nan")),
])
def test_invalid_parameters(kwargs):
    with pytest.raises(ValueError):
        RadialKernel(**kwargs)


def test_family_aliases_and_dict_roundtrip():
    k = RadialKernel.from_dict({"family": "tanhpow", "beta": 3, "alpha": 1})
    assert k.family is Family.TANH_POWER
    assert RadialKernel.from_dict(k.to_dict()) == k
    assert RadialKernel.from_dict({"family": "polyharmonic_shift", "c": 0.5}).family is Family.SHIFTED_TPS


@given(st.floats(0.1, 5.0), st.floats(0.0, 3.0))
@settings(max_examples=30, deadline=None)
def test_roundtrip_property(beta, alpha):
    k = RadialKernel.tanh_power(beta, alpha)
    assert RadialKernel.from_dict(k.to_dict()) == k


def test_growth_and_smoothness():
    assert RadialKernel.tanh_power(3.0).growth_exponent == 3.0
    assert RadialKernel.tanh_power(3.0).smoothness_exponent == 4.0
    assert RadialKernel.multiquadric(0.5, 1.5).growth_exponent == 3.0


def test_split_reassembles_kernel():
    for k in (RadialKernel.tanh_power(3.0), RadialKernel.tanh_power(2.5, 2.0),
              RadialKernel.tanh_power_log(2.0, correction=0.3)):
        parts = split(k)
        r = np.linspace(0.01, 20, 50)
        np.testing.assert_allclose(parts(r), k(r), rtol=1e-12, atol=1e-12)
        # the remainder decays like exp(-2r)
        assert abs(parts.l1_remainder(np.array([30.0]))[0]) < 1e-20


def test_split_rejects_non_tanh():
    with pytest.raises(ValueError):
        split(RadialKernel.power(3))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.7])
def test_one_minus_tanh_power_large_r(alpha):
    r = np.array([0.1, 1.0, 5.0, 30.0, 200.0])
    direct = 1.0 - np.tanh(r[:3]) ** alpha
    np.testing.assert_allclose(one_minus_tanh_power(r[:3], alpha), direct, rtol=1e-12)
    # for large r, 1 - tanh^a r ~ 2a exp(-2r)
    np.testing.assert_allclose(one_minus_tanh_power(r[3:], alpha), 2 * alpha * np.exp(-2 * r[3:]), rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 2.5])
@pytest.mark.parametrize("r", [0.4, 1.0, 3.0])
def test_v_remainder_series(alpha, r):
    val, err = v_remainder_series(2.0, alpha, r)
    ref = r ** 2 * float(one_minus_tanh_power(r, alpha))
    assert abs(val - ref) <= max(err, 1e-14 * abs(ref)) + 1e-15
    assert err < 1e-10


def test_admissible_note():
    assert "heuristic" in admissible_note(RadialKernel.multiquadric(1.0, 0.5))
    assert admissible_note(RadialKernel.power(3)) == ""
