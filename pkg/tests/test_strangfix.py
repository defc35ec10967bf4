import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from oracles import bessel_k_coeffs
from tanhqi import gft
from tanhqi import strangfix as sf
from tanhqi.experiments import EXAMPLE3_DELTA
from tanhqi.kernels import RadialKernel

EULER = 0.5772156649015329
C = 0.5


def moment_oracle(rhs, radius):
    """Symmetric 1-D solution of ``sum_k mu_k k**(2i) = rhs[i]`` on ``|k| <= radius``."""
    m = sympy.symbols(f"m0:{radius + 1}")
    eqs = []
    for i, b in enumerate(rhs):
        expr = m[0] * (1 if i == 0 else 0) + sum(2 * m[k] * k ** (2 * i) for k in range(1, radius + 1))
        eqs.append(sympy.Eq(expr, b))
    sol = sympy.solve(eqs, m)
    return [sol[m[abs(k)]] for k in range(-radius, radius + 1)]


# ---------------------------------------------------------------- example 1 (1-D, sigma = 4)

def test_tanh_power_coefficients_are_rational():
    tr = gft.kernel_transform(RadialKernel.tanh_power(3.0), 1)
    seq, cls, system = sf.quasi_lagrange_coeffs(tr, delta_set=range(-4, 5))
    assert cls.case is sf.SingularCase.EVEN_INTEGER and cls.order == 4.0
    assert system.nonzero_rhs(1e-15) == pytest.approx({5: 2.0})
    frozen = [7, -96, 676, -1952, 2730, -1952, 676, -96, 7]
    assert [sympy.nsimplify(v * 2880) for v in moment_oracle([0, 0, 2, 0, 0], 4)] == frozen
    np.testing.assert_allclose(seq.values * 2880, frozen, rtol=0, atol=1e-10)
    assert seq.total() == pytest.approx(0.0, abs=1e-13)


def test_multiquadric_rhs_matches_bessel_oracle():
    k = RadialKernel.multiquadric(C, 1.5)
    tr = gft.kernel_transform(k, 1)
    _, _, system = sf.quasi_lagrange_coeffs(tr, delta_set=range(-4, 5))
    b = system.nonzero_rhs(1e-15)
    pref = math.sqrt(2 * math.pi) * 2 ** 2.5 / math.gamma(-1.5)
    a0, a1 = bessel_k_coeffs(pref, 2, C)
    assert a0 == pytest.approx(12.0, rel=1e-14)
    tau0, tau1 = 1 / a0, -a1 / a0 ** 2
    assert b[5] == pytest.approx(24 * tau0, rel=1e-13)
    assert b[7] == pytest.approx(-720 * tau1, rel=1e-12)
    assert b[7] == pytest.approx(-15 * C ** 2, rel=1e-13)
    b9 = 52.5 * C ** 4 * (4 * math.log(C) + 4 * EULER + 1 - 4 * math.log(2))
    assert b[9] == pytest.approx(b9, rel=1e-12)
    assert b[9] == pytest.approx(-7.3379079, rel=1e-7)


# ---------------------------------------------------------------- example 3 (2-D, 21 points)

def example3(kernel):
    tr = gft.kernel_transform(kernel, 2)
    return tr, sf.quasi_lagrange_coeffs(tr, delta_set=EXAMPLE3_DELTA)


def test_example3_delta_set_shape():
    assert len(EXAMPLE3_DELTA) == 21
    assert len(set(EXAMPLE3_DELTA)) == 21
    assert max(max(abs(a), abs(b)) for a, b in EXAMPLE3_DELTA) == 3
    assert (2, 2) in EXAMPLE3_DELTA and (2, 1) not in EXAMPLE3_DELTA


def test_shifted_tps_2d_rhs_matches_bessel_oracle():
    _, (seq, cls, system) = example3(RadialKernel.shifted_tps(C))
    a0, a1 = bessel_k_coeffs(4 * math.pi, 2, C)
    assert a0 == pytest.approx(8 * math.pi, rel=1e-14)
    assert a1 == pytest.approx(-2 * math.pi * C ** 2, rel=1e-12)
    tau2, tau3 = 1 / a0, -a1 / a0 ** 2
    b = system.nonzero_rhs(1e-15)
    assert b[11] == pytest.approx(24 * tau2, rel=1e-13)
    assert b[11] == pytest.approx(3 / math.pi, rel=1e-13)
    assert b[22] == pytest.approx(-720 * tau3, rel=1e-12)
    assert b[22] == pytest.approx(-45 * C ** 2 / (2 * math.pi), rel=1e-12)
    assert b[24] == pytest.approx(-144 * tau3, rel=1e-12)
    assert len(seq) == 21
    assert seq.is_symmetric(1e-10)


def test_example3_tanh_log_rhs_has_only_leading_rows_below_degree_8():
    k = RadialKernel.tanh_power_log(2.0, correction=EULER - math.log(2))
    sym = RadialKernel.power_log(2.0, correction=EULER - math.log(2))
    _, (seq, _, system) = example3(sym)
    b = system.nonzero_rhs(1e-15)
    assert set(b) == {11, 13, 15}
    assert b[13] == pytest.approx(1 / math.pi, rel=1e-13)
    assert seq.is_symmetric(1e-10)
    # the full tanh transform shares the singular part below degree 8
    _, (seq2, _, _) = example3(k)
    assert len(seq2) == 21


def test_too_few_points_is_inconsistent():
    tr = gft.kernel_transform(RadialKernel.tanh_power(3.0), 1)
    with pytest.raises(sf.InconsistentSystemError):
        sf.quasi_lagrange_coeffs(tr, delta_set=range(-2, 3))


def test_default_target_order():
    assert sf.default_target_order(4, 1) == 8
    assert sf.default_target_order(4, 2) == 7
    assert len(sf.monomial_exponents(2, 2)) == 6


# ---------------------------------------------------------------- Strang-Fix

STRANG_FIX_CASES = [
    (RadialKernel.multiquadric(C, 1.5), 1, range(-4, 5)),
    (RadialKernel.tanh_power(3.0), 1, range(-4, 5)),
    (RadialKernel.shifted_tps(C), 2, EXAMPLE3_DELTA),
    (RadialKernel.power_log(2.0, correction=EULER - math.log(2)), 2, EXAMPLE3_DELTA),
    (RadialKernel.shifted_tps(C), 1, None),
    (RadialKernel.tanh_power_log(2.0, correction=EULER), 1, None),
]


@pytest.mark.parametrize("kernel,n,delta", STRANG_FIX_CASES)
def test_strang_fix_conditions(kernel, n, delta):
    tr = gft.kernel_transform(kernel, n)
    seq, cls, system = sf.quasi_lagrange_coeffs(tr, delta_set=delta)
    M = sf.reproduction_degree(tr.singular_expansion, cls, system is not None)
    rep = sf.strang_fix_verify(seq, tr, M)
    assert rep.passed(1e-5), rep.max_violation


@pytest.mark.parametrize("kernel,n,delta", STRANG_FIX_CASES[:4])
def test_strang_fix_negative_control(kernel, n, delta):
    tr = gft.kernel_transform(kernel, n)
    seq, cls, _ = sf.quasi_lagrange_coeffs(tr, delta_set=delta)
    rng = np.random.default_rng(7)
    noisy = sf.CoeffSeq(seq.dim, {k: v * (1 + 0.05 * rng.standard_normal()) for k, v in seq.support.items()},
                        leading_factor=seq.leading_factor, order=seq.order, symbol={"kind": "poly"})
    assert not sf.strang_fix_verify(noisy, tr, cls.max_degree).passed(1e-5)


def test_reproduction_degree_rules():
    tps = gft.kernel_transform(RadialKernel.tanh_power(3.0), 1).singular_expansion
    cls = sf.classify(tps)
    assert sf.reproduction_degree(tps, cls, True) == 3
    stps = gft.kernel_transform(RadialKernel.shifted_tps(C), 1).singular_expansion
    cls = sf.classify(stps)
    assert cls.case is sf.SingularCase.NON_EVEN
    assert sf.reproduction_degree(stps, cls, False) == 1
    log = gft.RadialExpansion(1, (gft.ExpansionTerm(0.0, 1, 2.0),))
    lcls = sf.classify(log)
    assert lcls.case is sf.SingularCase.LOG_LEADING
    assert sf.reproduction_degree(log, lcls, False) == 0


def test_classify_requires_singular_term():
    with pytest.raises(ValueError):
        sf.classify(gft.RadialExpansion(1, ()))


# ---------------------------------------------------------------- series symbols

def test_g_series_matches_closed_form():
    seq = sf.g_series_coeffs(3.0)
    j = np.arange(0, 64)
    np.testing.assert_allclose([seq[k] for k in j], sf.g_series_closed_form(3.0, j), rtol=0, atol=1e-12)
    assert seq.is_symmetric()
    assert seq.total() == pytest.approx(0.0, abs=1e-13)


def test_g_series_closed_form_binomial():
    # (2 - 2 cos y)**2 = 6 - 8 cos y + 2 cos 2y
    np.testing.assert_allclose(sf.g_series_closed_form(4.0, [0, 1, 2, 3]), [6, -4, 1, 0], atol=1e-14)


def test_g_series_decay_exponent():
    seq = sf.g_series_coeffs(3.0)
    assert seq.decay_exponent == 4.0
    assert sf.fitted_decay_exponent(seq) == pytest.approx(4.0, abs=0.05)


def test_sin_variant_symbol():
    y = np.array([0.3, 1.0, 2.0])
    np.testing.assert_allclose(sf.g_symbol(y, 3.0, "sin"), np.abs(np.sin(y)) ** 3)
    with pytest.raises(ValueError):
        sf.g_symbol(y, 3.0, "tan")


def test_h_series_reproduces_symbol():
    h = sf.h_series_coeffs(2.0, n_coeffs=2 ** 12)
    y = np.array([0.5, 1.0, 2.5])
    np.testing.assert_allclose(sf.symbol_value(h, y[:, None]), sf.h_symbol(y, 2.0), atol=2e-4)
    assert h.total() == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        sf.h_series_coeffs(0.0)


def test_fft_size_validation():
    with pytest.raises(ValueError):
        sf.g_series_coeffs(3.0, n_coeffs=1000)
    with pytest.raises(ValueError):
        sf.g_series_coeffs(3.0, n_coeffs=64, fft_size=32)


def test_laplacian_and_convolution():
    L = sf.laplacian_power_coeffs(2, 1)
    assert L.support == {(-1, 0): -1.0, (0, -1): -1.0, (0, 0): 4.0, (0, 1): -1.0, (1, 0): -1.0}
    sq = sf.convolve(sf.laplacian_power_coeffs(1, 1), sf.laplacian_power_coeffs(1, 1))
    assert sq.support == sf.laplacian_power_coeffs(1, 2).support
    np.testing.assert_allclose(list(sq.support.values()), [1, -4, 6, -4, 1])


# ---------------------------------------------------------------- CoeffSeq

def test_coeffseq_text_roundtrip():
    tr = gft.kernel_transform(RadialKernel.shifted_tps(C), 2)
    seq, _, _ = sf.quasi_lagrange_coeffs(tr, delta_set=EXAMPLE3_DELTA)
    back = sf.CoeffSeq.from_text(seq.to_text())
    assert back.support == seq.support
    assert back.leading_factor == seq.leading_factor and back.order == seq.order
    with pytest.raises(ValueError):
        sf.CoeffSeq.from_text("# dim 1\n")


def test_coeffseq_dense_roundtrip():
    seq = sf.CoeffSeq(2, {(0, 0): 1.0, (-1, 2): 2.5})
    arr, off = seq.dense()
    assert arr.shape == (2, 3) and list(off) == [-1, 0]
    assert sf.CoeffSeq.from_dense(arr, off).support == seq.support
    with pytest.raises(ValueError):
        sf.CoeffSeq(2, {(0,): 1.0})


def test_exact_rational_solve_is_exact():
    sol = moment_oracle([0, 0, 2, 0, 0], 4)
    assert all(isinstance(v, sympy.Rational) for v in sol)
    assert Fraction(int(sympy.numer(sol[4])), int(sympy.denom(sol[4]))) == Fraction(2730, 2880)
