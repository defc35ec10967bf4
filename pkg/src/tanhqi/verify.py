"""Oracle suites run by ``tanhqi verify``.

Each suite returns a list of :class:`CheckResult`; the comparison values
come from scipy quadrature or closed forms independent of the code under
test.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import gft, specfun, strangfix
from .kernels import RadialKernel, one_minus_tanh_power


@dataclass
class CheckResult:
    suite: str
    name: str
    error: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.error) and self.error <= self.tol)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}: {self.name} err={self.error:.3e} tol={self.tol:.1e}"


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def tanh_series_suite(cases=((3, 1), (1, 3), (2, 5)), s_values=(0.1, 0.3, 0.7), tol=1e-6):
    """Small-s expansion of the ``r**m tanh r`` transform against ``u^ - quadrature(v^)``."""
    out = []
    for m, n in cases:
        exp = gft.tanh_power_expansion(m, n).without_delta()
        u = gft.classical_gft("power", m, n) if m % 2 else None
        v = lambda r, _m=m: np.power(r, _m) * one_minus_tanh_power(r, 1.0)
        spec = gft.HankelOracleSpec(n, v, radius=40.0, tol=1e-13)
        for s in s_values:
            ref = (u(s) if u is not None else 0.0) - gft.hankel_oracle(spec, s)[0]
            out.append(CheckResult("tanh-series", f"m={m} n={n} s={s}", _rel(exp(s), ref), tol))
    return out


def odd_dim_suite(cases=((3, 1), (1, 3)), s_values=(0.5, 1.0, 2.0, 5.0), tol=1e-8):
    """Odd-dimension series for ``v^`` against adaptive quadrature, including s > 1."""
    out = []
    for m, n in cases:
        v = lambda r, _m=m: np.power(r, _m) * one_minus_tanh_power(r, 1.0)
        for s in s_values:
            ref = gft.radial_fourier_quad(v, n, s, 40.0)[0]
            got = gft.odd_dim_vhat(m, n, s)[0]
            out.append(CheckResult("odd-dim", f"m={m} n={n} s={s}", abs(got - ref) / max(1.0, abs(ref)), tol))
    return out


def sech_suite(omegas=(0.25, 0.5, 1.0, 2.0, 4.0), tol=1e-8):
    """Quadrature of the 1-D transforms of sech and sech^2 against their closed forms."""
    from scipy import integrate

    out = []
    # overflow-free forms for large t
    funcs = {"sech": lambda t: 2.0 * math.exp(-t) / (1.0 + math.exp(-2.0 * t)),
             "sech2": lambda t: 4.0 * math.exp(-2.0 * t) / (1.0 + math.exp(-2.0 * t)) ** 2}
    for name, f in funcs.items():
        for w in omegas:
            # even integrand: int_R f(t) e^{-i w t} dt = 2 int_0^inf f(t) cos(w t) dt
            # both integrands are below 1e-30 beyond t = 40
            val, _ = integrate.quad(lambda t: f(t) * math.cos(w * t), 0.0, 40.0,
                                    epsabs=1e-13, epsrel=1e-12, limit=400)
            ref = gft.univariate_tanh_family(name, w)
            out.append(CheckResult("sech", f"{name} w={w}", abs(2.0 * val - ref), tol))
    return out


def g_series_suite(j_max=32, tol=1e-8):
    """FFT coefficients of (2 - 2 cos y)^{3/2} / (2 pi) against the gamma-ratio closed form."""
    seq = strangfix.g_series_coeffs(3.0, 1, n_coeffs=2 ** 11, normalization=1.0 / (2.0 * math.pi))
    j = np.arange(-j_max, j_max + 1)
    got = np.array([seq[(int(k),)] for k in j])
    ref = strangfix.g_series_closed_form(3.0, j, 1.0 / (2.0 * math.pi))
    out = [CheckResult("g-series", f"|j| <= {j_max}", float(np.max(np.abs(got - ref))), tol)]
    p = strangfix.fitted_decay_exponent(seq)
    out.append(CheckResult("g-series", f"decay exponent {p:.4f} vs 4", abs(p - 4.0), 0.05))
    return out


def strang_fix_suite(tol=1e-5):
    """Finite-difference Strang-Fix check for the three example constructions."""
    from .experiments import build_qlf, example_config

    out = []
    for name in ("example1", "example2", "example3"):
        cfg = example_config(name)
        for label in cfg.kernels:
            qlf, cls, M, _ = build_qlf(cfg, label)
            tr = gft.kernel_transform(cfg.symbols[label], cfg.dim)
            rep = strangfix.strang_fix_verify(qlf.coeffs, tr, M)
            out.append(CheckResult("strang-fix", f"{name} {label} M={M}", rep.max_violation, tol))
    return out


def specfun_suite(tol=1e-12):
    """Recurrences of the special functions (relative error)."""
    out = []
    worst = 0.0
    for x in (0.3, 1.7, 4.25, 11.5, -0.6, -2.3):
        worst = max(worst, _rel(specfun.gamma(x + 1.0), x * specfun.gamma(x)))
    out.append(CheckResult("specfun", "Gamma(x+1) = x Gamma(x)", worst, tol))
    worst = 0.0
    for x in (0.3, 1.7, 4.25, 11.5, -0.6):
        worst = max(worst, abs(specfun.digamma(x + 1.0) - specfun.digamma(x) - 1.0 / x)
                    / max(1.0, abs(specfun.digamma(x + 1.0))))
    out.append(CheckResult("specfun", "psi(x+1) = psi(x) + 1/x", worst, tol))
    worst = 0.0
    for x in (0.3, 1.7, 4.25, 11.5):
        worst = max(worst, _rel(specfun.trigamma(x + 1.0), specfun.trigamma(x) - 1.0 / x ** 2))
    out.append(CheckResult("specfun", "psi1(x+1) = psi1(x) - 1/x^2", worst, tol))
    worst = 0.0
    for nu in (0.5, 1.0, 1.5, 2.5):
        for z in (0.2, 1.0, 3.5):
            lhs = specfun.bessel_j(nu - 1.0, z) + specfun.bessel_j(nu + 1.0, z)
            rhs = 2.0 * nu / z * specfun.bessel_j(nu, z)
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), abs(specfun.bessel_j(nu - 1.0, z))))
    out.append(CheckResult("specfun", "J three-term recurrence", worst, tol))
    worst = 0.0
    for nu in (0.5, 1.0, 1.5, 2.3):
        for z in (0.2, 1.0, 3.5):
            lhs = specfun.bessel_k(nu + 1.0, z)
            rhs = specfun.bessel_k(nu - 1.0, z) + 2.0 * nu / z * specfun.bessel_k(nu, z)
            worst = max(worst, _rel(lhs, rhs))
    out.append(CheckResult("specfun", "K three-term recurrence", worst, tol))
    return out


SUITES = {
    "specfun": specfun_suite,
    "tanh-series": tanh_series_suite,
    "odd-dim": odd_dim_suite,
    "sech": sech_suite,
    "g-series": g_series_suite,
    "strang-fix": strang_fix_suite,
}


def run_suites(names=None):
    names = list(SUITES) if not names else list(names)
    results = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
        results.extend(SUITES[name]())
    return results


__all__ = ["CheckResult", "SUITES", "run_suites", "RadialKernel"]
