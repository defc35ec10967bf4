"""Generalised Fourier transforms of radial kernels.

Conventions: ``f^(y) = int f(x) exp(-i y.x) dx`` (non-unitary) and
``s = |y|``.  A generalised transform is represented near the origin by a
:class:`RadialExpansion`, a finite sum of ``coeff * s**(-q) * (log s)**p``
plus symbolic delta terms ``coeff * Laplacian**k delta``.

The radial Fourier transform of an integrable radial function ``f(r)`` is::

    f^(s) = (2 pi)**(n/2) s**(1 - n/2) int_0^inf f(r) r**(n/2) J_{n/2-1}(s r) dr
"""
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import specfun
from .kernels import Family, RadialKernel, one_minus_tanh_power, v_remainder_series

__all__ = [
    "ExpansionTerm",
    "DeltaTerm",
    "RadialExpansion",
    "ExpansionRangeError",
    "DeltaEvaluationError",
    "ExcludedParameterError",
    "classical_gft",
    "delta_cancellation_constant",
    "tanh_power_expansion",
    "tanh_power_analytic_coeffs",
    "odd_dim_integral",
    "odd_dim_vhat",
    "tanh_vhat",
    "k_expansion_at_zero",
    "k_family_value",
    "halfint_mq_log_gft",
    "halfint_mq_log_expansion",
    "HankelOracleSpec",
    "hankel_oracle",
    "radial_fourier_quad",
    "moment_taylor_expansion",
    "univariate_tanh_family",
    "KernelTransform",
    "kernel_transform",
    "tanh_alpha_remainder",
]

# the double series for 1 - tanh^alpha lives with the kernels; re-exported here
tanh_alpha_remainder = v_remainder_series


class ExpansionRangeError(ValueError):
    """An expansion was evaluated outside its radius of validity."""


class DeltaEvaluationError(ValueError):
    """Attempt to evaluate a delta-supported term pointwise."""


class ExcludedParameterError(ValueError):
    """Parameter lies in a case the requested closed form does not cover."""


@dataclass(frozen=True)
class ExpansionTerm:
    """``coeff * s**(-q) * (log s)**log_power``."""

    q: float
    log_power: int
    coeff: float

    @property
    def exponent(self):
        """Power of ``s`` (``-q``)."""
        return -self.q

    def __call__(self, s):
        out = self.coeff * np.power(s, -self.q)
        if self.log_power:
            out = out * np.log(s) ** self.log_power
        return out


@dataclass(frozen=True)
class DeltaTerm:
    """``coeff * (d_1^2 + ... + d_n^2)**laplacian_power delta``; symbolic only."""

    laplacian_power: int
    coeff: float


def _fmt_num(x):
    return format(float(x), ".15g")


def _fmt_exp(e):
    e = float(e)
    return str(int(e)) if e == int(e) else _fmt_num(e)


def _merge_terms(terms, rel_drop=1e-13):
    groups = {}
    scale = {}
    for t in terms:
        key = (float(t.q), int(t.log_power))
        groups[key] = groups.get(key, 0.0) + float(t.coeff)
        scale[key] = max(scale.get(key, 0.0), abs(float(t.coeff)))
    out = []
    for key, c in groups.items():
        if c == 0.0 or abs(c) <= rel_drop * scale[key]:
            continue
        out.append(ExpansionTerm(key[0], key[1], c))
    out.sort(key=lambda t: (-t.q, -t.log_power))
    return tuple(out)


def _merge_delta(deltas, rel_drop=1e-13):
    groups = {}
    scale = {}
    for d in deltas:
        k = int(d.laplacian_power)
        groups[k] = groups.get(k, 0.0) + float(d.coeff)
        scale[k] = max(scale.get(k, 0.0), abs(float(d.coeff)))
    return tuple(DeltaTerm(k, c) for k, c in sorted(groups.items())
                 if c != 0.0 and abs(c) > rel_drop * scale[k])


@dataclass(frozen=True)
class RadialExpansion:
    """Expansion of a radial generalised transform about ``s = 0``.

    Parameters
    ----------
    dim : int
        Space dimension ``n``.
    terms : tuple of ExpansionTerm
        Merged and sorted by descending ``q`` (most singular first).
    delta_terms : tuple of DeltaTerm
        Distributional part supported at the origin.  Never evaluated.
    valid_radius : float
        The expansion is only used for ``0 < s < valid_radius``.
    truncation_order : int
        Number of analytic terms kept (informational).
    """

    dim: int
    terms: tuple = ()
    delta_terms: tuple = ()
    valid_radius: float = math.inf
    truncation_order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "terms", _merge_terms(self.terms))
        object.__setattr__(self, "delta_terms", _merge_delta(self.delta_terms))

    # structure -----------------------------------------------------------

    @property
    def leading(self) -> Optional[ExpansionTerm]:
        return self.terms[0] if self.terms else None

    @property
    def singular_terms(self):
        """Terms that blow up at the origin (``q > 0``, or ``q = 0`` with a log)."""
        return tuple(t for t in self.terms if t.q > 0 or (t.q == 0 and t.log_power > 0))

    @property
    def analytic_terms(self):
        return tuple(t for t in self.terms if t not in self.singular_terms)

    def coeff(self, exponent, log_power=0):
        """Coefficient of ``s**exponent (log s)**log_power`` (0 if absent)."""
        for t in self.terms:
            if t.q == -exponent and t.log_power == log_power:
                return t.coeff
        return 0.0

    # algebra ---------------------------------------------------------------

    def scaled(self, factor):
        return replace(self,
                       terms=tuple(ExpansionTerm(t.q, t.log_power, factor * t.coeff) for t in self.terms),
                       delta_terms=tuple(DeltaTerm(d.laplacian_power, factor * d.coeff)
                                         for d in self.delta_terms))

    def __add__(self, other):
        if not isinstance(other, RadialExpansion):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("cannot add expansions of different dimension")
        return RadialExpansion(self.dim, self.terms + other.terms,
                               self.delta_terms + other.delta_terms,
                               min(self.valid_radius, other.valid_radius),
                               max(self.truncation_order, other.truncation_order))

    def __neg__(self):
        return self.scaled(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def without_delta(self):
        return replace(self, delta_terms=())

    # evaluation -------------------------------------------------------------

    def __call__(self, s, allow_delta=False):
        """Evaluate the numeric terms at ``s``.

        Raises :class:`ExpansionRangeError` for ``s >= valid_radius`` and
        :class:`DeltaEvaluationError` if delta terms are present, unless
        ``allow_delta`` is set (they vanish for ``s > 0`` anyway).
        """
        if self.delta_terms and not allow_delta:
            raise DeltaEvaluationError("expansion has delta-supported terms; they have no pointwise value")
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr <= 0):
            raise ExpansionRangeError("expansion evaluated at s <= 0")
        if np.any(s_arr >= self.valid_radius):
            raise ExpansionRangeError(
                f"expansion only valid for s < {self.valid_radius:g}; got s = {float(np.max(s_arr)):g}")
        out = np.zeros_like(s_arr)
        for t in self.terms:
            out = out + t(s_arr)
        return float(out) if out.ndim == 0 else out

    def format(self, max_terms=None):
        """Canonical text, e.g. ``12 * s^-4``."""
        parts = []
        terms = self.terms if max_terms is None else self.terms[:max_terms]
        for t in terms:
            piece = _fmt_num(t.coeff)
            if t.q != 0:
                piece += f" * s^{_fmt_exp(-t.q)}"
            if t.log_power == 1:
                piece += " * log s"
            elif t.log_power > 1:
                piece += f" * (log s)^{t.log_power}"
            parts.append(piece)
        for d in self.delta_terms:
            op = "delta" if d.laplacian_power == 0 else f"Laplacian^{d.laplacian_power} delta"
            parts.append(f"{_fmt_num(d.coeff)} * {op}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self):
        return self.format()

    def to_dict(self):
        return {
            "dim": self.dim,
            "terms": [[t.q, t.log_power, t.coeff] for t in self.terms],
            "delta_terms": [[d.laplacian_power, d.coeff] for d in self.delta_terms],
            "valid_radius": None if math.isinf(self.valid_radius) else self.valid_radius,
            "truncation_order": self.truncation_order,
        }


# --------------------------------------------------------------------------
# classical closed forms
# --------------------------------------------------------------------------

def _as_nonneg_int(x, name):
    if float(x) != math.floor(float(x)) or x < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {x}")
    return int(x)


def _excluded_k(beta, n):
    """Return ('even', k) if beta = 2k, ('neg', k) if beta = -n-2k, else None."""
    if beta >= 0 and beta % 2 == 0:
        return "even", int(beta) // 2
    t = -beta - n
    if t >= 0 and t % 2 == 0:
        return "neg", int(t) // 2
    return None


def _power_coeff(beta, n):
    return (specfun.gamma(0.5 * (beta + n)) * specfun.rgamma(-0.5 * beta)
            * 2.0 ** (beta + n) * math.pi ** (0.5 * n))


def _delta_bracket(k, n):
    return 0.5 * specfun.digamma(0.5 * n + k - 1.0) + 0.5 * specfun.digamma(k) + math.log(2.0)


def even_power_delta(k, n, coeff=1.0):
    """Transform of ``coeff * r**(2k)``: a pure delta term."""
    return RadialExpansion(n, (), (DeltaTerm(k, coeff * (2.0 * math.pi) ** n * (-1.0) ** k),))


def classical_gft(family, param, n, correction=0.0):
    """Generalised transform of a classical radial power.

    Parameters
    ----------
    family : {'power', 'power_log', 'neg_power', 'neg_power_log'}
        ``r**beta``, ``r**beta log r``, ``r**(-n-2k)``, ``r**(-n-2k) log r``.
    param : float
        ``beta`` for the first two families, ``k`` for the negative ones.
    n : int
        Dimension.
    correction : float
        For ``power_log`` with ``beta = 2k``: coefficient ``a`` of an added
        ``a * r**(2k)``, whose transform only changes the delta term.

    Raises
    ------
    ExcludedParameterError
        ``power`` with ``beta = 2k`` (the transform is delta-supported, see
        :func:`even_power_delta`), or an argument hitting a digamma pole.
    """
    n = int(n)
    if n < 1:
        raise ValueError("dimension must be >= 1")
    fam = str(family).lower()
    if fam == "power":
        beta = float(param)
        ex = _excluded_k(beta, n)
        if ex and ex[0] == "even":
            raise ExcludedParameterError(
                f"excluded case beta = 2k (beta={beta:g}): the transform of r^{beta:g} is "
                "supported at the origin only")
        if ex:
            raise ExcludedParameterError(
                f"excluded case beta = -n-2k (beta={beta:g}); use family 'neg_power' with k={ex[1]}")
        q = beta + n
        return RadialExpansion(n, (ExpansionTerm(q, 0, _power_coeff(beta, n)),))
    if fam == "power_log":
        beta = float(param)
        ex = _excluded_k(beta, n)
        if ex and ex[0] == "even":
            k = ex[1]
            if k < 1:
                raise ExcludedParameterError("log r (k = 0) is not supported")
            coeff = (specfun.gamma(0.5 * n + k) * math.factorial(k) * 2.0 ** (n + 2 * k - 1)
                     * math.pi ** (0.5 * n) * (-1.0) ** (k + 1))
            bracket = _delta_bracket(k, n)
            total = bracket + correction
            # a correction equal to the cancellation constant removes the delta part
            if abs(total) <= 1e-12 * max(1.0, abs(bracket)):
                return RadialExpansion(n, (ExpansionTerm(n + 2 * k, 0, coeff),))
            delta = (-1.0) ** k * (2.0 * math.pi) ** n * total
            return RadialExpansion(n, (ExpansionTerm(n + 2 * k, 0, coeff),), (DeltaTerm(k, delta),))
        if ex:
            raise ExcludedParameterError(
                f"excluded case beta = -n-2k (beta={beta:g}); use family 'neg_power_log' with k={ex[1]}")
        # d/dbeta of the r^beta transform
        c = _power_coeff(beta, n)
        a1 = 0.5 * (beta + n)
        a2 = -0.5 * beta
        for a in (a1, a2):
            if a <= 0 and a == math.floor(a):
                raise ExcludedParameterError(f"digamma pole at argument {a:g}")
        bracket = 0.5 * specfun.digamma(a1) + 0.5 * specfun.digamma(a2) + math.log(2.0)
        q = beta + n
        terms = (ExpansionTerm(q, 0, c * bracket), ExpansionTerm(q, 1, -c))
        if correction:
            terms += classical_gft("power", beta, n).scaled(correction).terms
        return RadialExpansion(n, terms)
    if fam in ("neg_power", "neg_power_log"):
        k = _as_nonneg_int(param, "k")
        if k < 1:
            raise ExcludedParameterError("k = 0 puts Psi(0) in the bracket; k >= 1 required")
        base = (-1.0) ** k * math.pi ** (0.5 * n) / (specfun.gamma(0.5 * n + k) * math.factorial(k))
        if fam == "neg_power":
            c = base / 2.0 ** (2 * k - 1)
            br = _delta_bracket(k, n)
            return RadialExpansion(n, (ExpansionTerm(-2 * k, 0, c * br), ExpansionTerm(-2 * k, 1, -c)))
        c = base / 2.0 ** (2 * k)
        # {B - log s}^2 - T + pi^2/12 with B = bracket (log 2 absorbs -log(1/2))
        br = _delta_bracket(k, n)
        tri = 0.25 * (specfun.trigamma(0.5 * n + k - 1.0) + specfun.trigamma(k))
        return RadialExpansion(n, (
            ExpansionTerm(-2 * k, 0, c * (br * br - tri + math.pi ** 2 / 12.0)),
            ExpansionTerm(-2 * k, 1, -2.0 * c * br),
            ExpansionTerm(-2 * k, 2, c),
        ))
    raise ValueError(f"unknown classical family {family!r}")


def delta_cancellation_constant(k, n):
    """``a`` such that ``r**(2k) log r + a r**(2k)`` has no delta part in its transform."""
    k = _as_nonneg_int(k, "k")
    if k < 1:
        raise ValueError("k must be >= 1")
    return -_delta_bracket(k, int(n))


# --------------------------------------------------------------------------
# r^m tanh r
# --------------------------------------------------------------------------

def tanh_power_analytic_coeffs(m, n, j_max=None, tol=1e-16, cap=60):
    """Coefficients ``2**(1-m) pi**((n-1)/2) p_j`` of ``s**(2j)`` in the transform of ``r**m tanh r``.

    With ``j_max=None`` terms are added until the next coefficient is below
    ``tol`` times the running sum of magnitudes (at ``s = 1``) or ``cap`` is
    reached.
    """
    m = float(m)
    n = int(n)
    pref = 2.0 ** (1.0 - m) * math.pi ** (0.5 * (n - 1))
    out = []
    total = 0.0
    last = cap if j_max is None else int(j_max)
    for j in range(0, last + 1):
        sigma = m + 2 * j + n
        # prod_{i<m}(n+2j+i) written as a Gamma ratio so real m also works
        prod = math.exp(specfun.lgamma(n + 2 * j + m) - specfun.lgamma(n + 2 * j))
        pj = ((-1.0) ** j * math.exp(specfun.lgamma(j + 0.5 * (n + 1)) - 2 * j * math.log(2.0)
                                     - specfun.lgamma(j + 1.0))
              * specfun.alt_zeta_sum(sigma) * prod)
        c = pref * pj
        out.append(c)
        total += abs(c)
        if j_max is None and j > 0 and abs(c) < tol * total:
            break
    return out


def tanh_power_expansion(m, n, j_max=None):
    """Expansion at zero of the transform of ``r**m tanh r`` in dimension ``n``.

    The singular part is that of ``r**m`` (a delta term when ``m`` is even);
    the analytic part is the power series of ``-v^`` with
    ``v = r**m (1 - tanh r)``.  Valid for ``s < 1``.
    """
    if not m >= 1:
        raise ValueError("m must be >= 1")
    if j_max is not None and j_max < 1:
        raise ValueError("j_max must be >= 1")
    n = int(n)
    if float(m) % 2 == 0:
        u = even_power_delta(int(m) // 2, n)
    else:
        u = classical_gft("power", m, n)
    coeffs = tanh_power_analytic_coeffs(m, n, j_max)
    terms = tuple(ExpansionTerm(-2.0 * j, 0, c) for j, c in enumerate(coeffs))
    return RadialExpansion(n, u.terms + terms, u.delta_terms, valid_radius=1.0,
                           truncation_order=len(coeffs))


def _halfint_j_parts(n):
    """(p, sin_coeffs, cos_coeffs) of J_{n/2-1}(z) sqrt(pi z/2) for odd n.

    ``J = sqrt(2/(pi z)) [sin(z - p pi/2) sum_l a_l z^(-2l)
    + cos(z - p pi/2) sum_l b_l z^(-2l-1)]`` with ``p = (n-3)/2``.
    """
    if n == 1:
        return -1, [1.0], []
    p = (n - 3) // 2
    a = [(-1.0) ** l * math.factorial(p + 2 * l) / (math.factorial(2 * l) * math.factorial(p - 2 * l))
         / 2.0 ** (2 * l) for l in range(p // 2 + 1)]
    b = [(-1.0) ** l * math.factorial(p + 2 * l + 1)
         / (math.factorial(2 * l + 1) * math.factorial(p - 2 * l - 1)) / 2.0 ** (2 * l + 1)
         for l in range((p - 1) // 2 + 1)] if p >= 1 else []
    return p, a, b


def _odd_dim_term(m, n, s, parts, k):
    # int_0^inf r^(m+n/2) e^{-2(k+1) r} J_{n/2-1}(s r) dr for one k
    p, a, b = parts
    rate = 2.0 * (k + 1)
    theta = math.atan2(s, rate)
    log_rho = 0.5 * math.log(rate * rate + s * s)
    shift = p * math.pi / 2.0
    acc = 0.0
    for l, al in enumerate(a):
        mu = m + 0.5 * n + 0.5 - 2 * l
        acc += al * s ** (-2 * l) * math.exp(specfun.lgamma(mu) - mu * log_rho) * math.sin(mu * theta - shift)
    for l, bl in enumerate(b):
        mu = m + 0.5 * n - 0.5 - 2 * l
        acc += bl * s ** (-2 * l - 1) * math.exp(specfun.lgamma(mu) - mu * log_rho) * math.cos(mu * theta - shift)
    return math.sqrt(2.0 / (math.pi * s)) * acc


def odd_dim_integral(m, n, s, k_max=40, method="cvz"):
    """``int_0^inf r**(m+n/2) e^{-2r}/(1+e^{-2r}) J_{n/2-1}(s r) dr`` for odd ``n``.

    Expands ``1/(1+e^{-2r})`` geometrically and integrates each term with the
    finite sine/cosine form of the half-integer Bessel function, giving an
    alternating series in ``k`` that converges for every ``s > 0``.

    Parameters
    ----------
    method : {'cvz', 'raw'}
        ``'cvz'`` accelerates the alternating series; ``'raw'`` returns the
        plain partial sum of ``k_max`` terms.

    Returns
    -------
    value, error_bound : float
        ``error_bound`` is ``|value(k_max) - value(k_max + 1)|``.
    """
    n = int(n)
    if n < 1 or n % 2 != 1:
        raise ValueError("odd_dim_integral needs odd n")
    s = float(s)
    if not s > 0:
        raise ValueError("odd_dim_integral needs s > 0")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    parts = _halfint_j_parts(n)

    def term(k):
        return _odd_dim_term(m, n, s, parts, k)

    if method == "cvz":
        v1 = specfun.alternating_sum(term, k_max)
        v2 = specfun.alternating_sum(term, k_max + 1)
    elif method == "raw":
        v1 = math.fsum((-1.0) ** k * term(k) for k in range(k_max))
        v2 = v1 + (-1.0) ** k_max * term(k_max)
    else:
        raise ValueError(f"unknown method {method!r}")
    return v1, abs(v2 - v1)


def odd_dim_vhat(m, n, s, k_max=40, method="cvz"):
    """Transform of ``v(r) = r**m (1 - tanh r)`` for odd ``n`` at any ``s > 0``.

    Returns ``(value, error_bound)``; the value is the integral of
    :func:`odd_dim_integral` times ``2**(1+n/2) pi**(n/2) s**(1-n/2)``.
    """
    val, err = odd_dim_integral(m, n, s, k_max, method)
    pref = 2.0 ** (1.0 + 0.5 * n) * math.pi ** (0.5 * n) * s ** (1.0 - 0.5 * n)
    return pref * val, pref * err


def tanh_vhat(m, n, s):
    """Transform of ``r**m (1 - tanh r)`` at ``s > 0`` by the best available route."""
    s = float(s)
    if s < 0.5:
        coeffs = tanh_power_analytic_coeffs(m, n)
        return -sum(c * s ** (2 * j) for j, c in enumerate(coeffs))
    if int(n) % 2 == 1:
        return odd_dim_vhat(m, n, s)[0]
    v = lambda r: np.power(r, m) * one_minus_tanh_power(r, 1.0)
    return radial_fourier_quad(v, n, s, _decay_radius(m + n))[0]


# --------------------------------------------------------------------------
# modified Bessel K families
# --------------------------------------------------------------------------

def k_expansion_at_zero(nu, c, order=4, prefactor=1.0):
    """Expansion of ``prefactor * (c/s)**nu K_nu(c s)`` about ``s = 0``.

    Integer ``nu >= 1`` uses the series with ``log s``; half-integer ``nu``
    expands the finite closed form against the Taylor series of ``exp(-c s)``
    (odd powers of ``s`` then appear).  Terms up to ``s**(2*order)`` are kept.
    """
    c = float(c)
    if not c > 0:
        raise ValueError("c must be > 0")
    nu = float(nu)
    terms = []
    top = 2 * int(order)
    if nu == math.floor(nu):
        v = int(nu)
        if v < 1:
            raise ValueError("integer nu must be >= 1")
        for k in range(v):
            coeff = 2.0 ** (v - 1) * math.factorial(v - k - 1) / (math.factorial(k) * (-4.0) ** k) * c ** (2 * k)
            terms.append(ExpansionTerm(2 * v - 2 * k, 0, coeff))
        lead = (-c * c / 2.0) ** v
        logc = math.log(c)
        for k in range(int(order) + 1):
            base = c ** (2 * k) / (4.0 ** k * math.factorial(k) * math.factorial(v + k))
            terms.append(ExpansionTerm(-2 * k, 1, -lead * base))
            const = base * (math.log(2.0) - logc + 0.5 * (specfun.digamma(k + 1.0) + specfun.digamma(v + k + 1.0)))
            terms.append(ExpansionTerm(-2 * k, 0, lead * const))
    elif 2 * nu == math.floor(2 * nu) and nu > 0:
        p = int(nu - 0.5)
        # (c/s)^nu K_nu(cs) = sqrt(pi/2) c^p sum_j w_j s^(-p-1-j) e^{-cs}
        w = [math.factorial(p + j) / (math.factorial(j) * math.factorial(p - j) * (2.0 * c) ** j)
             for j in range(p + 1)]
        base = math.sqrt(math.pi / 2.0) * c ** p
        for j, wj in enumerate(w):
            e0 = -p - 1 - j
            for i in range(0, top - e0 + 1):
                terms.append(ExpansionTerm(-(e0 + i), 0, base * wj * (-c) ** i / math.factorial(i)))
    else:
        raise ValueError("nu must be a positive integer or half-integer")
    exp = RadialExpansion(1, terms, truncation_order=int(order))
    return exp.scaled(prefactor) if prefactor != 1.0 else exp


def k_family_value(nu, c, s, prefactor=1.0):
    """``prefactor * (c/s)**nu K_nu(c s)`` for ``s > 0``."""
    s = float(s)
    if not s > 0:
        raise ValueError("s must be > 0")
    return prefactor * (c / s) ** nu * specfun.bessel_k(nu, c * s)


def halfint_mq_log_gft(c, s):
    """``2 pi e^{-c s} (s**-3 + c s**-2)``, the 1-D transform of the shifted thin-plate spline."""
    s = float(s)
    if not s > 0:
        raise ValueError("s must be > 0")
    return 2.0 * math.pi * math.exp(-c * s) * (s ** -3 + c * s ** -2)


def halfint_mq_log_expansion(c, order=3):
    """Expansion of :func:`halfint_mq_log_gft` about zero."""
    # 2 pi e^{-cs}(s^-3 + c s^-2) = 2^{3/2} sqrt(pi) (c/s)^{3/2} K_{3/2}(cs)
    return k_expansion_at_zero(1.5, c, order, prefactor=2.0 ** 1.5 * math.sqrt(math.pi))


def _with_dim(exp, n):
    return replace(exp, dim=int(n))


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HankelOracleSpec:
    """Radial integrand for :func:`hankel_oracle`.

    ``f`` must be absolutely integrable against ``r**(n/2) J_{n/2-1}`` and
    decay exponentially; it is integrated on ``[0, radius]``.
    """

    dim: int
    f: Callable
    radius: float = 40.0
    tol: float = 1e-13


def _decay_radius(power, rate=2.0):
    # smallest R (step 1) with e^{-rate R} R^power < 1e-18
    r = 5.0
    while -rate * r + power * math.log(r) > math.log(1e-18):
        r += 1.0
    return r


def radial_fourier_quad(f, n, s, radius, tol=1e-13):
    """Radial Fourier transform by adaptive quadrature (scipy).

    Returns ``(value, abs_error_estimate, converged)``.
    """
    import warnings

    from scipy import integrate, special

    n = int(n)
    s = float(s)
    if not s > 0:
        raise ValueError("s must be > 0")
    # panels of about one oscillation keep quad's error estimate honest
    n_panels = max(8, int(math.ceil(radius * s / math.pi)) + 1)
    edges = np.linspace(0.0, radius, n_panels + 1)
    total = 0.0
    err = 0.0
    converged = True
    if n == 1:
        integrand = lambda r: f(r) * math.cos(s * r)
        pref = 2.0
    else:
        order = 0.5 * n - 1.0
        integrand = lambda r: f(r) * r ** (0.5 * n) * special.jv(order, s * r)
        pref = (2.0 * math.pi) ** (0.5 * n) * s ** (1.0 - 0.5 * n)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            try:
                val, e = integrate.quad(lambda r: float(integrand(r)), a, b, epsabs=tol, epsrel=tol, limit=200)
            except integrate.IntegrationWarning:
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, e = integrate.quad(lambda r: float(integrand(r)), a, b, epsabs=tol, epsrel=tol, limit=200)
                warnings.simplefilter("error", integrate.IntegrationWarning)
                if e > 1e-9 * max(1.0, abs(val)):
                    converged = False
            total += val
            err += e
    return pref * total, pref * err, converged


def hankel_oracle(spec: HankelOracleSpec, s):
    """n-dimensional Fourier transform of the radial L1 function ``spec.f`` at ``s``.

    Independent of this package's special functions (uses scipy's ``jv`` and
    ``quad``).  Returns ``(value, error_estimate, converged)``.
    """
    return radial_fourier_quad(spec.f, spec.dim, s, spec.radius, spec.tol)


def moment_taylor_expansion(f, n, j_max=12, radius=40.0, sign=1.0):
    """Taylor expansion ``sum_j a_j s**(2j)`` of the transform of an L1 radial function.

    ``a_j = 2 pi**(n/2) (-1)**j M_j / (4**j j! Gamma(n/2 + j))`` with moments
    ``M_j = int_0^inf f(r) r**(n-1+2j) dr`` by quadrature.  ``sign`` scales
    every coefficient (use -1 for ``-f^``).
    """
    from scipy import integrate

    n = int(n)
    terms = []
    for j in range(j_max + 1):
        mom, _ = integrate.quad(lambda r: float(f(r)) * r ** (n - 1 + 2 * j), 0.0, radius,
                                epsabs=0.0, epsrel=1e-13, limit=400)
        a = (2.0 * math.pi ** (0.5 * n) * (-1.0) ** j * mom
             / (4.0 ** j * math.factorial(j) * specfun.gamma(0.5 * n + j)))
        terms.append(ExpansionTerm(-2.0 * j, 0, sign * a))
    return RadialExpansion(n, terms, valid_radius=1.0, truncation_order=j_max + 1)


# --------------------------------------------------------------------------
# univariate sech / sech^2 / tanh
# --------------------------------------------------------------------------

def univariate_tanh_family(which, omega):
    """Closed-form 1-D transforms of ``sech``, ``sech**2`` and ``tanh``.

    ``tanh`` returns the magnitude ``pi csch(pi omega / 2)`` of the purely
    imaginary transform ``-i pi csch(pi omega / 2)``.
    """
    w = float(omega)
    h = 0.5 * math.pi * w
    if which == "sech":
        return math.pi / math.cosh(h)
    if which == "sech2":
        if w == 0.0:
            return 2.0
        return math.pi * w / math.sinh(h)
    if which == "tanh":
        if w == 0.0:
            raise ValueError("tanh transform has a pole at omega = 0")
        return math.pi / math.sinh(h)
    raise ValueError(f"unknown function {which!r}")


# --------------------------------------------------------------------------
# per-kernel dispatch
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelTransform:
    """Transform information for one kernel in one dimension.

    Attributes
    ----------
    expansion : RadialExpansion
        Expansion of the full transform about zero (delta terms included).
    singular_expansion : RadialExpansion
        Expansion used to build moment conditions: for the tanh families the
        transform of the homogeneous part ``u`` alone, otherwise the full
        expansion.
    evaluator : callable
        ``s -> g^(s)`` for ``s > 0`` (delta terms dropped).
    """

    kernel: RadialKernel
    dim: int
    expansion: RadialExpansion
    singular_expansion: RadialExpansion
    evaluator: Callable = field(repr=False)

    def __call__(self, s):
        return self.evaluator(s)


def _gen_mq_prefactor(p, n):
    return (2.0 * math.pi) ** (0.5 * n) * 2.0 ** (p + 1.0) * specfun.rgamma(-p)


def kernel_transform(kernel: RadialKernel, n, order=4) -> KernelTransform:
    """Build the :class:`KernelTransform` of ``kernel`` in dimension ``n``."""
    n = int(n)
    fam = kernel.family
    if fam is Family.POWER:
        exp = classical_gft("power", kernel.beta, n)
        c0 = exp.terms[0]
        return KernelTransform(kernel, n, exp, exp, lambda s: c0(float(s)))
    if fam is Family.POWER_LOG:
        exp = classical_gft("power_log", kernel.beta, n, kernel.correction)
        num = exp.without_delta()
        return KernelTransform(kernel, n, exp, exp, lambda s: num(float(s)))
    if fam is Family.TANH_POWER:
        beta, alpha = kernel.beta, kernel.alpha
        if beta % 2 == 0:
            u = even_power_delta(int(beta) // 2, n)
        else:
            u = classical_gft("power", beta, n)
        if alpha == 1.0:
            exp = tanh_power_expansion(beta, n)
            analytic = exp.analytic_terms

            def evaluator(s, _u=u.without_delta(), _b=beta):
                s = float(s)
                return (_u(s) if _u.terms else 0.0) - tanh_vhat(_b, n, s)
        else:
            v = lambda r: np.power(r, beta) * one_minus_tanh_power(r, alpha)
            R = _decay_radius(beta + n, 2.0 * min(alpha, 1.0))
            tay = moment_taylor_expansion(v, n, j_max=2 * order + 4, radius=R, sign=-1.0)
            exp = u + tay
            analytic = tay.terms

            def evaluator(s, _u=u.without_delta(), _v=v, _R=R):
                s = float(s)
                return (_u(s) if _u.terms else 0.0) - radial_fourier_quad(_v, n, s, _R)[0]
        del analytic
        return KernelTransform(kernel, n, exp, u, evaluator)
    if fam is Family.TANH_POWER_LOG:
        beta, alpha, a = kernel.beta, kernel.alpha, kernel.correction
        u = classical_gft("power_log", beta, n, a)
        v = lambda r: np.where(r > 0, np.power(r, beta) * (np.log(np.where(r > 0, r, 1.0)) + a), 0.0) \
            * one_minus_tanh_power(r, alpha)
        R = _decay_radius(beta + n + 1, 2.0 * min(alpha, 1.0))
        tay = moment_taylor_expansion(v, n, j_max=2 * order + 4, radius=R, sign=-1.0)
        exp = u + tay
        u_num = u.without_delta()

        def evaluator(s, _v=v, _R=R):
            s = float(s)
            return u_num(s) - radial_fourier_quad(_v, n, s, _R)[0]

        return KernelTransform(kernel, n, exp, u, evaluator)
    if fam is Family.GEN_MULTIQUADRIC:
        if kernel.mq_beta != 1.0:
            raise NotImplementedError("transform known only for mq_beta = 1")
        p = kernel.mq_gamma
        nu = 0.5 * n + p
        pref = _gen_mq_prefactor(p, n)
        exp = _with_dim(k_expansion_at_zero(nu, kernel.c, order, pref), n)
        c = kernel.c
        return KernelTransform(kernel, n, exp, exp, lambda s: k_family_value(nu, c, s, pref))
    if fam is Family.SHIFTED_TPS or (fam is Family.GEN_TPS_LOG and kernel.mq_beta == 1.0
                                     and kernel.mq_gamma == 1.0):
        nu = 0.5 * n + 1.0
        pref = 2.0 ** (0.5 * n + 1.0) * math.pi ** (0.5 * n)
        c = kernel.c
        if fam is Family.GEN_TPS_LOG:
            # (c^2+r^2) log(c^2+r^2) = 2 * shifted TPS + polynomial of degree 2
            pref *= 2.0
        exp = _with_dim(k_expansion_at_zero(nu, c, order, pref), n)
        return KernelTransform(kernel, n, exp, exp, lambda s: k_family_value(nu, c, s, pref))
    raise NotImplementedError(f"no transform available for {kernel}")
