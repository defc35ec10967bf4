"""Radial kernel families and their evaluation.

A :class:`RadialKernel` is an immutable descriptor ``(family, parameters)``;
``kernel(r)`` evaluates it on distances.  The hyperbolic-tangent families
``r**beta * tanh(r)**alpha`` (optionally with ``log r``) are split into a
homogeneous part and an exponentially decaying remainder by :func:`split`.
"""
import enum
import math
from dataclasses import dataclass, asdict

import numpy as np

__all__ = [
    "Family",
    "RadialKernel",
    "KernelSplit",
    "eval_kernel",
    "split",
    "one_minus_tanh_power",
    "v_remainder_series",
]


class Family(str, enum.Enum):
    POWER = "power"
    POWER_LOG = "power_log"
    TANH_POWER = "tanh_power"
    TANH_POWER_LOG = "tanh_power_log"
    GEN_MULTIQUADRIC = "gen_multiquadric"
    GEN_TPS_LOG = "gen_tps_log"
    SHIFTED_TPS = "shifted_tps"
    # the shifted thin-plate spline with its r^2 log c correction; same kernel
    POLYHARMONIC_SHIFT = "shifted_tps"


_LOG_FAMILIES = {Family.POWER_LOG, Family.TANH_POWER_LOG}
_TANH_FAMILIES = {Family.TANH_POWER, Family.TANH_POWER_LOG}

# names accepted on the command line and in config files
FAMILY_ALIASES = {
    "power": Family.POWER,
    "powerlog": Family.POWER_LOG,
    "power_log": Family.POWER_LOG,
    "tanhpow": Family.TANH_POWER,
    "tanh_power": Family.TANH_POWER,
    "tanhpowlog": Family.TANH_POWER_LOG,
    "tanh_power_log": Family.TANH_POWER_LOG,
    "genmq": Family.GEN_MULTIQUADRIC,
    "gen_multiquadric": Family.GEN_MULTIQUADRIC,
    "gentpslog": Family.GEN_TPS_LOG,
    "gen_tps_log": Family.GEN_TPS_LOG,
    "shifted_tps": Family.SHIFTED_TPS,
    "shiftedtps": Family.SHIFTED_TPS,
    "polyharmonic_shift": Family.SHIFTED_TPS,
}


@dataclass(frozen=True)
class RadialKernel:
    """Immutable radial kernel descriptor.

    Parameters
    ----------
    family : Family
    beta : float
        Power of ``r`` (tanh and power families).
    alpha : float
        Power of ``tanh r``.  Ignored by non-tanh families.
    c : float
        Shift parameter of the multiquadric / thin-plate families.
    mq_beta, mq_gamma : float
        Exponents of ``(r**(2 mq_beta) + c**(2 mq_beta))**mq_gamma``.
    correction : float
        Coefficient ``a`` of an added ``a * r**beta`` term in the log families,
        used to cancel delta terms of the generalised Fourier transform.
    """

    family: Family
    beta: float = 0.0
    alpha: float = 1.0
    c: float = 1.0
    mq_beta: float = 1.0
    mq_gamma: float = 0.5
    correction: float = 0.0

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        for name in ("beta", "alpha", "c", "mq_beta", "mq_gamma", "correction"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if fam in _TANH_FAMILIES:
            if self.alpha < 0:
                raise ValueError("alpha must be >= 0")
            if not self.alpha + self.beta > 0:
                raise ValueError("tanh families need alpha + beta > 0")
        if fam is Family.TANH_POWER_LOG:
            if not (self.beta > 0 and self.beta % 2 == 0):
                raise ValueError("tanh_power_log needs beta an even positive integer")
        if fam in (Family.GEN_MULTIQUADRIC, Family.GEN_TPS_LOG, Family.SHIFTED_TPS):
            if not self.c > 0:
                raise ValueError("shifted families need c > 0")
        if fam in (Family.GEN_MULTIQUADRIC, Family.GEN_TPS_LOG):
            # documented admissibility gate; the admissible set is not known in closed form
            if not self.mq_beta > 0:
                raise ValueError("mq_beta must be > 0")
        if fam is Family.GEN_MULTIQUADRIC:
            if self.mq_gamma >= 0 and self.mq_gamma == math.floor(self.mq_gamma):
                raise ValueError("mq_gamma must not be a non-negative integer")
        if fam is Family.GEN_TPS_LOG and not self.mq_gamma > 0:
            raise ValueError("mq_gamma must be > 0 for the log family")

    # shorthand constructors -------------------------------------------------

    @classmethod
    def power(cls, beta):
        return cls(Family.POWER, beta=beta)

    @classmethod
    def power_log(cls, beta, correction=0.0):
        return cls(Family.POWER_LOG, beta=beta, correction=correction)

    @classmethod
    def tanh_power(cls, beta, alpha=1.0):
        return cls(Family.TANH_POWER, beta=beta, alpha=alpha)

    @classmethod
    def tanh_power_log(cls, beta, alpha=1.0, correction=0.0):
        return cls(Family.TANH_POWER_LOG, beta=beta, alpha=alpha, correction=correction)

    @classmethod
    def multiquadric(cls, c, gamma, beta=1.0):
        return cls(Family.GEN_MULTIQUADRIC, c=c, mq_beta=beta, mq_gamma=gamma)

    @classmethod
    def shifted_tps(cls, c):
        return cls(Family.SHIFTED_TPS, c=c)

    @property
    def growth_exponent(self):
        """Power of r the kernel grows like at infinity (log factors ignored)."""
        fam = self.family
        if fam in (Family.POWER, Family.POWER_LOG, Family.TANH_POWER, Family.TANH_POWER_LOG):
            return self.beta
        if fam in (Family.GEN_MULTIQUADRIC, Family.GEN_TPS_LOG):
            return 2.0 * self.mq_beta * self.mq_gamma
        return 2.0

    @property
    def smoothness_exponent(self):
        """Power of r the kernel behaves like near the origin, where meaningful."""
        if self.family in _TANH_FAMILIES:
            return self.alpha + self.beta
        return self.beta

    def to_dict(self):
        d = asdict(self)
        d["family"] = self.family.value
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        fam = d.pop("family", d.pop("kernel", None))
        if fam is None:
            raise ValueError("kernel spec needs a 'family'")
        fam = FAMILY_ALIASES.get(str(fam).lower(), None) or Family(fam)
        return cls(fam, **{k: float(v) for k, v in d.items()})

    def __call__(self, r):
        return eval_kernel(self, r)


@dataclass(frozen=True)
class KernelSplit:
    """``g = u - v`` with ``u`` homogeneous and ``v`` integrable."""

    singular_part: RadialKernel
    l1_remainder: object
    decay: str = "exponential"

    def __call__(self, r):
        return self.singular_part(r) - self.l1_remainder(r)


def _as_array(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radial distances must be >= 0")
    return r


def _power(r, beta):
    if beta > 0:
        return np.power(r, beta)
    if beta == 0:
        return np.ones_like(r)
    if np.any(r == 0):
        raise ValueError("negative power is singular at r = 0")
    return np.power(r, beta)


def _power_log(r, beta, correction):
    # r^beta (log r + correction), continuous limit 0 at r = 0 for beta > 0
    if beta <= 0 and np.any(r == 0):
        raise ValueError("log kernel undefined at r = 0 for beta <= 0")
    out = np.zeros_like(r)
    pos = r > 0
    rp = r[pos]
    out[pos] = np.power(rp, beta) * (np.log(rp) + correction)
    return out


def one_minus_tanh_power(r, alpha):
    """``1 - tanh(r)**alpha`` without cancellation for large r."""
    r = np.asarray(r, dtype=float)
    x = np.exp(-2.0 * r)
    # 1 - tanh r = 2 e^{-2r} / (1 + e^{-2r})
    one_minus = 2.0 * x / (1.0 + x)
    if alpha == 1.0:
        return one_minus
    with np.errstate(divide="ignore"):
        return -np.expm1(alpha * np.log1p(-one_minus))


def eval_kernel(kernel, r):
    """Evaluate ``kernel`` at distances ``r`` (scalar or array)."""
    scalar = np.ndim(r) == 0
    r = _as_array(r)
    fam = kernel.family
    if fam is Family.POWER:
        out = _power(r, kernel.beta)
    elif fam is Family.POWER_LOG:
        out = _power_log(r, kernel.beta, kernel.correction)
    elif fam is Family.TANH_POWER:
        t = np.tanh(r)
        out = np.zeros_like(r)
        pos = r > 0
        out[pos] = np.power(r[pos], kernel.beta) * np.power(t[pos], kernel.alpha)
    elif fam is Family.TANH_POWER_LOG:
        out = _power_log(r, kernel.beta, kernel.correction) * np.power(np.tanh(r), kernel.alpha)
    elif fam is Family.GEN_MULTIQUADRIC:
        b2 = 2.0 * kernel.mq_beta
        out = np.power(np.power(r, b2) + kernel.c ** b2, kernel.mq_gamma)
    elif fam is Family.GEN_TPS_LOG:
        b2 = 2.0 * kernel.mq_beta
        base = np.power(r, b2) + kernel.c ** b2
        out = np.power(base, kernel.mq_gamma) * np.log(base)
    elif fam is Family.SHIFTED_TPS:
        c2 = kernel.c * kernel.c
        q = c2 + r * r
        # (c^2 + r^2) log sqrt(c^2 + r^2) - c^2 log c - r^2 log c
        out = 0.5 * q * np.log1p(r * r / c2)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown family {fam}")
    return float(out) if scalar else out


def split(kernel):
    """Split a tanh-family kernel into ``u - v``.

    ``u`` is ``r**beta`` (or ``r**beta (log r + correction)``) and
    ``v(r) = u(r) (1 - tanh(r)**alpha)`` decays like ``exp(-2r)``.
    """
    fam = kernel.family
    if fam is Family.TANH_POWER:
        u = RadialKernel.power(kernel.beta)
    elif fam is Family.TANH_POWER_LOG:
        u = RadialKernel.power_log(kernel.beta, kernel.correction)
    else:
        raise ValueError(f"split is defined for the tanh families only, not {fam.value}")
    alpha = kernel.alpha

    def remainder(r):
        r = _as_array(r)
        return eval_kernel(u, r) * one_minus_tanh_power(r, alpha)

    return KernelSplit(u, remainder)


def v_remainder_series(beta, alpha, r, terms=200):
    """``r**beta (1 - tanh(r)**alpha)`` from the double series in ``exp(-2r)``.

    Uses ``1 - tanh^a r = 2 (sum_j (-1)^j x^j)^a sum_{k odd} C(a, k) x^k`` with
    ``x = exp(-2r)`` and generalised binomial coefficients.  Both series are
    cut after ``terms`` terms.

    Returns
    -------
    value, error_estimate : float
        The truncated series and a bound-style estimate of the truncation
        error (the size of the first omitted terms).
    """
    r = float(r)
    if not r > 0:
        raise ValueError("v_remainder_series needs r > 0")
    alpha = float(alpha)
    x = math.exp(-2.0 * r)
    geometric = 0.0
    xp = 1.0
    for j in range(terms):
        geometric += xp if j % 2 == 0 else -xp
        xp *= x
    geometric_tail = xp
    # generalised binomial C(alpha, k) = Gamma(a+1)/(Gamma(k+1) Gamma(a-k+1))
    odd_sum = 0.0
    binom = 1.0
    xk = 1.0
    last = 0.0
    terminated = False
    for k in range(1, 2 * terms):
        binom *= (alpha - k + 1.0) / k
        xk *= x
        if binom == 0.0:
            # integer alpha: the binomial series is a polynomial
            terminated = True
            break
        if k % 2 == 1:
            last = binom * xk
            odd_sum += last
    rb = r ** beta
    value = 2.0 * rb * geometric ** alpha * odd_sum
    odd_tail = 0.0 if terminated else abs(last) * x * x / (1.0 - x * x)
    geo_tail = abs(alpha) * geometric ** (alpha - 1.0) * geometric_tail * abs(odd_sum)
    err = 2.0 * rb * (geo_tail + geometric ** alpha * odd_tail)
    return value, err


def admissible_note(kernel):
    """Short text describing the parameter gate applied to ``kernel``."""
    if kernel.family is Family.GEN_MULTIQUADRIC:
        return "mq_beta > 0 and mq_gamma not a non-negative integer (heuristic gate)"
    if kernel.family is Family.GEN_TPS_LOG:
        return "mq_beta > 0 and mq_gamma > 0; transform available for mq_beta = mq_gamma = 1"
    return ""
