"""Coefficient sequences of quasi-Lagrange functions.

A quasi-Lagrange function ``psi = sum_k mu_k g(. - k)`` has transform
``psi^(y) = T(y) g^(|y|)`` with the periodic symbol
``T(y) = sum_k mu_k exp(-i k.y)``.  ``T`` must cancel the singularity of
``g^`` at the origin so that ``psi^(0) = 1`` and ``psi^`` and its low
derivatives vanish at the nonzero points of ``2 pi Z^n``.

Three constructions are provided, selected by :func:`classify`:

* even-order singularity: a trigonometric polynomial from a moment system;
* non-even order: a fractional power of ``2 - 2 cos`` (a series) times,
  in several dimensions, a power of the discrete Laplacian symbol;
* leading logarithm (1-D): the reciprocal-log series ``H``.
"""
import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import gft, specfun

__all__ = [
    "SingularCase",
    "SingularityClass",
    "classify",
    "CoeffSeq",
    "MomentSystem",
    "InconsistentSystemError",
    "monomial_exponents",
    "default_target_order",
    "taylor_symbol_coeffs",
    "build_rhs",
    "solve_coeffs",
    "g_symbol",
    "g_series_coeffs",
    "h_symbol",
    "h_series_coeffs",
    "laplacian_power_coeffs",
    "convolve",
    "symbol_value",
    "psi_hat",
    "StrangFixReport",
    "strang_fix_verify",
    "quasi_lagrange_coeffs",
    "symmetric_box",
]


class SingularCase(str, enum.Enum):
    EVEN_INTEGER = "EvenInteger"
    NON_EVEN = "NonEven"
    LOG_LEADING = "LogLeading"


@dataclass(frozen=True)
class SingularityClass:
    """Order and type of the singularity of a transform at the origin.

    ``order`` is the leading power ``sigma`` (``g^ ~ c0 s**-sigma``),
    ``gamma_frac = sigma - 2 floor(sigma / 2)``, and ``d0`` is the
    coefficient of the most singular log term ``s**(-sigma + eta) log s``.
    """

    order: float
    case: SingularCase
    gamma_frac: float
    c0: float
    d0: float = 0.0
    eta: float = math.inf

    @property
    def max_degree(self):
        """Highest polynomial degree the quasi-interpolant can reproduce (``sigma - 1``)."""
        return max(int(math.ceil(self.order)) - 1, 0)


def classify(expansion: "gft.RadialExpansion") -> SingularityClass:
    """Classify the leading singularity of ``expansion``."""
    sing = expansion.singular_terms
    if not sing:
        raise ValueError("expansion has no singular term; there is nothing to cancel")
    sigma = max(t.q for t in sing)
    plain = [t for t in sing if t.log_power == 0 and t.q == sigma]
    logs = [t for t in sing if t.log_power > 0]
    c0 = plain[0].coeff if plain else 0.0
    d0, eta = 0.0, math.inf
    if logs:
        top = max(logs, key=lambda t: (t.q, t.log_power))
        d0, eta = top.coeff, sigma - top.q
    gamma_frac = sigma - 2.0 * math.floor(sigma / 2.0)
    if eta == 0.0 and d0 != 0.0:
        case = SingularCase.LOG_LEADING
    elif sigma > 0 and gamma_frac == 0.0:
        case = SingularCase.EVEN_INTEGER
    else:
        case = SingularCase.NON_EVEN
    return SingularityClass(float(sigma), case, float(gamma_frac), float(c0), float(d0), float(eta))


# --------------------------------------------------------------------------
# coefficient sequences
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoeffSeq:
    """Finite map from lattice points to real coefficients.

    Attributes
    ----------
    dim : int
    support : dict
        ``{tuple_of_ints: float}``.
    decay_exponent : float or None
        Documented decay ``|c_j| = O(|j|**-decay_exponent)`` of the infinite
        sequence this one truncates (None for finite sequences).
    leading_factor, order : float or None
        The symbol behaves like ``leading_factor * |y|**order`` at the origin;
        used to evaluate ``psi^(0)`` as a limit.
    symbol : dict or None
        Parameters of an exact closed-form symbol (series constructions), so
        the transform can be evaluated without truncation error.
    """

    dim: int
    support: dict
    decay_exponent: Optional[float] = None
    leading_factor: Optional[float] = None
    order: Optional[float] = None
    symbol: Optional[dict] = None
    flags: tuple = ()

    def __post_init__(self):
        sup = {}
        for k, v in dict(self.support).items():
            key = (int(k),) if np.ndim(k) == 0 else tuple(int(x) for x in k)
            if len(key) != self.dim:
                raise ValueError(f"lattice point {key} does not have dimension {self.dim}")
            sup[key] = float(v)
        object.__setattr__(self, "support", dict(sorted(sup.items())))

    def __len__(self):
        return len(self.support)

    @property
    def points(self):
        return np.array(list(self.support.keys()), dtype=int).reshape(-1, self.dim)

    @property
    def values(self):
        return np.array(list(self.support.values()), dtype=float)

    def __getitem__(self, k):
        key = (int(k),) if np.ndim(k) == 0 else tuple(int(x) for x in k)
        return self.support.get(key, 0.0)

    def total(self):
        return math.fsum(self.support.values())

    def abs_sum(self):
        return math.fsum(abs(v) for v in self.support.values())

    def scaled(self, factor):
        lf = None if self.leading_factor is None else self.leading_factor * factor
        sym = None
        if self.symbol is not None:
            sym = dict(self.symbol)
            sym["scale"] = sym.get("scale", 1.0) * factor
        return CoeffSeq(self.dim, {k: factor * v for k, v in self.support.items()},
                        self.decay_exponent, lf, self.order, sym, self.flags)

    def dense(self):
        """``(array, offset)`` with ``array[i - offset] = c_i``."""
        pts = self.points
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        arr = np.zeros(tuple(hi - lo + 1))
        for k, v in self.support.items():
            arr[tuple(np.array(k) - lo)] = v
        return arr, lo

    @classmethod
    def from_dense(cls, arr, offset, **meta):
        arr = np.asarray(arr, dtype=float)
        offset = np.atleast_1d(np.asarray(offset, dtype=int))
        sup = {}
        for idx in zip(*np.nonzero(arr)):
            sup[tuple(int(i) + int(o) for i, o in zip(idx, offset))] = arr[idx]
        return cls(arr.ndim, sup, **meta)

    def is_symmetric(self, tol=1e-12):
        """Invariance under every sign flip and permutation of coordinates."""
        scale = max(1e-300, max(abs(v) for v in self.support.values()))
        for k, v in self.support.items():
            for perm in itertools.permutations(range(self.dim)):
                for signs in itertools.product((1, -1), repeat=self.dim):
                    kk = tuple(signs[i] * k[perm[i]] for i in range(self.dim))
                    if abs(self[kk] - v) > tol * scale:
                        return False
        return True

    # text format: one "k_1 ... k_n value" line per point
    def to_text(self):
        lines = [f"# dim {self.dim}"]
        if self.decay_exponent is not None:
            lines.append(f"# decay_exponent {self.decay_exponent:.17g}")
        if self.leading_factor is not None:
            lines.append(f"# leading_factor {self.leading_factor:.17g}")
        if self.order is not None:
            lines.append(f"# order {self.order:.17g}")
        for k, v in self.support.items():
            lines.append(" ".join(str(i) for i in k) + f" {v:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        meta = {}
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2:
                    meta[parts[0]] = parts[1]
                continue
            parts = line.split()
            rows.append((tuple(int(p) for p in parts[:-1]), float(parts[-1])))
        if not rows:
            raise ValueError("no coefficients found")
        dim = int(meta.get("dim", len(rows[0][0])))
        opt = lambda key: float(meta[key]) if key in meta else None
        return cls(dim, dict(rows), decay_exponent=opt("decay_exponent"),
                   leading_factor=opt("leading_factor"), order=opt("order"))


def symmetric_box(n, radius):
    """Lattice points of ``{-radius..radius}**n`` in lexicographic order."""
    rng = range(-int(radius), int(radius) + 1)
    return [tuple(p) for p in itertools.product(rng, repeat=int(n))]


# --------------------------------------------------------------------------
# moment systems
# --------------------------------------------------------------------------

class InconsistentSystemError(ValueError):
    """The moment conditions cannot be met on the chosen point set."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


def _compositions(total, parts):
    # exponent tuples summing to total, first coordinate descending
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def monomial_exponents(n, degree):
    """Graded-lexicographic exponents up to ``degree``: 1, x, y, x^2, xy, y^2, ..."""
    out = []
    for d in range(int(degree) + 1):
        out.extend(_compositions(d, int(n)))
    return out


def default_target_order(sigma, n):
    """Default top monomial degree of the moment system: ``2 sigma - n + 1``."""
    return int(round(2 * sigma - n + 1))


@dataclass(frozen=True, eq=False)
class MomentSystem:
    """Conditions ``sum_k mu_k k**alpha = b_alpha`` for all ``|alpha| <= degree``.

    ``matrix[i, j]`` is monomial ``i`` evaluated at point ``j``; row labels
    are 1-based, so ``b(5)`` is ``rhs[4]``.
    """

    dim: int
    points: tuple
    exponents: tuple
    matrix: np.ndarray
    rhs: np.ndarray
    degree: int
    sigma: float
    leading_factor: float
    ignored_terms: tuple = ()

    @property
    def shape(self):
        return self.matrix.shape

    def b(self, label):
        """``b(label)`` with 1-based row numbering."""
        return float(self.rhs[label - 1])

    def nonzero_rhs(self, tol=0.0):
        return {i + 1: float(v) for i, v in enumerate(self.rhs) if abs(v) > tol}

    def residual(self, mu):
        return self.matrix.astype(float) @ np.asarray(mu, dtype=float) - self.rhs


def taylor_symbol_coeffs(expansion, sigma, degree):
    """Radial Taylor coefficients ``tau_e`` of the symbol, ``T = sum_e tau_e s**(sigma + 2e)``.

    Chosen so that ``T * g^ = 1 + O(s**(degree - sigma + 1))`` using the
    non-log even-step terms ``a_l s**(-sigma + 2l)`` of the expansion.
    Returns ``(taus, ignored)`` where ``ignored`` lists the terms (log or
    off-step powers) that a polynomial cannot cancel; such terms are only
    allowed at net order >= 0.
    """
    a = {}
    ignored = []
    for t in expansion.terms:
        net = sigma - t.q          # power of s after multiplying by s**sigma
        steps = net / 2.0
        if t.log_power == 0 and steps == math.floor(steps) and steps >= 0:
            a[int(steps)] = t.coeff
        else:
            if net < 0:
                raise ValueError(f"term {t} cannot be cancelled by a trigonometric polynomial")
            ignored.append(t)
    if a.get(0, 0.0) == 0.0:
        raise ValueError("leading coefficient c0 is zero")
    e_max = int((degree - sigma) // 2)
    taus = [1.0 / a[0]]
    for e in range(1, e_max + 1):
        acc = math.fsum(a.get(l, 0.0) * taus[e - l] for l in range(1, e + 1))
        taus.append(-acc / a[0])
    return taus, tuple(ignored)


def _multinomial_power(n, j):
    """Expansion of ``(y_1^2 + ... + y_n^2)**j``: {exponent tuple: coefficient}."""
    out = {}
    for comp in _compositions(j, n):
        coeff = math.factorial(j)
        for c in comp:
            coeff //= math.factorial(c)
        out[tuple(2 * c for c in comp)] = coeff
    return out


def build_rhs(expansion, delta_set, target_order=None):
    """Moment system for the even-order case.

    Parameters
    ----------
    expansion : RadialExpansion
        Expansion of the transform to cancel (delta terms are ignored: they
        do not affect the symbol away from the origin).
    delta_set : sequence of lattice points
    target_order : int, optional
        Top monomial degree ``D``; default :func:`default_target_order`.

    Notes
    -----
    ``b_alpha = alpha! * i**|alpha| * t_alpha`` where ``t_alpha`` is the
    coefficient of ``y**alpha`` in the Taylor polynomial of the symbol.
    Rows with ``|alpha| < sigma`` or odd ``|alpha|`` are zero.
    """
    cls = classify(expansion)
    if cls.case is not SingularCase.EVEN_INTEGER:
        raise ValueError(f"moment systems need an even-order singularity, got {cls.case.value}")
    n = expansion.dim
    sigma = int(cls.order)
    D = default_target_order(sigma, n) if target_order is None else int(target_order)
    if D < sigma:
        raise ValueError(f"target_order {D} below the singularity order {sigma}")
    pts = [tuple(int(x) for x in (p if np.ndim(p) else (p,))) for p in delta_set]
    if any(len(p) != n for p in pts):
        raise ValueError("delta_set points must have the expansion's dimension")
    exps = monomial_exponents(n, D)
    taus, ignored = taylor_symbol_coeffs(expansion, sigma, D)
    t = {}
    for e, tau in enumerate(taus):
        j = (sigma + 2 * e) // 2
        for alpha, c in _multinomial_power(n, j).items():
            t[alpha] = t.get(alpha, 0.0) + tau * c
    rhs = np.zeros(len(exps))
    for i, alpha in enumerate(exps):
        if alpha in t:
            fact = math.prod(math.factorial(a) for a in alpha)
            rhs[i] = fact * (-1.0) ** (sum(alpha) // 2) * t[alpha]
    A = np.array([[math.prod(p[d] ** alpha[d] for d in range(n)) for p in pts] for alpha in exps],
                 dtype=object)
    return MomentSystem(n, tuple(pts), tuple(exps), A, rhs, D, float(sigma), taus[0], ignored)


def _solve_rational(A, b):
    """Least-squares solution of ``A x = b`` via exact normal equations; None if singular."""
    rows, cols = len(A), len(A[0])
    At = [[A[i][j] for i in range(rows)] for j in range(cols)]
    M = [[Fraction(sum(At[i][k] * At[j][k] for k in range(rows))) for j in range(cols)] for i in range(cols)]
    r = [sum(At[i][k] * b[k] for k in range(rows)) for i in range(cols)]
    # Gauss-Jordan with exact pivots
    for c in range(cols):
        piv = next((i for i in range(c, cols) if M[i][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        r[c], r[piv] = r[piv], r[c]
        inv = 1 / M[c][c]
        for i in range(cols):
            if i != c and M[i][c] != 0:
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
                r[i] -= f * r[c]
    return [r[i] / M[i][i] for i in range(cols)]


def solve_coeffs(system: MomentSystem, tol=1e-9) -> CoeffSeq:
    """Solve the moment system for the trigonometric polynomial coefficients.

    Uses exact rational arithmetic on the (integer) point evaluations and the
    exact binary value of ``b``; square nonsingular systems are solved
    exactly, overdetermined ones in the least-squares sense.  Rank-deficient
    systems fall back to the minimum-norm solution and are flagged.

    Raises
    ------
    InconsistentSystemError
        If ``|A mu - b| > tol (1 + |b|)``; the message names the first
        violated row.
    """
    A = [[int(x) for x in row] for row in system.matrix]
    b = [Fraction(float(x)) for x in system.rhs]
    sol = _solve_rational(A, b)
    flags = ()
    if sol is None:
        mu = np.linalg.lstsq(np.array(A, dtype=float), system.rhs, rcond=None)[0]
        flags = ("rank_deficient_min_norm",)
    else:
        mu = np.array([float(x) for x in sol])
    res = system.residual(mu)
    bound = tol * (1.0 + np.linalg.norm(system.rhs))
    if np.linalg.norm(res) > bound:
        bad = int(np.argmax(np.abs(res) > bound / math.sqrt(len(res))))
        alpha = system.exponents[bad]
        raise InconsistentSystemError(
            f"moment system inconsistent: row b({bad + 1}) (exponent {alpha}) has residual "
            f"{res[bad]:.3e}; total residual {np.linalg.norm(res):.3e} > {bound:.1e}", row=bad + 1)
    return CoeffSeq(system.dim, dict(zip(system.points, mu)),
                    leading_factor=system.leading_factor, order=system.sigma,
                    symbol={"kind": "poly"}, flags=flags)


# --------------------------------------------------------------------------
# series symbols
# --------------------------------------------------------------------------

def g_symbol(y, exponent, variant="cos"):
    """Fractional power symbol on ``[-pi, pi]**n`` (vectorised over the last axis).

    ``'cos'``: ``2**(e/2) (sum_j (1 - cos y_j))**(e/2)``;
    ``'sin'``: ``(sum_j sin(y_j)**2)**(e/2)``.
    """
    y = np.asarray(y, dtype=float)
    if variant == "cos":
        base = 2.0 * np.sum(1.0 - np.cos(y), axis=-1) if y.ndim > 1 else 2.0 - 2.0 * np.cos(y)
    elif variant == "sin":
        base = np.sum(np.sin(y) ** 2, axis=-1) if y.ndim > 1 else np.sin(y) ** 2
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return np.power(np.maximum(base, 0.0), 0.5 * exponent)


def h_symbol(y, d0):
    """``1 / (d0 * (-log(|sin(y/2)| / 2)))`` with value 0 at the lattice ``2 pi Z``."""
    y = np.asarray(y, dtype=float)
    sn = np.abs(np.sin(0.5 * y))
    out = np.zeros_like(y)
    pos = sn > 0
    out[pos] = 1.0 / (d0 * (-np.log(0.5 * sn[pos])))
    return out


def _fft_coeffs(samples, n_coeffs, fft_size, dim, decay, **meta):
    """Symmetric Fourier coefficients from a periodic sample grid.

    With ``fft_size == n_coeffs`` the full aliased period is kept, the
    Nyquist coefficients being split evenly between ``+-N/2`` so the result
    stays symmetric and the coefficients sum exactly to the sample at 0.
    Otherwise ``|j| <= n_coeffs // 2`` per axis is kept.
    """
    N = fft_size
    coef = np.real(np.fft.fftn(samples)) / N ** dim
    half = n_coeffs // 2
    idx = np.arange(-half, half + 1)
    sub = coef[np.ix_(*([idx % N] * dim))]
    if fft_size == n_coeffs:
        w = np.ones(len(idx))
        w[0] = w[-1] = 0.5
        weight = w
        for _ in range(dim - 1):
            weight = np.multiply.outer(weight, w)
        sub = sub * weight
    return CoeffSeq.from_dense(sub, [-half] * dim, decay_exponent=decay, **meta)


def _check_fft(n_coeffs, fft_size):
    if fft_size is None:
        fft_size = n_coeffs
    for v, name in ((n_coeffs, "n_coeffs"), (fft_size, "fft_size")):
        if v < 2 or v & (v - 1):
            raise ValueError(f"{name} must be a power of two >= 2")
    if fft_size < n_coeffs:
        raise ValueError("fft_size must be >= n_coeffs")
    return fft_size


def g_series_coeffs(gamma_exp, dim=1, variant="cos", n_coeffs=2 ** 11, fft_size=None, normalization=1.0):
    """Fourier coefficients of ``normalization * g_symbol(y, gamma_exp, variant)``.

    Sampled uniformly on ``fft_size`` points per axis and transformed by FFT.
    The coefficients are real and symmetric, with documented decay
    ``O(|j|**-(dim + gamma_exp))``.
    """
    if not gamma_exp > 0:
        raise ValueError("exponent must be > 0")
    fft_size = _check_fft(n_coeffs, fft_size)
    y = 2.0 * np.pi * np.arange(fft_size) / fft_size
    grids = np.meshgrid(*([y] * dim), indexing="ij")
    samples = normalization * g_symbol(np.stack(grids, axis=-1) if dim > 1 else grids[0], gamma_exp, variant)
    return _fft_coeffs(samples, n_coeffs, fft_size, dim, float(dim + gamma_exp),
                       leading_factor=float(normalization), order=float(gamma_exp),
                       symbol={"kind": "g", "exponent": float(gamma_exp), "variant": variant,
                               "scale": float(normalization)})


def h_series_coeffs(d0, n_coeffs=2 ** 11, fft_size=None):
    """Fourier coefficients of the 1-D reciprocal-log symbol :func:`h_symbol`.

    The decay bound is ``O(1 / (|j| log(|j|)**2))``; ``decay_exponent`` is
    recorded as 1.
    """
    if d0 == 0:
        raise ValueError("d0 must be nonzero")
    fft_size = _check_fft(n_coeffs, fft_size)
    y = 2.0 * np.pi * np.arange(fft_size) / fft_size
    samples = h_symbol(y, d0)
    return _fft_coeffs(samples, n_coeffs, fft_size, 1, 1.0, leading_factor=None, order=0.0,
                       symbol={"kind": "h", "d0": float(d0), "scale": 1.0})


def laplacian_power_coeffs(dim, power):
    """Coefficients of ``(sum_j (2 - 2 cos y_j))**power``, a symbol ~ ``|y|**(2 power)``."""
    base = np.zeros((3,) * dim)
    centre = (1,) * dim
    base[centre] = 2.0 * dim
    for d in range(dim):
        for off in (0, 2):
            idx = list(centre)
            idx[d] = off
            base[tuple(idx)] = -1.0
    from scipy.signal import convolve as _conv

    arr = np.ones((1,) * dim)
    for _ in range(int(power)):
        arr = _conv(arr, base, method="direct")
    half = arr.shape[0] // 2
    return CoeffSeq.from_dense(arr, [-half] * dim, leading_factor=1.0, order=2.0 * power,
                               symbol={"kind": "poly"})


def convolve(a: CoeffSeq, b: CoeffSeq) -> CoeffSeq:
    """Discrete convolution ``(a*b)_j = sum_k a_k b_{j-k}``."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    from scipy.signal import convolve as _conv

    da, oa = a.dense()
    db, ob = b.dense()
    out = _conv(da, db, method="direct" if da.size * db.size < 5e6 else "auto")
    lf = None
    if a.leading_factor is not None and b.leading_factor is not None:
        lf = a.leading_factor * b.leading_factor
    order = None if a.order is None or b.order is None else a.order + b.order
    sym = None
    if a.symbol is not None and b.symbol is not None:
        sym = {"kind": "product", "factors": [dict(a.symbol), dict(b.symbol)],
               "seqs": [a, b], "scale": 1.0}
    decay = [d for d in (a.decay_exponent, b.decay_exponent) if d is not None]
    return CoeffSeq.from_dense(out, oa + ob, decay_exponent=min(decay) if decay else None,
                               leading_factor=lf, order=order, symbol=sym)


# --------------------------------------------------------------------------
# symbols and psi^
# --------------------------------------------------------------------------

def _cos_remainder(t, order):
    """``cos t - sum_{even j < order} (-1)**(j/2) t**j / j!`` without cancellation."""
    t = np.asarray(t, dtype=float)
    j0 = int(math.ceil(order))
    j0 += j0 % 2
    direct = np.cos(t) - sum((-1.0) ** (j // 2) * t ** j / math.factorial(j) for j in range(0, j0, 2))
    small = np.abs(t) < 1.0
    if not np.any(small):
        return direct
    ts = t[small]
    acc = np.zeros_like(ts)
    term = (-1.0) ** (j0 // 2) * ts ** j0 / math.factorial(j0)
    j = j0
    while True:
        acc += term
        if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(acc), 1e-300)):
            break
        term = -term * ts * ts / ((j + 1) * (j + 2))
        j += 2
        if j > j0 + 60:
            break
    out = direct.copy()
    out[small] = acc
    return out


def _poly_symbol(coeffs: CoeffSeq, y, order):
    """``sum_k mu_k cos(k.y)`` with the moment-free low-order part removed exactly."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    # reduce to the nearest lattice period so small offsets stay small
    z = y - 2.0 * np.pi * np.round(y / (2.0 * np.pi))
    t = z @ coeffs.points.T.astype(float)
    if order and order > 0:
        vals = _cos_remainder(t, order)
    else:
        vals = np.cos(t)
    return vals @ coeffs.values


def symbol_value(coeffs: CoeffSeq, y):
    """Value of the symbol ``T(y)`` at points ``y`` (shape ``(m, n)`` or ``(n,)``)."""
    y = np.asarray(y, dtype=float)
    pts = y.reshape(-1, coeffs.dim)
    sym = coeffs.symbol or {"kind": "poly"}
    kind = sym.get("kind")
    scale = sym.get("scale", 1.0)
    if kind == "poly":
        order = coeffs.order if coeffs.order is not None and "rank_deficient_min_norm" not in coeffs.flags else 0
        out = _poly_symbol(coeffs, pts, order)
    elif kind == "g":
        arg = pts if coeffs.dim > 1 else pts[:, 0]
        out = scale * g_symbol(arg, sym["exponent"], sym["variant"])
    elif kind == "h":
        out = scale * h_symbol(pts[:, 0], sym["d0"])
    elif kind == "product":
        out = scale * np.prod([symbol_value(s, pts) for s in sym["seqs"]], axis=0)
    else:
        raise ValueError(f"unknown symbol kind {kind!r}")
    return out if y.ndim > 1 else float(out[0]) if y.size == coeffs.dim else out


def _limit_at_zero(coeffs, transform_like, cls):
    if cls.case is SingularCase.LOG_LEADING:
        # H * d0 log s -> -scale
        sym = coeffs.symbol or {}
        return -sym.get("scale", 1.0) * _product_scale(coeffs)
    if coeffs.leading_factor is None or coeffs.order is None:
        raise ValueError("coefficient sequence carries no leading-order metadata")
    if abs(coeffs.order - cls.order) > 1e-12:
        raise ValueError(f"symbol order {coeffs.order} does not match singularity order {cls.order}")
    return coeffs.leading_factor * cls.c0


def _product_scale(coeffs):
    sym = coeffs.symbol or {}
    if sym.get("kind") == "product":
        out = 1.0
        for s in sym["seqs"]:
            if (s.symbol or {}).get("kind") != "h":
                out *= s.leading_factor if s.leading_factor is not None else 1.0
        return out
    return 1.0


def psi_hat(coeffs: CoeffSeq, transform, y):
    """Transform ``T(y) g^(|y|)`` of the quasi-Lagrange function.

    ``transform`` is a :class:`gft.KernelTransform` (or anything with an
    ``expansion`` attribute and a call ``s -> g^(s)``).  At ``y = 0`` the
    removable singularity is evaluated as the limit of the leading terms.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    s = float(np.linalg.norm(y))
    if s == 0.0:
        exp = transform.expansion if hasattr(transform, "expansion") else transform
        return float(_limit_at_zero(coeffs, transform, classify(exp)))
    return float(symbol_value(coeffs, y.reshape(1, -1))[0]) * float(transform(s))


# --------------------------------------------------------------------------
# Strang-Fix verification
# --------------------------------------------------------------------------

@dataclass
class StrangFixReport:
    """Largest finite-difference violations of the Strang-Fix conditions.

    ``at_origin``: max over ``|alpha| <= M`` of ``|D^alpha psi^(0) - [alpha = 0]|``.
    ``at_lattice``: max over probes ``2 pi j`` and ``|alpha| <= M`` of ``|D^alpha psi^(2 pi j)|``.
    """

    M: int
    at_origin: float
    at_lattice: float
    step: float
    probes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def max_violation(self):
        return max(self.at_origin, self.at_lattice)

    def passed(self, tol):
        return self.max_violation <= tol


def _fd_weights(order):
    # central stencils on offsets -2..2, second-order accurate
    table = {
        0: [0, 0, 1, 0, 0],
        1: [0, -0.5, 0, 0.5, 0],
        2: [0, 1, -2, 1, 0],
        3: [-0.5, 1, 0, -1, 0.5],
    }
    if order not in table:
        raise ValueError("finite differences implemented up to order 3")
    return np.array(table[order], dtype=float)


def _fd_derivatives(f, centre, M, step):
    n = len(centre)
    offsets = np.arange(-2, 3)
    grid = list(itertools.product(offsets, repeat=n))
    vals = {}
    for g in grid:
        vals[g] = f(np.asarray(centre) + step * np.array(g, dtype=float))
    out = {}
    for alpha in monomial_exponents(n, M):
        w = [_fd_weights(a) for a in alpha]
        acc = 0.0
        for g in grid:
            coef = math.prod(w[d][g[d] + 2] for d in range(n))
            if coef:
                acc += coef * vals[g]
        out[alpha] = acc / step ** sum(alpha)
    return out


def _default_probes(n):
    if n == 1:
        return [(1,), (-1,), (2,), (3,)]
    base = [(1,) + (0,) * (n - 1), (0,) * (n - 1) + (1,), (1,) * n, (-1,) + (2,) + (0,) * (n - 2)]
    return [tuple(p[:n]) for p in base]


def strang_fix_verify(coeffs: CoeffSeq, transform, M, probes=None, step=None) -> StrangFixReport:
    """Check ``psi^(0) = 1``, ``D^alpha psi^(0) = 0`` and ``D^alpha psi^(2 pi j) = 0``.

    Derivatives up to order ``M <= 3`` are estimated by central finite
    differences with step ``step`` (default 1e-3 in 1-D, 2e-3 otherwise).
    """
    n = coeffs.dim
    if step is None:
        step = 1e-3 if n == 1 else 2e-3
    probes = _default_probes(n) if probes is None else [tuple(p) for p in probes]

    def f(y):
        return psi_hat(coeffs, transform, y)

    d0 = _fd_derivatives(f, np.zeros(n), M, step)
    origin = 0.0
    details = {}
    for alpha, v in d0.items():
        target = 1.0 if sum(alpha) == 0 else 0.0
        origin = max(origin, abs(v - target))
        details[("origin", alpha)] = v
    lattice = 0.0
    for j in probes:
        dj = _fd_derivatives(f, 2.0 * np.pi * np.array(j, dtype=float), M, step)
        for alpha, v in dj.items():
            lattice = max(lattice, abs(v))
            details[(j, alpha)] = v
    return StrangFixReport(int(M), origin, lattice, step, probes, details)


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------

def quasi_lagrange_coeffs(transform, delta_set=None, target_order=None, n_coeffs=2 ** 11,
                          fft_size=None, variant="cos"):
    """Coefficients of a quasi-Lagrange function for ``transform``.

    Parameters
    ----------
    transform : gft.KernelTransform
    delta_set : lattice points, optional
        Support of the trigonometric polynomial (even-order case).  Defaults
        to the smallest symmetric box giving at least as many points as the
        moment system has rows.
    n_coeffs, fft_size, variant
        Series parameters (non-even and logarithmic cases).

    Returns
    -------
    CoeffSeq, SingularityClass, MomentSystem or None
    """
    exp = transform.singular_expansion
    n = exp.dim
    cls = classify(exp)
    if cls.case is SingularCase.EVEN_INTEGER:
        D = default_target_order(cls.order, n) if target_order is None else int(target_order)
        if delta_set is None:
            rows = len(monomial_exponents(n, D))
            r = 0
            while (2 * r + 1) ** n < rows:
                r += 1
            delta_set = symmetric_box(n, r)
        system = build_rhs(exp, delta_set, D)
        return solve_coeffs(system), cls, system
    if cls.case is SingularCase.NON_EVEN:
        if n == 1:
            seq = g_series_coeffs(cls.order, 1, variant, n_coeffs, fft_size, normalization=1.0 / cls.c0)
            return seq, cls, None
        q = int(math.floor(cls.order / 2.0))
        g = g_series_coeffs(cls.gamma_frac, n, variant, n_coeffs, fft_size)
        seq = convolve(laplacian_power_coeffs(n, q), g) if q > 0 else g
        return seq.scaled(1.0 / cls.c0), cls, None
    if n != 1:
        raise NotImplementedError("logarithmic leading singularity is handled in one dimension only")
    if cls.order != 0.0:
        raise NotImplementedError("logarithmic leading term supported at order 0 only")
    h = h_series_coeffs(cls.d0, n_coeffs, fft_size)
    # H * g^ -> -1 at the origin, so flip the sign
    return h.scaled(-1.0), cls, None


def reproduction_degree(expansion, cls: SingularityClass, moment_solved: bool):
    """Polynomial degree ``M`` reproduced by the constructed quasi-Lagrange function.

    A moment-solved trigonometric polynomial cancels every singular term, so
    ``M = sigma - 1``.  A series factor normalised by the leading coefficient
    only leaves ``psi^ - 1 ~ s**(sigma - q2)`` where ``q2`` is the next
    singular exponent, which caps ``M`` at ``ceil(sigma - q2) - 1``.  The
    periodic factor itself is ``|y|**sigma (1 + O(|y|**2))``, so a series
    construction never exceeds ``M = 1``; the reciprocal-log factor only
    gives ``M = 0``.
    """
    if moment_solved:
        return cls.max_degree
    if cls.case is SingularCase.LOG_LEADING:
        return 0
    cap = min(cls.max_degree, 1)
    lower = [t.q for t in expansion.singular_terms if t.q < cls.order]
    lower += [t.q for t in expansion.singular_terms if t.q == cls.order and t.log_power > 0]
    if not lower:
        return cap
    gap = cls.order - max(lower)
    if gap == 0:
        return 0
    return max(min(int(math.ceil(gap)) - 1, cap), 0)


def g_series_closed_form(exponent, j, scale=1.0):
    """Exact Fourier coefficients of ``scale * (2 - 2 cos y)**(exponent / 2)``.

    ``(-1)**j Gamma(e + 1) / (Gamma(e/2 + j + 1) Gamma(e/2 - j + 1))``, with
    reciprocal gammas so poles give zero coefficients.
    """
    j = np.atleast_1d(np.asarray(j, dtype=np.int64))
    a = 0.5 * float(exponent)
    lead = specfun.gamma(2.0 * a + 1.0)
    out = np.array([(-1.0) ** int(k) * lead * specfun.rgamma(a + k + 1.0) * specfun.rgamma(a - k + 1.0)
                    for k in j])
    return scale * out


def fitted_decay_exponent(coeffs: CoeffSeq, j_min=16, j_max=None):
    """Least-squares slope ``p`` of ``log|mu_j| ~ -p log j`` over ``j_min <= j <= j_max`` (1-D)."""
    if coeffs.dim != 1:
        raise ValueError("1-D sequences only")
    pts = coeffs.points[:, 0]
    vals = np.abs(coeffs.values)
    j_max = j_max or int(pts.max()) // 4
    sel = (pts >= j_min) & (pts <= j_max) & (vals > 0)
    if sel.sum() < 3:
        raise ValueError("not enough coefficients in the fitting window")
    slope = np.polyfit(np.log(pts[sel]), np.log(vals[sel]), 1)[0]
    return float(-slope)
