"""Quasi-Lagrange functions and quasi-interpolants on scaled lattices.

``Q_h f(x) = sum_j f(h j) psi(x / h - j)`` with
``psi(x) = sum_k mu_k g(|x - k|)``.

Evaluation groups the query points by their fractional lattice offset
``x/h - floor(x/h)``: all points in a group need ``psi`` on the same integer
translates, so ``psi`` is evaluated exactly once per group and the lattice
sum becomes a discrete convolution with the sample array.
"""
import csv
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from . import gft, strangfix
from ._validation import check_points, check_positive, check_values, lattice_indices
from .kernels import RadialKernel
from .strangfix import CoeffSeq

__all__ = [
    "QuasiLagrange",
    "eval_psi",
    "QuasiInterpolant",
    "quasi_interpolate",
    "ErrorReport",
    "error_report",
    "ConvergenceResult",
    "convergence_sweep",
    "uniform_grid",
    "write_error_csv",
    "lattice_sum",
    "ReproductionResidual",
    "reproduction_residual",
]

_CHUNK = 2_000_000


@dataclass(frozen=True, eq=False)
class QuasiLagrange:
    """``psi(x) = sum_k mu_k g(|x - k|)``.

    ``decay_exponent`` documents the expected ``|psi(x)| = O(|x|**-decay)``.
    """

    kernel: RadialKernel
    coeffs: CoeffSeq
    dim: int
    decay_exponent: Optional[float] = None

    def __post_init__(self):
        if self.coeffs.dim != self.dim:
            raise ValueError("coefficient dimension does not match")

    def __call__(self, x):
        return eval_psi(self, x)

    @classmethod
    def build(cls, kernel, dim, **kwargs):
        """Transform ``kernel`` and solve for its coefficients (see ``quasi_lagrange_coeffs``)."""
        tr = gft.kernel_transform(kernel, dim)
        seq, sing, _ = strangfix.quasi_lagrange_coeffs(tr, **kwargs)
        decay = None
        if sing.case is strangfix.SingularCase.EVEN_INTEGER:
            decay = 2 * dim + kernel.growth_exponent
        return cls(kernel, seq, dim, decay)


def eval_psi(qlf: QuasiLagrange, x):
    """Exact finite sum ``sum_k mu_k g(|x - k|)`` at points ``x``."""
    scalar = np.ndim(x) == 0 or (np.ndim(x) == 1 and qlf.dim > 1 and np.shape(x)[0] == qlf.dim)
    X = check_points(np.atleast_1d(x) if qlf.dim == 1 else np.atleast_2d(x), qlf.dim)
    pts = qlf.coeffs.points.astype(float)
    mu = qlf.coeffs.values
    out = np.zeros(X.shape[0])
    rows = max(1, _CHUNK // max(1, len(mu)))
    for a in range(0, X.shape[0], rows):
        xb = X[a:a + rows]
        diff = xb[:, None, :] - pts[None, :, :]
        r = np.sqrt(np.sum(diff * diff, axis=-1)) if qlf.dim > 1 else np.abs(diff[..., 0])
        out[a:a + rows] = qlf.kernel(r) @ mu
    return float(out[0]) if scalar else out


def _convolve(F, P):
    from scipy.signal import convolve, fftconvolve

    if F.ndim == 1 and F.size * P.size < 5e7:
        return convolve(F, P, method="direct")
    return fftconvolve(F, P)


def lattice_sum(qlf: QuasiLagrange, samples, offset, X, truncation_radius=None):
    """``sum_j samples[j - offset] psi(X - j)`` for points ``X`` in lattice units.

    Returns ``(values, complete)``; ``complete`` marks points whose whole
    truncation ball lies inside the sample box (always True when
    ``truncation_radius`` is None, samples outside the box counting as zero).
    """
    n = qlf.dim
    F = np.asarray(samples, dtype=float)
    jlo = np.asarray(offset, dtype=np.int64).reshape(n)
    jhi = jlo + np.array(F.shape) - 1
    X = np.asarray(X, dtype=float).reshape(-1, n)
    base = np.floor(X).astype(np.int64)
    frac = X - base
    key = np.round(frac, 9)
    _, group, = np.unique(key, axis=0, return_inverse=True)
    group = group.ravel()
    out = np.zeros(X.shape[0])
    R = None if truncation_radius is None else float(truncation_radius)
    for g in np.unique(group):
        idx = np.nonzero(group == g)[0]
        phi = frac[idx[0]]
        b = base[idx]
        olo = b.min(axis=0) - jhi
        ohi = b.max(axis=0) - jlo
        if R is not None:
            w = int(math.ceil(R)) + 1
            olo = np.maximum(olo, -w)
            ohi = np.minimum(ohi, w)
        if np.any(ohi < olo):
            continue
        axes = [np.arange(olo[d], ohi[d] + 1) for d in range(n)]
        grids = np.meshgrid(*axes, indexing="ij")
        offs = np.stack([gd.ravel() for gd in grids], axis=-1).astype(float)
        pts = offs + phi
        vals = eval_psi(qlf, pts)
        if R is not None:
            vals[np.sqrt(np.sum(pts * pts, axis=1)) > R] = 0.0
        P = vals.reshape([len(a) for a in axes])
        C = _convolve(F, P)
        pos = b - jlo - olo
        inside = np.all((pos >= 0) & (pos < np.array(C.shape)), axis=1)
        vals_out = np.zeros(len(idx))
        if np.any(inside):
            vals_out[inside] = C[tuple(pos[inside].T)]
        out[idx] = vals_out
    if R is None:
        complete = np.ones(X.shape[0], dtype=bool)
    else:
        w = math.ceil(R) + 1
        complete = np.all((base - w >= jlo) & (base + w <= jhi), axis=1)
    return out, complete


class QuasiInterpolant(RegressorMixin, BaseEstimator):
    """Quasi-interpolation from samples on the lattice ``h Z^n``.

    Parameters
    ----------
    kernel : RadialKernel
    h : float
        Lattice spacing.
    dim : int
    coeffs : CoeffSeq, optional
        Quasi-Lagrange coefficients; built from ``kernel`` in :meth:`fit`
        when omitted.
    truncation_radius : float, optional
        Only lattice points with ``|x/h - j| <= truncation_radius`` enter the
        sum.  ``None`` sums over every sample.
    delta_set, target_order, n_coeffs, fft_size, variant
        Forwarded to the coefficient construction when ``coeffs`` is None.

    Attributes
    ----------
    qlf_ : QuasiLagrange
    samples_ : ndarray
        Dense sample array over the bounding box of the fitted lattice points
        (missing points are zero).
    offset_ : ndarray
        Lattice index of ``samples_[0, ..., 0]``.
    """

    def __init__(self, kernel=None, h=1.0, dim=1, coeffs=None, truncation_radius=None,
                 delta_set=None, target_order=None, n_coeffs=2 ** 11, fft_size=None, variant="cos"):
        self.kernel = kernel
        self.h = h
        self.dim = dim
        self.coeffs = coeffs
        self.truncation_radius = truncation_radius
        self.delta_set = delta_set
        self.target_order = target_order
        self.n_coeffs = n_coeffs
        self.fft_size = fft_size
        self.variant = variant

    def _build_qlf(self):
        if not isinstance(self.kernel, RadialKernel):
            raise TypeError("kernel must be a RadialKernel")
        if self.coeffs is not None:
            return QuasiLagrange(self.kernel, self.coeffs, int(self.dim))
        return QuasiLagrange.build(self.kernel, int(self.dim), delta_set=self.delta_set,
                                   target_order=self.target_order, n_coeffs=self.n_coeffs,
                                   fft_size=self.fft_size, variant=self.variant)

    def fit(self, X, y):
        """Store lattice samples ``y = f(X)``; ``X`` must lie on ``h Z^n``."""
        h = check_positive(self.h, "h")
        if self.truncation_radius is not None:
            check_positive(self.truncation_radius, "truncation_radius")
        X = check_points(X, int(self.dim))
        y = check_values(y, X.shape[0])
        j = lattice_indices(X, h)
        lo = j.min(axis=0)
        hi = j.max(axis=0)
        F = np.zeros(tuple(hi - lo + 1))
        F[tuple((j - lo).T)] = y
        self.samples_ = F
        self.offset_ = lo
        self.qlf_ = self._build_qlf()
        self.n_features_in_ = int(self.dim)
        return self

    def fit_function(self, f, lower, upper):
        """Sample ``f`` on every lattice point of the box ``[lower, upper]`` and fit."""
        h = check_positive(self.h, "h")
        n = int(self.dim)
        lo = np.ceil(np.broadcast_to(np.asarray(lower, float), (n,)) / h - 1e-9).astype(np.int64)
        hi = np.floor(np.broadcast_to(np.asarray(upper, float), (n,)) / h + 1e-9).astype(np.int64)
        axes = [np.arange(lo[d], hi[d] + 1) for d in range(n)]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1) * h
        vals = f(*pts.T) if n > 1 else f(pts[:, 0])
        return self.fit(pts, vals)

    def predict(self, X):
        check_is_fitted(self, "qlf_")
        X = check_points(X, int(self.dim))
        vals, complete = lattice_sum(self.qlf_, self.samples_, self.offset_, X / self.h,
                                     self.truncation_radius)
        self.last_complete_ = complete
        return vals

    def interior_mask(self, X):
        """Points whose truncated lattice sum only uses sampled lattice points."""
        check_is_fitted(self, "qlf_")
        X = check_points(X, int(self.dim))
        if self.truncation_radius is None:
            return np.ones(X.shape[0], dtype=bool)
        base = np.floor(X / self.h).astype(np.int64)
        w = math.ceil(self.truncation_radius) + 1
        hi = self.offset_ + np.array(self.samples_.shape) - 1
        return np.all((base - w >= self.offset_) & (base + w <= hi), axis=1)


def quasi_interpolate(qi: QuasiInterpolant, x):
    """``Q_h f(x)`` for a fitted :class:`QuasiInterpolant`.

    Raises ``ValueError`` when no sampled lattice point lies within the
    truncation radius of ``x``.
    """
    X = check_points(np.atleast_1d(x) if qi.dim == 1 else np.atleast_2d(x), int(qi.dim))
    if qi.truncation_radius is not None:
        t = X / qi.h
        lo = qi.offset_
        hi = lo + np.array(qi.samples_.shape) - 1
        gap = np.maximum(np.maximum(lo - t, t - hi), 0.0)
        if np.any(np.sqrt(np.sum(gap * gap, axis=1)) > qi.truncation_radius):
            raise ValueError("no sampled lattice point within the truncation radius")
    out = qi.predict(X)
    return float(out[0]) if out.size == 1 else out


@dataclass
class ErrorReport:
    """Max and root-mean-square absolute error on an evaluation grid."""

    max_error: float
    rmse: float
    grid: str
    n_points: int
    runtime: float = 0.0
    excluded: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rmse > self.max_error * (1 + 1e-12) + 1e-300:
            raise ValueError("rmse exceeds max error")

    def to_dict(self):
        return {"max_error": self.max_error, "rmse": self.rmse, "grid": self.grid,
                "n_points": self.n_points, "runtime": self.runtime, "excluded": self.excluded,
                **self.meta}


def uniform_grid(lower, upper, num, dim=1):
    """Tensor grid with ``num`` points per axis on ``[lower, upper]**dim``."""
    ax = np.linspace(lower, upper, int(num))
    grids = np.meshgrid(*([ax] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def error_report(qi: QuasiInterpolant, grid, f: Callable, interior_only=True, description=None):
    """Compare ``qi`` with ``f`` on ``grid`` (shape ``(m, dim)``).

    Returns ``(ErrorReport, Qf, fx)``.  With ``interior_only`` points whose
    truncated sum would need unsampled lattice points are left out.
    """
    t0 = time.perf_counter()
    grid = check_points(grid, int(qi.dim))
    Qf = qi.predict(grid)
    fx = f(*grid.T) if qi.dim > 1 else f(grid[:, 0])
    err = np.abs(Qf - fx)
    mask = qi.interior_mask(grid) if interior_only else np.ones(len(err), dtype=bool)
    if not np.any(mask):
        raise ValueError("no evaluation point lies in the valid interior")
    e = err[mask]
    desc = description or f"{len(grid)} points, dim {qi.dim}"
    rep = ErrorReport(float(e.max()), float(np.sqrt(np.mean(e * e))), desc, int(mask.sum()),
                      time.perf_counter() - t0, int((~mask).sum()))
    return rep, Qf, fx


@dataclass
class ConvergenceResult:
    h: list
    errors: list
    slope: float


def convergence_sweep(make_qi: Callable, f: Callable, h_list, grid, lower, upper):
    """Least-squares slope of ``log(max error)`` against ``log h``.

    ``make_qi(h)`` returns an unfitted :class:`QuasiInterpolant`; it is
    fitted on ``f`` sampled over ``[lower, upper]``.
    """
    h_list = [float(h) for h in h_list]
    if len(h_list) < 3:
        raise ValueError("need at least three spacings")
    errs = []
    for h in h_list:
        qi = make_qi(h).fit_function(f, lower, upper)
        errs.append(error_report(qi, grid, f)[0].max_error)
    slope = float(np.polyfit(np.log(h_list), np.log(errs), 1)[0])
    return ConvergenceResult(h_list, errs, slope)


@dataclass
class ReproductionResidual:
    """Truncated polynomial reproduction at a fixed truncation radius.

    ``residual``: max over points and monomials of
    ``|sum_{|x - j| <= R} p(j) psi(x - j) - p(x)|``.
    ``tail``: the same sum of ``|p(j) psi(x - j)|`` over ``R < |x - j| <= outer``.
    ``floor``: rounding level of the truncated sum, ``64 eps sum |p(j)| sum_k |mu_k g|``.
    """

    degree: int
    radius: float
    residual: float
    tail: float
    floor: float

    def within(self, factor=10.0):
        return bool(self.residual <= factor * max(self.tail, self.floor))


def reproduction_residual(qlf: QuasiLagrange, degree, truncation_radius, points=None, outer=None):
    """Residual of reproducing every monomial of total degree ``degree``.

    ``points`` default to a ``3**n`` tensor grid inside the unit cell;
    ``outer`` (default ``4 * truncation_radius``) bounds the tail sum.
    """
    n = qlf.dim
    R = float(truncation_radius)
    outer = 4.0 * R if outer is None else float(outer)
    if points is None:
        cell = np.array([0.15, 0.5, 0.8])
        points = np.stack([g.ravel() for g in np.meshgrid(*([cell] * n), indexing="ij")], axis=-1)
    points = check_points(points, n)
    w = int(math.ceil(outer)) + 1
    ax = np.arange(-w, w + 1)
    J = np.stack([g.ravel() for g in np.meshgrid(*([ax] * n), indexing="ij")], axis=-1).astype(float)
    mons = [np.array(e) for e in strangfix.monomial_exponents(n, int(degree)) if sum(e) == int(degree)]
    kpts = qlf.coeffs.points.astype(float)
    amu = np.abs(qlf.coeffs.values)
    res = tail = floor = 0.0
    for x in points:
        t = x - J
        r = np.sqrt(np.sum(t * t, axis=1))
        inner = r <= R
        far = (r > R) & (r <= outer)
        psi = eval_psi(qlf, t)
        # size of the terms summed inside psi, for the rounding level
        d = t[inner][:, None, :] - kpts[None, :, :]
        gabs = np.abs(qlf.kernel(np.sqrt(np.sum(d * d, axis=-1)))) @ amu
        for e in mons:
            pj = np.prod(J ** e, axis=1)
            px = float(np.prod(x ** e))
            res = max(res, abs(math.fsum(pj[inner] * psi[inner]) - px))
            tail = max(tail, float(np.sum(np.abs(pj[far] * psi[far]))))
            floor = max(floor, 64 * np.finfo(float).eps * float(np.sum(np.abs(pj[inner]) * gabs)))
    return ReproductionResidual(int(degree), R, res, tail, floor)


def write_error_csv(path, grid, fx, Qf):
    """Per-point CSV with columns ``x[,y],f,Qf,abs_err``."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim == 1:
        grid = grid[:, None]
    names = ["x", "y", "z"][: grid.shape[1]] if grid.shape[1] <= 3 else [f"x{i}" for i in range(grid.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["f", "Qf", "abs_err"])
        for p, a, b in zip(grid, fx, Qf):
            w.writerow([f"{v:.17g}" for v in p] + [f"{a:.17g}", f"{b:.17g}", f"{abs(a - b):.17g}"])
