"""Experiment configurations, target functions and the end-to-end runner."""
import copy
import json
import math
import os
import shutil
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, gft, strangfix
from .kernels import RadialKernel
from .quasi import QuasiInterpolant, QuasiLagrange, error_report, uniform_grid, write_error_csv

EULER_GAMMA = 0.5772156649015329


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _bump(power):
    def f(x):
        return np.clip(1.0 - x * x, 0.0, None) ** power
    return f


def _example3_target(x, y):
    s = x + y
    return s * s * np.abs(s) + np.cos(2 * x - y) * np.sin(x - 2 * y)


# name -> (callable, dim, default sample box)
TARGETS = {
    "bump4": (_bump(4), 1, (-1.0, 1.0)),
    "bump3": (_bump(3), 1, (-1.0, 1.0)),
    "example3": (_example3_target, 2, None),
    "cos": (np.cos, 1, None),
    "one": (lambda x: np.ones_like(x), 1, None),
    "linear": (lambda x: 0.5 - 2.0 * x, 1, None),
    "cubic": (lambda x: x ** 3 - x, 1, None),
    "one2d": (lambda x, y: np.ones_like(x), 2, None),
}

EXAMPLE3_DELTA = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1),
                  (2, 0), (0, 2), (-2, 0), (0, -2), (3, 0), (0, 3), (0, -3), (-3, 0),
                  (2, 2), (-2, 2), (-2, -2), (2, -2)]

EXAMPLES = {
    "example1": {
        "name": "example1",
        "dim": 1,
        "h": 1e-3,
        "target": "bump4",
        "grid": {"lower": -1.5, "upper": 1.5, "num": 401},
        "delta_set": [[k] for k in range(-4, 5)],
        "kernels": {
            "g1": {"family": "genmq", "c": 0.5, "mq_beta": 1.0, "mq_gamma": 1.5},
            "g2": {"family": "tanhpow", "beta": 3.0, "alpha": 1.0},
        },
        "check": {"kind": "factor", "tol": 2.0, "reference": {"g1": 1.404e-4, "g2": 1.87e-4},
                  "ordered": ["g1", "g2"]},
    },
    "example2": {
        "name": "example2",
        "dim": 1,
        "h": 1e-2,
        "target": "bump3",
        "grid": {"lower": -1.5, "upper": 1.5, "num": 401},
        "n_coeffs": 2 ** 11,
        "kernels": {
            "g1": {"family": "shifted_tps", "c": 0.5},
            "g2": {"family": "tanhpowlog", "beta": 2.0, "alpha": 1.0, "correction": EULER_GAMMA},
        },
        "check": {"kind": "abs", "tol": 0.02, "reference": {"g1": 0.39722, "g2": 0.39204}},
    },
    "example3": {
        "name": "example3",
        "dim": 2,
        "h": 1e-2,
        "target": "example3",
        "grid": {"lower": -1.0, "upper": 1.0, "num": 101},
        "truncation_radius": 60.0,
        "delta_set": [list(p) for p in EXAMPLE3_DELTA],
        "kernels": {
            "g1": {"family": "shifted_tps", "c": 0.5},
            # the tanh remainder only changes b beyond degree 7, so r^2 log r suffices
            "g2": {"family": "tanhpowlog", "beta": 2.0, "alpha": 1.0,
                   "correction": EULER_GAMMA - math.log(2.0),
                   "symbol": {"family": "powerlog", "beta": 2.0}},
        },
        "check": {"kind": "factor", "tol": 2.0, "reference": {"g1": 6.0e-5, "g2": 6.8e-5},
                  "rmse_reference": {"g1": 1.2e-5}},
    },
}

_KNOWN_KEYS = {"name", "dim", "h", "target", "grid", "delta_set", "target_order", "n_coeffs",
               "fft_size", "variant", "truncation_radius", "sample_lower", "sample_upper",
               "kernels", "check", "output_dir", "psi_range"}
_KERNEL_KEYS = {"family", "beta", "alpha", "c", "mq_beta", "mq_gamma", "correction"}


@dataclass
class ExperimentConfig:
    """Validated experiment description.

    ``kernels`` maps a label to a :class:`RadialKernel`; ``symbols`` maps a
    label to the kernel whose transform defines the coefficients (the kernel
    itself unless a ``symbol`` table is given).
    """

    name: str
    dim: int
    h: float
    target: str
    kernels: dict
    symbols: dict
    grid: dict
    sample_lower: float
    sample_upper: float
    delta_set: list = None
    target_order: int = None
    n_coeffs: int = 2 ** 11
    fft_size: int = None
    variant: str = "cos"
    truncation_radius: float = None
    check: dict = None
    output_dir: str = None
    psi_range: float = 6.0

    def to_dict(self):
        return {
            "name": self.name,
            "dim": self.dim,
            "h": self.h,
            "target": self.target,
            "kernels": {k: v.to_dict() for k, v in self.kernels.items()},
            "symbols": {k: v.to_dict() for k, v in self.symbols.items()},
            "grid": dict(self.grid),
            "sample_lower": self.sample_lower,
            "sample_upper": self.sample_upper,
            "delta_set": self.delta_set,
            "target_order": self.target_order,
            "n_coeffs": self.n_coeffs,
            "fft_size": self.fft_size,
            "variant": self.variant,
            "truncation_radius": self.truncation_radius,
            "check": self.check,
            "psi_range": self.psi_range,
        }


def _kernel_from(d, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: kernel must be a table")
    unknown = set(d) - _KERNEL_KEYS - {"symbol"}
    if unknown:
        raise ConfigError(f"{where}: unknown kernel keys {sorted(unknown)}")
    if "family" not in d:
        raise ConfigError(f"{where}: kernel family missing")
    try:
        return RadialKernel.from_dict({k: v for k, v in d.items() if k in _KERNEL_KEYS})
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _num(d, key, default, kind=float, positive=False):
    v = d.get(key, default)
    if v is None:
        return None
    try:
        v = kind(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be {kind.__name__}") from exc
    if kind is float and not math.isfinite(v):
        raise ConfigError(f"{key} must be finite")
    if positive and not v > 0:
        raise ConfigError(f"{key} must be positive")
    return v


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config mapping (as read from TOML)."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a table")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    target = raw.get("target")
    if target not in TARGETS:
        raise ConfigError(f"unknown target {target!r}; registered: {sorted(TARGETS)}")
    f, tdim, box = TARGETS[target]
    dim = _num(raw, "dim", tdim, int, positive=True)
    if dim != tdim:
        raise ConfigError(f"target {target} is {tdim}-dimensional, config says dim={dim}")
    h = _num(raw, "h", None, float, positive=True)
    if h is None:
        raise ConfigError("h is required")
    kraw = raw.get("kernels")
    if not isinstance(kraw, dict) or not kraw:
        raise ConfigError("at least one kernel is required")
    kernels, symbols = {}, {}
    for label, d in kraw.items():
        kernels[label] = _kernel_from(d, f"kernels.{label}")
        symbols[label] = _kernel_from(d["symbol"], f"kernels.{label}.symbol") if "symbol" in d else kernels[label]
    grid = dict(raw.get("grid", {"lower": -1.5, "upper": 1.5, "num": 401}))
    if set(grid) != {"lower", "upper", "num"}:
        raise ConfigError("grid needs exactly lower, upper, num")
    grid = {"lower": _num(grid, "lower", None), "upper": _num(grid, "upper", None),
            "num": _num(grid, "num", None, int, positive=True)}
    if not grid["lower"] < grid["upper"]:
        raise ConfigError("grid lower must be below upper")
    R = _num(raw, "truncation_radius", None, float, positive=True)
    if box is None:
        if R is None:
            raise ConfigError(f"target {target} has unbounded support; truncation_radius is required")
        margin = (R + 1.0) * h
        box = (grid["lower"] - margin, grid["upper"] + margin)
    lo = _num(raw, "sample_lower", box[0])
    hi = _num(raw, "sample_upper", box[1])
    if not lo < hi:
        raise ConfigError("sample_lower must be below sample_upper")
    delta = raw.get("delta_set")
    if delta is not None:
        try:
            delta = [[int(v) for v in (p if isinstance(p, (list, tuple)) else [p])] for p in delta]
        except (TypeError, ValueError) as exc:
            raise ConfigError("delta_set must be a list of integer points") from exc
        if any(len(p) != dim for p in delta):
            raise ConfigError("delta_set points must have dim coordinates")
    variant = raw.get("variant", "cos")
    if variant not in ("cos", "sin"):
        raise ConfigError("variant must be cos or sin")
    check = raw.get("check")
    if check is not None:
        if check.get("kind") not in ("factor", "abs") or "reference" not in check:
            raise ConfigError("check needs kind (factor|abs), tol and reference")
    return ExperimentConfig(
        name=str(raw.get("name", target)), dim=dim, h=h, target=target, kernels=kernels,
        symbols=symbols, grid=grid, sample_lower=lo, sample_upper=hi, delta_set=delta,
        target_order=_num(raw, "target_order", None, int, positive=True),
        n_coeffs=_num(raw, "n_coeffs", 2 ** 11, int, positive=True),
        fft_size=_num(raw, "fft_size", None, int, positive=True), variant=variant,
        truncation_radius=R, check=check, output_dir=raw.get("output_dir"),
        psi_range=_num(raw, "psi_range", 6.0, float, positive=True),
    )


def example_config(name, **overrides) -> ExperimentConfig:
    """Registered example with selected keys replaced."""
    if name not in EXAMPLES:
        raise ConfigError(f"unknown example {name!r}; registered: {sorted(EXAMPLES)}")
    raw = copy.deepcopy(EXAMPLES[name])
    raw.update(overrides)
    return parse_config(raw)


@dataclass
class KernelRun:
    label: str
    kernel: RadialKernel
    qlf: QuasiLagrange
    sigma: float
    case: str
    M: int
    b_vector: dict
    report: object
    Qf: np.ndarray
    fx: np.ndarray

    def summary(self, head=9):
        mu = self.qlf.coeffs
        pts = mu.points
        if mu.dim == 1:
            centre = np.argsort(np.abs(pts[:, 0]) + 0.1 * (pts[:, 0] < 0), kind="stable")[:head]
        else:
            centre = np.argsort(np.sum(np.abs(pts), axis=1), kind="stable")[:head]
        return {
            "kernel": self.kernel.to_dict(),
            "sigma": self.sigma,
            "case": self.case,
            "M": self.M,
            "b_vector": {str(k): v for k, v in self.b_vector.items()},
            "n_coeffs": len(mu),
            "mu_head": [[*map(int, pts[i]), float(mu.values[i])] for i in centre],
            "mu_sum": float(mu.total()),
            "report": self.report.to_dict(),
        }


@dataclass
class RunManifest:
    """Everything needed to audit one experiment run."""

    config: dict
    runs: dict
    wall_clock: float
    version: str = __version__
    check: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps({"version": self.version, "config": self.config, "runs": self.runs,
                           "check": self.check, "wall_clock": self.wall_clock}, indent=2, sort_keys=False)


def build_qlf(cfg: ExperimentConfig, label):
    """Quasi-Lagrange function for kernel ``label`` plus derived metadata."""
    kernel = cfg.kernels[label]
    tr = gft.kernel_transform(cfg.symbols[label], cfg.dim)
    seq, cls, system = strangfix.quasi_lagrange_coeffs(
        tr, delta_set=cfg.delta_set, target_order=cfg.target_order, n_coeffs=cfg.n_coeffs,
        fft_size=cfg.fft_size, variant=cfg.variant)
    M = strangfix.reproduction_degree(tr.singular_expansion, cls, system is not None)
    decay = 2 * cfg.dim + kernel.growth_exponent if system is not None else None
    b = system.nonzero_rhs(1e-15) if system is not None else {}
    return QuasiLagrange(kernel, seq, cfg.dim, decay), cls, M, b


def run_kernel(cfg: ExperimentConfig, label) -> KernelRun:
    qlf, cls, M, b = build_qlf(cfg, label)
    f, _, box = TARGETS[cfg.target]
    # samples beyond a covered support are exact zeros, so no point is truncated
    covered = box is not None and cfg.sample_lower <= box[0] and cfg.sample_upper >= box[1]
    qi = QuasiInterpolant(qlf.kernel, h=cfg.h, dim=cfg.dim, coeffs=qlf.coeffs,
                          truncation_radius=cfg.truncation_radius)
    qi.fit_function(f, cfg.sample_lower, cfg.sample_upper)
    g = cfg.grid
    grid = uniform_grid(g["lower"], g["upper"], g["num"], cfg.dim)
    desc = f"{g['num']}^{cfg.dim} uniform points on [{g['lower']}, {g['upper']}]^{cfg.dim}"
    rep, Qf, fx = error_report(qi, grid, f, interior_only=not covered, description=desc)
    rep.meta["truncation_radius"] = cfg.truncation_radius
    return KernelRun(label, qlf.kernel, qlf, cls.order, cls.case.value, M, b, rep, Qf, fx)


def evaluate_check(check, runs):
    """Compare max errors with reference values; returns a dict with ``passed``."""
    out = {"kind": check["kind"], "tol": check["tol"], "items": {}}
    ok = True
    for label, ref in check["reference"].items():
        err = runs[label].report.max_error
        if check["kind"] == "factor":
            good = ref / check["tol"] <= err <= ref * check["tol"]
        else:
            good = abs(err - ref) <= check["tol"]
        out["items"][label] = {"max_error": err, "reference": ref, "passed": bool(good)}
        ok &= good
    for label, ref in check.get("rmse_reference", {}).items():
        err = runs[label].report.rmse
        good = ref / 2.0 <= err <= ref * 2.0
        out["items"][label + "_rmse"] = {"rmse": err, "reference": ref, "passed": bool(good)}
        ok &= good
    if "ordered" in check:
        a, b = check["ordered"]
        good = runs[a].report.max_error < runs[b].report.max_error
        out["items"]["ordering"] = {"expected": f"{a} < {b}", "passed": bool(good)}
        ok &= good
    out["passed"] = bool(ok)
    return out


def _psi_curve(run: KernelRun, extent, num=601):
    if run.qlf.dim == 1:
        x = np.linspace(-extent, extent, num)[:, None]
    else:
        x = uniform_grid(-extent, extent, 121, run.qlf.dim)
    return x, run.qlf(x)


def _write_csv(path, header, columns):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([f"{v:.17g}" for v in row])


def write_bundle(cfg: ExperimentConfig, runs, manifest: RunManifest, out_dir):
    """Write curves and the manifest; the directory is replaced atomically."""
    parent = os.path.dirname(os.path.abspath(out_dir)) or "."
    os.makedirs(parent, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".tmp-", dir=parent)
    try:
        axes = ["x", "y", "z"][: cfg.dim]
        g = cfg.grid
        grid = uniform_grid(g["lower"], g["upper"], g["num"], cfg.dim)
        for label, run in runs.items():
            write_error_csv(os.path.join(tmp, f"{label}_error.csv"), grid, run.fx, run.Qf)
            x, psi = _psi_curve(run, cfg.psi_range)
            _write_csv(os.path.join(tmp, f"{label}_psi.csv"), axes + ["psi"], [*x.T, psi])
            with open(os.path.join(tmp, f"{label}_coeffs.txt"), "w") as fh:
                fh.write(run.qlf.coeffs.to_text())
        with open(os.path.join(tmp, "manifest.json"), "w") as fh:
            fh.write(manifest.to_json() + "\n")
        if os.path.exists(out_dir):
            shutil.rmtree(out_dir)
        os.replace(tmp, out_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> RunManifest:
    """Build every kernel's quasi-interpolant, report errors, optionally write artifacts."""
    t0 = time.perf_counter()
    runs = {label: run_kernel(cfg, label) for label in cfg.kernels}
    manifest = RunManifest(cfg.to_dict(), {k: r.summary() for k, r in runs.items()}, 0.0)
    if cfg.check is not None:
        manifest.check = evaluate_check(cfg.check, runs)
    manifest.wall_clock = time.perf_counter() - t0
    out_dir = out_dir or cfg.output_dir
    if out_dir:
        write_bundle(cfg, runs, manifest, out_dir)
    manifest.kernel_runs = runs
    return manifest
