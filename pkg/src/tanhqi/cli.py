"""Command line front end.

Exit codes: 0 success, 2 configuration or input error, 3 numeric failure,
4 tolerance failure in ``--check`` / ``verify`` mode.
"""
import argparse
import json
import logging
import sys

import numpy as np

from . import __version__, gft, strangfix
from .experiments import EXAMPLES, ConfigError, build_qlf, example_config, parse_config, run_experiment
from .kernels import RadialKernel

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("tanhqi")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def load_config(source, overrides=None):
    """Registered example name or path to a TOML file."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if source in EXAMPLES:
        return example_config(source, **overrides)
    try:
        with open(source, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"no such example or config file: {source}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    raw.update(overrides)
    return parse_config(raw)


def _kernel_from_args(args):
    spec = {"family": args.kernel}
    for key in ("beta", "alpha", "c", "mq_beta", "mq_gamma", "correction"):
        v = getattr(args, key)
        if v is not None:
            spec[key] = v
    try:
        return RadialKernel.from_dict(spec)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_transform(args):
    kernel = _kernel_from_args(args)
    try:
        tr = gft.kernel_transform(kernel, args.dim, order=args.order)
    except gft.ExcludedParameterError as exc:
        raise CliError(f"error: {exc}", EXIT_CONFIG) from exc
    except NotImplementedError as exc:
        raise CliError(f"error: {exc}", EXIT_CONFIG) from exc
    if not args.at:
        print(tr.expansion.format())
        return EXIT_OK
    exp = tr.expansion.without_delta()
    odd = args.route == "odd-dim"
    if odd and (kernel.family.value != "tanh_power" or kernel.alpha != 1.0 or args.dim % 2 == 0):
        raise CliError("error: the odd-dimension route needs tanh_power with alpha=1 and odd dim", EXIT_CONFIG)
    rows = ["s,odd_dim_series,quadrature,difference" if odd else "s,expansion,oracle,difference"]
    for s in args.at:
        if not s > 0:
            raise CliError("error: evaluation points must be > 0", EXIT_CONFIG)
        if odd:
            # valid for every s > 0, unlike the small-s expansion
            u = gft.classical_gft("power", kernel.beta, args.dim).without_delta() if kernel.beta % 2 else None
            base = u(s) if u is not None else 0.0
            val = base - gft.odd_dim_vhat(kernel.beta, args.dim, s)[0]
            v = lambda r: np.power(r, kernel.beta) * (1.0 - np.tanh(r))
            ref = base - gft.radial_fourier_quad(v, args.dim, s, 40.0)[0]
        else:
            try:
                val = exp(s)
            except gft.ExpansionRangeError as exc:
                raise CliError(f"error: {exc}", EXIT_CONFIG) from exc
            ref = tr(s)
        rows.append(f"{s:.17g},{val:.17g},{ref:.17g},{val - ref:.3e}")
    print("\n".join(rows))
    return EXIT_OK


def cmd_coeffs(args):
    cfg = load_config(args.config)
    labels = [args.label] if args.label else list(cfg.kernels)
    manifest = {"config": cfg.to_dict(), "kernels": {}}
    texts = []
    for label in labels:
        if label not in cfg.kernels:
            raise ConfigError(f"no kernel labelled {label!r}")
        try:
            qlf, cls, M, b = build_qlf(cfg, label)
        except strangfix.InconsistentSystemError as exc:
            raise CliError(f"error: inconsistent moment system ({exc}); row {exc.row}", EXIT_NUMERIC) from exc
        seq = qlf.coeffs
        manifest["kernels"][label] = {
            "sigma": cls.order,
            "case": cls.case.value,
            "M": M,
            "b_vector": {str(k): v for k, v in b.items()},
            "n_coeffs": len(seq),
            "sum": float(seq.total()),
            "symmetric": bool(seq.is_symmetric()),
        }
        texts.append((label, seq.to_text()))
    if args.out and len(texts) > 1:
        for label, text in texts:
            _write_text(f"{args.out}.{label}.txt", text)
    elif args.out:
        _write_text(args.out, texts[0][1])
    else:
        for label, text in texts:
            print(f"# kernel {label}")
            sys.stdout.write(text)
    if args.manifest:
        _write_text(args.manifest, json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def cmd_glf_series(args):
    try:
        if args.kind == "g":
            seq = strangfix.g_series_coeffs(args.exponent, args.dim, args.variant, args.n_coeffs,
                                            args.fft_size, normalization=args.scale)
        else:
            if args.dim != 1:
                raise ConfigError("the reciprocal-log series is one-dimensional")
            seq = strangfix.h_series_coeffs(args.d0, args.n_coeffs, args.fft_size)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.out:
        _write_text(args.out, seq.to_text())
    header = "j,coeff" + (",closed_form,difference" if args.oracle else "")
    lines = [header]
    if args.oracle and not (args.kind == "g" and args.dim == 1 and args.variant == "cos"):
        raise ConfigError("the closed-form oracle covers the 1-D cos-variant G series only")
    for k in range(0, args.head):
        if seq.dim == 1:
            v = seq[(k,)]
        else:
            v = seq[(k,) + (0,) * (seq.dim - 1)]
        row = f"{k},{v:.17g}"
        if args.oracle:
            ref = float(strangfix.g_series_closed_form(args.exponent, [k], args.scale)[0])
            row += f",{ref:.17g},{v - ref:.3e}"
        lines.append(row)
    print("\n".join(lines))
    if seq.dim == 1 and args.kind == "g":
        log.info("fitted decay exponent %.4f", strangfix.fitted_decay_exponent(seq))
    return EXIT_OK


def cmd_experiment(args):
    overrides = {"h": args.h}
    cfg = load_config(args.config, overrides)
    if args.grid_num is not None:
        cfg.grid["num"] = args.grid_num
    try:
        manifest = run_experiment(cfg, out_dir=args.out)
    except strangfix.InconsistentSystemError as exc:
        raise CliError(f"error: inconsistent moment system ({exc})", EXIT_NUMERIC) from exc
    except FloatingPointError as exc:
        raise CliError(f"error: {exc}", EXIT_NUMERIC) from exc
    print(f"{cfg.name}: h={cfg.h:g} target={cfg.target}")
    print(f"{'kernel':<8}{'sigma':>7}{'M':>4}{'max error':>14}{'rmse':>14}{'reference':>12}")
    refs = (cfg.check or {}).get("reference", {})
    for label, run in manifest.runs.items():
        rep = run["report"]
        ref = refs.get(label)
        print(f"{label:<8}{run['sigma']:>7g}{run['M']:>4d}{rep['max_error']:>14.6e}{rep['rmse']:>14.6e}"
              f"{(f'{ref:.4g}' if ref is not None else '-'):>12}")
    if args.out:
        print(f"artifacts written to {args.out}")
    if args.check:
        if cfg.check is None:
            raise ConfigError("--check needs a [check] table in the config")
        for name, item in manifest.check["items"].items():
            print(f"{'PASS' if item['passed'] else 'FAIL'} {name}: "
                  + ", ".join(f"{k}={v}" for k, v in item.items() if k != "passed"))
        if not manifest.check["passed"]:
            return EXIT_CHECK
    return EXIT_OK


def cmd_verify(args):
    from .verify import run_suites

    try:
        results = run_suites(args.suite)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="tanhqi", description="Quasi-interpolation with tanh radial kernels")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="print a transform expansion or compare values")
    t.add_argument("--kernel", required=True, help="family name, e.g. power, tanhpow, genmq")
    t.add_argument("--beta", type=float)
    t.add_argument("--alpha", type=float)
    t.add_argument("--c", type=float)
    t.add_argument("--mq-beta", dest="mq_beta", type=float)
    t.add_argument("--gamma", dest="mq_gamma", type=float, help="multiquadric exponent")
    t.add_argument("--correction", type=float)
    t.add_argument("--dim", type=int, default=1)
    t.add_argument("--order", type=int, default=4)
    t.add_argument("--at", type=float, nargs="+", help="evaluate at these s values")
    t.add_argument("--route", choices=["auto", "odd-dim"], default="auto",
                   help="reference used for the oracle column")
    t.set_defaults(func=cmd_transform)

    c = sub.add_parser("coeffs", help="solve for quasi-Lagrange coefficients")
    c.add_argument("config", help=f"example name ({', '.join(EXAMPLES)}) or TOML config")
    c.add_argument("--label", help="only this kernel")
    c.add_argument("--out", help="coefficient file (one per kernel when several)")
    c.add_argument("--manifest", help="JSON manifest path")
    c.set_defaults(func=cmd_coeffs)

    g = sub.add_parser("glf-series", help="Fourier coefficients of a periodic cancelling factor")
    g.add_argument("--kind", choices=["g", "h"], default="g")
    g.add_argument("--exponent", type=float, default=3.0)
    g.add_argument("--d0", type=float, default=1.0)
    g.add_argument("--dim", type=int, default=1)
    g.add_argument("--variant", choices=["cos", "sin"], default="cos")
    g.add_argument("--n-coeffs", dest="n_coeffs", type=int, default=2 ** 11)
    g.add_argument("--fft-size", dest="fft_size", type=int)
    g.add_argument("--scale", type=float, default=1.0)
    g.add_argument("--head", type=int, default=10)
    g.add_argument("--oracle", action="store_true", help="compare with the gamma-ratio closed form")
    g.add_argument("--out")
    g.set_defaults(func=cmd_glf_series)

    e = sub.add_parser("experiment", help="run an example or a TOML experiment")
    e.add_argument("config", help=f"example name ({', '.join(EXAMPLES)}) or TOML config")
    e.add_argument("--out", help="directory for CSV curves and manifest.json")
    e.add_argument("--h", type=float, help="override the lattice spacing")
    e.add_argument("--grid-num", dest="grid_num", type=int)
    e.add_argument("--check", action="store_true", help="exit 4 unless reference errors are met")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="run the oracle suites")
    v.add_argument("--suite", action="append", help="restrict to a suite (repeatable)")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    np.seterr(over="ignore", under="ignore")
    try:
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
