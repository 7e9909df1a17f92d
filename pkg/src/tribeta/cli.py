"""Command line front end.

Each subcommand writes its artifacts into ``--out`` (default: $TRIBETA_OUT,
else the working directory).  CSV files start with a ``# {json}`` line and
JSON files carry a ``config`` object, so every artifact names the kind, n,
beta, m, seed and package version that produced it.  ``--format png``
additionally renders a matplotlib figure next to the data file.

Exit codes: 0 success, 1 numerical failure (diagnostic JSON on stdout),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .ensembles import EnsembleKind, read_matrix_csv, sample_scaled, write_matrix_csv
from .randsrc import RngStream

OUT_ENV = "TRIBETA_OUT"
SCHEMA_VERSION = 1
KINDS = ["T", "S", "Ttilde"]


# ------------------------------------------------------------ output


def _config(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"func", "out", "workers"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg["version"] = __version__
    cfg["schema"] = SCHEMA_VERSION
    return cfg


def _out_dir(args: argparse.Namespace) -> Path:
    p = Path(args.out or os.environ.get(OUT_ENV, "."))
    p.mkdir(parents=True, exist_ok=True)
    return p


def _num(x: Any) -> Any:
    """JSON-safe floats: repr-exact, inf/nan as strings."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def write_json(path: Path, args: argparse.Namespace, payload: dict[str, Any]) -> Path:
    body = {"config": _config(args), **_num(payload)}
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_csv(path: Path, args: argparse.Namespace, columns: list[str], rows: np.ndarray | list) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(_config(args), sort_keys=True) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")
    return path


def _cell(v: Any) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def _want_png(args: argparse.Namespace) -> bool:
    return args.format == "png"


def _title(args: argparse.Namespace) -> str:
    parts = [args.cmd]
    for key in ("kind", "n", "beta", "m", "seed"):
        if getattr(args, key, None) is not None:
            parts.append(f"{key}={getattr(args, key)}")
    return " ".join(parts)


def _emit(args: argparse.Namespace, paths: list[Path], summary: dict[str, Any] | None = None) -> None:
    out = {"status": "ok", "artifacts": [str(p) for p in paths]}
    if summary:
        out.update(_num(summary))
    print(json.dumps(out, sort_keys=True))


# ------------------------------------------------------------ subcommands


def cmd_spectrum(args: argparse.Namespace) -> int:
    from .simulate import both_solvers, sample_spectra

    summary: dict[str, Any] = {}
    if args.solver == "both":
        z, gaps = both_solvers(args.kind, args.n, args.beta, args.m, args.seed, args.workers)
        summary["max_solver_gap"] = float(gaps.max())
    else:
        z = sample_spectra(args.kind, args.n, args.beta, args.m, args.seed, args.solver, args.workers)
    d = _out_dir(args)
    rows = [(j, v.real, v.imag) for j in range(z.shape[0]) for v in z[j]]
    paths = [write_csv(d / "spectrum.csv", args, ["realization", "re", "im"], rows)]
    if _want_png(args):
        from .density import support_radius
        from .plotting import spectrum_figure

        paths.append(spectrum_figure(z, d / "spectrum.png", _title(args), support_radius()))
    _emit(args, paths, summary)
    return 0


def cmd_radial_hist(args: argparse.Namespace) -> int:
    from .density import limiting_density, limiting_flat_density, radial_histogram, support_radius
    from .simulate import sample_spectra

    z = sample_spectra(args.kind, args.n, args.beta, args.m, args.seed, args.solver, args.workers)
    h = radial_histogram(np.abs(z), bins=args.bins, mode=args.mode)
    curve = limiting_flat_density if args.mode == "flat" else limiting_density
    lim = np.asarray(curve(h.centres))
    d = _out_dir(args)
    rows = list(zip(h.edges[:-1], h.edges[1:], h.counts.astype(int), h.density, lim))
    paths = [write_csv(d / "radial_hist.csv", args, ["r_lo", "r_hi", "count", "density", "limit"], rows)]
    if _want_png(args):
        from .plotting import radial_histogram_figure

        r = np.linspace(1e-4, h.edges[-1], 400)
        paths.append(radial_histogram_figure(h, r, np.asarray(curve(r)), d / "radial_hist.png", _title(args)))
    _emit(args, paths, {"support_radius": support_radius()})
    return 0


def _ks_common(args: argparse.Namespace, kind: str, name: str) -> int:
    from .simulate import ks_experiment

    rep = ks_experiment(kind, args.n, args.beta, args.m, args.seed, args.solver, args.workers)
    d = _out_dir(args)
    paths = [write_json(d / f"{name}.json", args, rep.as_dict())]
    if _want_png(args):
        from .density import limiting_flat_density, radial_histogram
        from .plotting import radial_histogram_figure

        if kind == "ginibre":
            h = radial_histogram(np.abs(rep.eigenvalues), bins=args.bins, r_max=1.05)
            r = np.linspace(1e-4, 1.05, 400)
            curve = np.where(r <= 1.0, 1.0, 0.0)
        else:
            h = radial_histogram(np.abs(rep.eigenvalues), bins=args.bins)
            r = np.linspace(1e-4, h.edges[-1], 400)
            curve = limiting_flat_density(r)
        paths.append(radial_histogram_figure(h, r, curve, d / f"{name}.png", _title(args)))
    _emit(args, paths, {"d": rep.d})
    return 0


def cmd_ks(args: argparse.Namespace) -> int:
    return _ks_common(args, args.kind, "ks")


def cmd_ginibre_ref(args: argparse.Namespace) -> int:
    args.kind = "ginibre"
    return _ks_common(args, "ginibre", "ginibre_ref")


def cmd_moments(args: argparse.Namespace) -> int:
    """Empirical E|z|^{2k} against 2 pi times the radial moments of the limit."""
    from .density import radial_moment
    from .simulate import sample_spectra

    z = sample_spectra(args.kind, args.n, args.beta, args.m, args.seed, args.solver, args.workers)
    r2 = np.abs(z.ravel()) ** 2
    rows = []
    for k in range(1, args.kmax + 1):
        emp = float(np.mean(r2**k))
        lim = 2 * np.pi * radial_moment(k)
        rows.append({"k": k, "empirical": emp, "limit": lim, "rel_diff": abs(emp - lim) / lim})
    d = _out_dir(args)
    paths = [write_json(d / "moments.json", args, {"moments": rows})]
    if _want_png(args):
        from .plotting import curves_figure

        ks = np.arange(1, args.kmax + 1, dtype=float)
        curves = {"empirical": (ks, np.array([r["empirical"] for r in rows])), "limit": (ks, np.array([r["limit"] for r in rows]))}
        paths.append(curves_figure(curves, d / "moments.png", _title(args), "k", "E|z|^(2k)", loglog=True))
    _emit(args, paths)
    return 0


def cmd_charpoly(args: argparse.Namespace) -> int:
    from .charpoly import coeffs_recurrence

    d = _out_dir(args)
    paths = []
    if args.input:
        m, meta = read_matrix_csv(args.input)
        args.n = m.n
        args.source = {k: meta[k] for k in sorted(meta)}
    else:
        m = sample_scaled(args.kind, args.n, args.beta, RngStream(args.seed, 0))
        args.source = "sampled"
        paths.append(d / "matrix.csv")
        write_matrix_csv(m, paths[-1], _config(args))
    c = coeffs_recurrence(m.btilde())
    payload = {"n": m.n, "kappa": [[v.real, v.imag] for v in c.kappa]}
    paths.append(write_json(d / "charpoly.json", args, payload))
    _emit(args, paths)
    return 0


def cmd_roundtrip(args: argparse.Namespace) -> int:
    from .spectralmap import roundtrip_experiment

    ns = list(range(args.n_min, args.n + 1))
    rep = roundtrip_experiment(ns, args.m, args.beta, args.seed)
    d = _out_dir(args)
    paths = [write_json(d / "roundtrip.json", args, rep.as_dict())]
    _emit(args, paths, {"max_error": rep.max_error})
    return 0


def cmd_pseudospec(args: argparse.Namespace) -> int:
    from .eigensolve import eigenvalues_qr
    from .pseudospectrum import default_box, disc_vs_grid_check, lipschitz_violations, nesting_holds

    m = sample_scaled(args.kind, args.n, args.beta, RngStream(args.seed, 0))
    box = default_box(float(np.max(np.abs(eigenvalues_qr(m).eigenvalues))))
    chk = disc_vs_grid_check(m, args.kind, args.n, args.beta, args.eps, box, (args.res, args.res), True, args.workers)
    g = chk.grid
    d = _out_dir(args)
    rows = [(x, y, g.smin[i, k]) for i, y in enumerate(g.ys) for k, x in enumerate(g.xs)]
    paths = [write_csv(d / "pseudospec.csv", args, ["x", "y", "smin"], rows)]
    eps_levels = [args.eps * f for f in (0.25, 0.5, 1.0, 2.0, 4.0)]
    info = chk.as_dict() | {"lipschitz_violations": lipschitz_violations(g), "nested": nesting_holds(g, eps_levels), "box": list(box)}
    paths.append(write_json(d / "pseudospec.json", args, info))
    if _want_png(args):
        from .plotting import pseudospectrum_figure

        lam = eigenvalues_qr(m).eigenvalues
        paths.append(pseudospectrum_figure(g.xs, g.ys, g.smin, lam, d / "pseudospec.png", _title(args), (chk.disc.center, chk.disc.radius)))
    _emit(args, paths, {"mismatch_cells": chk.mismatch_cells})
    return 0


def cmd_condnum(args: argparse.Namespace) -> int:
    from .pseudospectrum import condition_table

    kinds = KINDS + ["ginibre"] if args.kind == "all" else [args.kind]
    cols = ["kind", "n", "beta", "m", "mean", "median", "min", "max", "failures", "beyond_precision"]
    rows = []
    for k in kinds:
        s = condition_table(k, args.n, args.m, args.beta, args.seed, args.workers).as_dict()
        rows.append([s[c] for c in cols])
    d = _out_dir(args)
    paths = [write_csv(d / "condnum.csv", args, cols, rows)]
    if _want_png(args):
        from .plotting import bar_figure

        paths.append(bar_figure([str(r[0]) for r in rows], [float(r[5]) for r in rows], d / "condnum.png", _title(args), "median kappa(R)"))
    _emit(args, paths)
    return 0


def cmd_lowtemp(args: argparse.Namespace) -> int:
    from .lowtemp import convergence_rate, coupled_family, eigenvector_formula_residual
    from .eigensolve import eigenvalues_qr

    betas = sorted(args.betas)
    draw = coupled_family(args.limit_kind, args.n, betas, RngStream(args.seed, 0))
    rep = convergence_rate(draw)
    lim = draw.limit(betas[-1])
    res = max(eigenvector_formula_residual(lim, lam) for lam in eigenvalues_qr(lim).eigenvalues)
    d = _out_dir(args)
    paths = [write_json(d / "lowtemp.json", args, rep.as_dict() | {"eigenvector_formula_residual": res})]
    if _want_png(args):
        from .plotting import curves_figure

        paths.append(curves_figure({"max matched distance": (rep.betas, rep.distances)}, d / "lowtemp.png", _title(args), "beta", "distance", loglog=True))
    _emit(args, paths, {"slope": rep.slope})
    return 0


def cmd_n2_density(args: argparse.Namespace) -> int:
    from .exact_n2 import LowBetaWarning, n2_density

    kinds = KINDS if args.kind == "all" else [args.kind]
    rows = []
    curves = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LowBetaWarning)
        for k in kinds:
            for beta in args.betas:
                dens = n2_density(k, beta)
                r = np.linspace(0.0, dens.support_hint(), args.points)
                rho = np.array([float(dens(x)) for x in r])
                rows += [(EnsembleKind.parse(k).value, beta, ri, v) for ri, v in zip(r, rho)]
                curves[f"{k} beta={beta:g}"] = (r, rho)
    d = _out_dir(args)
    paths = [write_csv(d / "n2_density.csv", args, ["kind", "beta", "r", "rho"], rows)]
    if _want_png(args):
        from .plotting import curves_figure

        paths.append(curves_figure(curves, d / "n2_density.png", _title(args), "r", "rho(r)"))
    _emit(args, paths)
    return 0


# ------------------------------------------------------------ parser


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tribeta", description="Experiments on tridiagonal non-Hermitian beta ensembles.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=_positive_int, default=100, help="matrix size")
    common.add_argument("--beta", type=_positive_float, default=2.0, help="inverse temperature")
    common.add_argument("--m", type=_positive_int, default=10, help="number of realizations")
    common.add_argument("--seed", type=_seed, default=0, help="base seed; realization j uses stream j")
    common.add_argument("--solver", choices=["qr", "aberth", "both"], default="aberth")
    common.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
    common.add_argument("--format", choices=["csv", "json", "png"], default="csv", help="png also renders a figure")
    common.add_argument("--workers", type=_positive_int, default=None, help="thread count; results do not depend on it")
    kind_arg = {"choices": KINDS, "default": "T", "help": "ensemble"}

    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name: str, func: Callable[[argparse.Namespace], int], help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    add("spectrum", cmd_spectrum, "eigenvalues of scaled draws as CSV").add_argument("--kind", **kind_arg)
    p = add("radial-hist", cmd_radial_hist, "radial histogram against the limiting density")
    p.add_argument("--kind", **kind_arg)
    p.add_argument("--bins", type=_positive_int, default=100)
    p.add_argument("--mode", choices=["flat", "area"], default="flat")
    p = add("ks", cmd_ks, "KS distance to the limiting flat radial CDF")
    p.add_argument("--kind", **kind_arg)
    p.add_argument("--bins", type=_positive_int, default=100)
    p = add("ginibre-ref", cmd_ginibre_ref, "KS distance of Ginibre spectra to the uniform disc")
    p.add_argument("--bins", type=_positive_int, default=100)
    p = add("moments", cmd_moments, "even radial moments against the limit")
    p.add_argument("--kind", **kind_arg)
    p.add_argument("--kmax", type=_positive_int, default=6)
    p = add("charpoly", cmd_charpoly, "characteristic polynomial coefficients as JSON")
    p.add_argument("--kind", **kind_arg)
    p.add_argument("--input", default=None, help="matrix CSV; sampled from --kind/--n/--beta/--seed if absent")
    p = add("roundtrip", cmd_roundtrip, "spectral map round-trip residuals")
    p.add_argument("--n-min", dest="n_min", type=_positive_int, default=2, help="draws cycle n through n-min..n")
    p = add("pseudospec", cmd_pseudospec, "s_min grid and the analytic disc")
    p.add_argument("--kind", **kind_arg)
    p.add_argument("--eps", type=_positive_float, default=1e-2)
    p.add_argument("--res", type=_positive_int, default=200)
    p = add("condnum", cmd_condnum, "eigenvector condition numbers")
    p.add_argument("--kind", choices=KINDS + ["ginibre", "all"], default="all")
    p = add("lowtemp", cmd_lowtemp, "low-temperature convergence rate")
    p.add_argument("--limit-kind", dest="limit_kind", choices=["D", "G"], default="D")
    p.add_argument("--betas", type=_positive_float, nargs="+", default=[1e2, 1e4, 1e6])
    p = add("n2-density", cmd_n2_density, "exact n = 2 radial densities as CSV")
    p.add_argument("--kind", choices=KINDS + ["all"], default="all")
    p.add_argument("--betas", type=_positive_float, nargs="+", default=[10.0, 100.0])
    p.add_argument("--points", type=_positive_int, default=200)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "lowtemp" and args.n < 2:
        build_parser().error("lowtemp needs --n >= 2")
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except (ArithmeticError, RuntimeError, ValueError, FloatingPointError) as exc:
        diag = {"status": "error", "error": type(exc).__name__, "message": str(exc), "config": _config(args)}
        print(json.dumps(_num(diag), sort_keys=True))
        return 1


if __name__ == "__main__":
    sys.exit(main())
