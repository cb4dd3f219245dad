"""Command-line interface: ``grfields {eval-cov,sample,krige,validate,bench,compare}``.

Exit codes: 0 success, 1 validation failure, 2 usage or input error.
``FIELDS_THREADS`` caps the native thread pools (BLAS/LAPACK).
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .covariance import (
    GeoTemporalModel,
    Matern,
    MaternParams,
    SchoenbergSeries,
    check_positive_definite,
    covariance_matrix,
    loads_model,
    matern_correlation,
)
from .exceptions import ConfigurationError, GRFError, ModelFormatError, ModelValidationError
from .fieldsim import (
    GridSpec,
    covariance_target,
    discretize_kernel,
    fibonacci_sphere,
    format_csv,
    lag_covariance,
    sphere_samples,
    whittle_kernel,
    whittle_samples,
    write_pgm,
)
from .gmrf import (
    GMRF,
    PrecisionModel,
    build_precision,
    dempster_check,
    gmrf_vs_matern_error,
    grid_graph,
    krige,
    sample,
    spde_precision,
)
from .rng import DEFAULT_SEED, generator
from .sparse import benchmark_factorization, read_matrix_market, write_matrix_market

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad command-line input; reported on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# input helpers


def _float_list(text, what):
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"{what}: expected a comma-separated list of numbers, got {text!r}") from exc
    if not values or not all(math.isfinite(v) for v in values):
        raise UsageError(f"{what}: expected finite numbers, got {text!r}")
    return values


def _int_list(text, what):
    values = _float_list(text, what)
    if any(v != int(v) for v in values):
        raise UsageError(f"{what}: expected integers, got {text!r}")
    return [int(v) for v in values]


def _read_text(path, what):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc.strerror or exc}") from exc


def _load_model(path):
    return loads_model(_read_text(path, "model"))


_GMRF_FIELDS = {"family", "kappa", "m", "tau", "precision"}


def load_gmrf_model(path):
    """``{"family": "spde_gmrf", "kappa", "m", "tau" (optional), "precision" (optional)}``.

    ``precision`` is ``"spde"`` (default: ``tau (kappa^2 I + L)^(2m)``, the
    SPDE solution with operator power ``m``) or ``"operator"``
    (``tau (kappa^2 I + L)^m``).
    """
    try:
        doc = json.loads(_read_text(path, "GMRF model"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("family") != "spde_gmrf":
        raise ModelFormatError("GMRF model must be an object with family 'spde_gmrf'")
    unknown = doc.keys() - _GMRF_FIELDS
    if unknown:
        raise ModelFormatError(f"GMRF model has unknown fields {sorted(unknown)}")
    missing = {"kappa", "m"} - doc.keys()
    if missing:
        raise ModelFormatError(f"GMRF model is missing fields {sorted(missing)}")
    kind = doc.get("precision", "spde")
    if kind not in ("spde", "operator"):
        raise ModelFormatError("GMRF model precision must be 'spde' or 'operator'")
    for key in ("kappa", "m", "tau"):
        if key in doc and (isinstance(doc[key], bool) or not isinstance(doc[key], (int, float))):
            raise ModelFormatError(f"GMRF model field {key} must be a number")
    return PrecisionModel(doc["kappa"], doc["m"], doc.get("tau", 1.0)), kind


def _precision_for(pm, kind, side, dims):
    g = grid_graph(side, dims)
    Q = spde_precision(g, pm) if kind == "spde" else build_precision(g, pm)
    return g, Q


def _read_rows(path, what):
    """Numeric CSV rows, skipping '#' comments and a non-numeric header."""
    rows = []
    for lineno, line in enumerate(_read_text(path, what).splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            if rows:
                raise UsageError(f"{path}:{lineno}: non-numeric row {line!r}")
    if not rows:
        raise UsageError(f"{path}: no data rows")
    if len({len(r) for r in rows}) != 1:
        raise UsageError(f"{path}: rows have different lengths")
    return np.array(rows)


def _emit(text, out, mode="w"):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, mode, encoding="ascii", newline="") as fh:
            fh.write(text)


def _csv(header, rows, metadata=None):
    lines = [f"# {k}={v}" for k, v in (metadata or {}).items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(repr(x) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def _require_format(args, allowed):
    if args.format not in allowed:
        raise UsageError(f"{args.command} does not support --format {args.format}; use one of {allowed}")


# ---------------------------------------------------------------------------
# commands


def cmd_eval_cov(args):
    _require_format(args, ("csv",))
    model = _load_model(args.model)
    lags = _float_list(args.lags, "--lags")
    meta = {"model": Path(args.model).name}
    if isinstance(model, GeoTemporalModel):
        times = _float_list(args.times, "--times")
        rows = [(u, t, float(model(u, t))) for u in lags for t in times]
        text = _csv(["u", "t", "value"], rows, meta)
    elif model.domain == ("sphere",):
        text = _csv(["u", "value"], [(u, float(model(u))) for u in lags], meta)
    elif model.domain == ("euclidean",):
        text = _csv(["lag", "value"], [(r, float(model(r))) for r in lags], meta)
    else:
        raise UsageError(f"eval-cov cannot tabulate a model on domain {model.domain}")
    _emit(text, args.out)
    return EXIT_OK


def _write_samples(samples, args, meta):
    text = format_csv(samples, meta)
    _emit(text, args.out)
    if args.format == "pgm":
        if args.out is None:
            raise UsageError("--format pgm needs --out")
        base = Path(args.out)
        for s in samples:
            name = base.with_suffix(".pgm") if len(samples) == 1 else base.with_name(f"{base.stem}_{s.stream}.pgm")
            write_pgm(s, name)


def cmd_sample(args):
    _require_format(args, ("csv", "pgm", "mm"))
    count = args.samples
    if count < 1:
        raise UsageError("--samples must be at least 1")
    meta = {"seed": args.seed, "samples": count}
    if args.gmrf:
        pm, kind = load_gmrf_model(args.gmrf)
        side = args.grid or 32
        dims = args.dims or 2
        g, Q = _precision_for(pm, kind, side, dims)
        geometry = GridSpec((side,) * dims, 1.0)
        model = GMRF(Q, geometry=geometry, model_id="spde_gmrf")
        meta.update(model="spde_gmrf", kappa=pm.kappa, m=pm.m, tau=pm.tau, precision=kind, grid=side, dims=dims)
        _write_samples(sample(model, args.seed, count), args, meta)
        if args.format == "mm":
            if args.out is None:
                raise UsageError("--format mm needs --out")
            write_matrix_market(Q, Path(args.out).with_suffix(".mtx"), comment=f"spde_gmrf precision, seed {args.seed}")
        return EXIT_OK
    if not args.model:
        raise UsageError("sample needs --model or --gmrf")
    if args.format == "mm":
        raise UsageError("--format mm applies to GMRF sampling (--gmrf)")
    model = _load_model(args.model)
    meta["model"] = Path(args.model).name
    if isinstance(model, Matern):
        p = model.params
        dims = args.dims or p.d
        if dims != p.d:
            raise UsageError(f"--dims {dims} does not match the model dimension d={p.d}")
        side = args.grid or 64
        grid = GridSpec((side,) * dims, args.spacing)
        meta.update(grid=side, dims=dims, spacing=args.spacing)
        _write_samples(whittle_samples(p, grid, args.seed, count), args, meta)
        return EXIT_OK
    if isinstance(model, SchoenbergSeries):
        if args.format == "pgm":
            raise UsageError("--format pgm applies to 2-D grid samples")
        if args.points:
            points = _read_rows(args.points, "points")
        elif model.dim == 2:
            points = fibonacci_sphere(args.grid or 100)
        else:
            raise UsageError("sphere sampling on S^d with d != 2 needs --points")
        if points.shape[1] != model.dim + 1:
            raise UsageError(f"points must have {model.dim + 1} coordinates for S^{model.dim}")
        _write_samples(sphere_samples(model, points, args.seed, count), args, meta)
        return EXIT_OK
    raise UsageError("sample supports matern and schoenberg models (or --gmrf)")


def cmd_krige(args):
    _require_format(args, ("csv",))
    if args.gmrf:
        pm, kind = load_gmrf_model(args.gmrf)
        _, Q = _precision_for(pm, kind, args.grid or 32, args.dims or 2)
    elif args.precision:
        Q = read_matrix_market(args.precision)
    else:
        raise UsageError("krige needs --gmrf or --precision")
    if not args.observed:
        raise UsageError("krige needs --observed")
    obs_rows = _read_rows(args.observed, "observations")
    if obs_rows.shape[1] != 2 or np.any(obs_rows[:, 0] != np.round(obs_rows[:, 0])):
        raise UsageError("observations must be 'vertex,value' rows with integer vertices")
    observed = {int(v): float(x) for v, x in obs_rows}
    if len(observed) != obs_rows.shape[0]:
        raise UsageError("a vertex is observed more than once")
    if args.targets:
        targets = _int_list(args.targets, "--targets")
    else:
        targets = [v for v in range(Q.n) if v not in observed]
    mean, var = krige(GMRF(Q), observed, targets)
    rows = [(t, float(m), float(v)) for t, m, v in zip(targets, mean, var)]
    _emit(_csv(["vertex", "mean", "variance"], rows, {"observed": len(observed)}), args.out)
    return EXIT_OK


def _random_points(rng, model, n):
    domain = model.domain
    if domain[0] == "euclidean":
        d = model.params.d if isinstance(model, Matern) else 2
        spatial = rng.uniform(0.0, 1.0, size=(n, d))
    else:
        dim = model.series.dim if isinstance(model, GeoTemporalModel) else _sphere_dim(model)
        v = rng.standard_normal((n, dim + 1))
        spatial = v / np.linalg.norm(v, axis=1, keepdims=True)
    if len(domain) == 2:
        return (spatial, rng.uniform(0.0, 2.0, size=n)), "spacetime"
    return spatial, ("euclidean" if domain[0] == "euclidean" else "sphere_cosine")


def _sphere_dim(model):
    if isinstance(model, SchoenbergSeries):
        return model.dim
    for f in getattr(model, "factors", ()):
        if isinstance(f, SchoenbergSeries):
            return f.dim
    return 2


def _dempster_battery(Q, report, max_pairs=2000):
    n = Q.n
    try:
        S = np.linalg.inv(Q.to_dense())
        GMRF(Q)
    except (GRFError, np.linalg.LinAlgError) as exc:
        report.append(("FAIL", f"precision is not positive definite: {exc}"))
        return
    report.append(("PASS", f"precision of order {n} factors"))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)][:max_pairs]
    bad = 0
    for i, j in pairs:
        rest = [k for k in range(n) if k not in (i, j)]
        idx = [i, j]
        block = S[np.ix_(idx, idx)]
        if rest:
            block = block - S[np.ix_(idx, rest)] @ np.linalg.solve(S[np.ix_(rest, rest)], S[np.ix_(rest, idx)])
        if dempster_check(Q, i, j) != (abs(block[0, 1]) <= 1e-10 * max(1.0, abs(block).max())):
            bad += 1
    status = "PASS" if bad == 0 else "FAIL"
    report.append((status, f"conditional independence agrees with Q zeros on {len(pairs) - bad}/{len(pairs)} pairs"))


def cmd_validate(args):
    _require_format(args, ("csv",))
    if not (args.model or args.matrix or args.precision or args.gmrf):
        raise UsageError("validate needs --model, --matrix, --precision or --gmrf")
    report = []
    if args.model:
        try:
            model = _load_model(args.model)
        except ModelValidationError as exc:
            where = f" (coefficient index {exc.index})" if getattr(exc, "index", None) is not None else ""
            report.append(("FAIL", f"model {Path(args.model).name}: {exc}{where}"))
            model = None
        if model is not None:
            report.append(("PASS", f"model {Path(args.model).name} is well formed"))
            rng = generator(args.seed, stream=0)
            trials = args.samples if args.samples > 1 else 10
            worst = math.inf
            failed = 0
            for _ in range(trials):
                pts, metric = _random_points(rng, model, 30)
                res = check_positive_definite(covariance_matrix(model, pts, metric))
                worst = min(worst, res.min_eigenvalue)
                failed += not res.positive_definite
            status = "PASS" if failed == 0 else "FAIL"
            report.append((status, f"{trials} random Gram matrices positive definite; min eigenvalue {worst:.3e}"))
    if args.matrix:
        M = read_matrix_market(args.matrix).to_dense() if args.matrix.endswith(".mtx") else _read_rows(args.matrix, "matrix")
        res = check_positive_definite(M)
        status = "PASS" if res.positive_definite else "FAIL"
        report.append((status, f"matrix {Path(args.matrix).name}: min eigenvalue {res.min_eigenvalue:.6e}, min pivot {res.min_pivot:.6e}"))
    if args.precision:
        _dempster_battery(read_matrix_market(args.precision), report)
    if args.gmrf:
        pm, kind = load_gmrf_model(args.gmrf)
        _, Q = _precision_for(pm, kind, args.grid or 8, args.dims or 2)
        _dempster_battery(Q, report)
    text = "".join(f"{status} {msg}\n" for status, msg in report)
    _emit(text, args.out)
    return EXIT_OK if all(s == "PASS" for s, _ in report) else EXIT_INVALID


def cmd_bench(args):
    _require_format(args, ("csv",))
    sizes = _int_list(args.sizes, "--sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise UsageError("--sizes must be strictly increasing")
    backends = ("sparse", "dense") if args.backend == "both" else (args.backend,)
    result = benchmark_factorization(sizes, backends, repeats=args.repeats)
    rows = [(r.n, r.backend, float(r.seconds), r.nnz) for r in result.rows]

    def fmt(s):
        return "NA" if s is None else f"{s:.3f}"

    summary = f"slope_sparse={fmt(result.slopes.get('sparse'))}, slope_dense={fmt(result.slopes.get('dense'))}"
    text = _csv(["n", "backend", "seconds", "nnz"], rows, {"repeats": args.repeats}) + f"# {summary}\n"
    _emit(text, args.out)
    if args.out is not None:
        print(summary)
    return EXIT_OK


def _compare_gmrf(args, params):
    if params.d != 2:
        raise UsageError(f"the GMRF comparison runs in d=2; the model has d={params.d}")
    if args.gmrf:
        pm, kind = load_gmrf_model(args.gmrf)
        if kind != "spde":
            raise UsageError("the GMRF comparison needs precision 'spde'")
        if pm.nu(2) != params.nu:
            raise UsageError(
                f"inconsistent smoothness: model nu={params.nu!r} but GMRF m={pm.m} implies nu={pm.nu(2)!r}"
            )
        if pm.kappa != params.kappa:
            raise UsageError(f"inconsistent scale: model kappa={params.kappa!r} but GMRF kappa={pm.kappa!r}")
    else:
        m = (params.nu + 1.0) / 2.0
        if m != int(m) or int(m) not in (1, 2):
            raise UsageError(f"model nu={params.nu!r} has no integer GMRF power (needs nu = 2m - 1, m in {{1, 2}})")
        pm = PrecisionModel(params.kappa, int(m))
    side = args.grid or 32
    if args.lags:
        lags = _float_list(args.lags, "--lags")
    else:
        lags = list(range(int(params.range / 2.0) + 1))
    table = gmrf_vs_matern_error(side, pm, lags)
    rows = [(r.lag, r.analytic, r.estimated, r.max_abs_error, 0.0) for r in table.rows]
    meta = {
        "route": "gmrf",
        "nu": params.nu,
        "kappa": params.kappa,
        "m": pm.m,
        "grid": side,
        "range": repr(table.range),
        "ring": table.ring,
        "correlation_at_range": repr(table.correlation_at_range),
        "boundary_max_abs_error": repr(max((r.boundary_max_abs_error for r in table.rows), default=0.0)),
    }
    return _csv(["lag", "analytic", "estimated", "abs_error", "se"], rows, meta)


def _compare_whittle(args, params):
    side = args.grid or 64
    grid = GridSpec((side,) * params.d, args.spacing)
    lags = _int_list(args.lags, "--lags") if args.lags else list(range(10))
    offsets = [(lag,) + (0,) * (params.d - 1) for lag in lags]
    kvals = discretize_kernel(whittle_kernel(params), grid)
    target = covariance_target(kvals, grid, offsets)
    count = args.samples if args.samples > 1 else 2000
    est = lag_covariance(whittle_samples(params, grid, args.seed, count), offsets)
    rows = [
        (float(lag), float(t), float(e), float(abs(e - t)), float(s))
        for lag, t, e, s in zip(lags, target, est.estimate, est.se)
    ]
    meta = {"route": "whittle", "seed": args.seed, "samples": count, "grid": side, "spacing": args.spacing}
    return _csv(["lag", "analytic", "estimated", "abs_error", "se"], rows, meta)


def cmd_compare(args):
    _require_format(args, ("csv",))
    if not args.model:
        raise UsageError("compare needs --model (a matern model)")
    model = _load_model(args.model)
    if not isinstance(model, Matern):
        raise UsageError("compare needs a matern model")
    if args.route == "gmrf":
        text = _compare_gmrf(args, model.params)
    else:
        text = _compare_whittle(args, model.params)
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {
    "eval-cov": cmd_eval_cov,
    "sample": cmd_sample,
    "krige": cmd_krige,
    "validate": cmd_validate,
    "bench": cmd_bench,
    "compare": cmd_compare,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="JSON covariance model")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--format", choices=("csv", "mm", "pgm"), default="csv")

    parser = argparse.ArgumentParser(prog="grfields", description="Gaussian random fields with and without covariances.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-cov", parents=[common], help="tabulate a covariance model")
    p.add_argument("--lags", default="0,1,2,3,4,5", help="lags (Euclidean) or cosines (sphere)")
    p.add_argument("--times", default="0", help="time lags for sphere x time models")

    p = sub.add_parser("sample", parents=[common], help="draw fields")
    p.add_argument("--gmrf", help="JSON spde_gmrf model (sample a GMRF on a grid)")
    p.add_argument("--grid", type=int, help="cells per axis (sphere: number of points)")
    p.add_argument("--dims", type=int, choices=(1, 2))
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--points", help="CSV of unit vectors for sphere sampling")

    p = sub.add_parser("krige", parents=[common], help="condition a GMRF on observations")
    p.add_argument("--gmrf", help="JSON spde_gmrf model on a grid")
    p.add_argument("--precision", help="precision matrix in Matrix Market format")
    p.add_argument("--grid", type=int)
    p.add_argument("--dims", type=int, choices=(1, 2))
    p.add_argument("--observed", help="CSV of vertex,value rows")
    p.add_argument("--targets", help="comma-separated target vertices (default: all unobserved)")

    p = sub.add_parser("validate", parents=[common], help="positive-definiteness and conditional-independence checks")
    p.add_argument("--matrix", help="Gram matrix (Matrix Market .mtx or dense CSV)")
    p.add_argument("--precision", help="precision matrix in Matrix Market format")
    p.add_argument("--gmrf", help="JSON spde_gmrf model, checked on a small grid")
    p.add_argument("--grid", type=int)
    p.add_argument("--dims", type=int, choices=(1, 2))
    p.add_argument("--samples", type=int, default=10, help="number of random Gram matrices")

    p = sub.add_parser("bench", parents=[common], help="sparse vs dense factorization timing")
    p.add_argument("--sizes", default="256,576,1024,2304,4096", help="matrix orders n = side^2")
    p.add_argument("--backend", choices=("sparse", "dense", "both"), default="both")
    p.add_argument("--repeats", type=int, default=5)

    p = sub.add_parser("compare", parents=[common], help="analytic vs estimated correlation tables")
    p.add_argument("--route", choices=("gmrf", "whittle"), default="gmrf")
    p.add_argument("--gmrf", help="JSON spde_gmrf model (gmrf route)")
    p.add_argument("--grid", type=int)
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--lags")
    p.add_argument("--samples", type=int, default=2000)
    return parser


def _thread_limit():
    raw = os.environ.get("FIELDS_THREADS")
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise UsageError(f"FIELDS_THREADS must be a positive integer, got {raw!r}")
    return value


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        limit = _thread_limit()
        with threadpool_limits(limits=limit):
            return COMMANDS[args.command](args)
    except (UsageError, GRFError, ValueError, OSError) as exc:
        print(f"grfields {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
