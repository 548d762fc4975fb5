"""Command-line entry point: ``hslab {catalog,spectrum,flow,report,verify}``.

Exit codes: 0 success, 2 invalid configuration, 3 verification failure,
4 focal blow-up during a flow not marked ``--expect-focal``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import verify as _verify
from .ambient import AmbientSpace, SpaceKind
from .classify import build_report, classify_pseudo_einstein
from .errors import FocalPointEncountered, HSLabError, InvalidArgumentError
from .models import catalog, mean_curvature, parse_family, spectrum_at
from .riccati import BLOWUP_NORM, flow_closed_form, flow_numeric
from .spectral import CLUSTER_TOL, HypersurfacePoint, SpectralData, extract_spectral_data, hopf_class_of, to_point

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_FOCAL = 4

SPACES = {"CHn": SpaceKind.COMPLEX_HYPERBOLIC, "CPn": SpaceKind.COMPLEX_PROJECTIVE,
          "HHn": SpaceKind.QUATERNIONIC_HYPERBOLIC}


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


@dataclass(frozen=True)
class RunConfig:
    command: str
    space: AmbientSpace | None = None
    family: str | None = None
    k: int | None = None
    grid: tuple[float, float, int] | None = None
    adapted_tol: float = 1e-12
    cluster_tol: float = CLUSTER_TOL
    pe_tol: float = 1e-9
    rtol: float = 1e-12
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        for name in ("adapted_tol", "cluster_tol", "pe_tol", "rtol"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be positive")
        if self.grid is not None:
            start, stop, count = self.grid
            if count < 1:
                raise InvalidArgumentError("grid count must be at least 1")
            if count > 1 and stop < start:
                raise InvalidArgumentError("grid stop must not precede start")

    def radii(self) -> list[float]:
        if self.grid is None:
            return []
        start, stop, count = self.grid
        if count == 1:
            return [float(start)]
        return [float(x) for x in np.linspace(start, stop, count)]


def parse_grid(text: str) -> tuple[float, float, int]:
    try:
        a, b, c = text.split(":")
        return float(a), float(b), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}") from None


def thread_count() -> int:
    env = os.environ.get("HSLAB_THREADS")
    if env:
        try:
            v = int(env)
        except ValueError:
            raise InvalidArgumentError(f"HSLAB_THREADS must be an integer, got {env!r}") from None
        if v < 1:
            raise InvalidArgumentError("HSLAB_THREADS must be at least 1")
        return v
    return min(8, os.cpu_count() or 1)


def ordered_map(fn, items):
    """Map in parallel, results in input order."""
    items = list(items)
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _emit(text: str, path):
    fh, own = _open_out(path)
    try:
        fh.write(text)
    finally:
        if own:
            fh.close()


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_catalog(cfg: RunConfig) -> int:
    fams = catalog(cfg.space)
    if cfg.fmt == "json":
        _emit(_json_text([f.to_json() for f in fams]), cfg.out)
    else:
        rows = [(f.id, f.focal_set, str(f.radius_domain), ";".join(f.roles)) for f in fams]
        _emit(_csv_text(["family", "focal_set", "radius_domain", "roles"], rows), cfg.out)
    return EXIT_OK


def _family(cfg: RunConfig):
    if cfg.family is None:
        raise InvalidArgumentError("--family is required")
    return parse_family(cfg.space, cfg.family, cfg.k)


def _sweep_radii(cfg: RunConfig, fam) -> list[float]:
    radii = cfg.radii()
    if not fam.is_tube:
        return radii or [0.0]
    if not radii:
        raise InvalidArgumentError("tube families need --r or --r-grid")
    if radii[0] <= 0:
        raise InvalidArgumentError("grid start must be positive for tube families")
    return radii


def spectrum_row(data: SpectralData, r: float, pe_tol: float) -> dict:
    cls = hopf_class_of(data).value if data.epsilon < 0 else None
    rho = sigma = None
    if data.epsilon < 0 and not data.quaternionic and data.n >= 3:
        res = classify_pseudo_einstein(data, pe_tol)
        if res.accepted:
            rho, sigma = res.rho_sigma
    return {
        "r": r,
        "alpha": data.alpha,
        "hopf_class": cls,
        "lambdas": [lam for lam, _ in data.d_spectrum],
        "mults": [m for _, m in data.d_spectrum],
        "mean_curvature": mean_curvature(data),
        "rho": rho,
        "sigma": sigma,
        "spectral": data.to_json(),
    }


def cmd_spectrum(cfg: RunConfig) -> int:
    fam = _family(cfg)
    radii = _sweep_radii(cfg, fam)
    datas = [spectrum_at(fam, r) for r in radii]  # validates radii before any output
    rows = ordered_map(lambda p: spectrum_row(p[0], p[1], cfg.pe_tol), list(zip(datas, radii)))
    if cfg.fmt == "json":
        _emit(_json_text({"family": fam.to_json(), "rows": rows}), cfg.out)
        return EXIT_OK
    width = max(len(r["lambdas"]) for r in rows)
    header = (["r", "alpha", "hopf_class"] + [f"lambda_{i + 1}" for i in range(width)]
              + [f"mult_{i + 1}" for i in range(width)] + ["mean_curvature", "rho", "sigma"])
    pad = lambda xs: list(xs) + [None] * (width - len(xs))  # noqa: E731
    table = [[r["r"], r["alpha"], r["hopf_class"]] + pad(r["lambdas"]) + pad(r["mults"])
             + [r["mean_curvature"], r["rho"], r["sigma"]] for r in rows]
    _emit(_csv_text(header, table), cfg.out)
    return EXIT_OK


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgumentError(f"cannot read {path}: {exc}") from None


def _point_from_json(obj, cfg: RunConfig) -> HypersurfacePoint:
    if "d_spectrum" in obj:
        return to_point(SpectralData.from_json(obj))
    space = AmbientSpace.from_json(obj["space"]) if "space" in obj else cfg.space
    if space is None:
        raise InvalidArgumentError("matrix input needs a space")
    return HypersurfacePoint(space, np.array(obj["A"], dtype=float), obj.get("xi"))


def joint_eigen(A0, K, tol: float = 1e-10):
    """(lambdas, kappas) in a common eigenbasis, or None if A0 and K do not commute."""
    A0 = np.asarray(A0, dtype=float)
    K = np.asarray(K, dtype=float)
    scale = max(1.0, np.max(np.abs(A0)), np.max(np.abs(K)))
    if np.linalg.norm(A0 @ K - K @ A0) > tol * scale * scale:
        return None
    kw, Q = np.linalg.eigh(K)
    lams, kaps = [], []
    i = 0
    while i < len(kw):
        j = i
        while j + 1 < len(kw) and abs(kw[j + 1] - kw[i]) <= 1e-8 * max(1.0, abs(kw[i])):
            j += 1
        B = Q[:, i:j + 1]
        block = B.T @ A0 @ B
        lams.extend(np.linalg.eigvalsh(0.5 * (block + block.T)))
        kaps.extend([float(np.mean(kw[i:j + 1]))] * (j + 1 - i))
        i = j + 1
    return lams, kaps


def cmd_flow(cfg: RunConfig, args) -> int:
    if args.t is None or not args.t > 0:
        raise InvalidArgumentError("--t must be positive")
    if args.steps < 1:
        raise InvalidArgumentError("--steps must be at least 1")
    if args.lambda0 is not None or args.kappa is not None:
        if args.lambda0 is None or args.kappa is None:
            raise InvalidArgumentError("--lambda0 and --kappa go together")
        A0, K = np.array([[args.lambda0]]), np.array([[args.kappa]])
    elif args.input:
        p = _point_from_json(_load_json(args.input), cfg)
        A0, K = p.A, p.K
    else:
        fam = _family(cfg)
        radii = _sweep_radii(cfg, fam)
        if len(radii) != 1:
            raise InvalidArgumentError("flow takes a single --r")
        p = to_point(spectrum_at(fam, radii[0]))
        A0, K = p.A, p.K
    times = [args.t * i / args.steps for i in range(args.steps + 1)]
    reference = joint_eigen(A0, K)
    rows, resid = [], []
    A = A0
    event = None
    prev = 0.0
    for t in times:
        try:
            A = flow_numeric(A, K, t - prev, rtol=cfg.rtol, blowup=BLOWUP_NORM)
        except FocalPointEncountered as exc:
            event = prev + exc.theta
            break
        prev = t
        w = np.linalg.eigvalsh(A)
        rows.append([t] + list(w))
        if reference is None:
            resid.append(None)
        else:
            exact = np.sort([flow_closed_form(l, k, t) for l, k in zip(*reference)])
            resid.append(float(np.max(np.abs(w - exact)) / max(1.0, np.max(np.abs(exact)))))
    d = A0.shape[0]
    header = ["t"] + [f"lambda_{i + 1}" for i in range(d)] + ["closed_form_residual"]
    _emit(_csv_text(header, [r + [e] for r, e in zip(rows, resid)]), cfg.out)
    if event is not None:
        print(f"focal event: theta ~ {fmt(event)}", file=sys.stderr)
        return EXIT_OK if args.expect_focal else EXIT_FOCAL
    return EXIT_OK


def cmd_report(cfg: RunConfig, args) -> int:
    if args.input:
        obj = _load_json(args.input)
        if "d_spectrum" in obj:
            data = SpectralData.from_json(obj)
        else:
            p = _point_from_json(obj, cfg)
            data = extract_spectral_data(p, cluster_tol=cfg.cluster_tol)
    else:
        fam = _family(cfg)
        radii = _sweep_radii(cfg, fam)
        if len(radii) != 1:
            raise InvalidArgumentError("report takes a single --r")
        data = spectrum_at(fam, radii[0])
    rep = build_report(data, adapted_tol=cfg.adapted_tol)
    if cfg.fmt == "json":
        _emit(_json_text(rep.to_json()), cfg.out)
    else:
        _emit(rep.render(), cfg.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite != "all" and _verify.ALIASES.get(args.suite, args.suite) not in _verify.SUITES:
        raise InvalidArgumentError(
            f"unknown suite {args.suite!r}; choose from all, {', '.join(_verify.SUITES)}")
    checks = _verify.run(args.suite, args.n)
    _emit(_verify.format_report(checks), args.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser, family: bool = True):
    p.add_argument("--space", choices=sorted(SPACES), default="CHn")
    p.add_argument("--n", type=int, default=3)
    if family:
        p.add_argument("--family", help="catalog id, e.g. point, complex:2, real, horosphere")
        p.add_argument("--k", type=int, help="focal dimension for complex/quaternionic families")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--r", type=float, help="single radius")
        g.add_argument("--r-grid", type=parse_grid, help="radius sweep start:stop:count")
    p.add_argument("--tol-adapted", type=float, default=1e-12)
    p.add_argument("--tol-cluster", type=float, default=CLUSTER_TOL)
    p.add_argument("--tol-pe", type=float, default=1e-9)
    p.add_argument("--rtol", type=float, default=1e-12)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hslab", description="Hopf hypersurface spectra, flows and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list model families")
    _add_common(p, family=False)

    p = sub.add_parser("spectrum", help="principal curvatures over a radius grid")
    _add_common(p)

    p = sub.add_parser("flow", help="numeric Riccati flow with closed-form residuals")
    _add_common(p)
    p.add_argument("--t", type=float, help="final flow time")
    p.add_argument("--steps", type=int, default=20, help="number of output intervals")
    p.add_argument("--input", help="JSON with spectral data or a matrix A (and space)")
    p.add_argument("--lambda0", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--expect-focal", action="store_true", help="a focal blow-up is not an error")

    p = sub.add_parser("report", help="classification report for one hypersurface point")
    _add_common(p)
    p.add_argument("--input", help="JSON with spectral data or a matrix A (and space)")
    p.set_defaults(format="table")
    for a in p._actions:
        if a.dest == "format":
            a.choices = ("table", "json")

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("suite", help=f"all, {', '.join(_verify.SUITES)}")
    p.add_argument("--n", type=int)
    p.add_argument("--out")
    return parser


def _config(args) -> RunConfig:
    space = None
    if getattr(args, "space", None):
        if args.n < 1:
            raise InvalidArgumentError("--n must be positive")
        space = AmbientSpace(SPACES[args.space], args.n)
    grid = None
    if getattr(args, "r_grid", None) is not None:
        grid = args.r_grid
    elif getattr(args, "r", None) is not None:
        grid = (args.r, args.r, 1)
    return RunConfig(
        command=args.command,
        space=space,
        family=getattr(args, "family", None),
        k=getattr(args, "k", None),
        grid=grid,
        adapted_tol=args.tol_adapted,
        cluster_tol=args.tol_cluster,
        pe_tol=args.tol_pe,
        rtol=args.rtol,
        out=args.out,
        fmt=args.format,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        cfg = _config(args)
        if args.command == "catalog":
            return cmd_catalog(cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "flow":
            return cmd_flow(cfg, args)
        return cmd_report(cfg, args)
    except HSLabError as exc:
        print(f"hslab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
