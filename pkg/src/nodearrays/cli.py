"""Command-line front end.

Subcommands: ``points`` (JSON point set), ``diag``, ``interp`` and
``bergman`` (CSV rows ``n,metric,value``) and ``kergin`` (JSON report).

Exit codes: 0 ok, 2 invalid configuration, 3 degenerate node set,
4 incompatible generator / metric / compact, 5 failed check.
``NODEARRAYS_OUT_DIR`` prefixes relative ``--out`` paths.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import bergman as bg
from . import diagnostics as dg
from . import kergin as kg
from . import meshes as ms
from . import points as pt
from . import pointset
from .interp import holo_convergence_probe, least_squares_error
from .vandermonde import DegenerateStageError, NodeArrayStage, tdiam_estimate

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_INCOMPATIBLE, EXIT_CHECK = 0, 2, 3, 4, 5
OUT_DIR_ENV = "NODEARRAYS_OUT_DIR"

SETS = ("interval", "circle", "square", "real-disk", "simplex", "disk-interval")
GENERATORS = ("approx-fekete", "fekete", "discrete-leja", "padua", "leja-disk", "r-leja",
              "roots", "bos", "intertwine")
# generators tied to one compact; the rest work on any meshed set
_NATIVE = {"padua": "square", "leja-disk": "circle", "roots": "circle", "r-leja": "interval",
           "bos": "real-disk", "intertwine": "disk-interval"}
_COMPACT_ID = {"interval": "interval", "circle": "circle", "square": "square",
               "real-disk": "real_disk_B2", "simplex": "simplex_Sd",
               "disk-interval": "product"}
METRICS = ("lebesgue", "lebesgue_rootscale", "tdiam_estimate", "moment_distance",
           "bm_constant", "bergman_probe", "bos_vdm", "l_functional")
FUNCTIONS = ("runge", "cauchy", "abs", "exp")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    """Validated options shared by the subcommands."""

    compact: str = "interval"
    generator: str = "approx-fekete"
    n_min: int = 1
    n_max: int = 1
    density: int = 8
    eval_density: int = 10
    radial: str = "equilibrium"
    tol: float = 1e-9
    moment_degree: int = 4
    fmt: str = "csv"
    out: Optional[str] = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.compact not in SETS:
            raise CliError(EXIT_CONFIG, f"unknown set {self.compact!r}")
        if self.generator not in GENERATORS:
            raise CliError(EXIT_CONFIG, f"unknown generator {self.generator!r}")
        if self.n_min < 0 or self.n_max < self.n_min:
            raise CliError(EXIT_CONFIG, f"empty degree range {self.n_min}..{self.n_max}")
        if self.tol <= 0:
            raise CliError(EXIT_CONFIG, "tolerances must be positive")
        if self.density < 2 or self.eval_density < 2:
            raise CliError(EXIT_CONFIG, "mesh densities must be >= 2")
        if self.fmt not in ("csv", "json"):
            raise CliError(EXIT_CONFIG, f"unknown format {self.fmt!r}")

    @property
    def degrees(self) -> range:
        return range(self.n_min, self.n_max + 1)


# -- building blocks ------------------------------------------------------------------

def set_mesh(compact: str, n: int, density: int) -> ms.Mesh:
    if compact == "interval":
        return ms.interval_mesh(n, density)
    if compact == "circle":
        return ms.disk_boundary_mesh(n, density)
    if compact == "square":
        return ms.square_mesh(n, density)
    if compact == "real-disk":
        return ms.real_disk_mesh(n, density, density)
    if compact == "simplex":
        return ms.simplex_mesh(n, density)
    if compact == "disk-interval":
        return ms.product_mesh(ms.disk_boundary_mesh(n, density), ms.interval_mesh(n, density))
    raise CliError(EXIT_CONFIG, f"unknown set {compact!r}")


def roots_of_unity_stage(n: int) -> NodeArrayStage:
    z = np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    return NodeArrayStage(z, n, provenance="custom", meta={"method": "roots-of-unity"})


def build_stage(compact: str, generator: str, n: int, density: int = 8,
                radial: str = "equilibrium") -> NodeArrayStage:
    """Degree-n stage of ``generator`` on ``compact``; raises CliError on mismatches."""
    native = _NATIVE.get(generator)
    if native is not None and native != compact:
        raise CliError(EXIT_INCOMPATIBLE, f"generator {generator} only runs on set {native}")
    if generator == "padua":
        if n < 1:
            raise CliError(EXIT_CONFIG, "Padua points need n >= 1")
        return pt.padua_points(n)
    if generator == "leja-disk":
        return pt.leja_disk_exact(n + 1).stage(n)
    if generator == "r-leja":
        return pt.r_leja(n + 1).stage(n)
    if generator == "roots":
        return roots_of_unity_stage(n)
    if generator == "bos":
        if n < 2 or n % 2:
            raise CliError(EXIT_CONFIG, "Bos arrays need an even n >= 2")
        return pt.bos_array(n, pt.RadialDistribution.named(radial))
    if generator == "intertwine":
        return pt.intertwine([pt.leja_disk_exact(n + 1), pt.r_leja(n + 1)], n)
    mesh = set_mesh(compact, n, density)
    if generator == "approx-fekete":
        return pt.approx_fekete_greedy(mesh, n)
    if generator == "fekete":
        try:
            return pt.fekete_bruteforce(mesh, n)
        except DegenerateStageError:
            raise
        except ValueError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from exc
    if generator == "discrete-leja":
        return pt.discrete_leja(mesh, n).stage(n)
    raise CliError(EXIT_CONFIG, f"unknown generator {generator!r}")


def _reference(compact: str) -> dg.EquilibriumReference:
    cid = _COMPACT_ID[compact]
    try:
        return dg.EquilibriumReference.for_compact(cid)
    except ValueError as exc:
        raise CliError(EXIT_INCOMPATIBLE, str(exc)) from exc


def _test_function(name: str):
    if name == "runge":
        return lambda x: 1.0 / (1.0 + 25.0 * (x ** 2).sum(axis=1))
    if name == "cauchy":
        return lambda x: 1.0 / (x[:, 0] - 2.0)
    if name == "abs":
        return lambda x: np.abs(x[:, 0])
    if name == "exp":
        return lambda x: np.exp(x.sum(axis=1))
    raise CliError(EXIT_CONFIG, f"unknown test function {name!r}")


# -- output -----------------------------------------------------------------------------

def _resolve(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    root = os.environ.get(OUT_DIR_ENV)
    if root and not os.path.isabs(path):
        path = os.path.join(root, path)
    return path


def _emit(text: str, path: Optional[str]) -> None:
    path = _resolve(path)
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _fmt_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "metric", "value"])
    for n, metric, value in rows:
        w.writerow(["" if n is None else n, metric, _fmt_value(value)])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    return json.dumps([{"n": n, "metric": m, "value": float(v)} for n, m, v in rows],
                      sort_keys=True) + "\n"


def _emit_rows(rows, cfg: RunConfig) -> None:
    _emit(rows_to_json(rows) if cfg.fmt == "json" else rows_to_csv(rows), cfg.out)


# -- subcommands ---------------------------------------------------------------------------

def cmd_points(cfg: RunConfig) -> int:
    if cfg.n_min != cfg.n_max:
        raise CliError(EXIT_CONFIG, "points writes a single degree")
    stage = build_stage(cfg.compact, cfg.generator, cfg.n_min, cfg.density, cfg.radial)
    _emit(pointset.dumps(pointset.stage_document(stage)), cfg.out)
    return EXIT_OK


def _stages(cfg: RunConfig):
    path = cfg.extra.get("points")
    if path:
        doc = pointset.load(path)
        return [pointset.stage_from_document(doc)]
    return [build_stage(cfg.compact, cfg.generator, n, cfg.density, cfg.radial)
            for n in cfg.degrees]


def cmd_diag(cfg: RunConfig) -> int:
    metrics = cfg.extra.get("metrics") or ["lebesgue", "tdiam_estimate"]
    for m in metrics:
        if m not in METRICS:
            raise CliError(EXIT_CONFIG, f"unknown metric {m!r}")
    if "bos_vdm" in metrics and cfg.generator != "bos":
        raise CliError(EXIT_INCOMPATIBLE, "bos_vdm needs the bos generator")
    needs_ref = {"moment_distance", "bergman_probe"} & set(metrics)
    ref = _reference(cfg.compact) if needs_ref else None
    rows = []
    if "l_functional" in metrics:
        rows.append((None, "l_functional",
                     dg.l_functional(pt.RadialDistribution.named(cfg.radial), cfg.tol)))
    per_degree = [m for m in metrics if m != "l_functional"]
    if per_degree:
        for stage in _stages(cfg):
            n = stage.degree
            lam = None
            for m in per_degree:
                if m in ("lebesgue", "lebesgue_rootscale"):
                    if lam is None:
                        lam = dg.lebesgue_constant(
                            stage, set_mesh(cfg.compact, max(n, 1), cfg.eval_density))
                    rows.append((n, m, lam if m == "lebesgue"
                                 else (lam ** (1 / n) if n else math.nan)))
                elif m == "tdiam_estimate":
                    rows.append((n, m, tdiam_estimate(stage) if n else math.nan))
                elif m == "moment_distance":
                    rows.append((n, m, dg.moment_distance(dg.empirical_measure(stage), ref,
                                                          cfg.moment_degree)))
                elif m in ("bm_constant", "bergman_probe"):
                    nu = dg.empirical_measure(stage)
                    onb = bg.orthonormal_basis(nu, n)
                    if m == "bm_constant":
                        rows.append((n, m, bg.bm_constant(
                            onb, set_mesh(cfg.compact, n, cfg.eval_density))))
                    else:
                        rows.append((n, m, bg.bergman_weakstar_probe(onb, nu, ref,
                                                                     cfg.moment_degree)))
                elif m == "bos_vdm":
                    rows.append((n, m, tdiam_estimate(stage)))
                    rows.append((n, "bos_vdm_limit", dg.bos_vdm_limit(
                        pt.RadialDistribution.named(cfg.radial), cfg.tol)))
    _emit_rows(rows, cfg)
    return EXIT_OK


def cmd_interp(cfg: RunConfig) -> int:
    f = _test_function(cfg.extra.get("function", "runge"))
    rows = []
    for stage in _stages(cfg):
        n = stage.degree
        fine = set_mesh(cfg.compact, max(n, 1), cfg.eval_density * 4)
        (_, err, rate), = holo_convergence_probe([stage], f, fine)
        rows.append((n, "sup_error", err))
        rows.append((n, "root_rate", rate))
        rows.append((n, "lsq_error_proxy", least_squares_error(stage.basis, f, fine)))
    _emit_rows(rows, cfg)
    return EXIT_OK


def cmd_bergman(cfg: RunConfig) -> int:
    measure = cfg.extra.get("measure", "arcsine")
    rows = []
    if measure == "bm-construct":
        if cfg.compact != "interval":
            raise CliError(EXIT_INCOMPATIBLE, "bm-construct is wired for the interval")
        k_max = cfg.extra.get("k_max") or 2 * cfg.n_max
        eval_mesh = ms.interval_mesh(k_max, 10 * cfg.density)
        bm = bg.bm_measure_construct(lambda k: ms.interval_mesh(k, cfg.density), k_max, eval_mesh)
        nu, ref = bm.measure, dg.EquilibriumReference.interval()
    elif measure == "roots":
        m = cfg.extra.get("m") or 4 * max(cfg.n_max, 1)
        nu, ref = bg.roots_of_unity_measure(m), dg.EquilibriumReference.circle()
        eval_mesh = ms.disk_boundary_mesh(max(cfg.n_max, 1), cfg.eval_density)
    elif measure == "arcsine":
        m = cfg.extra.get("m") or 10 * max(cfg.n_max, 1)
        nu, ref = bg.arcsine_measure(m), dg.EquilibriumReference.interval()
        eval_mesh = ms.interval_mesh(max(cfg.n_max, 1), 10 * cfg.eval_density)
    else:
        raise CliError(EXIT_CONFIG, f"unknown measure {measure!r}")
    for n in cfg.degrees:
        try:
            onb = bg.orthonormal_basis(nu, n)
        except bg.GramDegeneracyError as exc:
            raise CliError(EXIT_DEGENERATE, str(exc)) from exc
        M = bg.bm_constant(onb, eval_mesh)
        rows.append((n, "bm_constant", M))
        rows.append((n, "bm_rootscale", M ** (1 / n) if n else math.nan))
        rows.append((n, "bergman_probe",
                     bg.bergman_weakstar_probe(onb, nu, ref, cfg.moment_degree)))
        if measure == "bm-construct" and n <= k_max:
            rows.append((n, "bm_envelope", bm.envelope(n)))
    _emit_rows(rows, cfg)
    return EXIT_OK


def cmd_kergin(cfg: RunConfig) -> int:
    nodes_path = cfg.extra.get("nodes")
    if nodes_path:
        doc = pointset.load(nodes_path)
        A = pointset.decode_points(doc)
        if not np.any(A.imag):
            A = A.real
        lam = np.ones(A.shape[1]) / math.sqrt(A.shape[1])
        func = cfg.extra.get("function", "exp")
        if func != "exp":
            raise CliError(EXIT_CONFIG, "kergin node files support the exp ridge function")
        jet = kg.RidgeJet.exp(lam, 0.7)
        X = np.random.default_rng(cfg.seed).uniform(-1, 1, (20, A.shape[1]))
        reports = [kg.kergin_interpolation_check(A, jet, 1e-8),
                   kg.ridge_identity_check(A, lam, jet.hder, X, 1e-8)]
        result = {"suite": "file", "nodes": nodes_path,
                  "checks": [r.as_dict() for r in reports],
                  "passed": all(r.passed for r in reports)}
    else:
        names = ["polynomial", "hermite", "ridge", "algebra"]
        chosen = cfg.extra.get("suite", "all")
        if chosen != "all":
            if chosen not in names:
                raise CliError(EXIT_CONFIG, f"unknown suite {chosen!r}")
            names = [chosen]
        suites = [kg.run_suite(s, cfg.extra.get("instances", 100), cfg.seed) for s in names]
        result = {"suites": suites, "passed": all(s["passed"] for s in suites)}
    _emit(json.dumps(result, sort_keys=True, indent=1, default=float) + "\n", cfg.out)
    return EXIT_OK if result["passed"] else EXIT_CHECK


# -- argument parsing -----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_CONFIG, message)


def _degree_args(p):
    p.add_argument("--n", type=int, help="single degree")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)


def _common(p):
    p.add_argument("--set", dest="compact", default="interval", choices=SETS)
    p.add_argument("--gen", dest="generator", default="approx-fekete", choices=GENERATORS)
    p.add_argument("--density", type=int, default=8)
    p.add_argument("--eval-density", type=int, default=10)
    p.add_argument("--G", dest="radial", default="equilibrium",
                   choices=("chebyshev", "equilibrium", "linear", "quadratic"))
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    _degree_args(p)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nodearrays", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("points", help="write a node set as JSON")
    _common(p)

    p = sub.add_parser("diag", help="diagnostic series as CSV")
    _common(p)
    p.add_argument("--metric", action="append", dest="metrics", choices=METRICS)
    p.add_argument("--points", help="point-set file to analyse instead of a generator")
    p.add_argument("--moment-degree", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--format", dest="fmt", default="csv", choices=("csv", "json"))

    p = sub.add_parser("interp", help="interpolation errors as CSV")
    _common(p)
    p.add_argument("--func", dest="function", default="runge", choices=FUNCTIONS)
    p.add_argument("--points")
    p.add_argument("--format", dest="fmt", default="csv", choices=("csv", "json"))

    p = sub.add_parser("bergman", help="Bernstein-Markov constants as CSV")
    _common(p)
    p.add_argument("--measure", default="arcsine", choices=("arcsine", "roots", "bm-construct"))
    p.add_argument("--m", type=int, help="support size of the reference measure")
    p.add_argument("--k-max", type=int)
    p.add_argument("--moment-degree", type=int, default=4)
    p.add_argument("--format", dest="fmt", default="csv", choices=("csv", "json"))

    p = sub.add_parser("kergin", help="Kergin check suite as JSON")
    p.add_argument("--suite", default="all",
                   choices=("all", "polynomial", "hermite", "ridge", "algebra"))
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--nodes", help="point-set file of Kergin nodes")
    p.add_argument("--func", dest="function", default="exp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return parser


def config_from_args(args) -> RunConfig:
    ns = vars(args).copy()
    command = ns.pop("command")
    n = ns.pop("n", None)
    n_min, n_max = ns.pop("n_min", None), ns.pop("n_max", None)
    if n is not None:
        n_min = n_max = n
    n_min = 1 if n_min is None else n_min
    n_max = n_min if n_max is None else n_max
    known = {k: ns.pop(k) for k in ("compact", "generator", "density", "eval_density", "radial",
                                    "tol", "moment_degree", "fmt", "out", "seed") if k in ns}
    if command == "points":
        known["fmt"] = "json"
    if command == "kergin":
        known["fmt"] = "json"
    if ns.get("instances") is not None and ns["instances"] < 1:
        raise CliError(EXIT_CONFIG, "instances must be positive")
    return RunConfig(n_min=n_min, n_max=n_max, extra={k: v for k, v in ns.items()
                                                      if v is not None}, **known)


COMMANDS = {"points": cmd_points, "diag": cmd_diag, "interp": cmd_interp,
            "bergman": cmd_bergman, "kergin": cmd_kergin}


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DegenerateStageError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (pointset.PointSetFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
