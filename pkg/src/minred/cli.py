"""Command-line front end.

    minred covariant --coeffs -2,2,3,127
    minred reduce form --coeffs -2,2,3,127 --norm max --json
    minred reduce endo --num 50,795,2120 --den 265,0,106
    minred minmodel endo --num 1,0,0,-36 --den 0,0,1,0 --all-orbits
    minred reduced-model endo --num 50,795,2120 --den 265,0,106 --threads 4

Exit codes: 0 success, 1 usage error, 2 domain error (JSON object on stdout).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .covariant import ConvergenceError, RepeatedRootError, RootFindingError, UnstableFormError, covariant_point
from .dynamics import DegenerateModelError, EndoModel, NoStableFormError, model_height, reduced_conjugate
from .forms import BinaryForm, InexactDivisionError, parse_coeffs
from .minimal import FactorizationError, all_minimal_orbits, minimal_model, reduced_model
from .reduce import smallest_representative
from .svg import write_tree

DOMAIN_ERRORS = (
    UnstableFormError, DegenerateModelError, NoStableFormError, FactorizationError,
    RepeatedRootError, RootFindingError, ConvergenceError, InexactDivisionError,
)
LIST_FLAGS = ("--coeffs", "--num", "--den")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str  # covariant, reduce-form, reduce-endo, minmodel, reduced-model
    norm: str = "euclidean"
    period: int | None = None
    output: str = "text"
    svg_path: str | None = None
    tol_z: float | None = None
    threads: int | None = None
    coeffs: list | None = None
    num: list | None = None
    den: list | None = None
    all_orbits: bool = False

    def __post_init__(self):
        if self.period is not None and self.period not in (1, 2, 3):
            raise UsageError("--period must be 1, 2 or 3")
        if self.tol_z is not None and not self.tol_z > 0:
            raise UsageError("--tol-z must be positive")
        if self.threads is not None and self.threads < 1:
            raise UsageError("--threads must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x: float) -> str:
    return format(x, ".12g")


def jfloat(x: float) -> float:
    return float(fmt(x))


def _coeff_list(text: str) -> list[int]:
    try:
        return parse_coeffs(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--coeffs", type=_coeff_list)
    common.add_argument("--num", type=_coeff_list)
    common.add_argument("--den", type=_coeff_list)
    common.add_argument("--norm", choices=["euclidean", "max"], default="euclidean")
    common.add_argument("--period", type=int)
    common.add_argument("--all-orbits", action="store_true")
    common.add_argument("--json", action="store_true")
    common.add_argument("--tree-svg", metavar="PATH")
    common.add_argument("--threads", type=int)
    common.add_argument("--tol-z", type=float, help="gradient tolerance for z(F)")

    parser = _Parser(prog="minred", description="Reduce binary forms and endomorphisms of P^1.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("covariant", parents=[common], help="covariant point and Julia invariant")
    red = sub.add_parser("reduce", help="smallest SL(2,Z)-representative")
    rsub = red.add_subparsers(dest="target", required=True, parser_class=_Parser)
    rsub.add_parser("form", parents=[common])
    rsub.add_parser("endo", parents=[common])
    mm = sub.add_parser("minmodel", help="minimal models of an endomorphism")
    mm.add_subparsers(dest="target", required=True, parser_class=_Parser).add_parser("endo", parents=[common])
    rm = sub.add_parser("reduced-model", help="minimal model of smallest height")
    rm.add_subparsers(dest="target", required=True, parser_class=_Parser).add_parser("endo", parents=[common])
    return parser


def _preprocess(argv: list[str]) -> list[str]:
    # "--coeffs -2,2" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in LIST_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def parse_config(argv: list[str]) -> RunConfig:
    ns = build_parser().parse_args(_preprocess(argv))
    command = ns.command if ns.command in ("covariant", "minmodel", "reduced-model") else f"reduce-{ns.target}"
    cfg = RunConfig(
        command=command, norm=ns.norm, period=ns.period, output="json" if ns.json else "text",
        svg_path=ns.tree_svg, tol_z=ns.tol_z, threads=ns.threads,
        coeffs=ns.coeffs, num=ns.num, den=ns.den, all_orbits=ns.all_orbits,
    )
    if command in ("covariant", "reduce-form"):
        if cfg.coeffs is None:
            raise UsageError("--coeffs is required")
    elif cfg.num is None or cfg.den is None:
        raise UsageError("--num and --den are required")
    return cfg


# -- JSON helpers ----------------------------------------------------------------

def _matrix(g) -> list[list[int]]:
    return g.rows()


def _model(f: EndoModel) -> dict:
    return {"num": list(f.F), "den": list(f.G)}


def _search_fields(stats) -> dict:
    return {
        "nodes_expanded": stats.nodes_expanded,
        "initial_bound": jfloat(stats.initial_bound),
        "final_bound": jfloat(stats.final_bound),
    }


def _point(z) -> dict:
    return {"t": jfloat(z.t), "u": jfloat(z.u)}


# -- commands --------------------------------------------------------------------

def _endo(cfg: RunConfig) -> EndoModel:
    if len(cfg.num) != len(cfg.den):
        raise UsageError("--num and --den must have the same length")
    if len(cfg.num) < 3:
        raise DegenerateModelError("degree below 2")
    return EndoModel(cfg.num, cfg.den)


def _form(cfg: RunConfig) -> BinaryForm:
    try:
        return BinaryForm(cfg.coeffs)
    except ValueError as exc:
        raise UnstableFormError(str(exc)) from None


def cmd_covariant(cfg: RunConfig):
    F = _form(cfg)
    res = covariant_point(F)
    data = {"form": list(F.coeffs), "z": _point(res.z), "theta": jfloat(res.theta),
            "residual": jfloat(res.residual), "iterations": res.iterations}
    text = [f"F = {F}", f"z(F) = {fmt(res.z.t)} + {fmt(res.z.u)}j", f"theta = {fmt(res.theta)}"]
    return data, text


def cmd_reduce_form(cfg: RunConfig):
    F = _form(cfg)
    gamma, G, stats = smallest_representative(F, cfg.norm, record=bool(cfg.svg_path))
    value = sum(c * c for c in G) if cfg.norm == "euclidean" else max(abs(c) for c in G)
    if cfg.svg_path:
        write_tree(stats, cfg.svg_path, title=f"F = {F}")
    data = {"gamma": _matrix(gamma), "form": list(G.coeffs), "value": value, "norm": cfg.norm,
            "z": _point(stats.z), "theta": jfloat(stats.theta), **_search_fields(stats)}
    text = [
        f"F = {F}",
        f"gamma = {gamma}",
        f"F.gamma = {G}",
        f"{'size' if cfg.norm == 'euclidean' else 'height'} = {value}",
        f"nodes expanded = {stats.nodes_expanded}",
        f"bound = {fmt(stats.initial_bound)} -> {fmt(stats.final_bound)}",
    ]
    return data, text


def cmd_reduce_endo(cfg: RunConfig):
    f = _endo(cfg)
    gamma, h, stats = reduced_conjugate(f, cfg.period, record=bool(cfg.svg_path))
    if cfg.svg_path:
        write_tree(stats, cfg.svg_path, title=f"f = {f}")
    phi = stats.phi
    data = {"gamma": _matrix(gamma), "model": _model(h), "height": model_height(h),
            "phi": {"m": phi.m, "variant": phi.variant, "form": list(phi.form.coeffs)},
            **_search_fields(stats)}
    text = [
        f"f = {f.normalized()}",
        f"gamma = {gamma}",
        f"f^gamma = {h}",
        f"height = {model_height(h)}",
        f"covariant form: m = {phi.m} ({phi.variant})",
        f"nodes expanded = {stats.nodes_expanded}",
        f"bound = {fmt(stats.initial_bound)} -> {fmt(stats.final_bound)}",
    ]
    return data, text


def cmd_minmodel(cfg: RunConfig):
    f = _endo(cfg)
    reps = list(all_minimal_orbits(f)) if cfg.all_orbits else [minimal_model(f)]
    data = {"representatives": [
        {"model": _model(g), "matrix": _matrix(G), "abs_resultant": abs(g.resultant)} for g, G in reps
    ]}
    text = [f"{g}   matrix {G}   |Res| = {abs(g.resultant)}" for g, G in reps]
    return data, text


def cmd_reduced_model(cfg: RunConfig):
    f = _endo(cfg)
    h, gamma, report = reduced_model(f, threads=cfg.threads or 1, m=cfg.period)
    orbits = [{
        "representative": _model(r["representative"]),
        "matrix": _matrix(r["matrix"]),
        "abs_resultant": r["abs_resultant"],
        "reduced": _model(r["reduced"]),
        "gamma": _matrix(r["gamma"]),
        "height": r["height"],
        "nodes_expanded": r["nodes_expanded"],
    } for r in report.orbits]
    data = {"model": _model(h), "gamma": _matrix(gamma), "height": model_height(h), "orbits": orbits}
    text = [f"reduced model = {h}", f"gamma = {gamma}", f"height = {model_height(h)}", "orbits:"]
    text += [f"  {r['representative']} -> height {r['height']}" for r in report.orbits]
    return data, text


COMMANDS = {
    "covariant": cmd_covariant,
    "reduce-form": cmd_reduce_form,
    "reduce-endo": cmd_reduce_endo,
    "minmodel": cmd_minmodel,
    "reduced-model": cmd_reduced_model,
}


def run(argv: list[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"minred: usage error: {exc}", file=err)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    saved = os.environ.get("MINRED_TOL_Z")
    if cfg.tol_z is not None:
        os.environ["MINRED_TOL_Z"] = repr(cfg.tol_z)
    try:
        data, text = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"minred: usage error: {exc}", file=err)
        return 1
    except DOMAIN_ERRORS as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=out)
        return 2
    finally:
        if cfg.tol_z is not None:
            if saved is None:
                os.environ.pop("MINRED_TOL_Z", None)
            else:
                os.environ["MINRED_TOL_Z"] = saved
    if cfg.output == "json":
        print(json.dumps(data), file=out)
    else:
        print("\n".join(text), file=out)
    return 0


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
