"""Command line front end: ``opmin <command> ...``.

Exit status is 0 on success, 1 when a check fails (validation violations,
a map that is not a quasi-isomorphism) and 2 on malformed input or a
failed precondition.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass

from . import serialize as ser
from .algebra import (AlgebraMorphism, CompatibilityError, StructureError, TabularAlgebra,
                      is_quasi_iso, validate_algebra)
from .builtins import shared_builtin
from .complexes import Convention, WindowError
from .engine import EngineOptions, PreconditionError, minimal_model
from .free import FreeAlgebra, Generator, UnboundedArityError
from .homotopy import LiftingError, PathAlgebra, compare_models, lift_through_surjection
from .operad import ArityBoundError, OperadTable, tameness_index, validate

BUILTINS = ("Com", "Ass", "Lie", "Ger")


@dataclass
class RunConfig:
    max_degree: int = 8
    r: int | None = None
    convention: str | None = None
    section: str = "canonical"
    seed: int = 0
    iteration_cap: int = 32
    arity_cap: int | None = None
    t_bound: int = 2
    t_ceiling: int = 16


class UsageError(ValueError):
    pass


def _print(lines, out):
    for line in lines:
        print(line, file=out)


def _check_convention(cfg, obj_conv):
    if cfg.convention is not None and Convention.parse(cfg.convention) is not obj_conv:
        raise UsageError(f"--convention {cfg.convention} does not match the input file "
                         f"({obj_conv.name.lower()})")


def _operad_arg(ws, name, convention):
    if name in BUILTINS:
        return shared_builtin(name, convention or "cochain", 4)
    obj = ws.load(name)
    if not isinstance(obj, OperadTable):
        raise UsageError(f"{name} is not an operad document")
    return obj


def _parse_gens(text):
    gens = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lab, _, deg = part.partition(":")
        try:
            gens.append(Generator(lab.strip(), int(deg)))
        except ValueError:
            raise UsageError(f"generator {part!r} is not label:degree") from None
    return gens


def _render(alg, k, vec):
    """Element of ``alg`` in degree k as a signed sum of basis labels."""
    if isinstance(alg, FreeAlgebra):
        return alg.element_string(alg.from_vector(k, vec))
    labels = (getattr(alg, "labels", None) or {}).get(k)
    terms = []
    for i, c in sorted(vec.items()):
        if c:
            lab = labels[i] if labels else f"e{k}_{i}"
            terms.append(lab if c == 1 else f"{c} {lab}")
    return " + ".join(terms) or "0"


# -- commands ---------------------------------------------------------------------

def cmd_validate(args, cfg, ws, out):
    obj = ws.load(args.file)
    if isinstance(obj, OperadTable):
        rep = validate(obj)
        print(f"operad {obj.name} ({obj.convention.name.lower()}), arities <= {obj.arity_bound}", file=out)
    elif isinstance(obj, TabularAlgebra):
        rep = validate_algebra(obj)
        print(f"tabular algebra {obj.name or '(unnamed)'} over {obj.operad.name}", file=out)
    elif isinstance(obj, FreeAlgebra):
        obj.check_d_squared()
        print(f"free algebra {obj!r}: d o d = 0 through degree {obj.max_degree}", file=out)
        return 0
    else:
        raise UsageError("validate expects an operad or algebra document")
    _print(rep.lines(), out)
    return 0 if rep.ok else 1


def cmd_tameness(args, cfg, ws, out):
    p = _operad_arg(ws, args.operad, cfg.convention)
    print(f"operad {p.name} ({p.convention.name.lower()})", file=out)
    print(str(tameness_index(p)), file=out)
    return 0


def cmd_free_dims(args, cfg, ws, out):
    p = _operad_arg(ws, args.operad, cfg.convention)
    gens = _parse_gens(args.gens)
    M = FreeAlgebra(p, gens, {}, max_degree=cfg.max_degree, r=cfg.r, arity_cap=cfg.arity_cap)
    print(f"free {p.name}-algebra on " + ", ".join(f"{g.label}:{g.degree}" for g in gens), file=out)
    for k in range(0, cfg.max_degree + 1):
        print(f"degree {k}: {M.dim(k)}", file=out)
    if M.modulo_arity_cap:
        print(f"valid modulo arity cap {cfg.arity_cap}", file=out)
    return 0


def cmd_minimal_model(args, cfg, ws, out):
    a = ws.load(args.algebra)
    _check_convention(cfg, a.convention)
    r = cfg.r if cfg.r is not None else tameness_index(a.operad).r
    opts = EngineOptions(section=cfg.section, seed=cfg.seed, iteration_cap=cfg.iteration_cap,
                         arity_cap=cfg.arity_cap)
    m = minimal_model(a, r, cfg.max_degree, opts)
    print(m.report(), file=out)
    if args.out:
        ser.save(ser.model_to_json(m), args.out)
    return 0 if m.terminated else 1


def cmd_compare(args, cfg, ws, out):
    m1, m2 = ws.load(args.model1, "m1"), ws.load(args.model2, "m2")
    res = compare_models(m1, m2, T=cfg.t_bound, ceiling=cfg.t_ceiling)
    if res.g is not None:
        print("comparison map on generators:", file=out)
        for g in m1.model.generators:
            el = m2.model.from_vector(g.degree, res.g.images[g.label])
            print(f"  {g.label} -> {m2.model.element_string(el)}", file=out)
    _print(res.lines(), out)
    if args.out and res.homotopy is not None:
        ser.save(ser.homotopy_to_json(res.homotopy), args.out)
    return 0 if res.g is not None and res.invertible else 1


def cmd_lift(args, cfg, ws, out):
    f = ws.load(args.morphism)
    if not isinstance(f, AlgebraMorphism):
        raise UsageError("lift expects a morphism document for f")
    if args.via:
        w = ws.load(args.via)
        if not isinstance(w, AlgebraMorphism):
            raise UsageError("--via expects a morphism document")
    else:
        P = PathAlgebra(f.target, cfg.t_bound)
        w = P.ev0 if args.endpoint == 0 else P.ev1
    up_to = max((g.degree for g in f.source.generators), default=0)
    g = lift_through_surjection(f.source, f, w, up_to=up_to)
    B = w.source
    for gen in f.source.generators:
        v = g.images[gen.label]
        if isinstance(B, PathAlgebra):
            k, delta = gen.degree, B.delta
            txt = " + ".join(f"({_render(B.base, k - delta * kind, bv)}) t^{j}" + (" dt" if kind else "")
                             for (kind, j), bv in sorted(B.components(k, v).items()) if bv) or "0"
        else:
            txt = _render(B, gen.degree, v)
        print(f"g({gen.label}) = {txt}", file=out)
    print("w o g = f holds exactly on all generators", file=out)
    return 0


def cmd_check_qiso(args, cfg, ws, out):
    f = ws.load(args.morphism)
    if not isinstance(f, AlgebraMorphism):
        raise UsageError("check-qiso expects a morphism document")
    cert = is_quasi_iso(f, cfg.max_degree)
    for k, v in sorted(cert.cone_dims.items()):
        print(f"cone degree {k}: {v}", file=out)
    print(f"quasi-isomorphism through degree {cfg.max_degree}: " + ("yes" if cert.ok else "no"), file=out)
    return 0 if cert.ok else 1


# -- parser -------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="opmin", description="Minimal models of algebras over operads.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log engine progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, degree=True):
        if degree:
            p.add_argument("--max-degree", "-N", type=int, default=8, dest="max_degree")
        p.add_argument("--convention", choices=["cochain", "chain"])
        return p

    p = sub.add_parser("validate", help="check operad or algebra axioms")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = common(sub.add_parser("tameness", help="tameness index of an operad"), degree=False)
    p.add_argument("operad", help="operad JSON file or one of " + ", ".join(BUILTINS))
    p.set_defaults(fn=cmd_tameness)

    p = common(sub.add_parser("free-dims", help="degreewise dimensions of a free algebra"))
    p.add_argument("operad")
    p.add_argument("--gens", required=True, help="comma separated label:degree list")
    p.add_argument("--r", type=int)
    p.add_argument("--arity-cap", type=int, dest="arity_cap")
    p.set_defaults(fn=cmd_free_dims)

    p = common(sub.add_parser("minimal-model", help="run the minimal model engine"))
    p.add_argument("algebra")
    p.add_argument("--r", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--section", choices=["canonical", "random"], default="canonical")
    p.add_argument("--iteration-cap", type=int, default=32, dest="iteration_cap")
    p.add_argument("--arity-cap", type=int, dest="arity_cap")
    p.add_argument("--out", help="write the model as JSON")
    p.set_defaults(fn=cmd_minimal_model)

    p = sub.add_parser("compare", help="comparison isomorphism between two models of one target")
    p.add_argument("model1")
    p.add_argument("model2")
    p.add_argument("--t-bound", type=int, default=2, dest="t_bound")
    p.add_argument("--t-ceiling", type=int, default=16, dest="t_ceiling")
    p.add_argument("--out", help="write the homotopy witness as JSON")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("lift", help="lift a morphism through a surjective quasi-isomorphism")
    p.add_argument("morphism", help="morphism f: C -> B out of a Sullivan algebra")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--via", help="morphism w: A -> B to lift through")
    g.add_argument("--endpoint", type=int, choices=[0, 1], default=0,
                   help="lift through evaluation of B[t,dt] at t = 0 or 1 (default 0)")
    p.add_argument("--t-bound", type=int, default=2, dest="t_bound")
    p.set_defaults(fn=cmd_lift)

    p = common(sub.add_parser("check-qiso", help="cone test of a morphism"))
    p.add_argument("morphism")
    p.set_defaults(fn=cmd_check_qiso)
    return ap


def _config(args):
    cfg = RunConfig()
    for k in vars(cfg):
        v = getattr(args, k, None)
        if v is not None:
            setattr(cfg, k, v)
    return cfg


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(name)s: %(message)s")
    cfg = _config(args)
    ws = ser.Workspace(cfg)
    try:
        return args.fn(args, cfg, ws, out)
    except (ser.SchemaError, UsageError, PreconditionError, LiftingError, CompatibilityError,
            StructureError, UnboundedArityError, ArityBoundError, WindowError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
