"""Command-line entry point: ``jetkernel <group> <command> [options]``.

Exit codes: 0 success, 1 domain error (a JSON error object is printed),
2 usage error.  Output is JSON with ``--json`` or ``--out``, text otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import serialize as ser
from .errors import JetKernelError, ShapeError
from .factorization import (
    decide_equivalence,
    embed_factorization,
    lift_plot,
    witness_d1,
    witness_general,
    witness_point,
)
from .formal import (
    FormalMorphism,
    FormalSpace,
    classify_embedding,
    compose,
    fiber_mono_everywhere,
    is_formal_embedding,
    is_mono_point,
)
from .hadamard import hadamard_expand
from .jets import JetPoint, JetSpace, jet_dim, fiber_count, lift_jet_plot, plot_to_cone, project, prolong
from .polyring import Polynomial
from .selftest import SUITES, run_selftest
from .weil import make_weil


def _names(text: str | None) -> list:
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def _weil_report(A) -> dict:
    return {
        "name": A.name, "d": A.d, "vars": list(A.vars),
        "generators": [str(g) for g in A.generators],
        "groebner_basis": [str(b) for b in A.gb.basis],
        "k": A.k, "dim": A.dim,
        "basis": [str(Polynomial({m: 1}, A.vars)) for m in A.basis],
    }


def _require_in(args) -> ser.Workspace:
    if not args.input:
        raise ShapeError("this command needs --in WORKSPACE.json")
    return ser.Workspace.from_json(ser.load_json(args.input))


def _store(args, kind: str, name: str | None, obj) -> None:
    """Add ``obj`` to the workspace named by ``--out`` (created if absent)."""
    if not (args.save and name):
        return
    ws = ser.load_workspace(args.save)
    ws.add(kind, name, obj, replace=True)
    ser.atomic_write(args.save, ser.dumps(ws.to_json()))
    args.stored = True


# -- handlers; each returns a JSON-able result --------------------------------

def cmd_weil_new(args):
    gens = _names(args.gens) + list(args.gen or [])
    A = make_weil(args.d, gens, k_max=args.k_max, vars=_names(args.vars) or None,
                  name=args.name or "")
    _store(args, "algebras", args.name, A)
    return _weil_report(A)


def cmd_weil_info(args):
    ws = _require_in(args)
    return _weil_report(ws.get("algebras", args.name))


def cmd_morphism_compose(args):
    ws = _require_in(args)
    h = compose(ws.get("morphisms", args.g), ws.get("morphisms", args.f))
    _store(args, "morphisms", args.name, h)
    return ser.morphism_to_json(h)


def cmd_morphism_check(args):
    ws = _require_in(args)
    m = ws.get("morphisms", args.name)
    out = {"well_formed": True, "components": [str(c) for c in m.components],
           "form": classify_embedding(m).kind}
    src = m.source
    if m.target.is_cartesian():
        if not src.params:
            out["mono_at_point"] = is_mono_point(m)
        try:
            out["fiber_mono"] = fiber_mono_everywhere(m)
            out["formal_embedding"] = is_formal_embedding(m)
        except JetKernelError as e:
            out["formal_embedding"] = e.code
    return out


def cmd_hadamard(args):
    f = Polynomial.parse(args.f)
    return hadamard_expand(f, _names(args.x), _names(args.y), args.order).to_json()


def cmd_jet_prolong(args):
    sections = [Polynomial.parse(s) for s in args.section]
    names = _names(args.vars)
    base = _names(args.base)
    if not base:
        n = args.n or len(names) or max(1, len(set().union(*(s.free_vars() for s in sections))))
        base = ["0"] * n
    return prolong(sections, args.k, base, names or None).to_json()


def cmd_jet_project(args):
    if not args.input:
        raise ShapeError("jet project needs --in POINT.json")
    return project(JetPoint.from_json(ser.load_json(args.input))).to_json()


def cmd_jet_dim(args):
    sp = JetSpace(args.n, args.m, args.k)
    return {"n": args.n, "m": args.m, "k": args.k, "fiber_count": fiber_count(args.n, args.m, args.k),
            "dim": jet_dim(args.n, args.m, args.k), "coordinates": list(sp.coords)}


def cmd_jet_lift(args):
    """Input: ``{"n", "m", "source", "components"}`` describing a plot into J^K."""
    if not args.input:
        raise ShapeError("jet lift needs --in PLOT.json")
    data = ser.load_json(args.input)
    ws = ser.Workspace()
    src = ws.decode("spaces", data["source"])
    n, m = int(data["n"]), int(data["m"])
    comps = data["components"]
    K = args.level if args.level is not None else next(
        (k for k in range(64) if JetSpace(n, m, k).dim == len(comps)), None)
    if K is None or JetSpace(n, m, K).dim != len(comps):
        raise ShapeError(f"{len(comps)} components do not match a jet space J^K with n={n}, m={m}")
    sp = JetSpace(n, m, K)
    plot = FormalMorphism(src, sp.space(), tuple(Polynomial.parse(c, src.coords) for c in comps))
    fam = plot_to_cone(plot, [JetSpace(n, m, k).dim for k in range(K + 1)])
    lift = lift_jet_plot(fam)
    return {"pair": ser.pair_to_json(lift.pair), "verification": lift.verification}


def _pairs(args, need_two: bool):
    ws = _require_in(args)
    names = list(args.pair or [])
    if not names:
        names = sorted(ws.pairs)
    if need_two:
        if len(names) != 2:
            raise ShapeError("give exactly two pairs with --pair NAME --pair NAME")
        return ws, ws.get("pairs", names[0]), ws.get("pairs", names[1])
    if len(names) != 1:
        raise ShapeError("give one pair with --pair NAME")
    return ws, ws.get("pairs", names[0])


def cmd_factor_lift(args):
    ws = _require_in(args)
    plot = ws.get("morphisms", args.plot)
    if args.level is not None:
        if args.level > plot.target.dim:
            raise ShapeError(f"plot has only {plot.target.dim} components, level {args.level} requested")
        plot = FormalMorphism(plot.source, FormalSpace.cartesian(plot.target.coords[:args.level]),
                              plot.components[:args.level])
    pair = lift_plot(plot)
    _store(args, "pairs", args.name, pair)
    return ser.pair_to_json(pair)


def cmd_factor_embed(args):
    _, p = _pairs(args, need_two=False)
    p_hat, step = embed_factorization(p)
    _store(args, "pairs", args.name, p_hat)
    return {"pair": ser.pair_to_json(p_hat), "step": ser.step_to_json(step)}


def cmd_factor_witness(args):
    _, p, q = _pairs(args, need_two=True)
    method = args.method
    if method == "auto":
        A = p.source.thickening
        method = "general" if p.source.params else ("d1" if A.d == 1 and A.dim == 2 else "point")
    fn = {"d1": witness_d1, "point": witness_point, "general": witness_general}[method]
    span = fn(p.iota, q.iota, p.f, q.f)
    return {"method": method, **ser.span_to_json(span)}


def cmd_factor_decide(args):
    _, p, q = _pairs(args, need_two=True)
    return ser.decision_to_json(decide_equivalence(p, q))


def cmd_selftest(args):
    return run_selftest(args.seed, fault=args.inject_fault, only=args.suite)


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", metavar="FILE", help="input JSON (workspace or record)")
    common.add_argument("--out", dest="save", metavar="FILE",
                        help="write the result JSON here; with --name, add the new object "
                             "to this workspace instead")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("--k-max", type=int, default=32, help="nilpotency search bound")
    common.add_argument("--level", type=int, default=None,
                        help="truncation level K for jet lift and factor lift")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="jetkernel", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    def sub(parent, name, handler, help_text):
        p = parent.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    weil = groups.add_parser("weil", help="Weil algebras").add_subparsers(dest="cmd", required=True)
    p = sub(weil, "new", cmd_weil_new, "build Q[vars]/(gens) and report its structure")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--gens", help="comma-separated generators")
    p.add_argument("--gen", action="append", help="one generator (repeatable)")
    p.add_argument("--vars", help="comma-separated variable names")
    p.add_argument("--name")
    p = sub(weil, "info", cmd_weil_info, "report a stored algebra")
    p.add_argument("--name", required=True)

    morph = groups.add_parser("morphism", help="formal morphisms").add_subparsers(dest="cmd", required=True)
    p = sub(morph, "compose", cmd_morphism_compose, "g o f of two stored morphisms")
    p.add_argument("--g", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--name")
    p = sub(morph, "check", cmd_morphism_check, "validate and classify a stored morphism")
    p.add_argument("--name", required=True)

    p = sub(groups, "hadamard", cmd_hadamard, "Hadamard expansion of a polynomial")
    p.add_argument("--f", required=True)
    p.add_argument("--x", default="", help="comma-separated x variables")
    p.add_argument("--y", required=True, help="comma-separated y variables")
    p.add_argument("--order", type=int, required=True)

    jet = groups.add_parser("jet", help="jet spaces").add_subparsers(dest="cmd", required=True)
    p = sub(jet, "prolong", cmd_jet_prolong, "k-jet of a section at a base point")
    p.add_argument("--section", action="append", required=True, help="one component (repeatable)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--base", default="", help="comma-separated base point")
    p.add_argument("--n", type=int, help="base dimension (default: length of --base)")
    p.add_argument("--vars", help="comma-separated base variables")
    sub(jet, "project", cmd_jet_project, "drop the top-order entries of a jet point")
    p = sub(jet, "dim", cmd_jet_dim, "coordinate count of J^k")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    sub(jet, "lift", cmd_jet_lift, "factor a jet plot through a Cartesian space")

    fac = groups.add_parser("factor", help="factorizations").add_subparsers(dest="cmd", required=True)
    p = sub(fac, "lift", cmd_factor_lift, "factor a stored plot through U x R^d")
    p.add_argument("--plot", required=True)
    p.add_argument("--name")
    p = sub(fac, "embed", cmd_factor_embed, "upgrade a pair to a formal proper embedding")
    p.add_argument("--pair", action="append")
    p.add_argument("--name")
    p = sub(fac, "witness", cmd_factor_witness, "witness span of two rectified pairs")
    p.add_argument("--pair", action="append")
    p.add_argument("--method", choices=("auto", "d1", "point", "general"), default="auto")
    p = sub(fac, "decide", cmd_factor_decide, "decide zig-zag equivalence of two pairs")
    p.add_argument("--pair", action="append")

    p = sub(groups, "selftest", cmd_selftest, "run the seeded property suites")
    p.add_argument("--suite", action="append", choices=[name for name, _ in SUITES],
                   help="run only this suite (repeatable)")
    p.add_argument("--inject-fault", default=None, help=argparse.SUPPRESS)
    return parser


def _render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_render_text(v, indent) if isinstance(v, (dict, list))
                         else f"{pad}- {v}" for v in obj)
    return f"{pad}{obj}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.handler(args)
    except JetKernelError as e:
        print(ser.dumps(e.to_json()), end="")
        return 1
    except (OSError, KeyError, ValueError) as e:
        err = {"error": "io-error" if isinstance(e, OSError) else "bad-input",
               "message": str(e), "details": {}}
        print(ser.dumps(err), end="")
        return 1
    text = ser.dumps(result)
    if args.save and not getattr(args, "stored", False):
        ser.atomic_write(args.save, text)
    if args.json or args.handler is cmd_selftest:
        print(text, end="")
    else:
        print(_render_text(result))
    if args.handler is cmd_selftest and not result["ok"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
