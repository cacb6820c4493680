"""``plumb`` command line front end.

Exit codes: 0 success, 1 domain error (invalid graph, failed oracle check,
exhausted budget ...), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from . import fixtures, graph as G, invariants as inv, lattice as lat
from .cycles import laufer_minimal_cycle, min_chi, min_chi_oracle, ORACLE_CAP
from .errors import GraphSyntaxError, PlumbError, RegionTooLarge, UnknownVertex

BOUND_LABEL = "generic-structure/topological bound"


class UsageError(Exception):
    pass


class DomainFailure(PlumbError):
    pass


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------


def fmt_rational(x) -> int | str:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cycle_json(g: G.PlumbingGraph, c: Mapping[str, object]) -> dict[str, int | str]:
    return {v: fmt_rational(c.get(v, 0)) for v in g.ids}


def cycle_text(g: G.PlumbingGraph, c: Mapping[str, object]) -> str:
    return " ".join(str(fmt_rational(c.get(v, 0))) for v in g.ids)


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------


def load(path: str) -> tuple[G.PlumbingGraph, dict[str, dict[str, int]]]:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return G.parse_graph(text)


_TERM_RE = re.compile(r"^(?:([+-]?\d+(?:/\d+)?)\s*\*\s*)?(\S+)$")


def _atom(g, named, atom: str) -> dict[str, Fraction]:
    if atom in named:
        return {v: Fraction(c) for v, c in named[atom].items()}
    if atom == "E":
        return {v: Fraction(1) for v in g.ids}
    if atom == "z_min":
        return {v: Fraction(c) for v, c in laufer_minimal_cycle(g).result.items()}
    if atom == "zk":
        return lat.canonical_cycle(g)
    if atom == "floor_zk":
        return {v: Fraction(c) for v, c in lat.floor_cycle(lat.canonical_cycle(g)).items()}
    if atom.startswith("dual:") or atom.startswith("E:"):
        v = atom.split(":", 1)[1]
        if v not in g.vertices:
            raise UsageError(f"unknown vertex {v!r} in {atom!r}")
        return lat.dual(g, v) if atom.startswith("dual:") else {v: Fraction(1)}
    raise UsageError(f"unknown cycle {atom!r}")


def parse_cycle(g: G.PlumbingGraph, named, expr: str, integral: bool = False) -> dict:
    """Cycle from the command line.

    ``a=1,b=3`` lists coefficients (omitted ids are 0; rationals as ``p/q``).
    Otherwise a sum of terms ``[coef*]name`` joined by ``+`` or `` - ``, where ``name`` is a
    cycle declared in the file or one of ``E``, ``z_min``, ``zk``, ``floor_zk``,
    ``dual:<v>``, ``E:<v>``; ``-name`` negates a term.
    """
    expr = expr.strip()
    total: dict[str, Fraction] = {v: Fraction(0) for v in g.ids}
    if expr in named:
        total.update({v: Fraction(c) for v, c in named[expr].items()})
    elif "=" in expr:
        for part in filter(None, (p.strip() for p in expr.split(","))):
            v, _, val = part.partition("=")
            v = v.strip()
            if v not in g.vertices:
                raise UsageError(f"unknown vertex {v!r} in cycle {expr!r}")
            try:
                total[v] = Fraction(val.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"bad coefficient {val!r} in cycle {expr!r}") from exc
    else:
        # " - " between terms subtracts; a bare "-" may be part of an id
        for part in re.sub(r"\s+-\s+", " + -", expr).split("+"):
            part = part.strip()
            sign = 1
            if part.startswith("-") and not _TERM_RE.match(part).group(1):
                sign, part = -1, part[1:].strip()
            m = _TERM_RE.match(part)
            if not m:
                raise UsageError(f"cannot parse cycle term {part!r}")
            coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            for v, c in _atom(g, named, m.group(2)).items():
                total[v] += sign * coef * c
    if integral:
        if any(c.denominator != 1 for c in total.values()):
            raise UsageError(f"cycle {expr!r} must be integral")
        return {v: int(c) for v, c in total.items()}
    return total


def vertex_list(g: G.PlumbingGraph, text: str) -> list[str]:
    out = [v.strip() for v in text.split(",") if v.strip()]
    for v in out:
        if v not in g.vertices:
            raise UsageError(f"unknown vertex {v!r}")
    return out


# ---------------------------------------------------------------------------
# commands; each returns (payload, text lines, oracle_checked)
# ---------------------------------------------------------------------------


def cmd_validate(args, g, named):
    data = lat.build_intersection(g)
    payload = {
        "vertices": len(g),
        "edges": len(g.edges),
        "negative_definite": True,
        "pivots": [fmt_rational(p) for p in data.pivots],
        "qhs_link": inv.qhs_link(g),
        "discriminant_order": abs(data.det),
        "named_cycles": sorted(named),
    }
    text = [
        "ok",
        f"vertices: {payload['vertices']}",
        f"edges: {payload['edges']}",
        "negative definite: pivots " + " ".join(str(p) for p in payload["pivots"]),
        f"qhs_link: {str(payload['qhs_link']).lower()}",
        f"discriminant_order: {payload['discriminant_order']}",
    ]
    return payload, text, False


def _oracle_check(args, g, res):
    ora = min_chi_oracle(g, res.certificate.bounds, cap=args.oracle_cap)
    if ora.minimum != res.minimum or ora.min_minimizer != res.min_minimizer or ora.max_minimizer != res.max_minimizer:
        raise DomainFailure(f"oracle disagrees: search {res.minimum}, oracle {ora.minimum}")
    return ora


def cmd_invariants(args, g, named):
    rep = inv.classify(g)
    if args.oracle:
        _oracle_check(args, g, min_chi(g, threads=args.threads))
    payload = {
        "min_chi": rep.min_chi_unbounded,
        "p_a": rep.p_a,
        "verdict": rep.verdict,
        "reduction_bound": rep.reduction_bound,
        "qhs_link": rep.qhs_link,
        "discriminant_order": rep.discriminant_order,
        "z_min": cycle_json(g, rep.z_min),
        "chi_z_min": rep.chi_z_min,
    }
    text = [
        f"min_chi: {rep.min_chi_unbounded}",
        f"p_a: {rep.p_a}",
        f"verdict: {rep.verdict}",
        f"reduction_bound: {rep.reduction_bound}",
        f"qhs_link: {str(rep.qhs_link).lower()}",
        f"discriminant_order: {rep.discriminant_order}",
        f"z_min: {cycle_text(g, rep.z_min)}",
        f"chi_z_min: {rep.chi_z_min}",
    ]
    return payload, text, bool(args.oracle)


def cmd_minchi(args, g, named):
    box = parse_cycle(g, named, args.box, integral=True) if args.box else None
    res = min_chi(g, box, threads=args.threads)
    checked = False
    skipped = None
    if args.oracle or box is not None:
        # box regions are usually cheap to cross-check; a too-large region is
        # fatal only with --oracle
        try:
            _oracle_check(args, g, res)
            checked = True
        except RegionTooLarge as exc:
            if args.oracle:
                raise
            skipped = str(exc)
    payload = {
        "minimum": res.minimum,
        "region": "box" if box is not None else "unbounded",
        "box": cycle_json(g, box) if box is not None else None,
        "min_minimizer": cycle_json(g, res.min_minimizer) if args.witness else None,
        "max_minimizer": cycle_json(g, res.max_minimizer) if args.witness else None,
        "minimizer_count": res.minimizer_count if args.count else None,
        "certificate": {
            "level": res.certificate.level,
            "radius": fmt_rational(res.certificate.radius),
            "bounds": cycle_json(g, res.certificate.bounds),
        },
    }
    text = [f"min_chi: {res.minimum}"]
    if box is not None:
        text.append(f"box: {cycle_text(g, box)}")
    if args.witness:
        text.append(f"min_minimizer: {cycle_text(g, res.min_minimizer)}")
        text.append(f"max_minimizer: {cycle_text(g, res.max_minimizer)}")
    if args.count:
        text.append(f"minimizer_count: {res.minimizer_count}")
    text.append(f"search_bounds: {cycle_text(g, res.certificate.bounds)}")
    if skipped:
        text.append(f"oracle: skipped ({skipped})")
    return payload, text, checked


def cmd_laufer(args, g, named):
    tr = laufer_minimal_cycle(g)
    payload = {
        "z_min": cycle_json(g, tr.result),
        "chi": lat.chi_int(g, tr.result),
        "steps": [[v, p] for v, p in tr.steps],
    }
    return payload, [cycle_text(g, tr.result)], False


def cmd_zk(args, g, named):
    zk = lat.canonical_cycle(g)
    return {"zk": cycle_json(g, zk)}, [cycle_text(g, zk)], False


def cmd_dual(args, g, named):
    if args.vertex not in g.vertices:
        raise UsageError(f"unknown vertex {args.vertex!r}")
    d = lat.dual(g, args.vertex)
    return {"vertex": args.vertex, "dual": cycle_json(g, d)}, [cycle_text(g, d)], False


def cmd_chi(args, g, named):
    c = parse_cycle(g, named, args.cycle)
    val = lat.chi(g, c)
    return {"cycle": cycle_json(g, c), "chi": fmt_rational(val)}, [str(fmt_rational(val))], False


def cmd_support(args, g, named):
    c = parse_cycle(g, named, args.cycle)
    s = lat.estar_support(g, c)
    support = [v for v in g.ids if v in s.support]
    payload = {
        "cycle": cycle_json(g, c),
        "coefficients": cycle_json(g, s.coefficients),
        "support": support,
        "in_dual_lattice": s.in_dual_lattice,
    }
    text = [" ".join(support), f"coefficients: {cycle_text(g, s.coefficients)}"]
    if not s.in_dual_lattice:
        text.append("warning: cycle is not in L'")
    return payload, text, False


def cmd_ecadim(args, g, named):
    lp = parse_cycle(g, named, args.lprime)
    z = parse_cycle(g, named, args.Z, integral=True)
    dim = lat.eca_dimension(g, lp, z)
    payload = {
        "lprime": cycle_json(g, lp),
        "Z": cycle_json(g, z),
        "empty": dim is None,
        "dimension": None if dim is None else fmt_rational(dim),
    }
    return payload, ["empty" if dim is None else str(fmt_rational(dim))], False


def cmd_transform(args, g, named):
    ops = [x for x in (args.blowup_vertex, args.blowup_edge, args.subgraph) if x is not None]
    if len(ops) != 1:
        raise UsageError("give exactly one of --blowup-vertex, --blowup-edge, --subgraph")
    outputs: list[tuple[G.PlumbingGraph, dict]] = []
    new_vertices: list[str] = []
    if args.blowup_vertex is not None:
        if args.blowup_vertex not in g.vertices:
            raise UsageError(f"unknown vertex {args.blowup_vertex!r}")
        h, recs = G.blow_up_sequence_at(g, args.blowup_vertex, args.times)
        new_vertices = [r.new_vertex for r in recs]
        outputs.append((h, {k: G.pullback(recs, c) for k, c in named.items()}))
        operation = f"blowup-vertex {args.blowup_vertex} x{args.times}"
    elif args.blowup_edge is not None:
        u, w = (vertex_list(g, args.blowup_edge) + [None, None])[:2]
        if u is None or w is None:
            raise UsageError("--blowup-edge expects u,w")
        h, rec = G.blow_up_edge(g, u, w)
        new_vertices = [rec.new_vertex]
        outputs.append((h, {k: rec.pullback(c) for k, c in named.items()}))
        operation = f"blowup-edge {u},{w}"
    else:
        sub = G.full_subgraph(g, vertex_list(g, args.subgraph))
        for comp in sub.components():
            outputs.append((comp, {k: {v: c.get(v, 0) for v in comp.ids} for k, c in named.items()}))
        operation = f"subgraph {args.subgraph}"

    files = []
    texts = [G.serialize_graph(h, cyc) for h, cyc in outputs]
    if args.output:
        paths = [args.output] if len(outputs) == 1 else [f"{args.output}.c{i}" for i in range(len(outputs))]
        for path, text in zip(paths, texts):
            try:
                Path(path).write_text(text, encoding="utf-8")
            except OSError as exc:
                raise DomainFailure(f"cannot write {path}: {exc.strerror}") from exc
            files.append(path)
    if args.dot and len(outputs) == 1:
        Path(args.dot).write_text(G.to_dot(outputs[0][0]), encoding="utf-8")
    payload = {
        "operation": operation,
        "components": len(outputs),
        "new_vertices": new_vertices,
        "output_files": files,
        "graphs": None if files else texts,
        "pullbacks": [{k: cycle_json(h, c) for k, c in cyc.items()} for h, cyc in outputs],
    }
    text = [f"operation: {operation}", f"components: {len(outputs)}"]
    if new_vertices:
        text.append("new_vertices: " + " ".join(new_vertices))
    for i, (h, cyc) in enumerate(outputs):
        for k, c in cyc.items():
            text.append(f"pullback[{i}] {k}: " + " ".join(f"{v}={c.get(v, 0)}" for v in h.ids))
    if files:
        text.append("wrote: " + " ".join(files))
    else:
        for t in texts:
            text.append(t.rstrip("\n"))
    return payload, text, False


def cmd_bounds(args, g, named):
    z = parse_cycle(g, named, args.Z or "z_min", integral=True)
    sb = inv.stability_bound(g, z)
    h1 = inv.generic_h1(g, z)
    payload = {
        "label": BOUND_LABEL,
        "Z": cycle_json(g, z),
        "stability_bound": sb.bound,
        "generic_h1": h1.value,
        "per_component": [{"vertices": list(k), "generic_h1": v} for k, v in h1.per_component.items()],
        "I": None,
        "generic_e_Z": None,
    }
    text = [
        f"# {BOUND_LABEL}",
        f"Z: {cycle_text(g, z)}",
        f"stability_bound: {sb.bound}",
        f"generic_h1: {h1.value}",
    ]
    for k, v in h1.per_component.items():
        text.append(f"  component {','.join(k)}: {v}")
    if args.I:
        verts = vertex_list(g, args.I)
        ez = inv.generic_e_Z(g, z, verts)
        payload["I"] = verts
        payload["generic_e_Z"] = ez
        text.append(f"generic_e_Z: {ez}")
    return payload, text, False


def _witness_json(w: inv.SpectrumWitness):
    return {
        "p_a": w.target_q,
        "kept": list(w.kept),
        "moves": [{"kind": r.kind, "targets": list(r.targets), "new_vertex": r.new_vertex} for r in w.moves],
    }


def cmd_spectrum(args, g, named):
    spectrum = inv.subgraph_genus_spectrum(g, args.max_blowups, cap=args.cap)
    payload = {
        "values": sorted(spectrum.values),
        "witnesses": [_witness_json(w) for w in spectrum.values.values()],
        "partial": spectrum.partial,
        "subsets_checked": spectrum.subsets_checked,
        "realize": None,
    }
    text = ["values: " + " ".join(map(str, sorted(spectrum.values)))]
    for w in spectrum.values.values():
        moves = ",".join(r.targets[0] for r in w.moves) or "-"
        text.append(f"  p_a={w.target_q}: kept {' '.join(w.kept)} (blow-ups: {moves})")
    if spectrum.partial:
        text.append(f"partial: subset cap {args.cap} reached")
    if args.realize is not None:
        w = inv.realize_q(g, args.realize, budget=args.budget, cap=args.cap)
        payload["realize"] = {
            **_witness_json(w),
            "stages": [{"kept": list(s.kept), "p_a": s.p_a, "note": s.note} for s in w.stages],
        }
        text.append(f"realize q={args.realize}: {len(w.stages) - 1} stage(s)")
        for s in w.stages:
            text.append(f"  p_a={s.p_a} [{s.note}] kept {' '.join(s.kept)}")
    return payload, text, False


def cmd_example(args):
    params = {"n": args.n, "big": args.N}
    try:
        g = fixtures.by_name(args.name, **params)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    named = {"z_min": laufer_minimal_cycle(g).result}
    return g, G.serialize_graph(g, named)


def cmd_gen(args):
    g = G.random_negdef_graph(args.seed, args.n)
    return g, G.serialize_graph(g)


GRAPH_COMMANDS = {
    "validate": cmd_validate,
    "invariants": cmd_invariants,
    "minchi": cmd_minchi,
    "laufer": cmd_laufer,
    "zk": cmd_zk,
    "dual": cmd_dual,
    "chi": cmd_chi,
    "support": cmd_support,
    "ecadim": cmd_ecadim,
    "transform": cmd_transform,
    "bounds": cmd_bounds,
    "spectrum": cmd_spectrum,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--json", action="store_true", default=d(False), help="emit JSON")
    p.add_argument("--stable", action="store_true", default=d(False), help="omit the timestamp from JSON")
    p.add_argument("--dot", metavar="FILE", default=d(None), help="also write the graph as DOT")
    p.add_argument("--oracle", action="store_true", default=d(False), help="cross-check min χ by brute force")
    p.add_argument("--oracle-cap", type=int, default=d(ORACLE_CAP), help="largest box the oracle will enumerate")
    p.add_argument("--threads", type=int, default=d(1), help="worker processes for the min-χ search")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plumb", description="Exact invariants of plumbing graphs.")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_cmd(name, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.add_argument("file", help="graph file, or - for stdin")
        return p

    graph_cmd("validate", "check a graph file")
    graph_cmd("invariants", "classification report")
    p = graph_cmd("minchi", "minimum of χ over l > 0 or 0 < l <= box")
    p.add_argument("--box", help="box cycle (name or a=1,b=2)")
    p.add_argument("--witness", action="store_true", help="print the extreme minimizers")
    p.add_argument("--count", action="store_true", help="print the number of minimizers")
    graph_cmd("laufer", "Artin's minimal cycle")
    graph_cmd("zk", "canonical cycle Z_K")
    p = graph_cmd("dual", "dual cycle E*_v")
    p.add_argument("vertex")
    p = graph_cmd("chi", "χ of a cycle")
    p.add_argument("cycle")
    p = graph_cmd("support", "E*-support of a cycle")
    p.add_argument("cycle")
    p = graph_cmd("ecadim", "dim ECa^{l'}(Z) = (l', Z)")
    p.add_argument("lprime")
    p.add_argument("Z")
    p = graph_cmd("transform", "blow-ups and full subgraphs")
    p.add_argument("--blowup-vertex", metavar="V")
    p.add_argument("--times", type=int, default=1)
    p.add_argument("--blowup-edge", metavar="U,W")
    p.add_argument("--subgraph", metavar="V1,V2,...")
    p.add_argument("-o", "--output", metavar="OUT")
    p = graph_cmd("bounds", "stability bound, generic h^1 and e_Z")
    p.add_argument("--Z", help="box cycle (default z_min)")
    p.add_argument("--I", help="vertex set for e_Z")
    p = graph_cmd("spectrum", "arithmetic genera of connected full subgraphs")
    p.add_argument("--max-blowups", type=int, default=0)
    p.add_argument("--realize", type=int, metavar="Q")
    p.add_argument("--budget", type=int, default=10)
    p.add_argument("--cap", type=int, default=inv.SUBSET_CAP)

    p = sub.add_parser("example", help="print a built-in graph", parents=[common])
    p.add_argument("name", help="dpp, star, elliptic, A<n>, D<n>, E<n>")
    p.add_argument("--n", type=int, default=2, help="star: number of arms")
    p.add_argument("--N", type=int, default=20, help="star: weight magnitude of unmarked vertices")
    p = sub.add_parser("gen", help="print a random negative definite tree", parents=[common])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    return parser


def _emit(args, command: str, graph_name, payload, text_lines, oracle_checked, out) -> None:
    if args.json:
        doc = {"command": command, "graph": graph_name, "payload": payload, "oracle_checked": oracle_checked}
        if not args.stable:
            doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write("\n".join(text_lines) + "\n")


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command in ("example", "gen"):
            g, text = cmd_example(args) if args.command == "example" else cmd_gen(args)
            if args.dot:
                Path(args.dot).write_text(G.to_dot(g), encoding="utf-8")
            if args.json:
                _emit(args, args.command, g.name, {"text": text}, [], False, out)
            else:
                out.write(text)
            return 0
        g, named = load(args.file)
        if args.dot and args.command != "transform":
            Path(args.dot).write_text(G.to_dot(g), encoding="utf-8")
        payload, text, checked = GRAPH_COMMANDS[args.command](args, g, named)
        _emit(args, args.command, g.name, payload, text, checked, out)
        return 0
    except (UsageError, GraphSyntaxError) as exc:
        err.write(f"plumb: error: {exc}\n")
        return 2
    except UnknownVertex as exc:
        err.write(f"plumb: error: {exc}\n")
        return 2
    except PlumbError as exc:
        err.write(f"plumb: {type(exc).__name__}: {exc}\n")
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
