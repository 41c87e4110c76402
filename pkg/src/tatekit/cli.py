"""Command line front end: ``tatekit <subcommand> <input.json> [options]``.

Reports are JSON documents with sorted keys, so identical inputs give
byte-identical output.  Exit codes: 0 success, 2 invalid input or failed
precondition, 3 insufficient depth or weight bound, 1 internal failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from typing import Any

import jsonschema

from . import __version__
from .deformation import ControllingAlgebra, first_order_space, mc_solve, parse_base, realize
from .derivations import meaningful_weights, tangent_cohomology
from .diagrams import (
    AlgebraDiagram,
    CosimplicialGroup,
    SymmetricGroup,
    TableGroup,
    TruncatedSimplicialSet,
    compatible_tuples,
    constant_diagram,
    cosimplicial_extend,
    epsilon_star,
    factor_epi_mono,
    is_anchor,
    level_counts,
    nerve_truncation,
    nondegenerate_direct_subcategory,
    reedy_cofibrant_replacement,
)
from .dg import DGMorphism, SemifreeAlgebra
from .errors import InputError, IntegrityError, PreconditionError, TruncationError, UnsupportedIndexError
from .factorization import tate_factorize
from .parsing import load_algebra, load_category, load_diagram

SCHEMA_VERSION = "1"

_ALGEBRA = {
    "type": "object",
    "required": ["vars"],
    "properties": {
        "vars": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {"name": {"type": "string", "minLength": 1}, "weight": {"type": "integer", "minimum": 1}},
            },
        },
        "relations": {"type": "array", "items": {"type": "string"}},
    },
}
_CATEGORY = {
    "type": "object",
    "properties": {
        "builtin": {"enum": ["idempotent"]},
        "objects": {"type": "array"},
        "morphisms": {
            "type": "array",
            "items": {"type": "object", "required": ["name", "source", "target"]},
        },
        "composition": {"type": "array", "items": {"type": "array", "minItems": 3, "maxItems": 3}},
        "identities": {"type": "object"},
    },
    "anyOf": [{"required": ["builtin"]}, {"required": ["objects"]}],
}
_DIAGRAM = {
    "type": "object",
    "required": ["category", "objects"],
    "properties": {
        "category": _CATEGORY,
        "objects": {"type": "object", "additionalProperties": _ALGEBRA},
        "arrows": {"type": "object", "additionalProperties": {"type": "object", "additionalProperties": {"type": "string"}}},
    },
}
SCHEMAS = {
    "algebra": {"type": "object", "properties": {"algebra": _ALGEBRA}, "required": ["algebra"]},
    "algebra_or_diagram": {
        "type": "object",
        "properties": {"algebra": _ALGEBRA, "diagram": _DIAGRAM},
        "oneOf": [{"required": ["algebra"]}, {"required": ["diagram"]}],
    },
    "category": {"type": "object", "properties": {"category": _CATEGORY}, "required": ["category"]},
    "diagram": {"type": "object", "properties": {"diagram": _DIAGRAM}, "required": ["diagram"]},
    "cosimplicial": {
        "type": "object",
        "required": ["group", "simplicial_set", "n"],
        "properties": {
            "group": {
                "type": "object",
                "oneOf": [
                    {"required": ["symmetric"], "properties": {"symmetric": {"type": "integer", "minimum": 1, "maximum": 4}}},
                    {"required": ["table"], "properties": {"table": {"type": "array"}}},
                ],
            },
            "simplicial_set": {
                "type": "object",
                "required": ["nerve_of", "top"],
                "properties": {"nerve_of": _CATEGORY, "top": {"type": "integer", "minimum": 1}},
            },
            "n": {"type": "integer", "minimum": 1},
            "indices": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
    },
}


def _validate(doc: Any, schema_name: str):
    try:
        jsonschema.validate(doc, SCHEMAS[schema_name])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"input does not match the {schema_name} schema at {path}: {exc.message}") from None


def _read(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _generators(alg: SemifreeAlgebra) -> list[dict]:
    return [
        {"name": g.name, "degree": g.degree, "weight": g.weight, "d": str(alg.diff[g.name]) if g.name in alg.diff else "0"}
        for g in alg.gens
    ]


def _by_degree(slices) -> dict:
    out: dict[str, list[int]] = {}
    for deg, w in sorted(slices):
        out.setdefault(str(deg), []).append(w)
    return out


def _certificate(cert) -> dict:
    return {
        "depth": cert.degree_depth,
        "weight_bound": cert.weight_bound,
        "quasi_iso_weights": _by_degree(cert.verified),
        "surjective_weights": _by_degree(cert.surjective),
    }


def _resolve_algebra(S, depth: int, weight: int):
    source = SemifreeAlgebra([])
    return tate_factorize(DGMorphism(source, S, {}), depth, weight)


def cmd_resolve(doc: dict, args) -> dict:
    _validate(doc, "algebra")
    S = load_algebra(doc["algebra"])
    fact = _resolve_algebra(S, args.depth, args.weight)
    return {
        "generators": _generators(fact.middle),
        "stages": [
            {"degree": st.degree, "purpose": st.purpose, "generators": [g.name for g in st.generators]}
            for st in fact.stages
        ],
        "certificate": _certificate(fact.certificate),
    }


def _weights(fact, i: int, upper: int) -> range:
    return meaningful_weights(fact.middle, i, upper)


def cmd_tangent(doc: dict, args) -> dict:
    _validate(doc, "algebra")
    S = load_algebra(doc["algebra"])
    if args.depth < 3:
        raise TruncationError(f"T^2 needs depth at least 3, got --depth {args.depth}")
    fact = _resolve_algebra(S, args.depth, args.weight)
    out = {}
    for i in (1, 2):
        lows = [min(_weights(fact, k, args.weight).start, 0) for k in (i - 1, i, i + 1)]
        table = tangent_cohomology(fact, i, range(min(lows), args.weight + 1))
        out[f"T{i}"] = {"by_weight": {str(w): d for w, d in table.items() if d}, "total": sum(table.values())}
    out["weight_range"] = [min(lows), args.weight]
    out["generators"] = _generators(fact.middle)
    return out


def _replacement_for(S: AlgebraDiagram, args):
    """Replacement over the index itself when it is direct, otherwise over the nondegenerate strings."""
    try:
        S.index.direct_degrees()
        return reedy_cofibrant_replacement(S, args.depth, args.weight), "direct"
    except UnsupportedIndexError:
        N = nerve_truncation(S.index, args.k)
        restricted = epsilon_star(S, args.k, N).restrict(nondegenerate_direct_subcategory(N))
        return reedy_cofibrant_replacement(restricted, args.depth, args.weight), f"nerve_k{args.k}"


def _diagram_input(doc: dict) -> AlgebraDiagram:
    if "diagram" in doc:
        return load_diagram(doc["diagram"])
    from .diagrams import SmallCategory

    return constant_diagram(SmallCategory.discrete(["*"]), load_algebra(doc["algebra"]))


def _family(x) -> dict:
    return {str(a): {n: str(v) for n, v in sorted(c.values.items())} for a, c in x.components.items() if c}


def cmd_deform(doc: dict, args) -> dict:
    _validate(doc, "algebra_or_diagram")
    S = _diagram_input(doc)
    A = parse_base(args.base)
    rep, route = _replacement_for(S, args)
    L = ControllingAlgebra(rep)
    ws = range(-args.weight, args.weight + 1)
    sol = mc_solve(L, A, ws)
    base = sol.base
    out = {
        "route": route,
        "base": {"parameters": base.params, "order": base.order, "weights": base.weights, "dimension": base.dim()},
        "orbit_dimension": sol.orbit_dimension,
        "first_order": [{"monomial": base.format(a), "representative": _family(r)} for a, r in sol.first_order],
        "higher_order_h1": {base.format(a): d for a, d in sol.higher_order_dims.items()},
        "obstructions": [
            {"first_order_index": j, "monomial": base.format(ob.monomial), "weight": ob.weight, "order": ob.order,
             "class": [str(c) for c in ob.class_vector]}
            for j, ob in sol.obstructions
        ],
        "representatives": [],
    }
    for mc in sol.representatives:
        W = min(args.weight, rep.weight_bound)
        D = realize(rep, mc, W)
        out["representatives"].append(
            {
                "xi": {base.format(a): _family(v) for a, v in sorted(mc.xi.terms.items())},
                "h0_relations": {str(k): v for k, v in D.h0.items()},
                "flat": D.flat(),
                "reduces": D.reduces(),
                "anchors_checked": D.anchors_checked,
            }
        )
    return out


def cmd_nerve(doc: dict, args) -> dict:
    if isinstance(doc, dict) and "diagram" in doc and "category" not in doc:
        doc = {"category": doc["diagram"].get("category")}
    _validate(doc, "category")
    B = load_category(doc["category"])
    N = nerve_truncation(B, args.k)
    factorizations_unique = True
    surj = [m for m in N.morphisms if m.is_surjective()]
    inj = [m for m in N.morphisms if m.is_injective()]
    for f in N.morphisms:
        s, i = factor_epi_mono(N, f)
        count = sum(1 for s2 in surj for i2 in inj if s2.target == i2.source and N.compose(i2, s2) == f)
        if count != 1 or N.compose(i, s) != f:
            factorizations_unique = False
    return {
        "k": args.k,
        "level_counts": level_counts(N),
        "objects": len(N.objects),
        "morphisms": len(N.morphisms),
        "anchors": sum(1 for m in N.morphisms if is_anchor(m)),
        "isomorphisms_are_identities": all(N.is_identity(m) for m in N.isomorphisms()),
        "epi_mono_factorization_unique": factorizations_unique,
    }


def cmd_cosimplicial(doc: dict, args) -> dict:
    _validate(doc, "cosimplicial")
    g = doc["group"]
    H = SymmetricGroup(g["symmetric"]) if "symmetric" in g else TableGroup(g["table"])
    ss = doc["simplicial_set"]
    X = TruncatedSimplicialSet.nerve(load_category(ss["nerve_of"]), ss["top"])
    n = doc["n"]
    if n + 1 > X.top:
        raise TruncationError(f"extension from level {n} needs simplices up to level {n + 1}; top is {X.top}")
    G = CosimplicialGroup.of_functions(H, X)
    index_sets = [sorted(doc["indices"])] if "indices" in doc else [
        list(c) for r in range(n + 2) for c in itertools.combinations(range(n + 1), r)
    ]
    results = []
    for I in index_sets:
        if any(i > n for i in I):
            raise InputError(f"index set {I} leaves [0, {n}]")
        count = 0
        for x in compatible_tuples(G, n, I):
            z = cosimplicial_extend(G, n, x)
            if any(G.sigma(n, i, z) != x[i] for i in I):
                raise IntegrityError(f"extension fails for I={I}")
            count += 1
        results.append({"indices": I, "compatible_tuples": count, "all_extended": True})
    return {"level_sizes": [len(l) for l in X.levels], "n": n, "results": results}


def cmd_resolve_diagram(doc: dict, args) -> dict:
    _validate(doc, "diagram")
    S = load_diagram(doc["diagram"])
    rep, route = _replacement_for(S, args)
    R = rep.diagram
    checks = rep.check()
    L = ControllingAlgebra(rep)
    h1, h2 = first_order_space(L, range(-args.weight, args.weight + 1))
    return {
        "route": route,
        "objects": {
            str(a): {
                "generators": _generators(R.objects[a]),
                "latching_generators": sorted(rep.latching[a].classes),
                "certificate": _certificate(rep.factorizations[a].certificate),
            }
            for a in R.index.objects
        },
        "checks": checks,
        "H1": {"by_weight": {str(w): d for w, d in h1.items() if d}, "total": sum(h1.values())},
        "H2": {"by_weight": {str(w): d for w, d in h2.items() if d}, "total": sum(h2.values())},
    }


COMMANDS = {
    "resolve": cmd_resolve,
    "tangent": cmd_tangent,
    "deform": cmd_deform,
    "nerve": cmd_nerve,
    "cosimplicial-check": cmd_cosimplicial,
    "resolve-diagram": cmd_resolve_diagram,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tatekit", description="Resolutions, tangent cohomology and deformations of graded algebras and diagrams.")
    p.add_argument("--version", action="version", version=f"tatekit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("input", help="input JSON file")
        sp.add_argument("--depth", type=int, default=3, help="cohomological depth N of resolutions")
        sp.add_argument("--weight", type=int, default=6, help="weight bound W")
        sp.add_argument("--k", type=int, default=2, help="nerve truncation level")
        sp.add_argument("--base", default="t^2", help="Artin base ring, e.g. 't^2' or 't1,t2^2'")
        sp.add_argument("--out", help="write the report here instead of stdout")
    return p


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.depth < 1 or args.weight < 1 or args.k < 1:
        print("error: --depth, --weight and --k must be positive", file=sys.stderr)
        return 2
    try:
        doc = _read(args.input)
        body = COMMANDS[args.command](doc, args)
    except (InputError, PreconditionError, UnsupportedIndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TruncationError as exc:
        print(f"truncation: {exc}", file=sys.stderr)
        return 3
    except IntegrityError as exc:
        print(f"internal: {exc}", file=sys.stderr)
        return 1
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": args.command,
        "parameters": {"depth": args.depth, "weight": args.weight, "k": args.k, "base": args.base},
        "report": body,
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
