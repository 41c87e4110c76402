"""Text and JSON input: polynomials, algebras, categories and diagrams."""
from __future__ import annotations

import ast
from fractions import Fraction
from typing import Any, Mapping

from .diagrams import AlgebraDiagram, SmallCategory, idempotent_category
from .dg import DGMorphism, PresentedAlgebra
from .errors import InputError
from .graded import GeneratorSymbol, GradedRing, Poly


def parse_poly(text: str, ring: GradedRing) -> Poly:
    """Parse ``3*x^2*y - 1/2*x*T`` style text; ``^`` is exponentiation, coefficients are rational."""
    if not isinstance(text, str):
        raise InputError(f"polynomial must be a string, got {text!r}")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse polynomial {text!r}: {exc.msg} at column {exc.offset}") from None
    return _to_poly(_eval(tree.body, ring, text), ring)


def _to_poly(v, ring: GradedRing) -> Poly:
    return v if isinstance(v, Poly) else ring.const(v)


def _eval(node, ring: GradedRing, text: str):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        if node.id not in ring:
            raise InputError(f"unknown variable {node.id!r} in {text!r}")
        return ring.gen(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, ring, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, ring, text)
        right = _eval(node.right, ring, text)
        if isinstance(node.op, ast.Add):
            return _to_poly(left, ring) + _to_poly(right, ring) if isinstance(left, Poly) or isinstance(right, Poly) else left + right
        if isinstance(node.op, ast.Sub):
            return _to_poly(left, ring) - _to_poly(right, ring) if isinstance(left, Poly) or isinstance(right, Poly) else left - right
        if isinstance(node.op, ast.Mult):
            if isinstance(left, Poly) and isinstance(right, Poly):
                return left * right
            if isinstance(left, Poly):
                return left.scale(right)
            if isinstance(right, Poly):
                return right.scale(left)
            return left * right
        if isinstance(node.op, ast.Div):
            if isinstance(right, Poly) or right == 0:
                raise InputError(f"division must be by a nonzero number in {text!r}")
            return left.scale(1 / right) if isinstance(left, Poly) else left / right
        if isinstance(node.op, ast.Pow):
            if isinstance(right, Poly) or right.denominator != 1 or right < 0:
                raise InputError(f"exponents must be non-negative integers in {text!r}")
            return _to_poly(left, ring) ** int(right) if isinstance(left, Poly) else left ** int(right)
    raise InputError(f"unsupported syntax in polynomial {text!r}")


def load_algebra(payload: Mapping[str, Any], where: str = "algebra") -> PresentedAlgebra:
    """``{"vars": [{"name", "weight"}], "relations": [text]}`` as a presented algebra."""
    try:
        syms = [GeneratorSymbol(v["name"], 0, int(v.get("weight", 1))) for v in payload["vars"]]
    except KeyError as exc:
        raise InputError(f"{where}: missing field {exc}") from None
    ring = GradedRing(syms)
    rels = []
    for i, text in enumerate(payload.get("relations", [])):
        p = parse_poly(text, ring)
        if not p:
            raise InputError(f"{where}.relations[{i}] {text!r} is zero")
        weights = sorted({w for _, w in p.bidegrees()})
        if len(weights) > 1:
            raise InputError(
                f"{where}.relations[{i}] {text!r} is not weight-homogeneous: its terms have weights {weights[0]} to {weights[-1]}"
            )
        rels.append(p)
    return PresentedAlgebra(syms, rels)


def load_category(payload: Mapping[str, Any]) -> SmallCategory:
    """Objects, named morphisms and composition triples ``[g, f, g o f]``; identities may be omitted."""
    if payload.get("builtin") == "idempotent":
        return idempotent_category()
    objects = list(payload["objects"])
    morphisms = {}
    for i, m in enumerate(payload.get("morphisms", [])):
        try:
            morphisms[m["name"]] = (m["source"], m["target"])
        except KeyError as exc:
            raise InputError(f"category.morphisms[{i}]: missing field {exc}") from None
    composition = {}
    for i, triple in enumerate(payload.get("composition", [])):
        if len(triple) != 3:
            raise InputError(f"category.composition[{i}] must be [g, f, g o f]")
        g, f, h = triple
        composition[(g, f)] = h
    identities = payload.get("identities")
    return SmallCategory.from_table(objects, morphisms, composition, identities)


def load_diagram(payload: Mapping[str, Any]) -> AlgebraDiagram:
    """``{"category", "objects": {obj: algebra}, "arrows": {morphism: {var: text}}}``."""
    B = load_category(payload["category"])
    objects = {}
    for a in B.objects:
        spec = payload["objects"].get(str(a))
        if spec is None:
            raise InputError(f"diagram has no algebra for object {a}")
        objects[a] = load_algebra(spec, f"objects.{a}")
    arrows = {}
    arrow_specs = payload.get("arrows", {})
    for m in B.morphisms:
        if B.is_identity(m) and str(m) not in arrow_specs:
            continue
        spec = arrow_specs.get(str(m))
        if spec is None:
            raise InputError(f"diagram has no map for arrow {m}")
        src, tgt = objects[B.source(m)], objects[B.target(m)]
        images = {}
        for var, text in spec.items():
            if var not in src.ring:
                raise InputError(f"arrows.{m}: {var!r} is not a variable of the source")
            images[var] = tgt.normal_form(parse_poly(text, tgt.ring))
        missing = [g.name for g in src.gens if g.name not in images]
        if missing:
            raise InputError(f"arrows.{m}: no image given for {missing[0]}")
        try:
            arrows[m] = DGMorphism(src, tgt, images)
        except InputError as exc:
            raise InputError(f"arrows.{m}: {exc}") from None
    return AlgebraDiagram(B, objects, arrows)
