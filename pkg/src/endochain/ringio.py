"""JSON input/output: ring definitions, module definitions, reports.

Ring file:    {"field": {"kind": "rational"} | {"kind": "prime", "p": ...},
               "branches": b,
               "generators": [[[ [exp, "coeff"], ... ] per branch], ...]}
   shorthand: {"semigroup": [a1, ...], "field": ...?}
Module file:  {"ambient_rank": [r_i],
               "generators": [[[ [exp,"coeff"],...] per slot] per branch, ...],
               "tail": [[ints per slot] per branch]}   (tail optional)

Coefficients are decimal strings; rationals may be "p/q".
"""

import json

from .errors import SchemaError
from .field import field_from_json, QQ
from .series import LaurentPoly, BranchVector
from .curve_ring import build_ring, semigroup_ring
from .lattice import Ambient, Lattice


def poly_from_pairs(field, pairs):
    if not isinstance(pairs, list):
        raise SchemaError("polynomial must be a list of [exp, coeff] pairs")
    return LaurentPoly.from_pairs(field, pairs)


def ring_from_json(obj, window_hint=None):
    if not isinstance(obj, dict):
        raise SchemaError("ring definition must be an object")
    fld = field_from_json(obj["field"]) if "field" in obj else QQ
    if "semigroup" in obj:
        return semigroup_ring(fld, obj["semigroup"], window_hint=window_hint)
    try:
        branches = int(obj["branches"])
        raw_gens = obj["generators"]
    except KeyError as e:
        raise SchemaError(f"ring definition missing {e}")
    gens = []
    for g in raw_gens:
        if not isinstance(g, list) or len(g) != branches:
            raise SchemaError("each generator needs one entry per branch")
        gens.append(BranchVector([poly_from_pairs(fld, p) for p in g]))
    return build_ring(fld, branches, gens, window_hint=window_hint)


def ring_to_json(ring):
    """Round-trippable definition: canonical window basis plus conductor
    monomials regenerate the identical canonical ring."""
    gens = []
    for bv in ring.scalar_basis():
        gens.append([p.as_pairs() for p in bv.parts])
    for br in range(ring.branches):
        c = ring.conductor[br]
        for m in range(max(c, 1) + 1):
            entry = [[] for _ in range(ring.branches)]
            entry[br] = [[c + m, "1"]]
            gens.append(entry)
    return {
        "field": ring.field.as_json(),
        "branches": ring.branches,
        "generators": gens,
    }


def lattice_from_json(obj, ring):
    if not isinstance(obj, dict):
        raise SchemaError("module definition must be an object")
    try:
        ranks = [int(r) for r in obj["ambient_rank"]]
        raw = obj["generators"]
    except KeyError as e:
        raise SchemaError(f"module definition missing {e}")
    if len(ranks) != ring.branches:
        raise SchemaError("ambient_rank must list one rank per branch")
    amb = Ambient(ranks)
    field = ring.field
    gens = []
    for vec in raw:
        if len(vec) != ring.branches:
            raise SchemaError("each generator needs one entry per branch")
        flat = []
        for br, slots in enumerate(vec):
            if len(slots) != ranks[br]:
                raise SchemaError("generator slot count mismatch")
            for p in slots:
                flat.append(poly_from_pairs(field, p))
        gens.append(tuple(flat))
    known_tail = None
    if "tail" in obj and obj["tail"] is not None:
        known_tail = []
        for br, slots in enumerate(obj["tail"]):
            for h in slots:
                known_tail.append(int(h))
        if len(known_tail) != amb.ncoords:
            raise SchemaError("tail shape mismatch")
    return Lattice.from_generators(ring, amb, gens, known_tail=known_tail)


def lattice_to_json(lat):
    amb = lat.ambient
    out_gens = []
    for g in lat.genset():
        vec = []
        for br in range(amb.nbranches()):
            vec.append([g[c].as_pairs() for c in amb.coords_of(br)])
        out_gens.append(vec)
    tail = []
    lo = []
    for br in range(amb.nbranches()):
        tail.append([lat.hi[c] for c in amb.coords_of(br)])
        lo.append([lat.lo[c] for c in amb.coords_of(br)])
    return {
        "ambient_rank": list(amb.ranks),
        "generators": out_gens,
        "tail": tail,
        "min_valuations": lo,
        "basis": [
            [
                [g[c].as_pairs() for c in amb.coords_of(br)]
                for br in range(amb.nbranches())
            ]
            for g in lat.basis
        ],
    }


def load_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read JSON from {path}: {e}")
