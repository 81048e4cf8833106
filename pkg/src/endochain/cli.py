"""Command-line interface.

Subcommands: ring, chain, resolve, gldim, verify.  Exit status 0 on success,
1 with a machine-readable error object for engine errors, 2 for I/O or
schema problems.  --double-check recomputes every report at twice the build
window and insists on identical output.
"""

import argparse
import json
import os
import sys

from .errors import EndochainError, SchemaError
from .curve_ring import ring_report
from .chain import build_chain_tree, chain_family, chain_json
from .endo import build_endo_algebra, global_dimension, projectivization_check, fcmt_check
from .resolver import keyred_resolve
from . import ringio
from .verify import run_suites


def _emit(args, payload):
    if args.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        _emit_text(payload)


def _emit_text(payload, indent=0):
    pad = "  " * indent
    if isinstance(payload, dict):
        for k, v in payload.items():
            if isinstance(v, (dict, list)):
                print(f"{pad}{k}:")
                _emit_text(v, indent + 1)
            else:
                print(f"{pad}{k}: {v}")
    elif isinstance(payload, list):
        for v in payload:
            if isinstance(v, (dict, list)):
                _emit_text(v, indent + 1)
            else:
                print(f"{pad}- {v}")
    else:
        print(f"{pad}{payload}")


def _load_ring(path, window_hint=None):
    return ringio.ring_from_json(ringio.load_json(path), window_hint=window_hint)


def cmd_ring(args):
    ring = _load_ring(args.input)
    rep = ring_report(ring).as_json()
    rep["definition"] = ringio.ring_to_json(ring)
    if args.double_check:
        ring2 = _load_ring(args.input, window_hint=2 * ring.window_bound)
        rep2 = ring_report(ring2).as_json()
        rep2["definition"] = ringio.ring_to_json(ring2)
        if rep != rep2:
            raise EndochainError("double-check mismatch in ring report")
        rep["double_check"] = "ok"
    return rep


def cmd_chain(args):
    ring = _load_ring(args.input)
    tree = build_chain_tree(ring)
    rep = chain_json(tree)
    if args.double_check:
        ring2 = _load_ring(args.input, window_hint=2 * ring.window_bound)
        rep2 = chain_json(build_chain_tree(ring2))
        if rep != rep2:
            raise EndochainError("double-check mismatch in chain report")
        rep["double_check"] = "ok"
    return rep


def _resolution_json(res, tree):
    fam = chain_family(tree)
    label_of = {m.lattice.key(): m.label for m in fam.members}
    terms = []
    for t in res.terms:
        terms.append(
            {
                "ambient_rank": list(t.lattice.ambient.ranks),
                "decomposition": [label_of.get(tg.key(), "?") for tg in t.tags],
            }
        )
    return {
        "length": res.length(),
        "chain_depth": tree.n,
        "terms": terms,
        "maps": [m.render() for m in res.maps],
        "certificates": res.certificates,
        "family": [m.label for m in fam.members],
    }


def cmd_resolve(args):
    ring = _load_ring(args.ring)
    lat = ringio.lattice_from_json(ringio.load_json(args.module), ring)
    tree = build_chain_tree(ring)
    res = keyred_resolve(lat, tree=tree)
    rep = _resolution_json(res, tree)
    if args.double_check:
        ring2 = _load_ring(args.ring, window_hint=2 * ring.window_bound)
        lat2 = ringio.lattice_from_json(ringio.load_json(args.module), ring2)
        tree2 = build_chain_tree(ring2)
        rep2 = _resolution_json(keyred_resolve(lat2, tree=tree2), tree2)
        if rep != rep2:
            raise EndochainError("double-check mismatch in resolution report")
        rep["double_check"] = "ok"
    if not res.all_certified():
        raise EndochainError("resolution certificates failed", report=rep)
    return rep


def _gldim_payload(ring, args):
    tree = build_chain_tree(ring)
    fam = chain_family(tree)
    if args.mcm:
        mcm_defs = ringio.load_json(args.mcm)
        lats = [
            ringio.lattice_from_json(obj, ring) for obj in mcm_defs["modules"]
        ]
        rep = fcmt_check(ring, lats, cap=args.pd_cap, n=tree.n)
    else:
        alg = build_endo_algebra(ring, fam.lattices(), fam.labels())
        rep = global_dimension(alg, cap=args.pd_cap, n=tree.n)
        out = rep.as_json()
        out["projectivization_check"] = projectivization_check(alg)
        return out
    return rep.as_json()


def cmd_gldim(args):
    ring = _load_ring(args.ring)
    rep = _gldim_payload(ring, args)
    if args.double_check:
        ring2 = _load_ring(args.ring, window_hint=2 * ring.window_bound)
        rep2 = _gldim_payload(ring2, args)
        if rep != rep2:
            raise EndochainError("double-check mismatch in gldim report")
        rep["double_check"] = "ok"
    return rep


def cmd_verify(args):
    names = None if args.suite == "all" else args.suite.split(",")
    results = run_suites(names=names, seed=args.seed, cases=args.cases, pd_cap=args.pd_cap)
    payload = {"seed": args.seed, "checks": []}
    ok = True
    for name, passed, details in results:
        payload["checks"].append({"name": name, "passed": passed, "details": details})
        ok = ok and passed
    payload["all_passed"] = ok
    return payload, 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="endochain",
        description="Exact chains of endomorphism rings, lattice resolutions, "
        "and global dimension of End(M)^op for curve singularities.",
    )
    p.add_argument("--output", choices=["text", "json"], default="json")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("ring", help="ring report (multiplicity, conductor, delta)")
    pr.add_argument("--input", required=True)
    pr.add_argument("--double-check", action="store_true")
    pr.set_defaults(func=cmd_ring)

    pc = sub.add_parser("chain", help="iterated endomorphism-ring tree")
    pc.add_argument("--input", required=True)
    pc.add_argument("--double-check", action="store_true")
    pc.set_defaults(func=cmd_chain)

    ps = sub.add_parser("resolve", help="resolve a torsion-free module by the chain family")
    ps.add_argument("--ring", required=True)
    ps.add_argument("--module", required=True)
    ps.add_argument("--double-check", action="store_true")
    ps.set_defaults(func=cmd_resolve)

    pg = sub.add_parser("gldim", help="global dimension of End((+) E(R))^op")
    pg.add_argument("--ring", required=True)
    pg.add_argument("--mcm", help="module-list file for the finite-CM-type check")
    pg.add_argument("--pd-cap", type=int, default=None)
    pg.add_argument("--double-check", action="store_true")
    pg.set_defaults(func=cmd_gldim)

    pv = sub.add_parser("verify", help="run the invariant suites on the corpus")
    pv.add_argument("--suite", default="all", help="all or comma list: lemma,chain,resolver,endo")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--cases", type=int, default=200)
    pv.add_argument("--pd-cap", type=int, default=None)
    pv.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    p = build_parser()
    args = p.parse_args(argv)
    if hasattr(args, "pd_cap") and args.pd_cap is None:
        args.pd_cap = int(os.environ.get("ENDOCHAIN_PD_CAP", "16"))
    try:
        out = args.func(args)
        if isinstance(out, tuple):
            payload, status = out
        else:
            payload, status = out, 0
        _emit(args, payload)
        return status
    except SchemaError as e:
        _emit(args, e.as_json())
        return 2
    except EndochainError as e:
        _emit(args, e.as_json())
        return 1
    except OSError as e:
        _emit(args, {"code": "IOError", "message": str(e), "context": {}})
        return 2


if __name__ == "__main__":
    sys.exit(main())
