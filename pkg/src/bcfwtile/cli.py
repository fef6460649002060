"""Batch command-line interface.

Every run prints (or writes to --out) a report holding the resolved
configuration, the package version, the master seed, the wall time and the
result payload.  Exit code 0 means pass, 1 a failed verification, 2 a usage
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .amplituhedron import (SignatureError, certify_signature, make_tile, probe_adjacency,
                            probe_injectivity, verify_tiling)
from .bcfw import (ChordDiagram, build_cell, chord_relations, collection, enumerate_chords,
                   enumerate_collections, recipe_from_json, recipe_text, recipe_to_json,
                   sample_recipe_point, standard_recipe)
from .cluster import check_compatible, classify_frozen, quiver_from_chords
from .grassmannian import make_rng, point_to_json, sample_Z, spawn
from .plabic import dimension, positroid_of
from .promotion import irr

COMMANDS = ("chords", "cell", "irr", "signs", "quiver", "verify-tiling", "adjacency", "compat")


class UsageError(Exception):
    pass


@dataclass
class Command:
    name: str
    options: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {"command": self.name, **{k: v for k, v in sorted(self.options.items()) if k != "out"}}


@dataclass
class RunReport:
    command: dict
    seed: int
    result: dict
    passed: bool = True
    wall_time: float = 0.0
    version: str = __version__

    def to_json(self) -> dict:
        return {"command": self.command, "version": self.version, "seed": self.seed,
                "wall_time": round(self.wall_time, 3), "passed": self.passed, "result": self.result}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bcfwtile", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, nk=False, chords=False):
        sp.add_argument("--seed", type=int, default=int(os.environ.get("BCFWTILE_SEED", 0)))
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--format", choices=("json", "dot", "text"), default="json")
        if nk:
            sp.add_argument("--n", type=int, required=not chords)
            sp.add_argument("--k", type=int, required=not chords)
        if chords:
            sp.add_argument("--chords", help="chord diagram JSON file {n, chords}")

    sp = sub.add_parser("chords", help="enumerate chord diagrams")
    common(sp, nk=True)
    sp = sub.add_parser("cell", help="recipe, plabic graph and a sample point of a standard cell")
    common(sp, chords=True)
    sp.add_argument("--recipe", help="recipe JSON file (instead of --chords)")
    sp = sub.add_parser("irr", help="coordinate cluster variables")
    common(sp, chords=True)
    sp.add_argument("--recipe", help="recipe JSON file (instead of --chords)")
    sp = sub.add_parser("signs", help="certify the sign signature of a tile")
    common(sp, chords=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--z-count", type=int, default=3)
    sp = sub.add_parser("quiver", help="quiver of a chord diagram from the rule table")
    common(sp, chords=True)
    sp = sub.add_parser("verify-tiling", help="Monte Carlo tiling verification")
    common(sp, nk=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--cell-samples", type=int, default=20)
    sp.add_argument("--strategy", default="standard",
                    help="'standard' or 'variant:J' (J-th distinct collection)")
    sp = sub.add_parser("adjacency", help="boundary-crossing probes from one standard tile")
    common(sp, chords=True)
    sp.add_argument("--samples", type=int, default=200, help="number of crossings")
    sp.add_argument("--pairs", type=int, default=0, help="also run an injectivity probe")
    sp = sub.add_parser("compat", help="search a cluster containing the coordinate cluster variables")
    common(sp, chords=True)
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--max-seeds", type=int, default=200000)
    return p


def parse(argv) -> Command:
    args = _parser().parse_args(argv)
    opts = {k: v for k, v in vars(args).items() if k != "command" and v is not None}
    for key in ("n", "k", "samples", "depth", "cell_samples", "z_count", "pairs", "max_seeds"):
        if key in opts and opts[key] < 0:
            raise UsageError(f"--{key.replace('_', '-')} must be nonnegative")
    if "n" in opts and "k" in opts and opts["n"] < opts["k"] + 4 and args.command != "chords":
        raise UsageError("need n >= k + 4")
    if args.command in ("cell", "irr") and not (opts.get("chords") or opts.get("recipe")):
        raise UsageError("need --chords or --recipe")
    if args.command in ("signs", "quiver", "adjacency", "compat") and not opts.get("chords"):
        raise UsageError("need --chords")
    strategy = opts.get("strategy", "standard")
    if strategy != "standard" and not (strategy.startswith("variant:") and strategy[8:].isdigit()):
        raise UsageError("--strategy must be 'standard' or 'variant:J'")
    return Command(args.command, opts)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _diagram(c: Command) -> ChordDiagram:
    try:
        return ChordDiagram.from_json(_load_json(c.options["chords"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad chord diagram: {exc}") from None


def _recipe(c: Command):
    if c.options.get("recipe"):
        try:
            return recipe_from_json(_load_json(c.options["recipe"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad recipe: {exc}") from None
    return standard_recipe(_diagram(c))


def _label(lab) -> str:
    return f"{lab[1]}_{lab[0]}"


# ---------------------------------------------------------------- commands

def _chords(c: Command) -> tuple[dict, bool, str]:
    n, k = c.options["n"], c.options["k"]
    Ds = enumerate_chords(n, k)
    text = "\n".join(" ".join("(" + ",".join(map(str, ch)) + ")" for ch in D.chords) for D in Ds)
    return {"n": n, "k": k, "count": len(Ds), "diagrams": [D.to_json() for D in Ds]}, True, text


def _cell(c: Command):
    R = _recipe(c)
    G = build_cell(R)
    P = positroid_of(G)
    C = sample_recipe_point(R, c.options["seed"])
    res = {"recipe": recipe_to_json(R), "recipe_text": recipe_text(R), "k": R.k,
           "dimension": dimension(G), "bases": len(P.bases), "graph": G.to_json(),
           "sample": point_to_json(C)}
    text = f"{recipe_text(R)}\nk={R.k} dimension={dimension(G)} bases={len(P.bases)}"
    return res, dimension(G) == 4 * R.k, text


def _irr(c: Command):
    R = _recipe(c)
    I = irr(R)
    text = "\n".join(f"{e.label}: {e.poly.compact()}" for e in I)
    return {"count": len(I), "elements": I.to_json(),
            "collisions": [e.label for e in I.collisions]}, True, text


def _signs(c: Command):
    D = _diagram(c)
    R = standard_recipe(D)
    rng = make_rng(c.options["seed"])
    runs = []
    sigs = set()
    for _ in range(c.options["z_count"]):
        Z = sample_Z(D.k, D.n, spawn(rng))
        T = certify_signature(make_tile(R, Z), c.options["samples"], spawn(rng))
        sigs.add(T.signature)
        runs.append({"Z_seed": Z.seed, "tile": T.to_json()})
    negatives = [e.label for e in T.negatives()]
    res = {"z_independent": len(sigs) == 1, "negative": negatives,
           "negative_polys": [e.poly.compact() for e in T.negatives()], "runs": runs}
    text = "\n".join(f"{e.label}: {'+' if s > 0 else '-'}  {e.poly.compact()}"
                     for e, s in T.sign_map().items())
    return res, len(sigs) == 1, text


def _quiver(c: Command):
    D = _diagram(c)
    CQ = quiver_from_chords(D)
    Q = CQ.quiver
    dot = Q.to_dot(CQ.dotted)
    for lab in Q.labels:
        dot = dot.replace(f'label="{lab}"', f'label="{_label(lab)}"')
    frozen = classify_frozen(D)
    res = {"vertices": [{"label": _label(l), "mutable": m} for l, m in zip(Q.labels, Q.mutable)],
           "arrows": [{"from": _label(Q.labels[u]), "to": _label(Q.labels[v]),
                       "dotted": (u, v) in CQ.dotted} for (u, v), _ in Q.arrows],
           "configurations": [{"kind": kd, "i": i, "j": j} for kd, i, j in CQ.configurations],
           "frozen": sorted(_label(l) for l, s in frozen.items() if s == "frozen"),
           "relations": chord_relations(D).to_json()}
    text = "\n".join(f"{a['from']} -> {a['to']}{' (dotted)' if a['dotted'] else ''}" for a in res["arrows"])
    return res, True, text if c.options["format"] != "dot" else dot


def _collection_for(c: Command):
    n, k = c.options["n"], c.options["k"]
    strategy = c.options.get("strategy", "standard")
    if strategy == "standard":
        return collection(tuple(range(1, n + 1)), k), ("standard",)
    j = int(strategy[8:])
    colls, _ = enumerate_collections(n, k, budget=j + 1)
    if j >= len(colls):
        raise UsageError(f"only {len(colls)} distinct collections found")
    return list(colls[j].recipes), colls[j].provenance


def _verify_tiling(c: Command):
    n, k = c.options["n"], c.options["k"]
    recipes, prov = _collection_for(c)
    rng = make_rng(c.options["seed"])
    Z = sample_Z(k, n, spawn(rng))
    rep = verify_tiling(recipes, Z, c.options["samples"], spawn(rng), c.options["cell_samples"])
    res = rep.to_json()
    res.pop("runtime")
    res["provenance"] = list(prov)
    res["Z_seed"] = Z.seed
    text = (f"tiles={rep.tiles} coverage={rep.coverage:.4f} violations={len(rep.violations)} "
            f"boundary_resamples={rep.boundary_resamples} {'PASS' if rep.passed else 'FAIL'}")
    return res, rep.passed, text


def _adjacency(c: Command):
    D = _diagram(c)
    rng = make_rng(c.options["seed"])
    Z = sample_Z(D.k, D.n, spawn(rng))
    recipes = collection(tuple(range(1, D.n + 1)), D.k)
    R = standard_recipe(D)
    tiles = [certify_signature(make_tile(S, Z), 50, spawn(rng)) for S in recipes]
    T = next(t for t in tiles if t.recipe == R)
    rep = probe_adjacency(T, tiles, c.options["samples"], spawn(rng), frozen=classify_frozen(D))
    res = {"adjacency": rep.to_json(), "Z_seed": Z.seed}
    ok = rep.passed
    if c.options.get("pairs"):
        inj = probe_injectivity(T, c.options["pairs"], spawn(rng))
        res["injectivity"] = inj.to_json()
        ok = ok and inj.passed
    text = (f"crossed={rep.crossed} no_flip={rep.no_flip} multiple={rep.multiple} "
            f"nonfrozen_unique={rep.nonfrozen_unique} {'PASS' if ok else 'FAIL'}")
    return res, ok, text


def _compat(c: Command):
    D = _diagram(c)
    I = irr(standard_recipe(D))
    res = check_compatible(I.polys, 4, D.n, c.options["depth"], c.options["max_seeds"])
    text = f"{res.status} explored={res.explored} sequence={list(res.sequence)}"
    return res.to_json(), res.status == "compatible", text


HANDLERS = {"chords": _chords, "cell": _cell, "irr": _irr, "signs": _signs, "quiver": _quiver,
            "verify-tiling": _verify_tiling, "adjacency": _adjacency, "compat": _compat}


def execute(c: Command) -> tuple[RunReport, str]:
    """Run a command; returns the report and the rendered output."""
    t0 = time.perf_counter()
    try:
        res, ok, text = HANDLERS[c.name](c)
    except SignatureError as exc:
        res, ok, text = {"error": str(exc)}, False, f"FAIL: {exc}"
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = RunReport(c.echo(), c.options.get("seed", 0), res, ok, time.perf_counter() - t0)
    fmt = c.options.get("format", "json")
    if fmt == "json":
        out = json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n"
    elif fmt == "dot" and c.name != "quiver":
        raise UsageError("--format dot is only available for quiver")
    else:
        out = text if text.endswith("\n") else text + "\n"
    return rep, out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        c = parse(argv)
        rep, out = execute(c)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    path = c.options.get("out")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
