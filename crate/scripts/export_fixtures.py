#!/usr/bin/env python3
"""Dump uv-quotient complexes from SnapPy's knot Floer engine into the
canonical fixture format read by `hfklift`.

    python3 scripts/export_fixtures.py census --max-crossings 12 --out fixtures/census
    python3 scripts/export_fixtures.py thick2 --crossings 14 --out fixtures/census
    python3 scripts/export_fixtures.py knots 3a1 4a1 --mirrors --out fixtures/samples

Census bundles are JSON Lines: one canonical complex object per line.
"""
import argparse
import gzip
import json
import os
import sys
import warnings

warnings.filterwarnings("ignore")

import snappy  # noqa: E402
from knot_floer_homology import pd_to_hfk  # noqa: E402


# the engine output fields `translate` relies on; recorded in manifests
ENGINE_FIELDS = ["generators", "differentials"]


def engine_info():
    import knot_floer_homology
    return {
        "package": "knot_floer_homology",
        "version": getattr(knot_floer_homology, "__version__", "unknown"),
        "snappy": snappy.__version__,
        "fields": ENGINE_FIELDS,
    }


def translate(name, data):
    """Engine output -> canonical object. The engine reports generators as
    name -> (alexander, maslov) and differentials as (source, target) -> coeff,
    leaving the u/v powers implicit in the gradings."""
    keys = sorted(data["generators"])
    index = {k: i for i, k in enumerate(keys)}
    gens = []
    for k in keys:
        a, m = data["generators"][k]
        gens.append({"id": index[k], "maslov": int(m), "alexander": int(a)})
    arrows = []
    for (s, t), c in sorted(data["differentials"].items()):
        if c % 2 == 0:
            continue
        sa, sm = data["generators"][s]
        ta, tm = data["generators"][t]
        if tm == sm - 1:
            u, v = 0, sa - ta
        else:
            u, v = (tm - sm + 1) // 2, 0
            assert ta - sa == u, (name, s, t)
        arrows.append({"from": index[s], "to": index[t], "u": int(u), "v": int(v)})
    return {"name": name, "generators": gens, "arrows": arrows}


def export_link(name, link, mirror=False):
    if mirror:
        link = link.mirror()
        name = "m" + name
    data = pd_to_hfk(link.PD_code(), complex=True)
    return translate(name, data)


def thickness(obj):
    deltas = [g["maslov"] - g["alexander"] for g in obj["generators"]]
    return max(deltas) - min(deltas)


def census_iter(crossings, alternating=None):
    kw = dict(knots_vs_links="knots", crossings=crossings)
    if alternating is not None:
        kw["alternating"] = alternating
    for M in snappy.HTLinkExteriors(**kw):
        yield M.name().lstrip("K"), M.link()


def write_jsonl(path, objs):
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "wt") as f:
        for o in objs:
            f.write(json.dumps(o, separators=(",", ":")) + "\n")


def main():
    p = argparse.ArgumentParser()
    sub = p.add_subparsers(dest="cmd", required=True)
    c = sub.add_parser("census")
    c.add_argument("--max-crossings", type=int, required=True)
    c.add_argument("--out", required=True)
    t = sub.add_parser("thick2")
    t.add_argument("--crossings", type=int, required=True)
    t.add_argument("--out", required=True)
    k = sub.add_parser("knots")
    k.add_argument("names", nargs="+")
    k.add_argument("--mirrors", action="store_true")
    k.add_argument("--out", required=True)
    args = p.parse_args()
    os.makedirs(args.out, exist_ok=True)

    if args.cmd == "census":
        for n in range(3, args.max_crossings + 1):
            objs = [export_link(nm, L) for nm, L in census_iter(n)]
            write_jsonl(os.path.join(args.out, f"knots_{n:02}.jsonl.gz"), objs)
            print(n, len(objs), file=sys.stderr)
    elif args.cmd == "thick2":
        objs = []
        for i, (nm, L) in enumerate(census_iter(args.crossings, alternating=False)):
            o = export_link(nm, L)
            if thickness(o) == 2:
                objs.append(o)
            if i % 1000 == 0:
                print(i, len(objs), file=sys.stderr)
        write_jsonl(os.path.join(args.out, f"thick2_{args.crossings:02}.jsonl"), objs)
        print(args.crossings, len(objs), file=sys.stderr)
    else:
        manifest_path = os.path.join(args.out, "manifest.json")
        entries = {}
        if os.path.exists(manifest_path):
            with open(manifest_path) as f:
                entries = {e["name"]: e for e in json.load(f)["knots"]}
        for nm in args.names:
            L = snappy.Link("K" + nm if nm[0].isdigit() else nm)
            for mirror in ([False, True] if args.mirrors else [False]):
                o = export_link(nm, L, mirror)
                fname = o["name"] + ".json"
                with open(os.path.join(args.out, fname), "w") as f:
                    json.dump(o, f, indent=1)
                    f.write("\n")
                entries[o["name"]] = {"name": o["name"], "file": fname, "crossings": L.crossing_number() if hasattr(L, "crossing_number") else len(L.crossings)}
        with open(manifest_path, "w") as f:
            manifest = {"engine": engine_info(), "knots": sorted(entries.values(), key=lambda e: e["name"])}
            json.dump(manifest, f, indent=1)
            f.write("\n")


if __name__ == "__main__":
    main()
