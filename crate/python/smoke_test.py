#!/usr/bin/env python3
"""Smoke test for the glueforge_py extension module.

Builds nothing itself: run `cargo build -p glueforge-py` (or --release)
first, then `python3 python/smoke_test.py`. The script locates the cdylib in
target/, exposes it under the importable name and drives the main entry
points once each.
"""

import json
import os
import shutil
import sys
import tempfile


def locate_module():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    candidates = []
    for profile in ("release", "debug"):
        for name in ("libglueforge_py.so", "glueforge_py.so", "libglueforge_py.dylib"):
            candidates.append(os.path.join(root, "target", profile, name))
    for path in candidates:
        if os.path.exists(path):
            return path
    sys.exit("build the extension first: cargo build -p glueforge-py")


def main():
    src = locate_module()
    tmp = tempfile.mkdtemp(prefix="glueforge_py_")
    shutil.copy(src, os.path.join(tmp, "glueforge_py.so"))
    sys.path.insert(0, tmp)
    import glueforge_py as gf

    k4 = json.dumps({
        "vertices": ["a", "b", "c", "d"],
        "edges": [["a", "b"], ["a", "c"], ["a", "d"],
                  ["b", "c"], ["b", "d"], ["c", "d"]],
        "directed": False,
    })
    x = gf.SemiSimplicial.clique_complex(k4)
    assert x.counts() == (4, 6, 4), x.counts()
    assert x.is_regular()
    ex = x.expand()
    assert ex.counts() == (4, 10, 20), ex.counts()
    assert not ex.is_regular()
    assert x.poset_size() == 14
    print("clique complex + expansion:", x.counts(), "->", ex.counts())

    c5 = json.dumps({
        "vertices": [f"v{i}" for i in range(5)],
        "edges": [[f"v{i}", f"v{(i + 1) % 5}"] for i in range(5)],
    })
    h = gf.graph_cohomology(c5, 1)
    assert h == [1, 1], h
    print("constant sheaf on the C5 poset: H =", h)

    for d in range(-3, 3):
        model, cech = gf.p1_twisted_cohomology(d, -8, 8)
        expected = (max(d + 1, 0), max(-d - 1, 0))
        assert model == expected and cech == expected, (d, model, cech)
    print("twisted line-bundle cohomology matches in degrees 0 and 1 for d in -3..2")

    bundle = {
        "graph": {"vertices": ["a", "b", "c"],
                  "edges": [["a", "b"], ["b", "c"], ["a", "c"]]},
        "rank": 1,
        "edges": {"a,b": [["2/1"]], "b,c": [["3/1"]], "a,c": [["6/1"]]},
    }
    ok, problems = gf.validate_bundle(json.dumps(bundle))
    assert ok, problems
    assert gf.bundle_monodromy_is_identity(json.dumps(bundle), ["a", "b", "c", "a"])
    bundle["edges"]["a,c"] = [["1/1"]]
    ok2, problems2 = gf.validate_bundle(json.dumps(bundle))
    assert not ok2 and problems2
    h2 = gf.bundle_cohomology(json.dumps(bundle))
    assert h2[0] == 0, h2
    print("bundle cocycle validation and monodromy behave")

    rms3 = json.loads(gf.rms3_report())
    assert rms3["strict_equalizer_exists"] is False
    assert rms3["psi_a_schematic_equal_psi_b"] == "yes"
    ns = json.loads(gf.non_schematic_report())
    assert ns["witness_confirmed"] is True
    print("counterexamples: rms3 + non-schematic witness confirmed")

    xp = [{"coeff": "1/1", "vars": {"x": 1}}]
    nerve = json.dumps({
        "patches": {
            "S": {"vars": ["x"], "inverted": []},
            "U": {"vars": ["x"], "inverted": [xp]},
        },
        "overlaps": {
            "S,U": {
                "ring": {"vars": ["x"], "inverted": [xp]},
                "maps": {
                    "S": {"images": {"x": {"num": xp}},
                          "cert": {"inverted": [xp], "inverse": {"x": {"num": xp}}}},
                    "U": {"images": {"x": {"num": xp}},
                          "cert": {"inverted": [], "inverse": {"x": {"num": xp}}}},
                },
            },
        },
    })
    points, para = gf.su2_summary(nerve)
    assert (points, para) == (3, True)
    model = json.dumps({
        "poset": {"elements": ["p", "q"], "covers": [["p", "q"]]},
        "kind": "vect",
        "stalks": {"p": 1, "q": 1},
        "restrictions": {"p<q": [["1/1"]]},
        "cover": [["p", "q"], ["q"]],
    })
    assert gf.su_points(model) == 2
    print("finite models: |S_U| = 2 and |S_U2| = 3 for the two-open cover")

    assert gf.matrix_rank([["1/1", "2/1"], ["2/1", "4/1"]]) == 1
    sheaf = json.dumps({
        "poset": {"elements": ["p", "q"], "covers": [["p", "q"]]},
        "kind": "vect",
        "stalks": {"p": 2, "q": 2},
        "restrictions": {"p<q": [["1/1", "0/1"], ["0/1", "1/1"]]},
    })
    assert gf.sheaf_sections_dim(sheaf, "p,q") == 2
    print("exact linear algebra and sections agree")

    print("smoke test passed")


if __name__ == "__main__":
    main()
