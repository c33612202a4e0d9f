"""Perturb and replay every certified corpus proof; one line per theorem.

    python3 scripts/replay_report.py [--seed N] [FILE ...]
"""
import argparse
import random
from pathlib import Path

from gprover.calculus import Context
from gprover.checker import check_source
from gprover.parser import parse
from gprover.replay import permute_formulas, pick_node, replay_on, substitute_ground, weaken

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def perturb(kind, root, sig, rng):
    if kind == "perm":
        node = pick_node(root, need_noms=True)
        seq, tr = permute_formulas(node.seq, rng)
    elif kind == "subst":
        node = pick_node(root, need_vars=True)
        seq, tr, _ = substitute_ground(node.seq, sig, rng)
    else:
        node = pick_node(root)
        seq, tr = weaken(node.seq, sig, rng)
    return node, seq, tr


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("files", nargs="*", type=Path)
    args = ap.parse_args()
    for path in args.files or sorted(CORPUS.glob("*.thm")):
        sf = parse(path.read_text(encoding="utf-8"))
        rep = check_source(sf, path=str(path))
        ctx = Context(sf.defs, {r.name: r.certificate.formula for r in rep.results if r.ok})
        for r in rep.results:
            if not r.ok:
                print(f"{r.name}: not certified")
                continue
            rng = random.Random(args.seed)
            cells = []
            for kind in ("perm", "subst", "weak"):
                node, seq, tr = perturb(kind, r.certificate.root, sf.sig, rng)
                try:
                    replay_on(node, seq, tr, ctx)
                    cells.append(f"{kind}:ok" + ("" if seq != node.seq else "(identity)"))
                except Exception as e:  # noqa: BLE001 - report, keep going
                    cells.append(f"{kind}:FAIL({e})")
            print(f"{r.name:16s}", *cells)


if __name__ == "__main__":
    main()
