"""Run the CLI pipeline on both worked examples and write JSON reports.

    python3 scripts/run_examples.py [--out results/]
"""

import argparse
import json
from pathlib import Path

from rhmap.cli import main

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"


def run(*args) -> int:
    code = main([str(a) for a in args])
    if code:
        raise SystemExit(f"rhmap {' '.join(map(str, args))} exited with {code}")
    return code


def wedge(out: Path):
    rep = out / "wedge.json"
    run("model", "--source", FIX / "wedge.alg", "--target", FIX / "y.sul", "--check-transfer", "--out", rep)
    run("mc", "--model", rep, "--candidate", "e5@y", "--out", rep)
    run("component", "--model", rep, "--mc", "0", "--expect-ranks", "1:2,2:1,3:3,5:3,7:1", "--out", rep)
    run("component", "--model", rep, "--mc", "e5@y", "--expect-ranks", "1:2,3:2,5:3,7:2",
        "--note", "S^3 x S^3 x S^7 x Z' would need two degree-7 generators", "--out", rep)
    return rep


def hy(out: Path):
    rep = out / "hy.json"
    run("model", "--source", FIX / "hy.alg", "--target", FIX / "y.sul", "--out", rep)
    run("mc", "--model", rep, "--candidate", "xb@x", "--candidate", "yb@y", "--out", rep)
    for z in ("0", "xb@x", "yb@y", "xb@x + yb@y"):
        run("component", "--model", rep, "--mc", z, "--out", rep)
    run("hspace", "--model", rep, "--mc", "xb@x", "--expect-grouplike", "yes", "--out", rep)
    return rep


def summarize(path: Path):
    rep = json.loads(path.read_text())
    print(f"== {path.name}")
    for c in rep["components"]:
        ranks = ", ".join(f"pi_{n}:{r}" for n, r in sorted(c["ranks"].items(), key=lambda t: int(t[0])))
        print(f"  z = {c['mc_text']:<14} {ranks}")
    for c in rep["checks"]:
        print(f"  [{'ok' if c['passed'] else '!!'}] {c['name']}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(ROOT / "results"))
    out = Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    for path in (wedge(out), hy(out)):
        summarize(path)
