#!/usr/bin/env python3
"""Run the bundled corpus of ring presentations through the Gorenstein
certifier and print a verdict table.

Usage: python scripts/certify_corpus.py [--window LO:HI] [--seed N]
"""

import argparse
import sys
import time

from localduality.cli import corpus, parse, run
from localduality.graded import Window


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--window", default="-10:10", metavar="LO:HI")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    lo, hi = (int(x) for x in args.window.split(":"))
    w = Window(min(lo, hi), max(lo, hi))

    rows = []
    for entry in corpus():
        spec, diags = parse(entry.text)
        if spec is None or diags:
            rows.append((entry.name, "parse error", "", "", ""))
            continue
        t0 = time.perf_counter()
        report, code = run(spec, seed=args.seed, default_window=w)
        dt = time.perf_counter() - t0
        res = report["results"][0] if report["results"] else {}
        rows.append((entry.name,
                     "yes" if res.get("verdict") else "no",
                     res.get("krull_dim", ""),
                     res.get("shift", ""),
                     f"{dt:.2f}s"))

    print(f"{'ring':<16}{'gorenstein':<12}{'dim':<6}{'shift':<8}{'time':<8}")
    for name, v, n, nu, dt in rows:
        print(f"{name:<16}{v:<12}{str(n):<6}{str(nu):<8}{dt:<8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
