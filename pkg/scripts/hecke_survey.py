"""Survey Hecke eigenvalues on H_0 for n = 2 across levels and primes.

Prints one row per (N, l) with the factored characteristic polynomial and
flags any disagreement with the classical Manin-symbol oracle.

    python scripts/hecke_survey.py --max-level 30 --primes 2,3,5,7
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sharbly import manin
from sharbly.cli import format_factored
from sharbly.fields import QQ
from sharbly.hecke import hecke_on_h0
from sharbly.homology import betti_numbers, build_complex
from sharbly.voronoi import enumerate_cells


def squarefree(n):
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-level", type=int, default=30)
    ap.add_argument("--primes", default="2,3,5,7")
    ap.add_argument("--all-levels", action="store_true",
                    help="include non-squarefree levels")
    args = ap.parse_args()
    primes = [int(p) for p in args.primes.split(",")]

    table = enumerate_cells(2)
    t0 = time.time()
    mismatches = 0
    for level in range(1, args.max_level + 1):
        if not args.all_levels and not squarefree(level):
            continue
        cx = build_complex(2, level, QQ, table=table)
        dim = betti_numbers(cx)[0]
        for ell in primes:
            if level % ell == 0:
                continue
            rep = hecke_on_h0(2, level, QQ, ell, 1, cx=cx)
            _, oracle_cp = manin.manin_hecke(level, ell)
            ok = rep.charpoly == oracle_cp
            mismatches += not ok
            print(
                f"N={level:3d} dim={dim:2d} T({ell},1): "
                f"{format_factored(rep.eigen, rep.remainder):40s} "
                f"{'ok' if ok else 'ORACLE MISMATCH'}"
            )
    print(f"done in {time.time() - t0:.1f}s, {mismatches} mismatches")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
