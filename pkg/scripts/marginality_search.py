"""Search for non-marginal and non-commutative s_n-maps on MO_k and Boolean lattices.

For each lattice and arity the script reports
  * the largest gap p(t) - p(pi t) found by exact LP (asymmetry),
  * a pair (p_n, p_{n+1}) with equal diagonal states and p_n(t) != p_{n+1}(t, 1),
  * whether an asymmetric p_n can equal p_{n+1}(., 1) (it cannot: that
    marginal is always symmetric when n + 1 >= 3).

    python scripts/marginality_search.py --lattices mo:2 mo:3 boolean:2 --arities 2
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from qlp.lattice import from_generator
from qlp.rational import fmt
from qlp.synth import find_marginal_violation, find_noncommutative, marginal_converse


@dataclass
class Config:
    lattices: list[str] = field(default_factory=lambda: ["mo:2", "mo:3", "boolean:2", "boolean:3"])
    arities: list[int] = field(default_factory=lambda: [2])


def run(cfg: Config) -> None:
    print(f"{'lattice':<11}{'n':>2}  {'asymmetry':<28}{'non-marginal pair':<34}{'asym. marginal':<15}{'secs':>6}")
    for spec in cfg.lattices:
        L = from_generator(spec)
        for n in cfg.arities:
            t0 = time.time()
            asym = find_noncommutative(L, n)
            viol = find_marginal_violation(L, n)
            conv = marginal_converse(L, n)
            a = "none" if asym is None else f"{','.join(asym.tuple)} vs {','.join(asym.permuted)} gap {fmt(asym.gap)}"
            v = "none" if viol is None else f"at ({','.join(viol.tuple)}) gap {fmt(viol.gap)}"
            c = "found" if conv.found else f"none ({conv.candidates} tried)"
            print(f"{spec:<11}{n:>2}  {a:<28}{v:<34}{c:<15}{time.time() - t0:6.2f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--lattices", nargs="+", default=Config().lattices)
    ap.add_argument("--arities", nargs="+", type=int, default=Config().arities)
    a = ap.parse_args()
    run(Config(a.lattices, a.arities))


if __name__ == "__main__":
    main()
