"""Check that on powerset lattices the diagonal pins down the whole s_n-map.

Random measures mu on 2^k are drawn; the diagonal p(a,...,a) = mu(a) is
completed and compared with the brute-force table p(a_1..a_n) = mu(meet).

    python scripts/boolean_oracle.py --trials 200 --k 2 3 --n 2 3 --seed 1
"""

from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from qlp.lattice import make_boolean
from qlp.smap import PartialSMap, SMap, complete, validate


@dataclass
class Config:
    trials: int = 100
    ks: list[int] = field(default_factory=lambda: [2, 3])
    ns: list[int] = field(default_factory=lambda: [2, 3])
    seed: int = 0
    max_weight: int = 20


def meet_table(L, weights, n) -> SMap:
    full = L.size - 1

    def mu(mask):
        return sum((w for i, w in enumerate(weights) if mask >> i & 1), Fraction(0))

    return SMap.from_function(L, n, lambda t: mu(reduce(lambda a, b: a & b, t, full)))


def run(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    bad = 0
    for k in cfg.ks:
        L = make_boolean(k)
        for n in cfg.ns:
            t0 = time.time()
            for _ in range(cfg.trials):
                w = [Fraction(rng.randint(0, cfg.max_weight)) for _ in range(k)]
                if not any(w):
                    w[0] = Fraction(1)
                w = [x / sum(w) for x in w]
                oracle = meet_table(L, w, n)
                p = complete(PartialSMap(L, n, {(a,) * n: oracle[(a,) * n] for a in L.elements}))
                if p != oracle or not validate(p).ok:
                    bad += 1
            print(f"2^{k}, n={n}: {cfg.trials} measures, {time.time() - t0:.2f}s")
    print(f"mismatches: {bad}")
    return 1 if bad else 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--trials", type=int, default=Config.trials)
    ap.add_argument("--k", nargs="+", type=int, default=[2, 3], dest="ks")
    ap.add_argument("--n", nargs="+", type=int, default=[2, 3], dest="ns")
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    return run(Config(a.trials, a.ks, a.ns, a.seed))


if __name__ == "__main__":
    raise SystemExit(main())
