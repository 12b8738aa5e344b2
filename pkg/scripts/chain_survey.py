"""Tabulate dead-branch invariants over random negative chains."""

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from plumbcalc.exact import determinant
from plumbcalc.indices import _chain_matrix, chain_deltas, chain_invariants


@dataclass
class SurveyConfig:
    n: int = 500
    max_len: int = 10
    e_min: int = -6
    e_max: int = -1
    seed: int = 0


def survey(cfg: SurveyConfig) -> dict:
    rng = random.Random(cfg.seed)
    stats = Counter()
    pq = Counter()
    for _ in range(cfg.n):
        e = [rng.randint(cfg.e_min, cfg.e_max) for _ in range(rng.randint(1, cfg.max_len))]
        inv = chain_invariants(e)
        stats["chains"] += 1
        stats["negative_definite"] += inv.negative_definite
        stats["grauert"] += inv.grauert_contractible
        # the recursion must agree with the determinant everywhere, definite or not
        stats["det_mismatch"] += determinant(_chain_matrix(e)) != chain_deltas(e)[-1]
        if inv.negative_definite and not inv.grauert_contractible:
            pq[(inv.p, inv.q)] += 1
    return {"stats": dict(stats), "pq": pq}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(SurveyConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    cfg = SurveyConfig(**vars(ap.parse_args()))
    out = survey(cfg)
    for k, v in out["stats"].items():
        print(f"{k:>18}: {v}")
    print("most common (p, q):")
    for (p, q), k in out["pq"].most_common(10):
        print(f"  ({p}, {q}) x{k}")


if __name__ == "__main__":
    main()
