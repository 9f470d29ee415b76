"""Minimal models of a few classical cohomology algebras in both conventions."""
import argparse
import time

from opmin.builtins import shared_builtin
from opmin.engine import EngineOptions, minimal_model
from opmin.samples import monomial_algebra, projective_space, sphere


def targets(conv, hi):
    com = shared_builtin("Com", conv, 4)
    return [sphere(com, 2, hi), sphere(com, 3, hi), projective_space(com, 2, hi), projective_space(com, 3, hi),
            monomial_algebra(com, {"x": 2, "y": 3}, {}, hi, name="H(S^2 x S^3)")]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-N", type=int, default=8)
    ap.add_argument("--section", choices=["canonical", "random"], default="canonical")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    opts = EngineOptions(section=args.section, seed=args.seed)
    for conv in ("cochain", "chain"):
        for a in targets(conv, args.N + 2):
            t0 = time.perf_counter()
            m = minimal_model(a, 1, args.N, opts)
            print(f"[{conv}] {a.name}: {time.perf_counter() - t0:.2f} s")
            print(m.report())
            print()


if __name__ == "__main__":
    main()
