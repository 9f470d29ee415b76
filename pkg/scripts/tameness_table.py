"""Print the tameness index of the built-in operads (and their even suspensions)."""
import argparse

from opmin.builtins import builtin
from opmin.operad import tameness_index


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--arity", type=int, default=4, help="tabulate operads up to this arity")
    ap.add_argument("--suspensions", type=int, default=1, help="also show suspensions 1..n")
    args = ap.parse_args()
    print(f"{'operad':<10} {'convention':<9} r")
    for name in ("Com", "Ass", "Lie", "Ger"):
        for conv in ("cochain", "chain"):
            for j in range(args.suspensions + 1):
                p = builtin(name, conv, args.arity if name != "Ger" else min(args.arity, 4), suspension=j)
                print(f"{p.name:<10} {conv:<9} {tameness_index(p).r}")


if __name__ == "__main__":
    main()
