"""Regenerate the example JSON documents in data/."""
import argparse
import json
from pathlib import Path

from opmin import serialize as ser
from opmin.algebra import extend_morphism
from opmin.builtins import builtin, shared_builtin
from opmin.engine import minimal_model
from opmin.free import FreeAlgebra, Generator
from opmin.samples import monomial_algebra, projective_space, sphere


def corrupted_ass():
    d = ser.operad_to_json(builtin("Ass", "cochain", 3))
    d["name"] = "Ass (corrupted)"
    # flip the sign of one associativity-relevant composite: x1.2 o_1 x1.2 -> x1.2.3
    for e in d["compositions"]:
        if e[:4] == [1, "x1.2", "x1.2", "x1.2.3"]:
            e[4] = "-1"
            break
    return d


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for name in ("Com", "Ass", "Lie", "Ger"):
        for conv in ("cochain", "chain"):
            ser.save(ser.operad_to_json(builtin(name, conv, 4)), out / f"{name.lower()}.{conv}.json")
    ser.save(corrupted_ass(), out / "corrupted-ass.json")

    com = shared_builtin("Com", "cochain", 4)
    s2 = sphere(com, 2, 10)
    ser.save(ser.tabular_to_json(s2), out / "s2.json")
    ser.save(ser.tabular_to_json(projective_space(com, 2, 10)), out / "cp2.json")
    ser.save(ser.tabular_to_json(monomial_algebra(com, {"x": 2, "y": 3}, {}, 10, name="H(S^2 x S^3)")),
             out / "s2xs3.json")

    ger = shared_builtin("Ger", "chain", 4)
    e2 = FreeAlgebra(ger, [Generator("e", 2)], {}, max_degree=10)
    ser.save(ser.free_to_json(e2), out / "ger-e2.chain.json")

    m = minimal_model(s2, 1, 8)
    ser.save(ser.model_to_json(m), out / "s2.model.json")
    ser.save(ser.morphism_to_json(m.f), out / "s2.model-map.json")
    bad = extend_morphism(m.model, s2, {})
    ser.save(ser.morphism_to_json(bad), out / "s2.zero-map.json")
    print("wrote", ", ".join(sorted(p.name for p in out.glob("*.json"))))


if __name__ == "__main__":
    main()
