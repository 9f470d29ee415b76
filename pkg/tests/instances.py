"""Random instance builders shared by the property tests and the acceptance suite."""
import random
from dataclasses import dataclass

from opmin.builtins import shared_builtin
from opmin.free import FreeAlgebra, Generator
from opmin.operad import tameness_index

FAMILIES = ["Com", "Ass", "Lie", "Ger"]


@dataclass
class LemmaInstance:
    operad: object
    r: int
    p: int
    V: list
    W: list  # the extra homogeneous generators of degree p

    def algebras(self, lo=-3):
        small = FreeAlgebra(self.operad, self.V, {}, max_degree=self.p + 1, lo=lo, r=self.r)
        big = FreeAlgebra(self.operad, self.V + self.W, {}, max_degree=self.p + 1, lo=lo, r=self.r)
        return small, big

    def describe(self):
        gens = ", ".join(f"{g.label}:{g.degree}" for g in self.V + self.W)
        return f"{self.operad.name} r={self.r} p={self.p} [{gens}]"


def tame_operad(rng: random.Random):
    """A built-in cochain operad, possibly evenly suspended, with its tameness index."""
    name = rng.choice(FAMILIES)
    j = rng.choice([0, 0, 1]) if name != "Ger" else 0
    p = shared_builtin(name, "cochain", 3, suspension=j)
    return p, tameness_index(p).r


def lemma_instance(rng: random.Random, skip_first=None):
    """Operad, V with degrees in (r, p] and V' homogeneous of degree p.

    ``skip_first=True`` keeps V out of degree r+1 (and forces p > r+1).
    """
    op, r = tame_operad(rng)
    if skip_first is None:
        skip_first = rng.random() < 0.5
    p = rng.randint(r + 2 if skip_first else r + 1, r + 3)
    lo_deg = r + 2 if skip_first else r + 1
    V = [Generator(f"v{i}", rng.randint(lo_deg, p)) for i in range(rng.randint(0, 2))]
    W = [Generator(f"w{i}", p) for i in range(rng.randint(1, 2))]
    return LemmaInstance(op, r, p, V, W)


# -- lifting problems ----------------------------------------------------------------

@dataclass
class LiftingCase:
    kind: str
    c: object  # Sullivan source
    f: object  # c -> B
    w: object  # surjective quasi-isomorphism A -> B

    def describe(self):
        dims = {}
        for g in self.c.generators:
            dims[g.degree] = dims.get(g.degree, 0) + 1
        return f"{self.kind} over {self.c.operad.name}, source generators {dict(sorted(dims.items()))}"


LIFT_KINDS = ["delta0", "delta1", "pair", "mapping_path"]


def lifting_case(rng: random.Random, kind: str, max_degree=7, T=2):
    """A random Sullivan tower (<= 3 stages) mapping to B, with a surjective qiso onto B."""
    from opmin.homotopy import MappingPath, PathAlgebra
    from opmin.samples import projection_from_pair, random_morphism, random_sullivan, with_contractible_pair

    name = rng.choice(["Com", "Ass", "Lie"])
    op = shared_builtin(name, rng.choice(["cochain", "chain"]), 4)
    while True:
        B = random_sullivan(op, rng, stages=2, r=1, max_degree=max_degree, prefix="b")
        c = random_sullivan(op, rng, stages=3, r=1, max_degree=max_degree, prefix="x")
        f = random_morphism(c, B, rng)
        if f is not None and any(f.images.values()):
            break
    if kind in ("delta0", "delta1"):
        P = PathAlgebra(B, T)
        w = P.ev0 if kind == "delta0" else P.ev1
    elif kind == "pair":
        big = with_contractible_pair(B, rng.randint(2, 4), label="u")
        w = projection_from_pair(big, B)
    elif kind == "mapping_path":
        big = with_contractible_pair(B, rng.randint(2, 4), label="u")
        w = MappingPath(projection_from_pair(big, B), T).q
    else:
        raise ValueError(kind)
    return LiftingCase(kind, c, f, w)
