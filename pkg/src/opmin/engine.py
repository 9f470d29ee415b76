"""Step-by-step minimal models by iterated KS-extensions.

The cochain and chain algorithms share one loop: at each degree n > r the
cone of the current comparison map f: M -> A is examined in degree n.  A
cone cocycle (m, a) with m in M^{n+delta} and a in A^n is exactly the data
of a new generator v of degree n with dv = m and f(v) = a, so attaching a
basis of H^n(C(f)) and repeating until that group vanishes makes f
bijective in cohomology through degree n and injective one step above.

In chain convention the classes are split before attaching: those whose
m-part is a boundary (cokernel classes) are shifted to m = 0 and attached
first with zero differential, the rest (kernel-killing classes) follow in a
second stage of the same degree.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (AlgebraMorphism, QisoCertificate, check_connected, cone_of,
                      extend_morphism, is_quasi_iso, target_complex)
from .complexes import Convention, cohomology
from .free import FreeAlgebra, FreeElement, Generator
from .linalg import RatMatrix, kernel, rref, solve, vec_iadd
from .operad import tameness_index

log = logging.getLogger(__name__)


class PreconditionError(ValueError):
    pass


class SectionError(ValueError):
    pass


@dataclass
class EngineOptions:
    section: str = "canonical"
    seed: int = 0
    iteration_cap: int = 32
    arity_cap: int | None = None
    check_stages: bool = True

    def __post_init__(self):
        if self.section not in ("canonical", "random"):
            raise ValueError(f"section mode must be canonical or random, not {self.section!r}")
        if self.iteration_cap < 1:
            raise ValueError("iteration cap must be positive")


@dataclass
class StageRecord:
    degree: int
    iteration: int
    kind: str
    labels: list
    cone_dim: int


@dataclass
class MinimalModel:
    model: FreeAlgebra
    f: AlgebraMorphism
    target: object
    r: int
    N: int
    stages: list = field(default_factory=list)
    iterations: dict = field(default_factory=dict)
    capped: list = field(default_factory=list)
    log: list = field(default_factory=list)
    certificate: QisoCertificate | None = None

    @property
    def convention(self):
        return self.model.convention

    @property
    def terminated(self):
        return not self.capped

    @property
    def modulo_arity_cap(self):
        return self.model.modulo_arity_cap

    def generator_dims(self):
        out = {}
        for g in self.model.generators:
            out[g.degree] = out.get(g.degree, 0) + 1
        return dict(sorted(out.items()))

    def stage_degrees(self):
        return [st[0].degree for st in self.model.stages]

    def report(self):
        m = self.model
        lines = [f"minimal model over {m.operad.name} ({self.convention.name.lower()}), r = {self.r}, "
                 f"valid through degree {self.N}"]
        if self.modulo_arity_cap:
            lines.append(f"valid modulo arity cap {m.arity_cap}")
        dims = self.generator_dims()
        lines.append("generators by degree: " + (", ".join(f"{k}:{v}" for k, v in dims.items()) or "none"))
        for st in m.stages:
            for g in st:
                lines.append(f"  d {g.label} = {m.element_string(m.d_generator(g.label))}"
                             f"    [degree {g.degree}, stage {g.stage}]")
        for s in self.stages:
            lines.append(f"stage degree {s.degree} iteration {s.iteration} ({s.kind}): "
                         f"cone cohomology {s.cone_dim}, attached {', '.join(s.labels)}")
        if self.capped:
            lines.append("iteration cap reached in degrees " + ", ".join(map(str, self.capped))
                         + "; the model is partial")
        if self.certificate is not None:
            state = "passes" if self.certificate.ok else f"FAILS at degree {self.certificate.first_failure}"
            lines.append(f"quasi-isomorphism certificate through degree {self.N}: {state}")
        return "\n".join(lines)


def _rng(opts, *parts):
    return random.Random(":".join(str(p) for p in (opts.seed,) + parts))


def _randomize(reps, cone_c, n, rng):
    """Random invertible recombination plus random coboundaries."""
    h = len(reps)
    out = []
    for i in range(h):
        v = dict(reps[i])
        for j in range(i):
            c = rng.randint(-2, 2)
            if c:
                vec_iadd(v, reps[j], c)
        scale = rng.choice([1, 2, -1, 3])
        v = {k: x * scale for k, x in v.items()}
        out.append(v)
    rng.shuffle(out)
    k = n - cone_c.delta
    if cone_c.space.in_window(k) and cone_c.has_d(k):
        dk = cone_c.d(k)
        for v in out:
            w = {j: Fraction(rng.randint(-2, 2)) for j in range(dk.cols)}
            vec_iadd(v, dk.apply({j: x for j, x in w.items() if x}))
    return out


def _split(vec, k):
    m, a = {}, {}
    for i, c in vec.items():
        if i < k:
            m[i] = c
        else:
            a[i - k] = c
    return m, a


def _check_preconditions(a, r):
    t = tameness_index(a.operad)
    if t.r is None or t.r > r:
        raise PreconditionError(f"operad {a.operad.name} is not {r}-tame within its table ({t})")
    conn = check_connected(a, r)
    if not conn.ok:
        raise PreconditionError(f"target is not {r}-connected: {conn.witness}")


def _cone_at(f, n):
    delta = f.convention.delta
    lo = min(f.source.window[0], f.target.window[0]) - 2
    return cone_of(f, lo, n + 1 + delta, n + 1)


def minimal_model(a, r: int, N: int, options: EngineOptions | None = None) -> MinimalModel:
    """Sullivan r-minimal model of an r-connected target through degree N."""
    opts = options or EngineOptions()
    _check_preconditions(a, r)
    conv = a.convention
    delta = conv.delta
    if a.window[1] < N + 1:
        raise PreconditionError(f"target must be defined through degree {N + 1}; window is {a.window}")
    M = FreeAlgebra(a.operad, [], max_degree=N + 1 + max(delta, 0), r=r, arity_cap=opts.arity_cap)
    f = extend_morphism(M, a, {})
    res = MinimalModel(M, f, a, r, N)
    images = {}
    for n in range(r + 1, N + 1):
        it = 0
        count = 0
        while True:
            c = _cone_at(f, n)
            H = cohomology(c, n)
            res.log.append(f"degree {n} iteration {it}: dim H(C(f)) = {H.dimension}")
            log.debug(res.log[-1])
            if H.dimension == 0:
                break
            if it >= opts.iteration_cap:
                res.capped.append(n)
                break
            reps = list(H.representatives)
            if opts.section == "random":
                reps = _randomize(reps, c, n, _rng(opts, n, it))
            k = M.dim(n + delta)
            parts = [_split(v, k) for v in reps]
            if conv is Convention.CHAIN:
                groups = _chain_groups(M, f, n, parts)
            else:
                groups = [("extension", parts)]
            for kind, grp in groups:
                if not grp:
                    continue
                gens, dmap = [], {}
                for m, av in grp:
                    count += 1
                    lab = f"v{n}_{count}"
                    gens.append(Generator(lab, n))
                    dmap[lab] = M.from_vector(n + delta, m) if m else FreeElement(n + delta, {})
                    images[lab] = av
                M = M.ks_extend(gens, dmap)
                f = extend_morphism(M, a, images)
                res.stages.append(StageRecord(n, it, kind, [g.label for g in gens], H.dimension))
            it += 1
        res.iterations[n] = it
        if opts.check_stages and n not in res.capped:
            _assert_stage(f, n)
    res.model, res.f = M, f
    M.check_d_squared(N)
    res.certificate = is_quasi_iso(f, N)
    if not res.capped and not res.certificate.ok:
        raise AssertionError(f"engine produced a non-quasi-isomorphism: {res.certificate.cone_dims}")
    if not M.is_minimal(r):
        raise AssertionError("engine produced a non-minimal stage sequence")
    return res


def minimal_model_cochain(a, r, N, options=None):
    if a.convention is not Convention.COCHAIN:
        raise PreconditionError("cochain algorithm applied to a chain algebra")
    return minimal_model(a, r, N, options)


def minimal_model_chain(a, r, N, options=None):
    if a.convention is not Convention.CHAIN:
        raise PreconditionError("chain algorithm applied to a cochain algebra")
    return minimal_model(a, r, N, options)


def _chain_groups(M, f, n, parts):
    """Split cone classes into cokernel classes (m a boundary) and the rest."""
    delta = M.delta
    cx = target_complex(M, n + delta - 2, n + 1)
    Hm = cohomology(cx, n + delta)
    h = Hm.dimension
    cls = [Hm.classify(m) if m else [Fraction(0)] * h for m, _ in parts]
    K = RatMatrix.from_columns(h, [{i: x for i, x in enumerate(c) if x} for c in cls])
    ker = kernel(K)
    _, piv = rref(K)
    coker = []
    dM = M.d_matrix(n)
    for comb in ker.vectors:
        m, av = {}, {}
        for j, c in comb.items():
            vec_iadd(m, parts[j][0], c)
            vec_iadd(av, parts[j][1], c)
        if m:
            x = solve(dM, m)
            if x is None:
                raise ArithmeticError("cokernel class with a non-bounding m-part")
            # (m, a) + d_C(x, 0) = (m - dx, a - f x)
            vec_iadd(av, f.matrix(n).apply(x), -1)
        coker.append(({}, av))
    kill = [parts[j] for j in piv]
    return [("cokernel", coker), ("kernel", kill)]


def _assert_stage(f, n):
    c = _cone_at(f, n)
    for i in range(c.window[0] + 1, n + 1):
        h = cohomology(c, i).dimension
        if h:
            raise AssertionError(f"after degree {n}: cone cohomology {h} in degree {i}")


# -- free homology ---------------------------------------------------------------

@dataclass
class FreeHomologyResult:
    model: FreeAlgebra
    f: AlgebraMorphism
    certificate: QisoCertificate

    @property
    def ok(self):
        return self.certificate.ok

    @property
    def refuting_degree(self):
        return self.certificate.first_failure


def model_from_free_homology(a, generators, N: int, arity_cap=None) -> FreeHomologyResult:
    """Test whether H(a) is free on the given classes, through degree N.

    ``generators`` is a list of (label, degree, cycle) where cycle is a
    vector in a's degree or None to take the next canonical homology class
    of that degree.
    """
    delta = a.convention.delta
    used = {}
    images = {}
    gens = []
    cx = target_complex(a, a.window[0] - 2, min(a.window[1], N + 1))
    for lab, deg, cyc in generators:
        gens.append(Generator(lab, deg))
        if cyc is None:
            H = cohomology(cx, deg)
            k = used.get(deg, 0)
            if k >= H.dimension:
                raise SectionError(f"no homology class left in degree {deg} for {lab}")
            used[deg] = k + 1
            cyc = H.representatives[k]
        else:
            cyc = {i: Fraction(c) for i, c in cyc.items() if c}
            if a.window[0] <= deg + delta <= a.window[1] and a.d_matrix(deg).apply(cyc):
                raise SectionError(f"the chosen representative of {lab} is not a cycle")
        images[lab] = cyc
    M = FreeAlgebra(a.operad, gens, {}, max_degree=N + 1 + max(delta, 0), arity_cap=arity_cap)
    f = extend_morphism(M, a, images)
    return FreeHomologyResult(M, f, is_quasi_iso(f, N))
