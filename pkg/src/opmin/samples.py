"""Example algebras and random generators used by tests and scripts."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .algebra import AlgebraMorphism, TabularAlgebra, extend_morphism
from .complexes import ChainComplex, GradedSpace
from .free import FreeAlgebra, FreeElement, Generator
from .linalg import RatMatrix, kernel, solve, vec_iadd
from .operad import tameness_index


def monomial_algebra(com, degrees: dict, caps: dict, hi: int, name=""):
    """Graded commutative algebra on named generators with exponent caps.

    Monomials with some exponent above its cap vanish; odd generators are
    capped at 1 automatically.  The result is a tabular Com-algebra with
    zero differential, e.g. H*(S^2) is degrees={'x': 2}, caps={'x': 1}.
    """
    if com.name != "Com":
        raise ValueError("monomial algebras are commutative; use the Com operad")
    names = list(degrees)
    par = [degrees[x] % 2 for x in names]
    cap = [1 if p else caps.get(x, 1) for x, p in zip(names, par)]
    mons = [e for e in itertools.product(*[range(c + 1) for c in cap])]
    deg = {e: sum(a * degrees[x] for a, x in zip(e, names)) for e in mons}
    lo = min(0, min(deg.values()))
    basis, pos = {}, {}
    for e in sorted(mons, key=lambda e: (deg[e], e)):
        if deg[e] > hi:
            continue
        pos[e] = (deg[e], len(basis.setdefault(deg[e], [])))
        basis[deg[e]].append(_mono_label(names, e))
    space = GradedSpace(basis, (lo, hi))
    cx = ChainComplex(space, com.convention)
    table = {}
    for a, b in itertools.product(pos, repeat=2):
        c = tuple(x + y for x, y in zip(a, b))
        if c not in pos:
            continue
        sign = 1
        for i in range(len(names)):
            for j in range(i):
                if par[i] and par[j] and a[i] and b[j]:
                    sign = -sign
        table[(pos[a], pos[b])] = {pos[c][1]: sign}
    zero = tuple(0 for _ in names)
    tables = {(2, 0, 0): table, (0, 0, 0): {(): {pos[zero][1]: 1}}}
    return TabularAlgebra(com, cx, tables, arities=(0, 2), name=name or "monomial algebra",
                          labels={k: list(v) for k, v in basis.items()})


def _mono_label(names, e):
    parts = [x if a == 1 else f"{x}^{a}" for x, a in zip(names, e) if a]
    return "*".join(parts) or "1"


def sphere(com, n: int, hi: int):
    return monomial_algebra(com, {"x": n}, {"x": 1}, hi, name=f"H(S^{n})")


def projective_space(com, h: int, hi: int):
    """H*(CP^h): one degree-2 class with x^{h+1} = 0."""
    return monomial_algebra(com, {"x": 2}, {"x": h}, hi, name=f"H(CP^{h})")


def associative_algebra(ass, basis: dict, mult: dict, d=None, *, unit=None, hi=None, name=""):
    """Tabular Ass-algebra from a product table on named basis elements.

    ``basis`` maps degree -> labels, ``mult`` maps (a, b) -> {c: coeff} for
    the product a*b, ``d`` maps a label to {label: coeff}.  The table of the
    opposite word x2.1 is filled in from ``mult`` with the Koszul sign.
    """
    if ass.name != "Ass":
        raise ValueError("expected the Ass operad")
    hi = max(basis) if hi is None else hi
    lo = min(0, min(basis))
    where = {}
    for k, labs in basis.items():
        for i, lab in enumerate(labs):
            where[lab] = (k, i)
    delta = ass.convention.delta
    dm = {}
    for k in basis:
        if lo <= k + delta <= hi:
            cols = [{where[t][1]: Fraction(c) for t, c in (d or {}).get(lab, {}).items()}
                    for lab in basis[k]]
            dm[k] = RatMatrix.from_columns(len(basis.get(k + delta, ())), cols)
    cx = ChainComplex(GradedSpace(basis, (lo, hi)), ass.convention, dm)
    fwd, rev = {}, {}
    for (a, b), out in mult.items():
        (ka, ia), (kb, ib) = where[a], where[b]
        vec = {where[c][1]: Fraction(x) for c, x in out.items() if x}
        fwd[((ka, ia), (kb, ib))] = vec
        sign = -1 if (ka * kb) % 2 else 1
        rev[((kb, ib), (ka, ia))] = {j: sign * x for j, x in vec.items()}
    tables = {(2, 0, 0): fwd, (2, 0, 1): rev}
    if unit is not None:
        tables[(0, 0, 0)] = {(): {where[unit][1]: 1}}
    return TabularAlgebra(ass, cx, tables, arities=(0, 2), name=name or "associative algebra",
                          labels={k: list(v) for k, v in basis.items()})


# -- random Sullivan towers ---------------------------------------------------

def _random_combination(rng, vectors, spread=2):
    out = {}
    for v in vectors:
        c = rng.randint(-spread, spread)
        if c:
            vec_iadd(out, v, c)
    return out


def random_sullivan(operad, rng: random.Random, *, stages=3, r=None, degree_span=3, max_degree=9,
                    per_stage=2, prefix="x"):
    """A free algebra built from up to ``stages`` random KS-extensions.

    Each stage attaches 1..per_stage generators of one degree in
    [r+1, r+degree_span] whose differentials are random cocycles of the
    algebra built so far (possibly zero).
    """
    if r is None:
        r = tameness_index(operad).r
    delta = operad.convention.delta
    M = FreeAlgebra(operad, [], max_degree=max_degree, r=r)
    count = 0
    for s in range(rng.randint(1, stages)):
        k = rng.randint(r + 1, r + degree_span)
        gens, dmap = [], {}
        for _ in range(rng.randint(1, per_stage)):
            count += 1
            lab = f"{prefix}{count}"
            gens.append(Generator(lab, k))
            t = k + delta
            z = []
            if M.generators and M.window[0] <= t and t + delta <= max_degree and M.dim(t):
                z = kernel(M.d_matrix(t)).vectors
            v = _random_combination(rng, z)
            dmap[lab] = M.from_vector(t, v) if v else FreeElement(t, {})
        M = M.ks_extend(gens, dmap)
    return M


def random_morphism(c: FreeAlgebra, target, rng: random.Random):
    """A random morphism c -> target, or None when some generator is obstructed."""
    delta = c.delta
    images = {}
    for stage in c.stages:
        for g in stage:
            k = g.degree
            partial = AlgebraMorphism(c, target, images, check=False)
            rhs = partial.apply(c.d_generator(g.label))
            lo, hi = target.window
            if not lo <= k <= hi:
                if rhs:
                    return None
                continue
            n = target.dim(k)
            if lo <= k + delta <= hi:
                dk = target.d_matrix(k)
                x = solve(dk, rhs)
                if x is None:
                    return None
                z = kernel(dk).vectors
            else:
                x, z = {}, [{i: Fraction(1)} for i in range(n)]
            vec_iadd(x, _random_combination(rng, z))
            images[g.label] = x
    return extend_morphism(c, target, images)


def with_contractible_pair(M: FreeAlgebra, degree: int, label="u"):
    """M with generators w (degree + delta, closed) and u (degree, du = w)."""
    delta = M.delta
    w = Generator(f"{label}_w", degree + delta)
    u = Generator(label, degree)
    M1 = M.ks_extend([w], {})
    return M1.ks_extend([u], {u.label: M1.generator_element(w.label)})


def projection_from_pair(big: FreeAlgebra, small: FreeAlgebra):
    """The surjective quasi-isomorphism killing the extra generators."""
    imgs = {}
    for g in big.generators:
        if g.label in small.gen:
            imgs[g.label] = small.to_vector(small.generator_element(g.label))
    return extend_morphism(big, small, imgs)


def relabeled(M: FreeAlgebra, prefix="y"):
    """Copy of M whose new labels reverse the generator order inside each stage.

    Returns the new algebra and the label map old -> new.
    """
    ren = {}
    for s, st in enumerate(M.stages):
        labs = sorted(g.label for g in st)
        for i, lab in enumerate(labs):
            ren[lab] = f"{prefix}{s}_{len(labs) - i}"
    out = FreeAlgebra(M.operad, [], max_degree=M.max_degree, lo=M.lo, r=M.r, arity_cap=M.arity_cap)
    for st in M.stages:
        gens = [Generator(ren[g.label], g.degree) for g in reversed(st)]
        dmap = {ren[g.label]: transport(M, out, M.d_generator(g.label), ren) for g in st}
        out = out.ks_extend(gens, dmap)
    return out, ren


def transport(src: FreeAlgebra, dst: FreeAlgebra, el: FreeElement, ren):
    """Rewrite an element of src in dst through a generator renaming."""
    out = FreeElement(el.degree, {})
    for key, c in el.terms.items():
        n, q, vec, u = src.representative(key)
        if n == 0:
            term = dst.unit_element()
        else:
            term = dst.theta((n, q, vec), [dst.generator_element(ren[x]) for x in u])
        out = out + term.scale(c)
    return out
