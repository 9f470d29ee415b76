"""Concrete P-algebras, morphisms out of free algebras, quasi-isomorphisms.

Every algebra that can serve as the target of a morphism exposes the same
small interface:

* ``operad``, ``convention``, ``window`` and ``dim(k)``
* ``d_matrix(k)``: differential from degree k to k + delta
* ``theta_vec(mu, args)``: mu = (n, q, vec), args = [(degree, vec), ...]
* ``unit_vector()``: image of the P(0) basis element (empty when reduced)

Vectors are sparse dicts over the degree-k basis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import (ChainComplex, ChainMap, GradedSpace, WindowError, cohomology,
                        cone)
from .free import FreeAlgebra, FreeElement, TruncationError
from .linalg import RatMatrix, SubspaceBasis, solve, vec_iadd
from .operad import OperadMorphism, OperadTable, ValidationReport, koszul_sign


class StructureError(ValueError):
    """Missing or undecomposable structure maps."""


class CompatibilityError(ValueError):
    """A generator image violates d f = f d."""


def target_complex(alg, lo, hi) -> ChainComplex:
    """Underlying complex of any target on [lo, hi].

    Algebras vanish below the lower end of their window, so degrees under
    it are filled with zero spaces; the upper end is a hard truncation.
    """
    a_lo = alg.window[0]
    delta = alg.convention.delta
    basis = {k: range(alg.dim(k)) for k in range(max(lo, a_lo), hi + 1)}
    d = {}
    for k in range(max(lo, a_lo), hi + 1):
        if max(lo, a_lo) <= k + delta <= hi:
            d[k] = alg.d_matrix(k)
    return ChainComplex(GradedSpace(basis, (lo, hi)), alg.convention, d)


class TabularAlgebra:
    """A finite-type complex with explicit multilinear structure maps.

    ``tables`` maps an operad basis triple (n, q, i) to a sparse table
    {((deg_1, idx_1), ..., (deg_n, idx_n)): {out_idx: coeff}}.  Arities with
    at least one table entry (or listed in ``arities``) are "supplied":
    missing entries there are zero.  Other arities >= 3 are evaluated by
    decomposing the operation into composites of lower arity; when that is
    impossible evaluation fails loudly.
    """

    def __init__(self, operad: OperadTable, complex_: ChainComplex, tables=None, *,
                 arities=None, name="", labels=None):
        if operad.convention != complex_.convention:
            raise ValueError("operad and complex use different conventions")
        self.operad = operad
        self.complex = complex_
        self.convention = complex_.convention
        self.name = name
        self.tables = {}
        for key, tab in (tables or {}).items():
            clean = {}
            for args, out in tab.items():
                out = {i: Fraction(c) for i, c in out.items() if c}
                if out:
                    clean[tuple(tuple(a) for a in args)] = out
            self.tables[tuple(key)] = clean
        self.arities = set(arities or ()) | {k[0] for k in self.tables}
        if operad.unitary:
            self.arities.add(0)
        self.labels = labels
        self._decomp = {}
        self._cache = {}

    @property
    def window(self):
        return self.complex.window

    def dim(self, k):
        return self.complex.dim(k)

    def d_matrix(self, k):
        return self.complex.d(k)

    def unit_vector(self):
        if not self.operad.unitary:
            return {}
        return dict(self.tables.get((0, 0, 0), {}).get((), {}))

    def _check(self, k):
        lo, hi = self.window
        if not lo <= k <= hi:
            raise TruncationError(f"degree {k} outside the algebra window [{lo}, {hi}]")

    # -- structure maps -----------------------------------------------------

    def theta_basis(self, x, args):
        """theta on an operad basis triple and a tuple of (degree, index)."""
        n, q, i = x
        deg = q + sum(a[0] for a in args)
        if deg < self.window[0]:
            return {}
        self._check(deg)
        if n == 1:
            return {args[0][1]: Fraction(1)}
        key = (x, args)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if n in self.arities:
            out = self.tables.get(x, {}).get(args, {})
        else:
            out = {}
            for c, j, a, b in self._decomposition(n, q, i):
                vec_iadd(out, self._theta_composite(j, a, b, args), c)
        self._cache[key] = out
        return out

    def _theta_composite(self, j, a, b, args):
        """theta(a o_j b; args) through the composition sign rule."""
        nb = b[0]
        inner = args[j - 1:j - 1 + nb]
        val = self.theta_basis(b, inner) if nb else self.theta_basis(b, ())
        before = sum(t[0] for t in args[:j - 1])
        sign = -1 if (b[1] * before) % 2 else 1
        ideg = b[1] + sum(t[0] for t in inner)
        out = {}
        for idx, c in val.items():
            new_args = args[:j - 1] + ((ideg, idx),) + args[j - 1 + nb:]
            vec_iadd(out, self.theta_basis(a, new_args), sign * c)
        return out

    def _decomposition(self, n, q, i):
        key = (n, q, i)
        if key in self._decomp:
            return self._decomp[key]
        op = self.operad
        cols, comps = [], []
        for a_ar in range(2, n):
            b_ar = n - a_ar + 1
            for a in op.basis_elements(a_ar):
                for b in op.basis_elements(b_ar):
                    if a[1] + b[1] != q:
                        continue
                    for j in range(1, a_ar + 1):
                        v = op.compose_basis(j, a, b)
                        if v:
                            cols.append(v)
                            comps.append((j, a, b))
        m = RatMatrix.from_columns(op.dim(n, q), cols)
        sol = solve(m, {i: Fraction(1)}) if cols else None
        if sol is None:
            raise StructureError(
                f"no table for arity {n} and {op.label(n, q, i)} is not a combination of lower composites")
        out = [(c, *comps[k]) for k, c in sorted(sol.items())]
        self._decomp[key] = out
        return out

    def theta_vec(self, mu, args):
        n, q, vec = mu
        if len(args) != n:
            raise ValueError(f"arity {n} operation applied to {len(args)} arguments")
        out = {}
        if not vec:
            return out
        degs = [a[0] for a in args]
        deg = q + sum(degs)
        if deg < self.window[0]:
            return out
        self._check(deg)
        for combo in itertools.product(*[sorted(a[1].items()) for a in args]):
            coeff = Fraction(1)
            key = []
            for (idx, c), dg in zip(combo, degs):
                coeff *= c
                key.append((dg, idx))
            key = tuple(key)
            for b, cb in vec.items():
                vec_iadd(out, self.theta_basis((n, q, b), key), coeff * cb)
        return out

    def __repr__(self):
        dims = {k: self.dim(k) for k in range(self.window[0], self.window[1] + 1) if self.dim(k)}
        return f"TabularAlgebra({self.name or self.operad.name}, dims={dims})"


def _basis_tuples(alg, n, total_lo, total_hi):
    """All tuples of (degree, index) with n entries and degree sum in range."""
    lo, hi = alg.window
    slots = [(k, i) for k in range(lo, hi + 1) for i in range(alg.dim(k))]
    for t in itertools.product(slots, repeat=n):
        s = sum(a[0] for a in t)
        if total_lo <= s <= total_hi:
            yield t


def validate_algebra(a: TabularAlgebra, max_failures=50) -> ValidationReport:
    """Equivariance, derivation, composite consistency and unit laws."""
    rep = ValidationReport()
    op = a.operad
    lo, hi = a.window
    delta = a.convention.delta

    def fail(c, w):
        if len(rep.failures) < max_failures:
            rep.fail(c, w)

    supplied = sorted(n for n in a.arities if n >= 2)
    for n in supplied:
        for x in op.basis_elements(n):
            q = x[1]
            for t in _basis_tuples(a, n, lo - q, hi - q):
                base = a.theta_basis(x, t)
                for k in range(1, n):
                    perm = list(range(n))
                    perm[k - 1], perm[k] = perm[k], perm[k - 1]
                    act = op.act(n, q, {x[2]: Fraction(1)}, tuple(perm))
                    lhs = a.theta_vec((n, q, act), [(d, {i: Fraction(1)}) for d, i in t])
                    swapped = t[:k - 1] + (t[k], t[k - 1]) + t[k + 1:]
                    eps = -1 if (t[k - 1][0] * t[k][0]) % 2 else 1
                    rhs = {i: eps * c for i, c in a.theta_basis(x, swapped).items()}
                    rep.tick("equivariance")
                    if lhs != rhs:
                        fail("equivariance", f"{op.label(*x)} with s_{k} on {t}")
                deg = q + sum(d for d, _ in t)
                if not lo <= deg + delta <= hi:
                    continue
                lhs = a.d_matrix(deg).apply(base)
                dmu = op.d((n, q, {x[2]: Fraction(1)}))
                rhs = {}
                if dmu[2]:
                    vec_iadd(rhs, a.theta_vec(dmu, [(d, {i: Fraction(1)}) for d, i in t]))
                before = q
                for p, (d, i) in enumerate(t):
                    if lo <= d + delta <= hi:
                        dx = a.d_matrix(d).apply({i: Fraction(1)})
                        if dx:
                            args = [(dd, {ii: Fraction(1)}) for dd, ii in t]
                            args[p] = (d + delta, dx)
                            vec_iadd(rhs, a.theta_vec((n, q, {x[2]: Fraction(1)}), args), -1 if before % 2 else 1)
                    before += d
                rep.tick("derivation")
                if lhs != rhs:
                    fail("derivation", f"d {op.label(*x)}{t}")
    # composites of supplied binary operations (and with the unit) against direct evaluation
    if 2 in a.arities:
        for x in op.basis_elements(2):
            for y in list(op.basis_elements(2)) + list(op.basis_elements(0)):
                n = 2 + y[0] - 1
                for j in (1, 2):
                    comp = op.compose_basis(j, x, y)
                    q = x[1] + y[1]
                    for t in _basis_tuples(a, n, lo - q, hi - q):
                        try:
                            lhs = a._theta_composite(j, x, y, t)
                            rhs = a.theta_vec((n, q, comp), [(d, {i: Fraction(1)}) for d, i in t])
                        except (TruncationError, WindowError):
                            continue
                        rep.tick("associativity" if y[0] else "unit")
                        if lhs != rhs:
                            fail("associativity" if y[0] else "unit",
                                 f"{op.label(*x)} o_{j} {op.label(*y)} on {t}")
    return rep


# -- morphisms ---------------------------------------------------------------

class AlgebraMorphism:
    """Strict morphism out of a free algebra, determined by generator images."""

    def __init__(self, source: FreeAlgebra, target, images, *, check=True):
        if source.operad is not target.operad:
            raise ValueError("source and target are algebras over different operads")
        self.source = source
        self.target = target
        self.images = {}
        for g in source.generators:
            v = images.get(g.label, {})
            self.images[g.label] = {i: Fraction(c) for i, c in v.items() if c}
            if self.images[g.label]:
                target.dim(g.degree)  # window check
        for lab in images:
            if lab not in source.gen:
                raise KeyError(f"image given for unknown generator {lab!r}")
        self._mats = {}
        if check:
            self.check_generators()

    @property
    def convention(self):
        return self.source.convention

    def image_of_monomial(self, key):
        n, q, b, u = self.source.representative(key)
        args = [(self.source.gen[x].degree, self.images[x]) for x in u]
        if any(not v for _, v in args):
            return {}
        return self.target.theta_vec((n, q, b), args)

    def apply(self, el: FreeElement):
        out = {}
        for key, c in el.terms.items():
            vec_iadd(out, self.image_of_monomial(key), c)
        return out

    def matrix(self, k):
        m = self._mats.get(k)
        if m is None:
            cols = [self.image_of_monomial(key) for key in self.source.basis(k)]
            m = RatMatrix.from_columns(self.target.dim(k), cols)
            self._mats[k] = m
        return m

    def check_generators(self):
        delta = self.source.delta
        for g in self.source.generators:
            k = g.degree
            try:
                self.target.dim(k + delta)
            except WindowError:
                continue
            lhs = self.target.d_matrix(k).apply(self.images[g.label]) if self.images[g.label] else {}
            rhs = self.apply(self.source.d_generator(g.label))
            if lhs != rhs:
                raise CompatibilityError(f"d f({g.label}) != f(d {g.label})")

    def check_chain_map(self, lo, hi):
        delta = self.source.delta
        for k in range(lo, hi + 1):
            if not lo <= k + delta <= hi:
                continue
            if self.target.d_matrix(k) @ self.matrix(k) != self.matrix(k + delta) @ self.source.d_matrix(k):
                raise CompatibilityError(f"f d != d f in degree {k}")
        return True

    def compose_with(self, other):
        """self o other, where other: C -> self.source is an AlgebraMorphism."""
        imgs = {g.label: self.apply(self.source.from_vector(g.degree, other.images[g.label]))
                for g in other.source.generators}
        return AlgebraMorphism(other.source, self.target, imgs)


def extend_morphism(source: FreeAlgebra, target, images) -> AlgebraMorphism:
    """The unique morphism of P-algebras restricting to the generator images."""
    for lab, v in images.items():
        g = source.gen.get(lab)
        if g is None:
            raise KeyError(f"unknown generator {lab!r}")
        n = target.dim(g.degree)
        for i in v:
            if not 0 <= i < n:
                raise ValueError(f"image of {lab} is not a vector of degree {g.degree}")
    return AlgebraMorphism(source, target, images)


class LinearMorphism:
    """A morphism given by degreewise matrices (used for tabular sources)."""

    def __init__(self, source, target, maps, *, check=True):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        if check:
            lo = max(source.window[0], target.window[0])
            hi = min(source.window[1], target.window[1])
            self.check_chain_map(lo, hi)

    @property
    def convention(self):
        return self.source.convention

    def matrix(self, k):
        m = self.maps.get(k)
        if m is None:
            return RatMatrix(self.target.dim(k), self.source.dim(k))
        return m

    def check_chain_map(self, lo, hi):
        delta = self.source.convention.delta
        for k in range(lo, hi + 1):
            if not lo <= k + delta <= hi:
                continue
            if self.target.d_matrix(k) @ self.matrix(k) != self.matrix(k + delta) @ self.source.d_matrix(k):
                raise CompatibilityError(f"f d != d f in degree {k}")
        return True


def identity_morphism(alg):
    if isinstance(alg, FreeAlgebra):
        return AlgebraMorphism(alg, alg, {g.label: alg.to_vector(alg.generator_element(g.label))
                                          for g in alg.generators})
    lo, hi = alg.window
    return LinearMorphism(alg, alg, {k: RatMatrix.identity(alg.dim(k)) for k in range(lo, hi + 1)})


# -- quasi-isomorphisms --------------------------------------------------------

@dataclass
class QisoCertificate:
    ok: bool
    up_to: int
    cone_dims: dict = field(default_factory=dict)

    @property
    def first_failure(self):
        bad = [k for k, v in sorted(self.cone_dims.items()) if v]
        return bad[0] if bad else None

    def __bool__(self):
        return self.ok


def cone_of(f, lo, hi_source, hi_target=None):
    """Mapping cone of f on degrees [lo, hi_source] and [lo, hi_target]."""
    hi_target = hi_source if hi_target is None else hi_target
    a = target_complex(f.source, lo, hi_source)
    b = target_complex(f.target, lo, hi_target)
    start = max(lo, f.source.window[0], f.target.window[0])
    cm = ChainMap(a, b, {k: f.matrix(k) for k in range(start, min(hi_source, hi_target) + 1)})
    return cone(cm)


def is_quasi_iso(f, up_to: int) -> QisoCertificate:
    """Cone cohomology vanishes in every degree <= up_to."""
    delta = f.convention.delta
    lo = min(f.source.window[0], f.target.window[0]) - 2
    c = cone_of(f, lo, up_to + 1 + delta, up_to + 1)
    dims = {}
    for k in range(c.window[0] + 1, up_to + 1):
        dims[k] = cohomology(c, k).dimension
    return QisoCertificate(all(v == 0 for v in dims.values()), up_to, dims)


# -- connectivity ---------------------------------------------------------------

@dataclass
class ConnectivityReport:
    ok: bool
    witness: str
    dims: dict


def check_connected(a, r: int) -> ConnectivityReport:
    """H^i = 0 for i < 0, P(0) = H^0 through the unit, H^1 = ... = H^r = 0."""
    lo, hi = a.window
    if hi < r + 1:
        raise WindowError(f"window [{lo}, {hi}] must reach degree {r + 1}")
    c = target_complex(a, lo - 2, hi)
    dims = {}
    for i in range(lo - 1, min(r, hi - 1) + 1):
        dims[i] = cohomology(c, i).dimension
    for i in sorted(dims):
        if i < 0 and dims[i]:
            return ConnectivityReport(False, f"H^{i} has dimension {dims[i]}", dims)
    h0 = cohomology(c, 0)
    p0 = 1 if a.operad.unitary else 0
    if h0.dimension != p0:
        return ConnectivityReport(False, f"H^0 has dimension {h0.dimension}, P(0) has {p0}", dims)
    if p0:
        u = a.unit_vector()
        if not u or c.d(0).apply(u) or not any(h0.classify(u)):
            return ConnectivityReport(False, "unit does not represent a generator of H^0", dims)
    for i in range(1, r + 1):
        if dims.get(i):
            return ConnectivityReport(False, f"H^{i} has dimension {dims[i]}", dims)
    return ConnectivityReport(True, "", dims)


# -- restriction of scalars -------------------------------------------------------

def restrict(f: OperadMorphism, b: TabularAlgebra) -> TabularAlgebra:
    """View a target-operad algebra as a source-operad algebra along f."""
    if b.operad is not f.target:
        raise ValueError("algebra is not over the target operad of the morphism")
    src = f.source
    lo, hi = b.window
    tables = {}
    arities = set()
    for n in sorted(b.arities):
        if n > src.arity_bound:
            continue
        if n == 0 and not src.unitary:
            continue
        arities.add(n)
        for x in src.basis_elements(n):
            img = f((n, x[1], {x[2]: Fraction(1)}))
            tab = {}
            for t in _basis_tuples(b, n, lo - x[1], hi - x[1]):
                out = b.theta_vec(img, [(d, {i: Fraction(1)}) for d, i in t])
                if out:
                    tab[t] = out
            tables[x] = tab
    return TabularAlgebra(src, b.complex, tables, arities=arities,
                          name=f"{b.name or b.operad.name} restricted to {src.name}", labels=b.labels)
