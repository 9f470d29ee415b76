"""Path objects, homotopies, lifting and the comparison of minimal models.

A[t, dt] is stored with a t-degree bound T: in degree k the basis is
a t^j (a in A^k, 0 <= j <= T) followed by b t^j dt (b in A^{k-delta},
0 <= j < T).  Products that would exceed the bound raise TDegreeOverflow;
callers double T and retry up to a ceiling.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .algebra import (AlgebraMorphism, QisoCertificate, extend_morphism, is_quasi_iso)
from .complexes import WindowError
from .free import FreeAlgebra
from .linalg import RatMatrix, hstack, kernel, rank, solve, vstack

ONE = Fraction(1)


class TDegreeOverflow(ArithmeticError):
    pass


class LiftingError(ValueError):
    """A precondition of lifting or sectioning fails."""


def _dim(alg, k):
    lo, hi = alg.window
    return alg.dim(k) if lo <= k <= hi else 0


def _dmat(alg, k):
    """Differential out of degree k, zero where the algebra vanishes."""
    delta = alg.convention.delta
    lo, hi = alg.window
    if lo <= k <= hi and lo <= k + delta <= hi:
        return alg.d_matrix(k)
    if k + delta > hi and _dim(alg, k):
        raise WindowError(f"differential out of degree {k} leaves the window [{lo}, {hi}]")
    return RatMatrix(_dim(alg, k + delta), _dim(alg, k))


class MatrixMorphism:
    """A linear degree-preserving map given by a matrix-valued function."""

    def __init__(self, source, target, fn, name=""):
        self.source, self.target = source, target
        self._fn = fn
        self._cache = {}
        self.name = name

    @property
    def convention(self):
        return self.source.convention

    def matrix(self, k):
        if k not in self._cache:
            self._cache[k] = self._fn(k)
        return self._cache[k]


# -- path algebra ---------------------------------------------------------------

class PathAlgebra:
    def __init__(self, base, T=2):
        if T < 1:
            raise ValueError("t-degree bound must be at least 1")
        self.base = base
        self.T = T
        self.operad = base.operad
        self.convention = base.convention
        self.delta = base.convention.delta
        lo, hi = base.window
        self.window = (lo + min(self.delta, 0), hi)
        self._dm = {}
        self.ev0 = MatrixMorphism(self, base, lambda k: self._eval(k, 0), "delta0")
        self.ev1 = MatrixMorphism(self, base, lambda k: self._eval(k, 1), "delta1")
        self.iota = MatrixMorphism(base, self, self._iota, "iota")

    def _parts(self, k):
        return _dim(self.base, k), _dim(self.base, k - self.delta)

    def dim(self, k):
        lo, hi = self.window
        if not lo <= k <= hi:
            raise WindowError(f"degree {k} outside the path window [{lo}, {hi}]")
        a, b = self._parts(k)
        return (self.T + 1) * a + self.T * b

    def index(self, k, kind, j, i):
        a, b = self._parts(k)
        return j * a + i if kind == 0 else (self.T + 1) * a + j * b + i

    def components(self, k, vec):
        """{(kind, j): base vector} for a path vector of degree k."""
        a, b = self._parts(k)
        out = {}
        for idx, c in vec.items():
            if idx < (self.T + 1) * a:
                key, i = (0, idx // a), idx % a
            else:
                r = idx - (self.T + 1) * a
                key, i = (1, r // b), r % b
            out.setdefault(key, {})[i] = c
        return out

    def element(self, k, comps):
        out = {}
        for (kind, j), v in comps.items():
            if j > self.T - kind:
                raise TDegreeOverflow(f"t-degree {j} exceeds the bound {self.T}")
            for i, c in v.items():
                if c:
                    out[self.index(k, kind, j, i)] = Fraction(c)
        return out

    def d_matrix(self, k):
        if k in self._dm:
            return self._dm[k]
        delta = self.delta
        T = self.T
        a, b = self._parts(k)
        rows = self.dim(k + delta)
        ent = {}
        da = _dmat(self.base, k) if a else None
        db = _dmat(self.base, k - delta) if b else None
        sign = -1 if k % 2 else 1
        for j in range(T + 1):
            if a:
                for (r, c), x in da.entries.items():
                    ent[(self.index(k + delta, 0, j, r), self.index(k, 0, j, c))] = x
                if j:
                    for i in range(a):
                        ent[(self.index(k + delta, 1, j - 1, i), self.index(k, 0, j, i))] = Fraction(sign * j)
            if b and j < T:
                for (r, c), x in db.entries.items():
                    ent[(self.index(k + delta, 1, j, r), self.index(k, 1, j, c))] = x
        m = RatMatrix(rows, self.dim(k), ent)
        self._dm[k] = m
        return m

    def unit_vector(self):
        u = self.base.unit_vector()
        return {self.index(0, 0, 0, i): c for i, c in u.items()}

    def theta_vec(self, mu, args):
        delta = self.delta
        expanded = []
        for k, v in args:
            parts = []
            for (kind, j), bv in self.components(k, v).items():
                parts.append((kind, j, k - kind * delta, bv))
            if not parts:
                return {}
            expanded.append(parts)
        n, q, _ = mu
        deg = q + sum(k for k, _ in args)
        out = {}
        for combo in itertools.product(*expanded):
            kinds = sum(p[0] for p in combo)
            if kinds > 1:
                continue
            J = sum(p[1] for p in combo)
            sign = 1
            for i, p in enumerate(combo):
                if p[0] and sum(x[2] for x in combo[i + 1:]) % 2:
                    sign = -sign
            val = self.base.theta_vec(mu, [(p[2], p[3]) for p in combo])
            if not val:
                continue
            if J > self.T - kinds:
                raise TDegreeOverflow(f"product has t-degree {J} above the bound {self.T}")
            for i, c in val.items():
                idx = self.index(deg, kinds, J, i)
                out[idx] = out.get(idx, 0) + sign * c
        return {i: c for i, c in out.items() if c}

    def _eval(self, k, at):
        a, _ = self._parts(k)
        ent = {}
        for j in range(self.T + 1):
            if at == 0 and j:
                break
            for i in range(a):
                ent[(i, self.index(k, 0, j, i))] = ONE
        return RatMatrix(a, _dim(self, k), ent)

    def _iota(self, k):
        a, _ = self._parts(k)
        return RatMatrix(_dim(self, k), a, {(self.index(k, 0, 0, i), i): ONE for i in range(a)})

    def with_bound(self, T):
        return PathAlgebra(self.base, T)

    def __repr__(self):
        return f"PathAlgebra({self.base!r}, T={self.T})"


def path_endpoints(path: PathAlgebra, k, vec):
    """(value at t=0, value at t=1) of a path vector of degree k."""
    return path.ev0.matrix(k).apply(vec), path.ev1.matrix(k).apply(vec)


# -- homotopies -------------------------------------------------------------------

@dataclass
class Homotopy:
    h: AlgebraMorphism
    path: PathAlgebra

    def endpoint(self, at):
        ev = self.path.ev0 if at == 0 else self.path.ev1
        imgs = {g.label: ev.matrix(g.degree).apply(self.h.images[g.label]) for g in self.h.source.generators}
        return AlgebraMorphism(self.h.source, self.path.base, imgs)

    def images(self):
        """Generator images as {label: {(kind, j): base vector}}."""
        src = self.h.source
        return {g.label: self.path.components(g.degree, self.h.images[g.label]) for g in src.generators}


def _same_images(f, g, labels_src):
    for gen in labels_src.generators:
        if f.images.get(gen.label, {}) != g.images.get(gen.label, {}):
            return False
    return True


def verify_homotopy(h: Homotopy, f: AlgebraMorphism, g: AlgebraMorphism) -> bool:
    """delta0 h = f and delta1 h = g exactly."""
    if h.h.source is not f.source or h.h.source is not g.source:
        return False
    return _same_images(h.endpoint(0), f, f.source) and _same_images(h.endpoint(1), g, f.source)


def reverse(h: Homotopy) -> Homotopy:
    """Precompose with t -> 1 - t, swapping the endpoints."""
    P = h.path
    imgs = {}
    for g in h.h.source.generators:
        k = g.degree
        out = {}
        for (kind, j), v in P.components(k, h.h.images[g.label]).items():
            s0 = -1 if kind else 1
            for i in range(j + 1):
                c = s0 * comb(j, i) * (-1) ** i
                tgt = out.setdefault((kind, i), {})
                for idx, x in v.items():
                    tgt[idx] = tgt.get(idx, 0) + c * x
        imgs[g.label] = P.element(k, {key: {i: x for i, x in v.items() if x} for key, v in out.items()})
    return Homotopy(AlgebraMorphism(h.h.source, P, imgs), P)


def constant_homotopy(f: AlgebraMorphism, T=1) -> Homotopy:
    P = PathAlgebra(f.target, T)
    imgs = {g.label: P.iota.matrix(g.degree).apply(f.images[g.label]) for g in f.source.generators}
    return Homotopy(AlgebraMorphism(f.source, P, imgs), P)


# -- lifting ----------------------------------------------------------------------

def check_surjective(w, degrees):
    for k in degrees:
        n = _dim(w.target, k)
        if n and rank(w.matrix(k)) != n:
            raise LiftingError(f"map is not surjective in degree {k}")


def _generator_degrees(c: FreeAlgebra):
    return sorted({g.degree for g in c.generators})


def _stacked_solve(c, images, target, k, label, extra_rows, extra_rhs):
    """Solve d beta = g(dv) together with extra_rows beta = extra_rhs."""
    delta = c.delta
    partial = AlgebraMorphism(c, target, images, check=False)
    dv = partial.apply(c.d_generator(label))
    mats, rhs = [], {}
    lo, hi = target.window
    if lo <= k + delta <= hi:
        mats.append(_dmat(target, k))
        rhs.update(dv)
    elif dv:
        raise LiftingError(f"cannot impose the differential of {label}: degree {k + delta} is truncated")
    off = mats[0].rows if mats else 0
    mats.append(extra_rows)
    rhs.update({off + i: x for i, x in extra_rhs.items()})
    A = vstack(mats, cols=_dim(target, k))
    return solve(A, rhs)


def lift_through_surjection(c: FreeAlgebra, f, w, up_to=None, check=True) -> AlgebraMorphism:
    """g: c -> w.source with w o g = f, built stage by stage over c."""
    if f.source is not c:
        raise ValueError("f must be defined on c")
    if not c.is_sullivan():
        raise LiftingError("source is not a Sullivan algebra")
    degs = _generator_degrees(c)
    if up_to is None:
        up_to = max(degs, default=0)
    if check:
        check_surjective(w, [k for k in range(w.target.window[0], up_to + 1)])
        cert = is_quasi_iso(w, up_to)
        if not cert.ok:
            raise LiftingError(f"map is not a quasi-isomorphism (cone degree {cert.first_failure})")
    B = w.source
    images = {}
    for stage in c.stages:
        for gen in stage:
            k = gen.degree
            sol = _stacked_solve(c, images, B, k, gen.label, w.matrix(k), f.images[gen.label])
            if sol is None:
                raise LiftingError(f"no lift for generator {gen.label} in degree {k}")
            images[gen.label] = sol
    g = extend_morphism(c, B, images)
    for gen in c.generators:
        if w.matrix(gen.degree).apply(g.images[gen.label]) != f.images[gen.label]:
            raise AssertionError(f"lift fails to commute on {gen.label}")
    return g


def section_of_quasi_iso(f, up_to=None, check=True) -> AlgebraMorphism:
    """g: M -> A with f o g = id for a quasi-isomorphism f: A -> M onto a minimal algebra."""
    M = f.target
    if not isinstance(M, FreeAlgebra) or not M.is_minimal():
        raise LiftingError("target of the quasi-isomorphism must be a minimal free algebra")
    degs = _generator_degrees(M)
    if up_to is None:
        up_to = max(degs, default=0)
    if check:
        cert = is_quasi_iso(f, up_to)
        if not cert.ok:
            raise LiftingError(f"map is not a quasi-isomorphism (cone degree {cert.first_failure})")
    A = f.source
    images = {}
    for stage in M.stages:
        for gen in stage:
            k = gen.degree
            e = M.to_vector(M.generator_element(gen.label))
            sol = _stacked_solve(M, images, A, k, gen.label, f.matrix(k), e)
            if sol is None:
                raise LiftingError(f"no section value for generator {gen.label}")
            images[gen.label] = sol
    g = extend_morphism(M, A, images)
    for gen in M.generators:
        if f.matrix(gen.degree).apply(g.images[gen.label]) != M.to_vector(M.generator_element(gen.label)):
            raise AssertionError(f"f o g differs from the identity on {gen.label}")
    return g


# -- mapping path -------------------------------------------------------------------

class MappingPath:
    """Pullback {(a, b) : w(a) = b(0)} of w: A -> B along delta0: B[t,dt] -> B."""

    def __init__(self, w, T=2):
        self.w = w
        self.A = w.source
        self.path = PathAlgebra(w.target, T)
        self.operad = self.A.operad
        self.convention = self.A.convention
        self.delta = self.convention.delta
        lo = min(self.A.window[0], self.path.window[0])
        hi = min(self.A.window[1], self.path.window[1])
        self.window = (lo, hi)
        self._K = {}
        self._dm = {}
        self.p = MatrixMorphism(self, self.A, self._p, "p")
        self.q = MatrixMorphism(self, w.target, self._q, "q")
        self.j = MatrixMorphism(self.A, self, self._j, "j")

    @property
    def T(self):
        return self.path.T

    def _wmat(self, k):
        na, nb = _dim(self.A, k), _dim(self.w.target, k)
        return self.w.matrix(k) if na and nb else RatMatrix(nb, na)

    def _kernel(self, k):
        if k not in self._K:
            na, npth = _dim(self.A, k), _dim(self.path, k)
            cons = hstack([self._wmat(k), -self.path.ev0.matrix(k)])
            self._K[k] = (na, kernel(cons))
        return self._K[k]

    def dim(self, k):
        lo, hi = self.window
        if not lo <= k <= hi:
            raise WindowError(f"degree {k} outside the window [{lo}, {hi}]")
        return self._kernel(k)[1].dim

    def coords(self, k, ambient):
        sub = self._kernel(k)[1]
        if not sub.contains(ambient):
            raise ArithmeticError("vector does not lie in the mapping path")
        return {r: ambient[p] for r, p in enumerate(sub.pivots) if ambient.get(p)}

    def split(self, k, vec):
        """(A part, path part) of a vector in kernel coordinates."""
        na, sub = self._kernel(k)
        amb = {}
        for r, c in vec.items():
            for i, x in sub.vectors[r].items():
                amb[i] = amb.get(i, 0) + c * x
        a = {i: x for i, x in amb.items() if i < na and x}
        b = {i - na: x for i, x in amb.items() if i >= na and x}
        return a, b

    def _join(self, k, a, b):
        na = self._kernel(k)[0]
        amb = dict(a)
        amb.update({na + i: x for i, x in b.items()})
        return self.coords(k, amb)

    def d_matrix(self, k):
        if k not in self._dm:
            kk = k + self.delta
            cols = []
            for r in range(self.dim(k)):
                a, b = self.split(k, {r: ONE})
                da = _dmat(self.A, k).apply(a) if a else {}
                db = _dmat(self.path, k).apply(b) if b else {}
                cols.append(self._join(kk, da, db))
            self._dm[k] = RatMatrix.from_columns(self.dim(kk), cols)
        return self._dm[k]

    def unit_vector(self):
        return self._join(0, self.A.unit_vector(), self.path.unit_vector())

    def theta_vec(self, mu, args):
        n, q, _ = mu
        deg = q + sum(k for k, _ in args)
        parts = [(k,) + self.split(k, v) for k, v in args]
        a = self.A.theta_vec(mu, [(k, x) for k, x, _ in parts]) if _dim(self.A, deg) else {}
        b = self.path.theta_vec(mu, [(k, y) for k, _, y in parts])
        return self._join(deg, a, b)

    def _p(self, k):
        cols = [self.split(k, {r: ONE})[0] for r in range(self.dim(k))]
        return RatMatrix.from_columns(_dim(self.A, k), cols)

    def _q(self, k):
        ev = self.path.ev1.matrix(k)
        cols = [ev.apply(self.split(k, {r: ONE})[1]) for r in range(self.dim(k))]
        return RatMatrix.from_columns(_dim(self.w.target, k), cols)

    def _j(self, k):
        io = self.path.iota.matrix(k)
        w = self._wmat(k)
        cols = [self._join(k, {i: ONE}, io.apply(w.column(i))) for i in range(_dim(self.A, k))]
        return RatMatrix.from_columns(self.dim(k), cols)


def mapping_path(w, T=2, certify_up_to=None):
    """(M(w), p, q, j); with certify_up_to the q-side preconditions are checked."""
    mp = MappingPath(w, T)
    if certify_up_to is not None:
        check_surjective(mp.q, range(mp.window[0], certify_up_to + 1))
        cert = is_quasi_iso(mp.q, certify_up_to)
        if not cert.ok:
            raise AssertionError(f"q is not a quasi-isomorphism: {cert.cone_dims}")
        for k in range(max(mp.window[0], w.source.window[0]), certify_up_to + 1):
            if mp.q.matrix(k) @ mp.j.matrix(k) != mp._wmat(k):
                raise AssertionError(f"q j differs from w in degree {k}")
    return mp, mp.p, mp.q, mp.j


# -- comparison ------------------------------------------------------------------------

@dataclass
class Comparison:
    g: AlgebraMorphism | None
    homotopy: Homotopy | None
    generator_matrices: dict = field(default_factory=dict)
    invertible: bool = False
    certificate: QisoCertificate | None = None
    t_bound: int = 0
    overflow: bool = False

    def lines(self):
        out = []
        if self.g is None:
            out.append(f"no comparison map: t-degree bound exceeded (last bound {self.t_bound})")
            return out
        for k, m in sorted(self.generator_matrices.items()):
            out.append(f"degree {k}: generator matrix {m.rows}x{m.cols}, rank {rank(m)}")
        out.append("comparison map is an isomorphism" if self.invertible else "comparison map is NOT invertible")
        if self.certificate is not None:
            out.append("quasi-isomorphism certificate: " + ("passes" if self.certificate.ok else "FAILS"))
        out.append(f"homotopy witness with t-degree bound {self.t_bound}" if self.homotopy else "no homotopy witness")
        return out


def generator_matrices(g: AlgebraMorphism):
    """Per degree, the linear parts of g on generators (indecomposables)."""
    src, tgt = g.source, g.target
    out = {}
    for k in _generator_degrees(src) + [x for x in _generator_degrees(tgt) if x not in _generator_degrees(src)]:
        sg = [x for x in src.generators if x.degree == k]
        tg = [x for x in tgt.generators if x.degree == k]
        idx = tgt.index(k)
        rows = [idx[((x.label,), 0, 0)] for x in tg]
        cols = []
        for x in sg:
            v = g.images[x.label]
            cols.append({r: v[i] for r, i in enumerate(rows) if v.get(i)})
        out[k] = RatMatrix.from_columns(len(tg), cols)
    return dict(sorted(out.items()))


def compare_models(m1, m2, T=2, ceiling=16, up_to=None) -> Comparison:
    """Isomorphism g: M1 -> M2 with f2 o g homotopic to f1."""
    if m1.target is not m2.target:
        raise ValueError("models have different targets")
    if m1.r != m2.r:
        raise ValueError("models use different connectivity")
    N = min(m1.N, m2.N) if up_to is None else up_to
    while True:
        try:
            mp = MappingPath(m2.f, T)
            gp = lift_through_surjection(m1.model, m1.f, mp.q, up_to=N, check=False)
            g_imgs = {x.label: mp.p.matrix(x.degree).apply(gp.images[x.label]) for x in m1.model.generators}
            h_imgs = {x.label: mp.split(x.degree, gp.images[x.label])[1] for x in m1.model.generators}
            g = extend_morphism(m1.model, m2.model, g_imgs)
            h = Homotopy(extend_morphism(m1.model, mp.path, h_imgs), mp.path)
            break
        except TDegreeOverflow:
            T *= 2
            if T > ceiling:
                return Comparison(None, None, t_bound=T // 2, overflow=True)
    mats = generator_matrices(g)
    inv = all(m.rows == m.cols and rank(m) == m.rows for m in mats.values())
    cert = is_quasi_iso(m2.f.compose_with(g), N)
    return Comparison(g, h, mats, inv, cert, T)
