"""Operads in (co)chain complexes as finite tables.

An operad element is addressed by ``(n, q, vec)``: arity, degree and a sparse
coordinate vector over the stored basis of P(n)^q.  Basis elements are
``(n, q, i)`` triples.

Conventions used throughout the package:

* ``act(mu, sigma)`` is the operation x -> mu(x_sigma(1), ..., x_sigma(n)),
  so ``act(act(mu, s), t) == act(mu, t o s)``.  Permutations are tuples of
  0-based images.
* ``mu o_i nu`` plugs nu into the i-th input (1-based) of mu.  Acting on an
  algebra, theta(mu o_i nu; a) = (-1)^{|nu|(|a_1|+...+|a_{i-1}|)}
  theta(mu; a_1, ..., theta(nu; a_i, ...), ...).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import Convention
from .linalg import RatMatrix, vec_iadd, vec_scale


class ArityBoundError(LookupError):
    """Request beyond the arity truncation of an operad table."""


class TamenessDomainError(ValueError):
    pass


# -- arity-degree arithmetic -------------------------------------------------

@dataclass(frozen=True, order=True)
class ArityDegree:
    n: int
    q: int


def element_tame(ad: ArityDegree, r: int) -> bool:
    """q > (r+1)(1-n); only meaningful for n >= 2."""
    if ad.n < 2:
        raise TamenessDomainError(f"tameness constrains arities >= 2, got n={ad.n}")
    return ad.q > (r + 1) * (1 - ad.n)


def compose_arity_degree(a: ArityDegree, b: ArityDegree) -> ArityDegree:
    if a.n < 1 or b.n < 0:
        raise ValueError(f"cannot compose arity-degrees {a} and {b}")
    return ArityDegree(a.n + b.n - 1, a.q + b.q)


def min_tame_level(n: int, q: int) -> int:
    """Smallest r >= 0 with q > (r+1)(1-n), for n >= 2."""
    return max(0, (-q) // (n - 1))


# -- permutations -----------------------------------------------------------

def perm_compose(a, b):
    """a o b."""
    return tuple(a[x] for x in b)


def perm_inverse(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def adjacent_word(perm):
    """Indices a (0-based) with perm = s_{a1} o s_{a2} o ... (s_a swaps a, a+1)."""
    p = list(perm)
    pos = {v: i for i, v in enumerate(p)}
    word = []
    while True:
        for a in range(len(p) - 1):
            if pos[a + 1] < pos[a]:
                break
        else:
            return word
        word.append(a)
        i, j = pos[a], pos[a + 1]
        p[i], p[j] = a + 1, a
        pos[a], pos[a + 1] = j, i


def koszul_sign(parities, perm):
    """Sign of reordering (x_0..x_{n-1}) into (x_perm[0], ..., x_perm[n-1])."""
    odd = [k for k in perm if parities[k] % 2]
    inv = 0
    for i in range(len(odd)):
        for j in range(i + 1, len(odd)):
            if odd[i] > odd[j]:
                inv += 1
    return -1 if inv % 2 else 1


def block_perm(sigma, sizes):
    """Permutation of concatenated blocks: position p takes block sigma[p].

    ``sizes[c]`` is the length of source block c.
    """
    starts = list(itertools.accumulate([0] + list(sizes)))
    out = []
    for c in sigma:
        out.extend(range(starts[c], starts[c] + sizes[c]))
    return tuple(out)


def insert_perm(m, i, tau):
    """id on m-1 inputs with tau acting on the block plugged in at input i."""
    n = len(tau)
    head = list(range(i - 1))
    mid = [i - 1 + t for t in tau]
    tail = list(range(i - 1 + n, m + n - 1))
    return tuple(head + mid + tail)


# -- the table ---------------------------------------------------------------

class OperadTable:
    """Finite table of an operad P(0..N) in (co)chain complexes.

    Parameters
    ----------
    basis : {n: {q: labels}}, labels unique across the whole table
    transpositions : {n: {q: [T_1, ..., T_{n-1}]}}; T_i is the matrix of
        act(-, s_i) on P(n)^q
    compositions : {(i, (m, qa, a), (n, qb, b)): {c: coeff}}; missing keys are zero
    composer : optional callable (i, x, y) -> vec used instead of the dict
    differential : {n: {q: RatMatrix P(n)^q -> P(n)^{q+delta}}}; missing is zero
    floor_slope : optional declaration that P(n)^q = 0 for q < slope*(n-1)
        in every arity, including arities beyond the table
    grower : optional callable(n) -> (basis_n, transpositions_n) extending the
        table to arity n on demand (built-ins only)
    """

    def __init__(self, name, convention, unitary, basis, transpositions,
                 compositions=None, differential=None, *, composer=None,
                 floor_slope=None, grower=None, unit_label="id"):
        self.name = name
        self.convention = Convention.parse(convention)
        self.unitary = bool(unitary)
        self._basis = {}
        self._index = {}
        self._trans = {}
        self.arity_bound = -1
        for n in sorted(basis):
            self._add_arity(n, basis[n], transpositions.get(n, {}))
        self._comp = dict(compositions or {})
        self._composer = composer
        self._comp_cache = {}
        self._perm_cache = {}
        self._diff = {}
        for n, per in (differential or {}).items():
            for q, m in per.items():
                if m.nnz():
                    self._diff[(n, q)] = m
        self.floor_slope = floor_slope
        self._grower = grower
        self.unit_label = unit_label
        self._check_shape()

    def _add_arity(self, n, per_q, trans):
        if n != self.arity_bound + 1:
            raise ValueError(f"arities must be consecutive from 0; got {n} after {self.arity_bound}")
        self._basis[n] = {}
        for q, labels in per_q.items():
            labels = tuple(labels)
            if not labels:
                continue
            self._basis[n][q] = labels
            for i, lab in enumerate(labels):
                if lab in self._index:
                    raise ValueError(f"duplicate operad basis label {lab!r}")
                self._index[lab] = (n, q, i)
        self._trans[n] = {}
        for q, labels in self._basis[n].items():
            mats = list(trans.get(q, []))
            if n >= 2 and len(mats) != n - 1:
                raise ValueError(f"need {n - 1} transposition matrices in arity {n}, degree {q}")
            for t in mats:
                if t.shape != (len(labels), len(labels)):
                    raise ValueError(f"transposition in arity {n}, degree {q} has wrong shape")
            self._trans[n][q] = mats
        self.arity_bound = n

    def _check_shape(self):
        if self.arity_bound < 1:
            raise ValueError("an operad table needs at least arities 0 and 1")
        p1 = self._basis[1]
        if set(p1) != {0} or len(p1[0]) != 1:
            raise ValueError("P(1) must be one-dimensional in degree 0 (connected operad)")
        if self._index.get(self.unit_label) != (1, 0, 0):
            raise ValueError(f"unit label {self.unit_label!r} must name the basis of P(1)")
        p0 = self._basis[0]
        if self.unitary:
            if set(p0) != {0} or len(p0[0]) != 1:
                raise ValueError("unitary operad needs P(0) one-dimensional in degree 0")
        elif p0:
            raise ValueError("reduced operad needs P(0) = 0")
        for (n, q), m in self._diff.items():
            if m.shape != (self.dim(n, q + self.delta), self.dim(n, q)):
                raise ValueError(f"differential in arity {n}, degree {q} has wrong shape")

    # -- basic data ---------------------------------------------------------

    @property
    def delta(self):
        return self.convention.delta

    def ensure_arity(self, n):
        """Grow a built-in table to arity n; error for fixed tables."""
        while self.arity_bound < n:
            if self._grower is None:
                raise ArityBoundError(
                    f"operad {self.name} is tabulated up to arity {self.arity_bound}; arity {n} requested")
            k = self.arity_bound + 1
            b, t = self._grower(k)
            self._add_arity(k, b, t)

    def _arity(self, n):
        if n < 0:
            raise ValueError("negative arity")
        if n > self.arity_bound:
            self.ensure_arity(n)
        return self._basis[n]

    def degrees(self, n):
        return sorted(self._arity(n))

    def labels(self, n, q):
        return self._arity(n).get(q, ())

    def dim(self, n, q):
        return len(self.labels(n, q))

    def total_dim(self, n):
        return sum(len(v) for v in self._arity(n).values())

    def lookup(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"operad {self.name} has no basis element {label!r}") from None

    def label(self, n, q, i):
        return self.labels(n, q)[i]

    def basis_elements(self, n):
        for q in self.degrees(n):
            for i in range(self.dim(n, q)):
                yield (n, q, i)

    def degree_window(self):
        qs = [q for n in self._basis for q in self._basis[n]]
        return (min(qs), max(qs))

    def min_degree(self, n):
        """Smallest degree with P(n)^q != 0, or None if P(n) = 0."""
        qs = self.degrees(n)
        return qs[0] if qs else None

    def min_degree_bound(self, n, r=None):
        """Lower bound for degrees in P(n), valid beyond the table.

        Uses the table itself when n is tabulated, else the declared floor,
        else r-tameness (q > (r+1)(1-n)).  Returns None when nothing is known.
        """
        if n <= self.arity_bound:
            q = self.min_degree(n)
            return q if q is not None else float("inf")
        if self.floor_slope is not None:
            return self.floor_slope * (n - 1)
        if r is not None and n >= 2:
            return (r + 1) * (1 - n) + 1
        return None

    @property
    def unit(self):
        return (1, 0, {0: Fraction(1)})

    def arity0(self):
        """Basis of P(0) as operad elements (empty when reduced)."""
        return [(0, 0, {0: Fraction(1)})] if self.unitary else []

    # -- symmetric action ---------------------------------------------------

    def transposition(self, n, q, i):
        """Matrix of act(-, s_i), i 1-based."""
        self._arity(n)
        mats = self._trans[n].get(q)
        if mats is None:
            return RatMatrix(0, 0)
        return mats[i - 1]

    def perm_matrix(self, n, q, perm):
        perm = tuple(perm)
        if len(perm) != n:
            raise ValueError("permutation of the wrong length")
        key = (n, q, perm)
        m = self._perm_cache.get(key)
        if m is None:
            d = self.dim(n, q)
            m = RatMatrix.identity(d)
            for a in reversed(adjacent_word(perm)):
                m = self.transposition(n, q, a + 1) @ m
            self._perm_cache[key] = m
        return m

    def act(self, n, q, vec, perm):
        if all(p == k for k, p in enumerate(perm)):
            return dict(vec)
        return self.perm_matrix(n, q, perm).apply(vec)

    # -- compositions -------------------------------------------------------

    def compose_basis(self, i, x, y):
        """x o_i y on basis triples; result is a vec in P(m+n-1)^{qa+qb}."""
        m, qa, a = x
        n, qb, b = y
        if not 1 <= i <= m:
            raise ValueError(f"cannot compose into input {i} of an arity-{m} operation")
        if m + n - 1 > self.arity_bound:
            self.ensure_arity(m + n - 1)
        key = (i, x, y)
        out = self._comp_cache.get(key)
        if out is not None:
            return out
        if m == 1:
            out = {b: Fraction(1)}
        elif n == 1:
            out = {a: Fraction(1)}
        elif self._composer is not None:
            out = self._composer(i, x, y)
        else:
            out = self._comp.get(key, {})
        out = {c: Fraction(v) for c, v in out.items() if v}
        self._comp_cache[key] = out
        return out

    def compose(self, i, x, y):
        """Bilinear o_i on (n, q, vec) elements."""
        m, qa, va = x
        n, qb, vb = y
        out = {}
        for a, ca in va.items():
            for b, cb in vb.items():
                vec_iadd(out, self.compose_basis(i, (m, qa, a), (n, qb, b)), ca * cb)
        return (m + n - 1, qa + qb, out)

    def gamma(self, mu, nus):
        """Full composition mu(nu_1, ..., nu_l), left to right."""
        cur = mu
        pos = 1
        for nu in nus:
            cur = self.compose(pos, cur, nu)
            pos += nu[0]
        return cur

    def composition_entries(self):
        """All nonzero (i, x, y, c, coeff) with arity of x o_i y within the bound."""
        out = []
        N = self.arity_bound
        for m in range(1, N + 1):
            for n in range(0, N - m + 2):
                for x in self.basis_elements(m):
                    for y in self.basis_elements(n):
                        for i in range(1, m + 1):
                            for c, v in sorted(self.compose_basis(i, x, y).items()):
                                out.append((i, x, y, c, v))
        return out

    # -- differential -------------------------------------------------------

    def d_matrix(self, n, q):
        m = self._diff.get((n, q))
        if m is None:
            return RatMatrix(self.dim(n, q + self.delta), self.dim(n, q))
        return m

    def d(self, x):
        n, q, v = x
        if (n, q) not in self._diff:
            return (n, q + self.delta, {})
        return (n, q + self.delta, self._diff[(n, q)].apply(v))

    def has_differential(self):
        return bool(self._diff)

    def __repr__(self):
        return f"OperadTable({self.name}, {self.convention.name}, arity<={self.arity_bound})"


# -- validation --------------------------------------------------------------

@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.failures

    def fail(self, check, witness):
        self.failures.append((check, witness))

    def tick(self, check, k=1):
        self.checked[check] = self.checked.get(check, 0) + k

    def lines(self):
        out = [f"checked {k}: {v}" for k, v in sorted(self.checked.items())]
        out += [f"FAIL {c}: {w}" for c, w in self.failures]
        out.append("all checks passed" if self.ok else f"{len(self.failures)} violation(s)")
        return out


def _unit_vec(i):
    return {i: Fraction(1)}


def _name(p, x):
    n, q, i = x
    return p.label(n, q, i)


def validate(p: OperadTable, max_failures=50) -> ValidationReport:
    """Exhaustive axiom check within the arity bound."""
    rep = ValidationReport()
    N = p.arity_bound
    delta = p.delta

    def fail(check, witness):
        if len(rep.failures) < max_failures:
            rep.fail(check, witness)

    # involution, braid and far commutation
    for n in range(2, N + 1):
        for q in p.degrees(n):
            d = p.dim(n, q)
            one = RatMatrix.identity(d)
            ts = [p.transposition(n, q, i) for i in range(1, n)]
            for i, t in enumerate(ts, 1):
                rep.tick("involution")
                if t @ t != one:
                    fail("involution", f"s_{i} in arity {n}, degree {q}")
            for i in range(len(ts) - 1):
                rep.tick("braid")
                a, b = ts[i], ts[i + 1]
                if a @ b @ a != b @ a @ b:
                    fail("braid", f"s_{i + 1}, s_{i + 2} in arity {n}, degree {q}")
            for i in range(len(ts)):
                for j in range(i + 2, len(ts)):
                    rep.tick("commutation")
                    if ts[i] @ ts[j] != ts[j] @ ts[i]:
                        fail("commutation", f"s_{i + 1}, s_{j + 1} in arity {n}, degree {q}")

    # unit laws
    idx = (1, 0, 0)
    for n in range(0, N + 1):
        for x in p.basis_elements(n):
            rep.tick("unit")
            if p.compose_basis(1, idx, x) != _unit_vec(x[2]):
                fail("unit", f"id o_1 {_name(p, x)}")
            for i in range(1, n + 1):
                if p.compose_basis(i, x, idx) != _unit_vec(x[2]):
                    fail("unit", f"{_name(p, x)} o_{i} id")

    elems = {n: list(p.basis_elements(n)) for n in range(N + 1)}

    # associativity: sequential and both parallel patterns
    for a in range(1, N + 1):
        for b in range(0, min(N, N - a + 1) + 1):
            for c in range(0, min(N, N - a - b + 2) + 1):
                if a + b + c - 2 > N or a + b - 1 > N:
                    continue
                for lam in elems[a]:
                    for mu in elems[b]:
                        for nu in elems[c]:
                            _check_assoc(p, lam, mu, nu, rep, fail)

    # equivariance on generators of the symmetric groups
    for m in range(1, N + 1):
        for n in range(0, N - m + 2):
            for x in elems[m]:
                for y in elems[n]:
                    for i in range(1, m + 1):
                        xy = (m + n - 1, x[1] + y[1], p.compose_basis(i, x, y))
                        for k in range(1, m):
                            sigma = _transp(m, k)
                            lhs = p.compose(i, (m, x[1], p.act(m, x[1], _unit_vec(x[2]), sigma)), _as_elem(y))
                            j = perm_inverse(sigma)[i - 1] + 1
                            sizes = [n if c == i - 1 else 1 for c in range(m)]
                            rhs = p.act(xy[0], xy[1], p.compose_basis(j, x, y), block_perm(sigma, sizes))
                            rep.tick("equivariance")
                            if lhs[2] != rhs:
                                fail("equivariance", f"act({_name(p, x)}, s_{k}) o_{i} {_name(p, y)}")
                        for k in range(1, n):
                            tau = _transp(n, k)
                            lhs = p.compose(i, _as_elem(x), (n, y[1], p.act(n, y[1], _unit_vec(y[2]), tau)))
                            rhs = p.act(xy[0], xy[1], xy[2], insert_perm(m, i, tau))
                            rep.tick("equivariance")
                            if lhs[2] != rhs:
                                fail("equivariance", f"{_name(p, x)} o_{i} act({_name(p, y)}, s_{k})")

    # differential: square zero, equivariant, derivation
    for n in range(0, N + 1):
        for q in p.degrees(n):
            dq = p.d_matrix(n, q)
            rep.tick("d^2")
            if (p.d_matrix(n, q + delta) @ dq).nnz():
                fail("d^2", f"arity {n}, degree {q}")
            for k in range(1, n):
                rep.tick("d equivariant")
                lhs = dq @ p.transposition(n, q, k)
                t2 = p.transposition(n, q + delta, k) if p.dim(n, q + delta) else RatMatrix(0, 0)
                rhs = t2 @ dq if p.dim(n, q + delta) else RatMatrix(0, dq.cols)
                if lhs != rhs:
                    fail("d equivariant", f"s_{k} in arity {n}, degree {q}")
    if p.has_differential():
        for m in range(1, N + 1):
            for n in range(0, N - m + 2):
                for x in elems[m]:
                    for y in elems[n]:
                        for i in range(1, m + 1):
                            xy = (m + n - 1, x[1] + y[1], p.compose_basis(i, x, y))
                            lhs = p.d(xy)[2]
                            rhs = dict(p.compose(i, p.d(_as_elem(x)), _as_elem(y))[2])
                            vec_iadd(rhs, p.compose(i, _as_elem(x), p.d(_as_elem(y)))[2], (-1) ** (x[1] % 2))
                            rep.tick("derivation")
                            if lhs != rhs:
                                fail("derivation", f"d({_name(p, x)} o_{i} {_name(p, y)})")
    return rep


def _as_elem(x):
    n, q, i = x
    return (n, q, {i: Fraction(1)})


def _transp(n, k):
    s = list(range(n))
    s[k - 1], s[k] = s[k], s[k - 1]
    return tuple(s)


def _check_assoc(p, lam, mu, nu, rep, fail):
    a, b, c = lam[0], mu[0], nu[0]
    L, M, V = _as_elem(lam), _as_elem(mu), _as_elem(nu)
    # sequential: (lam o_i mu) o_{i+j-1} nu = lam o_i (mu o_j nu)
    for i in range(1, a + 1):
        lm = p.compose(i, L, M)
        for j in range(1, b + 1):
            rep.tick("associativity")
            lhs = p.compose(i + j - 1, lm, V)[2]
            rhs = p.compose(i, L, p.compose(j, M, V))[2]
            if lhs != rhs:
                fail("associativity", f"sequential ({_name(p, lam)} o_{i} {_name(p, mu)}) o_{i + j - 1} {_name(p, nu)}")
    if a + c - 1 > p.arity_bound:
        return
    # parallel: (lam o_i mu) o_{k+b-1} nu = (-1)^{|mu||nu|} (lam o_k nu) o_i mu, i < k
    sign = -1 if (mu[1] * nu[1]) % 2 else 1
    for i in range(1, a + 1):
        for k in range(i + 1, a + 1):
            rep.tick("associativity")
            lhs = p.compose(k + b - 1, p.compose(i, L, M), V)[2]
            rhs = vec_scale(p.compose(i, p.compose(k, L, V), M)[2], sign)
            if lhs != rhs:
                fail("associativity", f"parallel ({_name(p, lam)} o_{i} {_name(p, mu)}) o_{k + b - 1} {_name(p, nu)}")
    # the mirrored parallel pattern, nu plugged first at the smaller input
    sign2 = -1 if (mu[1] * nu[1]) % 2 else 1
    for k in range(1, a + 1):
        for i in range(k + 1, a + 1):
            rep.tick("associativity")
            lhs = p.compose(i + c - 1, p.compose(k, L, V), M)[2]
            rhs = vec_scale(p.compose(k, p.compose(i, L, M), V)[2], sign2)
            if lhs != rhs:
                fail("associativity", f"parallel ({_name(p, lam)} o_{k} {_name(p, nu)}) o_{i + c - 1} {_name(p, mu)}")


# -- tameness ----------------------------------------------------------------

@dataclass
class TamenessResult:
    r: int | None
    binding: list
    arity_bound: int
    cap: int

    def __str__(self):
        if self.r is None:
            return f"not tame at any r <= {self.cap} (within arity <= {self.arity_bound})"
        pairs = ", ".join(f"({a.n},{a.q})" for a in self.binding) or "none"
        return f"r = {self.r} (within arity <= {self.arity_bound}; binding arity-degrees: {pairs})"


def tameness_index(p: OperadTable, cap=64) -> TamenessResult:
    best = 0
    levels = []
    for n in range(2, p.arity_bound + 1):
        for q in p.degrees(n):
            r = min_tame_level(n, q)
            levels.append((r, ArityDegree(n, q)))
            best = max(best, r)
    binding = sorted(ad for r, ad in levels if r == best)
    if best > cap:
        return TamenessResult(None, binding, p.arity_bound, cap)
    return TamenessResult(best, binding, p.arity_bound, cap)


# -- morphisms ---------------------------------------------------------------

class OperadMorphism:
    """Arity- and degree-wise matrices source(n)^q -> target(n)^q."""

    def __init__(self, source: OperadTable, target: OperadTable, maps):
        if source.convention != target.convention:
            raise ValueError("operad morphism between different conventions")
        self.source = source
        self.target = target
        self.maps = {}
        for (n, q), m in maps.items():
            if m.shape != (target.dim(n, q), source.dim(n, q)):
                raise ValueError(f"morphism block ({n},{q}) has shape {m.shape}")
            self.maps[(n, q)] = m

    def block(self, n, q):
        m = self.maps.get((n, q))
        if m is None:
            if n > self.source.arity_bound:
                raise ArityBoundError(f"morphism undefined in arity {n}")
            return RatMatrix(self.target.dim(n, q), self.source.dim(n, q))
        return m

    def __call__(self, x):
        n, q, v = x
        return (n, q, self.block(n, q).apply(v))

    @classmethod
    def identity(cls, p: OperadTable):
        return cls(p, p, {(n, q): RatMatrix.identity(p.dim(n, q))
                          for n in range(p.arity_bound + 1) for q in p.degrees(n)})

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        s, t = self.source, self.target
        N = s.arity_bound
        rep.tick("unit")
        if self(s.unit)[2] != t.unit[2]:
            rep.fail("unit", "F(id) != id")
        for n in range(N + 1):
            for q in s.degrees(n):
                F = self.block(n, q)
                for k in range(1, n):
                    rep.tick("equivariance")
                    if F @ s.transposition(n, q, k) != t.transposition(n, q, k) @ F:
                        rep.fail("equivariance", f"s_{k} in arity {n}, degree {q}")
                rep.tick("differential")
                lhs = self.block(n, q + s.delta) @ s.d_matrix(n, q)
                rhs = t.d_matrix(n, q) @ F
                if lhs != rhs:
                    rep.fail("differential", f"arity {n}, degree {q}")
        for m in range(1, N + 1):
            for n in range(0, N - m + 2):
                for x in s.basis_elements(m):
                    for y in s.basis_elements(n):
                        for i in range(1, m + 1):
                            rep.tick("composition")
                            lhs = self((m + n - 1, x[1] + y[1], s.compose_basis(i, x, y)))[2]
                            rhs = t.compose(i, self(_as_elem(x)), self(_as_elem(y)))[2]
                            if lhs != rhs:
                                rep.fail("composition", f"F({_name(s, x)} o_{i} {_name(s, y)})")
        return rep
