"""Free algebras over a tabulated operad.

A monomial theta(b; u_1, ..., u_n) is stored in canonical form as a key
``(u, q, j)``: ``u`` is the sorted tuple of generator labels, ``q`` the
operad degree and ``j`` a coordinate in P(n)^q modulo the stabilizer of
``u`` (transpositions of equal adjacent slots act by the Koszul sign of
swapping a generator past itself).  Elements are dicts key -> Fraction;
since keys do not depend on which other generators exist, elements survive
KS-extensions unchanged.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import ChainComplex, Convention, GradedSpace, WindowError, record_d2
from .linalg import RatMatrix, SubspaceBasis, quotient_section, vec_iadd
from .operad import OperadTable, koszul_sign, tameness_index


class UnboundedArityError(ValueError):
    """Low-degree generators allow monomials of arbitrary arity in a fixed degree."""


class TruncationError(WindowError):
    pass


class CocycleError(ValueError):
    pass


class SquareZeroError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Generator:
    label: str
    degree: int
    stage: int = 0

    @property
    def key(self):
        return (self.degree, self.label, self.stage)


@dataclass
class FreeElement:
    degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: Fraction(c) for k, c in self.terms.items() if c}

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if other.terms and self.terms and other.degree != self.degree:
            raise ValueError("adding elements of different degrees")
        out = dict(self.terms)
        vec_iadd(out, other.terms)
        return FreeElement(self.degree if self.terms else other.degree, out)

    def scale(self, c):
        return FreeElement(self.degree, {k: c * v for k, v in self.terms.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, FreeElement):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms


def _pattern(u, parity):
    return tuple((i, parity[u[i]]) for i in range(len(u) - 1) if u[i] == u[i + 1])


def _quotient(operad: OperadTable, n, q, pattern):
    """(projection, section) for P(n)^q modulo the stabilizer relations."""
    cache = operad.__dict__.setdefault("_free_quotients", {})
    key = (n, q, pattern)
    hit = cache.get(key)
    if hit is None:
        d = operad.dim(n, q)
        rels = []
        for i, par in pattern:
            t = operad.transposition(n, q, i + 1)
            s = -1 if par else 1
            for b in range(d):
                v = t.column(b)
                vec_iadd(v, {b: Fraction(1)}, -s)
                if v:
                    rels.append(v)
        proj, sec = quotient_section(d, SubspaceBasis(d, rels))
        hit = (proj, sec)
        cache[key] = hit
    return hit


class FreeAlgebra:
    """Free P-algebra on staged generators with a derivation differential.

    ``differential`` maps generator labels to FreeElements of degree
    deg + delta built from generators of strictly earlier stages.  Degrees
    are available in the window [lo, max_degree].
    """

    def __init__(self, operad: OperadTable, generators=(), differential=None, *,
                 max_degree=10, lo=-1, r=None, arity_cap=None, check=True, _parent=None):
        self.operad = operad
        self.convention = operad.convention
        gens = list(generators)
        labels = [g.label for g in gens]
        if len(set(labels)) != len(labels):
            raise ValueError("repeated generator label")
        for g in gens:
            if g.degree < 1:
                raise ValueError(f"generator {g.label} has degree {g.degree}; generators need degree >= 1")
        self.generators = tuple(gens)
        self.gen = {g.label: g for g in gens}
        self.parity = {g.label: g.degree % 2 for g in gens}
        self._order = sorted(gens, key=lambda g: g.key)
        self._rank = {g.label: k for k, g in enumerate(self._order)}
        self.max_degree = max_degree
        self.lo = lo
        if r is None:
            r = tameness_index(operad).r
        self.r = r
        self.arity_cap = arity_cap
        self.modulo_arity_cap = False
        self._dgen = {}
        for lab, el in (differential or {}).items():
            if lab not in self.gen:
                raise KeyError(f"differential given for unknown generator {lab!r}")
            want = self.gen[lab].degree + self.delta
            if el.terms and el.degree != want:
                raise ValueError(f"d({lab}) has degree {el.degree}, expected {want}")
            self._dgen[lab] = FreeElement(want, el.terms)
        self._lock = threading.RLock()
        self._basis = {}
        self._index = {}
        self._dmat = {}
        self._dmono = dict(_parent._dmono) if _parent is not None else {}
        self._check_d_support()
        if check and _parent is None:
            for g in gens:
                self._check_cocycle(g)

    # -- structure ----------------------------------------------------------

    @property
    def delta(self):
        return self.convention.delta

    @property
    def window(self):
        return (self.lo, self.max_degree)

    @property
    def stages(self):
        out = {}
        for g in self.generators:
            out.setdefault(g.stage, []).append(g)
        return [out[s] for s in sorted(out)]

    def generator_element(self, label):
        g = self.gen[label]
        return FreeElement(g.degree, {((label,), 0, 0): Fraction(1)})

    def unit_element(self):
        if not self.operad.unitary:
            return FreeElement(0, {})
        return FreeElement(0, {((), 0, 0): Fraction(1)})

    def d_generator(self, label):
        return self._dgen.get(label, FreeElement(self.gen[label].degree + self.delta, {}))

    def _check_d_support(self):
        for lab, el in self._dgen.items():
            st = self.gen[lab].stage
            for (u, q, j) in el.terms:
                for x in u:
                    if x not in self.gen:
                        raise KeyError(f"d({lab}) mentions unknown generator {x!r}")
                    if self.gen[x].stage >= st:
                        raise ValueError(f"d({lab}) involves {x} from a stage that is not earlier")

    def _check_cocycle(self, g):
        dv = self.d_generator(g.label)
        if dv.is_zero():
            return
        ddv = self.d(dv)
        record_d2(RatMatrix(1, 1) if ddv.is_zero() else RatMatrix(1, 1, {(0, 0): 1}),
                  f"on generator {g.label}")

    def is_sullivan(self):
        return True  # enforced at construction: each differential uses earlier stages only

    def is_minimal(self, r=None):
        r = self.r if r is None else r
        last = None
        for st in self.stages:
            degs = {g.degree for g in st}
            if len(degs) != 1:
                return False
            d = degs.pop()
            if d <= r or (last is not None and d < last):
                return False
            last = d
        return True

    # -- arity bound ----------------------------------------------------------

    def max_arity(self, k):
        """Largest arity that can contribute to degree k."""
        if not self.generators:
            return 0
        dmin = min(g.degree for g in self.generators)
        op = self.operad
        best = 0
        n = 1
        while n <= op.arity_bound:
            q = op.min_degree(n)
            if q is not None and q + n * dmin <= k:
                best = n
            n += 1
        # beyond the table: arity-n monomials have degree >= slope*n + base
        if op.floor_slope is not None:
            slope, base = op.floor_slope + dmin, -op.floor_slope
        else:
            slope, base = dmin - self.r - 1, self.r + 2
        if slope <= 0:
            if self.arity_cap is None:
                raise UnboundedArityError(
                    f"generators of degree {dmin} allow unbounded arity in degree {k}; "
                    f"pass an explicit arity cap")
            self.modulo_arity_cap = True
            return self.arity_cap
        while slope * n + base <= k:
            best = n
            n += 1
        if self.arity_cap is not None and best > self.arity_cap:
            self.modulo_arity_cap = True
            best = self.arity_cap
        return best

    # -- basis ----------------------------------------------------------------

    def _check_degree(self, k):
        if not self.lo <= k <= self.max_degree:
            raise TruncationError(f"degree {k} outside free-algebra window [{self.lo}, {self.max_degree}]")

    def basis(self, k):
        self._check_degree(k)
        with self._lock:
            b = self._basis.get(k)
            if b is None:
                b = self._enumerate(k)
                self._basis[k] = b
                self._index[k] = {key: i for i, key in enumerate(b)}
            return b

    def dim(self, k):
        return len(self.basis(k))

    def index(self, k):
        self.basis(k)
        return self._index[k]

    def _multisets(self, n, budget_lo, budget_hi):
        """Sorted n-tuples of generators with degree sum in [budget_lo, budget_hi]."""
        order = self._order
        out = []

        def rec(start, left, acc, s):
            if left == 0:
                if budget_lo <= s <= budget_hi:
                    out.append(tuple(acc))
                return
            for t in range(start, len(order)):
                g = order[t]
                # generators are sorted by degree, so the remaining sum is at least left*g.degree
                if s + left * g.degree > budget_hi:
                    break
                acc.append(g.label)
                rec(t, left - 1, acc, s + g.degree)
                acc.pop()

        rec(0, n, [], 0)
        return out

    def _enumerate(self, k):
        op = self.operad
        keys = []
        if op.unitary and k == 0:
            keys.append(((), 0, 0))
        nmax = self.max_arity(k)
        if nmax > op.arity_bound:
            op.ensure_arity(nmax)
        for n in range(1, nmax + 1):
            qs = op.degrees(n)
            if not qs:
                continue
            for u in self._multisets(n, k - qs[-1], k - qs[0]):
                q = k - sum(self.gen[x].degree for x in u)
                if q not in qs:
                    continue
                proj, _ = _quotient(op, n, q, _pattern(u, self.parity))
                keys.extend((u, q, j) for j in range(proj.rows))
        return keys

    # -- canonical form and structure maps ---------------------------------

    def slot_degree(self, u):
        return sum(self.gen[x].degree for x in u)

    def canonical(self, n, q, vec, w):
        """Key-dict of theta(vec; w_1, ..., w_n) for an arbitrary slot order w."""
        if not vec:
            return {}
        order = sorted(range(n), key=lambda p: self.gen[w[p]].key)
        u = tuple(w[p] for p in order)
        if u != tuple(w):
            sigma = [0] * n
            for p, o in enumerate(order):
                sigma[o] = p
            vec = self.operad.act(n, q, vec, tuple(sigma))
            eps = koszul_sign([self.parity[x] for x in w], order)
        else:
            eps = 1
        proj, _ = _quotient(self.operad, n, q, _pattern(u, self.parity))
        out = {}
        for j, c in proj.apply(vec).items():
            out[(u, q, j)] = eps * c
        return out

    def representative(self, key):
        """(n, q, operad vec, slots) for a canonical key."""
        u, q, j = key
        n = len(u)
        _, sec = _quotient(self.operad, n, q, _pattern(u, self.parity))
        return n, q, sec.column(j), u

    def theta(self, mu, args):
        """theta(mu; args) for mu = (l, q, vec) and FreeElements args."""
        l, q, vec = mu
        if len(args) != l:
            raise ValueError(f"operation of arity {l} applied to {len(args)} arguments")
        deg = q + sum(a.degree for a in args)
        out = {}
        if not vec:
            return FreeElement(deg, out)
        op = self.operad
        for combo in itertools.product(*[list(a.terms.items()) for a in args]):
            coeff = Fraction(1)
            nus = []
            slots = []
            sign = 1
            before = 0
            for key, c in combo:
                coeff *= c
                n_i, q_i, v_i, u_i = self.representative(key)
                if (q_i * before) % 2:
                    sign = -sign
                before += self.slot_degree(u_i)
                nus.append((n_i, q_i, v_i))
                slots.extend(u_i)
            n, qq, g = op.gamma((l, q, vec), nus)
            if not g:
                continue
            vec_iadd(out, self.canonical(n, qq, g, tuple(slots)), sign * coeff)
        if deg > self.max_degree:
            if out:
                raise TruncationError(f"structure map lands in degree {deg} beyond {self.max_degree}")
        return FreeElement(deg, out)

    # -- differential -------------------------------------------------------

    def d_monomial(self, key):
        with self._lock:
            hit = self._dmono.get(key)
            if hit is not None:
                return hit
        u, q, j = key
        n, q, b, u = self.representative(key)
        delta = self.delta
        deg = q + self.slot_degree(u)
        out = {}
        db = self.operad.d((n, q, b))[2]
        if db:
            vec_iadd(out, self.canonical(n, q + delta, db, u))
        before = q
        for i, x in enumerate(u):
            dx = self.d_generator(x)
            if dx.terms:
                args = [self.generator_element(y) for y in u]
                args[i] = dx
                term = self.theta((n, q, b), args)
                vec_iadd(out, term.terms, -1 if before % 2 else 1)
            before += self.gen[x].degree
        res = FreeElement(deg + delta, out)
        with self._lock:
            self._dmono[key] = res
        return res

    def d(self, el: FreeElement) -> FreeElement:
        out = {}
        for key, c in el.terms.items():
            vec_iadd(out, self.d_monomial(key).terms, c)
        return FreeElement(el.degree + self.delta, out)

    def d_matrix(self, k):
        """Matrix of d from degree k to k + delta."""
        with self._lock:
            m = self._dmat.get(k)
            if m is not None:
                return m
        src = self.basis(k)
        tgt_deg = k + self.delta
        tgt = self.index(tgt_deg)
        cols = []
        for key in src:
            col = {}
            for kk, c in self.d_monomial(key).terms.items():
                if kk not in tgt:
                    raise TruncationError(f"d of {key} leaves the enumerated basis in degree {tgt_deg}")
                col[tgt[kk]] = c
            cols.append(col)
        m = RatMatrix.from_columns(len(tgt), cols)
        with self._lock:
            self._dmat[k] = m
        return m

    def complex(self, lo=None, hi=None) -> ChainComplex:
        lo = self.lo if lo is None else lo
        hi = self.max_degree if hi is None else hi
        self._check_degree(lo)
        self._check_degree(hi)
        space = GradedSpace({k: self.basis(k) for k in range(lo, hi + 1)}, (lo, hi))
        d = {k: self.d_matrix(k) for k in range(lo, hi + 1) if lo <= k + self.delta <= hi}
        return ChainComplex(space, self.convention, d)

    def check_d_squared(self, hi=None):
        hi = self.max_degree if hi is None else hi
        delta = self.delta
        for k in range(self.lo, hi + 1):
            k2 = k + 2 * delta
            if not (self.lo <= k2 <= hi and self.lo <= k + delta <= hi):
                continue
            prod = self.d_matrix(k + delta) @ self.d_matrix(k)
            if not prod.is_zero():
                (i, j), _ = next(iter(prod.entries.items()))
                raise SquareZeroError(f"d o d != 0 on {self.basis(k)[j]} in degree {k}")
            record_d2(prod, f"in degree {k}")
        return True

    # -- vectors ----------------------------------------------------------------

    def to_vector(self, el: FreeElement):
        if not el.terms:
            return {}
        idx = self.index(el.degree)
        out = {}
        for key, c in el.terms.items():
            if key not in idx:
                raise TruncationError(f"monomial {key} not in the degree-{el.degree} basis")
            out[idx[key]] = c
        return out

    def from_vector(self, k, vec):
        b = self.basis(k)
        return FreeElement(k, {b[i]: c for i, c in vec.items()})

    # target interface (shared with tabular and path algebras)
    def theta_vec(self, mu, args):
        els = [self.from_vector(k, v) for k, v in args]
        res = self.theta(mu, els)
        return self.to_vector(res)

    def unit_vector(self):
        return self.to_vector(self.unit_element())

    # -- extension ----------------------------------------------------------

    def ks_extend(self, new_generators, differential, max_degree=None):
        """Attach generators of one degree with differentials into cocycles."""
        new = list(new_generators)
        if not new:
            return self
        degs = {g.degree for g in new}
        if len(degs) != 1:
            raise ValueError("a KS-extension attaches generators of a single degree")
        stage = 1 + max((g.stage for g in self.generators), default=-1)
        new = [Generator(g.label, g.degree, stage) for g in new]
        for g in new:
            el = differential.get(g.label, FreeElement(g.degree + self.delta, {}))
            if el.terms:
                if el.degree != g.degree + self.delta:
                    raise CocycleError(f"d({g.label}) has the wrong degree")
                for (u, q, j) in el.terms:
                    for x in u:
                        if x not in self.gen:
                            raise CocycleError(f"d({g.label}) involves {x}, not in the algebra")
                if not self.d(el).is_zero():
                    raise CocycleError(f"d({g.label}) is not a cocycle")
                record_d2(RatMatrix(1, 1), f"on generator {g.label}")
        dnew = dict(self._dgen)
        dnew.update({g.label: differential[g.label] for g in new if g.label in differential})
        return FreeAlgebra(self.operad, list(self.generators) + new, dnew,
                           max_degree=self.max_degree if max_degree is None else max_degree,
                           lo=self.lo, r=self.r, arity_cap=self.arity_cap, check=False, _parent=self)

    def with_max_degree(self, max_degree):
        return FreeAlgebra(self.operad, self.generators, self._dgen, max_degree=max_degree,
                           lo=self.lo, r=self.r, arity_cap=self.arity_cap, check=False, _parent=self)

    def monomial_string(self, key):
        u, q, j = key
        if not u:
            return "1"
        n = len(u)
        if n == 1:
            return u[0]
        labs = self.operad.labels(n, q)
        _, sec = _quotient(self.operad, n, q, _pattern(u, self.parity))
        col = sec.column(j)
        if len(col) == 1:
            (b, c), = col.items()
            name = labs[b]
            pre = "" if c == 1 else f"{c}*"
            return f"{pre}{name}({', '.join(u)})"
        return f"<{'+'.join(f'{c}*{labs[b]}' for b, c in sorted(col.items()))}>({', '.join(u)})"

    def element_string(self, el: FreeElement):
        if not el.terms:
            return "0"
        parts = []
        for key in sorted(el.terms, key=lambda k: (len(k[0]), k)):
            c = el.terms[key]
            m = self.monomial_string(key)
            parts.append(m if c == 1 else f"-{m}" if c == -1 else f"{c} {m}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        gens = ", ".join(f"{g.label}:{g.degree}" for g in self.generators)
        return f"FreeAlgebra({self.operad.name}<{gens}>, window={self.window})"
