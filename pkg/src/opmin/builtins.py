"""Built-in operads Com, Ass, Lie and Ger, generated arity by arity.

Each family produces, for a given arity, a list of basis operations together
with the symmetric action and partial compositions on them.  The tables grow
on demand, so a free algebra that needs a higher arity than was requested at
construction simply extends the table.

* Ass(n) has the words x_{w(1)}...x_{w(n)} as basis.
* Lie(n) is spanned inside Ass(n) by the left-normed brackets
  [[x_1, x_{s(2)}], ..., x_{s(n)}]; everything is computed in Ass and read
  back in that basis.
* Ger(n) is realized inside the free Gerstenhaber algebra on degree-0
  variables, modelled as the symmetric algebra on Lie words in odd letters.
  The basis is indexed by set partitions whose blocks carry left-normed
  brackets, as for Lie.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .complexes import Convention
from .linalg import RatMatrix, SubspaceBasis, inverse, vec_iadd
from .operad import OperadMorphism, OperadTable, koszul_sign

ONE = Fraction(1)


class _Family:
    """Arity-wise data of a built-in operad with cochain degrees."""

    name = ""
    unitary = False
    floor_slope = 0

    def __init__(self):
        self._elements = {}

    def elements(self, n):
        """[(cochain degree, label)] in a fixed order."""
        if n not in self._elements:
            self._elements[n] = self._make(n)
        return self._elements[n]

    def _make(self, n):
        raise NotImplementedError

    def act(self, n, a, perm):
        raise NotImplementedError

    def compose(self, i, m, a, n, b):
        raise NotImplementedError


class _Com(_Family):
    name = "Com"
    unitary = True

    def _make(self, n):
        return [(0, "id" if n == 1 else f"m{n}")]

    def act(self, n, a, perm):
        return {0: ONE}

    def compose(self, i, m, a, n, b):
        return {0: ONE}


def _ass_word_label(w):
    n = len(w)
    if n == 0:
        return "unit"
    if n == 1:
        return "id"
    return "x" + ".".join(str(c + 1) for c in w)


class _Ass(_Family):
    name = "Ass"
    unitary = True

    def __init__(self):
        super().__init__()
        self._words = {}
        self._pos = {}

    def words(self, n):
        if n not in self._words:
            ws = list(itertools.permutations(range(n)))
            self._words[n] = ws
            self._pos[n] = {w: k for k, w in enumerate(ws)}
        return self._words[n]

    def index(self, w):
        self.words(len(w))
        return self._pos[len(w)][w]

    def _make(self, n):
        return [(0, _ass_word_label(w)) for w in self.words(n)]

    def act(self, n, a, perm):
        w = self.words(n)[a]
        return {self.index(tuple(perm[c] for c in w)): ONE}

    @staticmethod
    def compose_words(i, w, v):
        n = len(v)
        out = []
        for c in w:
            if c == i - 1:
                out.extend(i - 1 + t for t in v)
            elif c < i - 1:
                out.append(c)
            else:
                out.append(c + n - 1)
        return tuple(out)

    def compose(self, i, m, a, n, b):
        w = self.words(m)[a]
        v = self.words(n)[b]
        return {self.index(self.compose_words(i, w, v)): ONE}

    # vectors over words, used by Lie
    def act_vec(self, vec, perm):
        out = {}
        for w, c in vec.items():
            vec_iadd(out, {tuple(perm[x] for x in w): ONE}, c)
        return out

    def compose_vec(self, i, u, v):
        out = {}
        for w, a in u.items():
            for x, b in v.items():
                vec_iadd(out, {self.compose_words(i, w, x): ONE}, a * b)
        return out


def _left_normed_ass(seq):
    """[[x_a, x_b], x_c]... as a vector over words (tuples of 0-based letters)."""
    vec = {(seq[0],): ONE}
    for c in seq[1:]:
        nxt = {}
        for w, x in vec.items():
            vec_iadd(nxt, {w + (c,): ONE}, x)
            vec_iadd(nxt, {(c,) + w: ONE}, -x)
        vec = nxt
    return vec


def _bracket_label(seq):
    return "[" + ",".join(str(c + 1) for c in seq) + "]"


class _Lie(_Family):
    name = "Lie"
    unitary = False

    def __init__(self):
        super().__init__()
        self.ass = _Ass()
        self._vecs = {}
        self._coord = {}

    def brackets(self, n):
        if n == 0:
            return []
        return [(0,) + s for s in itertools.permutations(range(1, n))]

    def _make(self, n):
        if n == 0:
            return []
        if n == 1:
            return [(0, "id")]
        return [(0, _bracket_label(s)) for s in self.brackets(n)]

    def vectors(self, n):
        """Basis of Lie(n) as word vectors in Ass(n)."""
        if n not in self._vecs:
            self._vecs[n] = [_left_normed_ass(s) for s in self.brackets(n)]
        return self._vecs[n]

    def coordinates(self, n, vec):
        """Lie-basis coordinates of a word vector lying in Lie(n)."""
        if n not in self._coord:
            vs = self.vectors(n)
            ass = self.ass
            cols = [{ass.index(w): c for w, c in v.items()} for v in vs]
            sub = SubspaceBasis(len(ass.words(n)), cols)
            piv = sub.pivots
            square = RatMatrix.from_columns(len(piv), [{r: col.get(p, 0) for r, p in enumerate(piv) if col.get(p)} for col in cols])
            self._coord[n] = (piv, inverse(square), sub)
        piv, inv, sub = self._coord[n]
        ass = self.ass
        flat = {ass.index(w): c for w, c in vec.items()}
        if not sub.contains(flat):
            raise ArithmeticError("vector does not lie in Lie(n)")
        return inv.apply({r: flat[p] for r, p in enumerate(piv) if p in flat})

    def act(self, n, a, perm):
        if n == 1:
            return {0: ONE}
        return self.coordinates(n, self.ass.act_vec(self.vectors(n)[a], perm))

    def compose(self, i, m, a, n, b):
        u = self.vectors(m)[a] if m > 1 else {(0,): ONE}
        v = self.vectors(n)[b] if n > 1 else {(0,): ONE}
        return self.coordinates(m + n - 1, self.ass.compose_vec(i, u, v))


# -- Gerstenhaber -------------------------------------------------------------
#
# Model of the free Gerstenhaber algebra on degree-0 variables: elements are
# dicts {monomial: coeff}; a monomial is a sorted tuple of words, a word is a
# tuple of variable indices read as a product of odd letters.  The Ger degree
# of a word of length L is -(L-1); the bracket of two words is their graded
# commutator w.u - (-1)^{L L'} u.w and extends to monomials as a biderivation.

def _wpar(w):
    return (len(w) + 1) % 2


def _wkey(w):
    return (len(w), w)


def _sort_mono(words):
    """(sign, canonical tuple) for a product of words; sign 0 if it vanishes."""
    order = sorted(range(len(words)), key=lambda k: _wkey(words[k]))
    sign = koszul_sign([_wpar(w) for w in words], order)
    out = tuple(words[k] for k in order)
    for a, b in zip(out, out[1:]):
        if a == b and _wpar(a):
            return 0, None
    return sign, out


def _mul(x, y):
    out = {}
    for a, ca in x.items():
        for b, cb in y.items():
            s, m = _sort_mono(a + b)
            if s:
                vec_iadd(out, {m: ONE}, s * ca * cb)
    return out


def _mono_par(m):
    return sum(_wpar(w) for w in m) % 2


def _word_bracket(w, u):
    s = -1 if (len(w) * len(u)) % 2 else 1
    out = {((w + u),): ONE}
    vec_iadd(out, {((u + w),): ONE}, -s)
    return out


def _bracket_word_mono(a, B):
    """[a, b_1...b_q] for a single word a."""
    out = {}
    pa = _wpar(a) - 1
    acc = 0
    for j, b in enumerate(B):
        sign = -1 if (pa * acc) % 2 else 1
        term = _mul(_mul({B[:j]: ONE}, _word_bracket(a, b)), {B[j + 1:]: ONE})
        vec_iadd(out, term, sign)
        acc += _wpar(b)
    return out


def _bracket_mono(A, B):
    out = {}
    pb = _mono_par(B) - 1
    for i, a in enumerate(A):
        rest = sum(_wpar(x) for x in A[i + 1:])
        sign = -1 if (pb * rest) % 2 else 1
        term = _mul(_mul({A[:i]: ONE}, _bracket_word_mono(a, B)), {A[i + 1:]: ONE})
        vec_iadd(out, term, sign)
    return out


def _bracket(x, y):
    out = {}
    for a, ca in x.items():
        for b, cb in y.items():
            vec_iadd(out, _bracket_mono(a, b), ca * cb)
    return out


def _elem_par(x):
    for m in x:
        return _mono_par(m)
    return 0


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


class _GerBasis:
    """A Ger(n) basis element: blocks of left-normed brackets, ordered by minimum."""

    def __init__(self, blocks):
        self.blocks = tuple(tuple(b) for b in blocks)
        self.n = sum(len(b) for b in blocks)
        self.degree = -(self.n - len(self.blocks))

    @property
    def label(self):
        if self.n == 1:
            return "id"
        return "*".join(str(b[0] + 1) if len(b) == 1 else _bracket_label(b) for b in self.blocks)

    def leaf_order(self):
        return tuple(c for b in self.blocks for c in b)

    def evaluate(self, args, pars):
        """theta(self; args) for homogeneous model elements with parities pars."""
        pi = self.leaf_order()
        eps = koszul_sign(pars, pi)
        b = [args[k] for k in pi]
        bp = [pars[k] for k in pi]
        # evaluate the planar tree: blocks of left-normed brackets, multiplied left to right
        pos = 0
        acc, acc_par, acc_deg = None, 0, 0
        sign = eps
        for blk in self.blocks:
            L = len(blk)
            # bracket tree on leaves pos..pos+L-1, operation degree -(L-1)
            val, vpar = b[pos], bp[pos]
            for k in range(1, L):
                # beta o (current subtree, leaf): leaf subtree has degree 0, no shuffle sign
                c2, p2 = b[pos + k], bp[pos + k]
                val = _bracket(val, c2)
                if vpar:
                    val = {m: -c for m, c in val.items()}
                vpar = (vpar + p2 + 1) % 2
            tdeg = L - 1
            if acc is None:
                acc, acc_par, acc_deg = val, vpar, tdeg
            else:
                # m(acc_tree, block_tree): shuffle sign moves the block's operation past earlier leaves
                leaves_par = sum(bp[:pos]) % 2
                if (tdeg * leaves_par) % 2:
                    sign = -sign
                acc = _mul(acc, val)
                acc_par = (acc_par + vpar) % 2
            pos += L
        if sign < 0:
            acc = {m: -c for m, c in acc.items()}
        return acc


class _Ger(_Family):
    name = "Ger"
    unitary = False
    floor_slope = -1

    def __init__(self):
        super().__init__()
        self._basis = {}
        self._coord = {}

    def basis(self, n):
        if n not in self._basis:
            out = []
            if n >= 1:
                for part in _set_partitions(list(range(n))):
                    blocks = sorted((sorted(b) for b in part), key=lambda b: b[0])
                    for blk_perms in itertools.product(*[itertools.permutations(b[1:]) for b in blocks]):
                        out.append(_GerBasis([(b[0],) + tuple(p) for b, p in zip(blocks, blk_perms)]))
            out.sort(key=lambda g: (-g.degree, g.blocks))
            self._basis[n] = out
        return self._basis[n]

    def _make(self, n):
        return [(g.degree, g.label) for g in self.basis(n)]

    @staticmethod
    def variables(n):
        return [{(((k,),)): ONE} for k in range(n)]

    def _coords(self, n):
        if n not in self._coord:
            cols = [g.evaluate(self.variables(n), [0] * n) for g in self.basis(n)]
            keys = sorted({m for c in cols for m in c}, key=lambda m: (len(m), tuple(_wkey(w) for w in m)))
            pos = {m: k for k, m in enumerate(keys)}
            flat = [{pos[m]: c for m, c in col.items()} for col in cols]
            sub = SubspaceBasis(len(keys), flat)
            if sub.dim != len(cols):
                raise ArithmeticError(f"Ger({n}) basis evaluations are not independent")
            piv = sub.pivots
            square = RatMatrix.from_columns(len(piv), [{r: col[p] for r, p in enumerate(piv) if p in col} for col in flat])
            self._coord[n] = (pos, piv, inverse(square))
        return self._coord[n]

    def coordinates(self, n, elem):
        pos, piv, inv = self._coords(n)
        flat = {pos[m]: c for m, c in elem.items()}
        return inv.apply({r: flat[p] for r, p in enumerate(piv) if p in flat})

    def act(self, n, a, perm):
        xs = self.variables(n)
        args = [xs[perm[k]] for k in range(n)]
        return self.coordinates(n, self.basis(n)[a].evaluate(args, [0] * n))

    def compose(self, i, m, a, n, b):
        xs = self.variables(m + n - 1)
        inner = self.basis(n)[b]
        val = inner.evaluate(xs[i - 1:i - 1 + n], [0] * n)
        vpar = inner.degree % 2
        args = xs[:i - 1] + [val] + xs[i - 1 + n:]
        pars = [0] * (i - 1) + [vpar] + [0] * (m - i)
        return self.coordinates(m + n - 1, self.basis(m)[a].evaluate(args, pars))


_FAMILIES = {"Com": _Com, "Ass": _Ass, "Lie": _Lie, "Ger": _Ger}


def _table_arity(fam, n, sgn, shift=0):
    """Per-degree basis, transpositions and index maps for arity n."""
    elems = fam.elements(n) if not (shift and n == 0) else []
    by_q = {}
    where = []
    for g, (qc, lab) in enumerate(elems):
        q = sgn * (qc - shift * (n - 1))
        lst = by_q.setdefault(q, [])
        where.append((q, len(lst)))
        lst.append(lab)
    trans = {}
    for q, labs in by_q.items():
        mats = []
        for k in range(1, n):
            perm = list(range(n))
            perm[k - 1], perm[k] = perm[k], perm[k - 1]
            cols = [None] * len(labs)
            for g, (qq, j) in enumerate(where):
                if qq != q:
                    continue
                img = fam.act(n, g, tuple(perm))
                col = {}
                for h, c in img.items():
                    qh, jh = where[h]
                    if qh != q:
                        raise ArithmeticError("symmetric action does not preserve degree")
                    col[jh] = c
                cols[j] = col
            mats.append(RatMatrix.from_columns(len(labs), cols))
        trans[q] = mats
    return by_q, trans, where


def builtin(name: str, convention=Convention.COCHAIN, arity_bound: int = 4,
            suspension: int = 0) -> OperadTable:
    """Com, Ass, Lie or Ger, tabulated up to ``arity_bound`` (grows on demand).

    ``suspension=j`` regrades arity n by 2j(n-1) (downwards in cochain
    degrees).  The shift is even, so signs of the action and of the
    compositions are unchanged; the tameness index goes up by 2j.  Suspended
    tables are reduced (arity 0 is dropped).
    """
    if name not in _FAMILIES:
        raise ValueError(f"unsupported built-in operad {name!r}; choose from {sorted(_FAMILIES)}")
    if arity_bound < 2:
        raise ValueError("arity bound must be at least 2")
    if suspension < 0:
        raise ValueError("suspension must be non-negative")
    shift = 2 * suspension
    conv = Convention.parse(convention)
    fam = _FAMILIES[name]()
    sgn = 1 if conv is Convention.COCHAIN else -1
    wheres = {}
    globals_ = {}

    def arity_data(n):
        by_q, trans, where = _table_arity(fam, n, sgn, shift)
        wheres[n] = where
        globals_[n] = {w: g for g, w in enumerate(where)}
        return by_q, trans

    basis, transpositions = {}, {}
    for n in range(arity_bound + 1):
        basis[n], transpositions[n] = arity_data(n)

    def composer(i, x, y):
        m, qa, a = x
        n, qb, b = y
        if m + n - 1 not in wheres:
            table.ensure_arity(m + n - 1)
        g = fam.compose(i, m, globals_[m][(qa, a)], n, globals_[n][(qb, b)])
        out = {}
        for h, c in g.items():
            qh, jh = wheres[m + n - 1][h]
            if qh != qa + qb:
                raise ArithmeticError("composition does not preserve degree")
            out[jh] = c
        return out

    slope = fam.floor_slope - shift if conv is Convention.COCHAIN else 0
    label = f"{name}{{{shift}}}" if shift else name
    table = OperadTable(label, conv, fam.unitary and not shift, basis, transpositions,
                        composer=composer, floor_slope=slope, grower=arity_data)
    table.family = fam
    table.suspension = suspension
    return table


def lie_to_ass(lie: OperadTable, ass: OperadTable) -> OperadMorphism:
    """The morphism sending the bracket to the commutator."""
    if lie.name != "Lie" or ass.name != "Ass":  # unsuspended tables only
        raise ValueError("expected built-in Lie and Ass tables")
    if lie.convention != ass.convention:
        raise ValueError("convention mismatch")
    N = min(lie.arity_bound, ass.arity_bound)
    fam = lie.family
    afam = ass.family
    maps = {}
    for n in range(1, N + 1):
        if n == 1:
            maps[(1, 0)] = RatMatrix.identity(1)
            continue
        cols = [{afam.index(w): c for w, c in v.items()} for v in fam.vectors(n)]
        maps[(n, 0)] = RatMatrix.from_columns(ass.dim(n, 0), cols)
    return OperadMorphism(lie, ass, maps)


@lru_cache(maxsize=None)
def _cached(name, conv, n, suspension):
    return builtin(name, Convention[conv], n, suspension)


def shared_builtin(name, convention=Convention.COCHAIN, arity_bound=4, suspension=0):
    """Memoized built-in tables, so repeated calls return the same object."""
    return _cached(name, Convention.parse(convention).name, arity_bound, suspension)
