"""Slow but independent reference computations used to check the library."""
import itertools
from fractions import Fraction

from opmin.linalg import RatMatrix, rank


def det(rows):
    """Determinant by Laplace expansion along the first row."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * a * det(minor)
    return total


def rank_by_minors(rows):
    """Largest k with a nonzero k x k minor."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    for k in range(min(m, n), 0, -1):
        for ri in itertools.combinations(range(m), k):
            for ci in itertools.combinations(range(n), k):
                if det([[rows[i][j] for j in ci] for i in ri]):
                    return k
    return 0


# -- free algebras as tensor coinvariants ------------------------------------------

def coinvariant_dim(operad, degrees: dict, k: int, max_arity: int) -> int:
    """dim of (sum_n P(n) (x) V^{(x)n})_{Sigma_n} in degree k, arities <= max_arity.

    Works in the full tensor space with basis (operation, word) and divides
    out mu.s_i (x) w - (-1)^{|w_i||w_i+1|} mu (x) s_i w for every adjacent
    transposition.  The relations preserve the multiset of letters, so the
    quotient is computed one orbit at a time.
    """
    total = 0
    if operad.unitary and k == 0:
        total += 1
    letters = sorted(degrees)
    for n in range(1, max_arity + 1):
        if n > operad.arity_bound:
            operad.ensure_arity(n)
        for ms in itertools.combinations_with_replacement(letters, n):
            q = k - sum(degrees[x] for x in ms)
            d = operad.dim(n, q)
            if not d:
                continue
            words = sorted(set(itertools.permutations(ms)))
            pos = {w: i for i, w in enumerate(words)}
            rows = []
            for w in words:
                for i in range(n - 1):
                    t = operad.transposition(n, q, i + 1)
                    sw = list(w)
                    sw[i], sw[i + 1] = sw[i + 1], sw[i]
                    sign = -1 if degrees[w[i]] % 2 and degrees[w[i + 1]] % 2 else 1
                    for b in range(d):
                        row = {}
                        for a, c in t.column(b).items():
                            row[pos[w] * d + a] = row.get(pos[w] * d + a, 0) + c
                        key = pos[tuple(sw)] * d + b
                        row[key] = row.get(key, 0) - sign
                        row = {j: Fraction(c) for j, c in row.items() if c}
                        if row:
                            rows.append(row)
            ncols = len(words) * d
            rel = RatMatrix.from_row_vectors(ncols, rows) if rows else RatMatrix(0, ncols)
            total += ncols - rank(rel)
    return total


# -- multilinear Lie words ------------------------------------------------------------

def _trees(leaves):
    if len(leaves) == 1:
        yield leaves[0]
        return
    for i in range(1, len(leaves)):
        for a in _trees(leaves[:i]):
            for b in _trees(leaves[i:]):
                yield (a, b)


def _contexts(t):
    """(subtree, rebuild) for every internal node of t."""
    if not isinstance(t, tuple):
        return
    yield t, lambda s: s
    a, b = t
    for sub, re in _contexts(a):
        yield sub, (lambda s, re=re, b=b: (re(s), b))
    for sub, re in _contexts(b):
        yield sub, (lambda s, re=re, a=a: (a, re(s)))


def lie_multilinear_dim(n: int) -> int:
    """dim of the multilinear part of the free Lie algebra on n letters.

    Bracket trees on the letters modulo antisymmetry and Jacobi applied at
    every node.
    """
    trees = []
    for perm in itertools.permutations(range(n)):
        trees.extend(_trees(list(perm)))
    trees = sorted(set(trees), key=repr)
    pos = {t: i for i, t in enumerate(trees)}
    rows = []
    for t in trees:
        for sub, re in _contexts(t):
            a, b = sub
            rows.append({pos[re(sub)]: 1, pos[re((b, a))]: 1})
            if isinstance(a, tuple):
                x, y = a
                z = b
                row = {}
                for s in (((x, y), z), ((y, z), x), ((z, x), y)):
                    j = pos[re(s)]
                    row[j] = row.get(j, 0) + 1
                rows.append(row)
    rows = [{j: Fraction(c) for j, c in r.items() if c} for r in rows]
    rows = [r for r in rows if r]
    return len(trees) - rank(RatMatrix.from_row_vectors(len(trees), rows))


def stirling_first(n: int, k: int) -> int:
    """Unsigned Stirling numbers of the first kind."""
    c = [[0] * (n + 1) for _ in range(n + 1)]
    c[0][0] = 1
    for m in range(1, n + 1):
        for j in range(1, m + 1):
            c[m][j] = c[m - 1][j - 1] + (m - 1) * c[m - 1][j]
    return c[n][k]


def koszul_reference(parities, perm):
    """Sign of permuting graded letters, counted pair by pair."""
    s = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j] and parities[perm[i]] and parities[perm[j]]:
                s += 1
    return -1 if s % 2 else 1

