"""Exact rational linear algebra over sparse matrices.

Everything here works over :class:`fractions.Fraction`; no floating point is
ever involved.  Matrices act on column vectors, vectors are plain
``dict[int, Fraction]`` with zero entries omitted.

Elimination is done fraction-free on integer rows (each row is scaled to a
primitive integer vector after every update) and only normalized to rationals
at the very end, which keeps coefficient growth in check at desk scale.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

Rat = Fraction


def rat(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"refusing to convert {type(x).__name__} to a rational: {x!r}")


# -- sparse vectors ---------------------------------------------------------

def vec_add(u, v, c=1):
    """Return u + c*v as a new dict."""
    out = dict(u)
    if c == 0:
        return out
    for k, x in v.items():
        y = out.get(k, 0) + c * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def vec_iadd(u, v, c=1):
    """In-place u += c*v."""
    if c == 0:
        return u
    for k, x in v.items():
        y = u.get(k, 0) + c * x
        if y:
            u[k] = y
        else:
            u.pop(k, None)
    return u


def vec_scale(v, c):
    if c == 0:
        return {}
    return {k: c * x for k, x in v.items()}


class RatMatrix:
    """Immutable sparse matrix with Fraction entries."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        data = {}
        if entries:
            for (i, j), x in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
                x = rat(x)
                if x:
                    data.setdefault(i, {})[j] = x
        self._rows = data

    # construction helpers
    @classmethod
    def _from_row_dicts(cls, rows, cols, row_dicts):
        m = cls.__new__(cls)
        m.rows, m.cols = rows, cols
        m._rows = {i: dict(r) for i, r in row_dicts.items() if r}
        return m

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        return cls._from_row_dicts(n, n, {i: {i: Fraction(1)} for i in range(n)})

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        ent = {}
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ValueError("ragged rows")
            for j, x in enumerate(r):
                if x:
                    ent[(i, j)] = x
        return cls(len(rows), ncols, ent)

    @classmethod
    def from_columns(cls, nrows, columns):
        """Build from a list of sparse column vectors."""
        rd = {}
        for j, col in enumerate(columns):
            for i, x in col.items():
                if x:
                    if not 0 <= i < nrows:
                        raise IndexError(f"row {i} outside {nrows}")
                    rd.setdefault(i, {})[j] = rat(x)
        return cls._from_row_dicts(nrows, len(columns), rd)

    @classmethod
    def from_row_vectors(cls, ncols, rows):
        rd = {i: {j: rat(x) for j, x in r.items() if x} for i, r in enumerate(rows)}
        return cls._from_row_dicts(len(rows), ncols, rd)

    # access
    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self):
        return {(i, j): x for i, r in self._rows.items() for j, x in r.items()}

    def __getitem__(self, ij):
        i, j = ij
        return self._rows.get(i, {}).get(j, Fraction(0))

    def row(self, i):
        return dict(self._rows.get(i, {}))

    def row_dicts(self):
        return [dict(self._rows.get(i, {})) for i in range(self.rows)]

    def column(self, j):
        return {i: r[j] for i, r in self._rows.items() if j in r}

    def columns(self):
        cols = [dict() for _ in range(self.cols)]
        for i, r in self._rows.items():
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def to_dense(self):
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def nnz(self):
        return sum(len(r) for r in self._rows.values())

    def is_zero(self):
        return not self._rows

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.rows, self.cols,
                     tuple(sorted((i, tuple(sorted(r.items()))) for i, r in self._rows.items()))))

    def __repr__(self):
        return f"RatMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    # arithmetic
    def apply(self, v):
        """Matrix times sparse column vector."""
        out = {}
        for i, r in self._rows.items():
            s = 0
            if len(v) < len(r):
                for j, x in v.items():
                    y = r.get(j)
                    if y is not None:
                        s += y * x
            else:
                for j, y in r.items():
                    x = v.get(j)
                    if x is not None:
                        s += y * x
            if s:
                out[i] = s
        return out

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        rd = {}
        orows = other._rows
        for i, r in self._rows.items():
            acc = {}
            for k, x in r.items():
                ok = orows.get(k)
                if ok:
                    vec_iadd(acc, ok, x)
            if acc:
                rd[i] = acc
        return RatMatrix._from_row_dicts(self.rows, other.cols, rd)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        rd = {i: dict(r) for i, r in self._rows.items()}
        for i, r in other._rows.items():
            vec_iadd(rd.setdefault(i, {}), r)
        return RatMatrix._from_row_dicts(self.rows, self.cols, rd)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = rat(c)
        return RatMatrix._from_row_dicts(self.rows, self.cols,
                                         {i: vec_scale(r, c) for i, r in self._rows.items()})

    def transpose(self):
        rd = {}
        for i, r in self._rows.items():
            for j, x in r.items():
                rd.setdefault(j, {})[i] = x
        return RatMatrix._from_row_dicts(self.cols, self.rows, rd)

    T = property(transpose)

    def submatrix(self, row_idx, col_idx):
        cpos = {c: k for k, c in enumerate(col_idx)}
        rd = {}
        for a, i in enumerate(row_idx):
            r = self._rows.get(i)
            if r:
                rr = {cpos[j]: x for j, x in r.items() if j in cpos}
                if rr:
                    rd[a] = rr
        return RatMatrix._from_row_dicts(len(row_idx), len(col_idx), rd)


def hstack(mats, rows=None):
    if not mats:
        return RatMatrix(rows or 0, 0)
    nr = mats[0].rows
    rd = {}
    off = 0
    for m in mats:
        if m.rows != nr:
            raise ValueError("hstack row mismatch")
        for i, r in m._rows.items():
            d = rd.setdefault(i, {})
            for j, x in r.items():
                d[j + off] = x
        off += m.cols
    return RatMatrix._from_row_dicts(nr, off, rd)


def vstack(mats, cols=None):
    if not mats:
        return RatMatrix(0, cols or 0)
    nc = mats[0].cols
    rd = {}
    off = 0
    for m in mats:
        if m.cols != nc:
            raise ValueError("vstack column mismatch")
        for i, r in m._rows.items():
            rd[i + off] = dict(r)
        off += m.rows
    return RatMatrix._from_row_dicts(off, nc, rd)


def block_diag(mats):
    nr = sum(m.rows for m in mats)
    nc = sum(m.cols for m in mats)
    rd = {}
    ro = co = 0
    for m in mats:
        for i, r in m._rows.items():
            rd[i + ro] = {j + co: x for j, x in r.items()}
        ro += m.rows
        co += m.cols
    return RatMatrix._from_row_dicts(nr, nc, rd)


# -- elimination ------------------------------------------------------------

def _to_int_row(r):
    den = 1
    for x in r.values():
        den = lcm(den, x.denominator)
    out = {j: int(x * den) for j, x in r.items()}
    return _primitive(out)


def _primitive(r):
    g = 0
    for x in r.values():
        g = gcd(g, x)
        if g == 1:
            return r
    if g > 1:
        return {j: x // g for j, x in r.items()}
    return r


def _eliminate(row_dicts):
    """Gauss-Jordan on integer rows. Returns (rows, pivots) sorted by pivot."""
    rows = [_to_int_row(r) for r in row_dicts if r]
    done = []
    while rows:
        lead = min(min(r) for r in rows)
        best = None
        for k, r in enumerate(rows):
            if lead in r:
                key = (len(r), abs(r[lead]), k)
                if best is None or key < best[0]:
                    best = (key, k)
        p = rows.pop(best[1])
        pv = p[lead]
        nxt = []
        for r in rows:
            c = r.get(lead)
            if c:
                r = _combine(r, pv, p, c)
                if r:
                    nxt.append(r)
            else:
                nxt.append(r)
        rows = nxt
        for k, (dl, r) in enumerate(done):
            c = r.get(lead)
            if c:
                done[k] = (dl, _combine(r, pv, p, c))
        done.append((lead, p))
    done.sort(key=lambda t: t[0])
    pivots = [dl for dl, _ in done]
    out = []
    for dl, r in done:
        pv = r[dl]
        out.append({j: Fraction(x, pv) for j, x in r.items()})
    return out, pivots


def _combine(r, pv, p, c):
    """pv*r - c*p, made primitive; r[lead] cancels."""
    out = {j: pv * x for j, x in r.items()}
    for j, x in p.items():
        y = out.get(j, 0) - c * x
        if y:
            out[j] = y
        else:
            out.pop(j, None)
    if out:
        g = 0
        for x in out.values():
            g = gcd(g, x)
            if g == 1:
                break
        if g > 1:
            out = {j: x // g for j, x in out.items()}
    return out


def rref(m: RatMatrix):
    """Reduced row echelon form (same shape) and the pivot columns."""
    rows, pivots = _eliminate(m.row_dicts())
    rd = {i: r for i, r in enumerate(rows)}
    return RatMatrix._from_row_dicts(m.rows, m.cols, rd), pivots


def rank(m: RatMatrix) -> int:
    return len(_eliminate(m.row_dicts())[1])


class SubspaceBasis:
    """Subspace of Q^n held as reduced echelon row vectors."""

    __slots__ = ("ambient", "vectors", "pivots")

    def __init__(self, ambient, vectors=()):
        vecs = [dict(v) for v in vectors if v]
        for v in vecs:
            for j in v:
                if not 0 <= j < ambient:
                    raise IndexError(f"coordinate {j} outside ambient dimension {ambient}")
        rows, piv = _eliminate(vecs)
        self.ambient = ambient
        self.vectors = rows
        self.pivots = piv

    @property
    def dim(self):
        return len(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def __eq__(self, other):
        return (isinstance(other, SubspaceBasis) and self.ambient == other.ambient
                and self.vectors == other.vectors)

    def reduce(self, v):
        """v minus its component along the echelon basis (zero at all pivots)."""
        out = dict(v)
        for p, b in zip(self.pivots, self.vectors):
            c = out.get(p)
            if c:
                vec_iadd(out, b, -c)
        return out

    def contains(self, v):
        return not self.reduce(v)

    def coords(self, v):
        """Coordinates of v in the basis; raises if v is not in the span."""
        c = [v.get(p, Fraction(0)) for p in self.pivots]
        rest = dict(v)
        for x, b in zip(c, self.vectors):
            if x:
                vec_iadd(rest, b, -x)
        if rest:
            raise ValueError("vector not in subspace")
        return c

    def matrix(self):
        """Basis vectors as the columns of an ambient x dim matrix."""
        return RatMatrix.from_columns(self.ambient, self.vectors)

    def __repr__(self):
        return f"SubspaceBasis(dim={self.dim}, ambient={self.ambient})"


def kernel(m: RatMatrix) -> SubspaceBasis:
    rows, pivots = _eliminate(m.row_dicts())
    pset = set(pivots)
    vecs = []
    for f in range(m.cols):
        if f in pset:
            continue
        v = {f: Fraction(1)}
        for p, r in zip(pivots, rows):
            x = r.get(f)
            if x:
                v[p] = -x
        vecs.append(v)
    return SubspaceBasis(m.cols, vecs)


def image(m: RatMatrix) -> SubspaceBasis:
    """Column space."""
    return SubspaceBasis(m.rows, m.columns())


def row_space(m: RatMatrix) -> SubspaceBasis:
    return SubspaceBasis(m.cols, m.row_dicts())


def solve(a: RatMatrix, b):
    """One solution x of a @ x = b (free variables set to 0), or None."""
    sols = solve_many(a, [b])
    return sols[0]


def solve_many(a: RatMatrix, bs):
    """Solve a @ x = b for each b in bs; entries are None when inconsistent.

    Eliminates [a | I] once; rows whose a-part vanishes are the consistency
    conditions, the others give x directly with free variables set to 0.
    """
    n = a.cols
    rd = a.row_dicts()
    for i in range(a.rows):
        rd[i][n + i] = Fraction(1)
    rows, pivots = _eliminate(rd)
    solving = [(p, {j - n: x for j, x in r.items() if j >= n}) for p, r in zip(pivots, rows) if p < n]
    checks = [{j - n: x for j, x in r.items()} for p, r in zip(pivots, rows) if p >= n]
    out = []
    for b in bs:
        for i in b:
            if not 0 <= i < a.rows:
                raise IndexError("rhs outside row range")
        if any(_dot(c, b) for c in checks):
            out.append(None)
            continue
        x = {}
        for p, t in solving:
            y = _dot(t, b)
            if y:
                x[p] = y
        out.append(x)
    return out


def _dot(u, v):
    if len(u) > len(v):
        u, v = v, u
    s = 0
    for k, x in u.items():
        y = v.get(k)
        if y:
            s += x * y
    return s


def inverse(m: RatMatrix) -> RatMatrix:
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    n = m.rows
    sols = solve_many(m, [{i: Fraction(1)} for i in range(n)])
    if any(s is None for s in sols) or rank(m) < n:
        raise ValueError("matrix is singular")
    return RatMatrix.from_columns(n, sols)


def quotient_section(ambient: int, sub: SubspaceBasis):
    """Projection Q^n -> Q^n/sub and its canonical section.

    The quotient is identified with the non-pivot coordinates of ``sub``'s
    echelon form; the section sends the j-th quotient basis vector to the
    corresponding unit vector.
    """
    if sub.ambient != ambient:
        raise ValueError("subspace lives in a different ambient space")
    pset = set(sub.pivots)
    nonpiv = [c for c in range(ambient) if c not in pset]
    pos = {c: j for j, c in enumerate(nonpiv)}
    q = len(nonpiv)
    rd = {}
    for j, c in enumerate(nonpiv):
        rd.setdefault(j, {})[c] = Fraction(1)
    for p, b in zip(sub.pivots, sub.vectors):
        for c, x in b.items():
            if c in pos:
                rd.setdefault(pos[c], {})[p] = -x
    proj = RatMatrix._from_row_dicts(q, ambient, rd)
    sec = RatMatrix._from_row_dicts(ambient, q, {c: {j: Fraction(1)} for j, c in enumerate(nonpiv)})
    return proj, sec
