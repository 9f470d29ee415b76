"""JSON persistence for operads, algebras, morphisms, models and homotopies.

Every document carries ``schema``, ``schema_version`` and ``convention``.
Coefficients are strings "p/q" (or "p"); floats are rejected.  Operads may be
given inline as full tables or as a reference {"builtin": name}.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path

from .algebra import AlgebraMorphism, QisoCertificate, TabularAlgebra
from .builtins import shared_builtin
from .complexes import ChainComplex, Convention, GradedSpace
from .engine import MinimalModel, StageRecord
from .free import FreeAlgebra, FreeElement, Generator
from .homotopy import Homotopy, PathAlgebra
from .linalg import RatMatrix
from .operad import OperadTable

SCHEMA_VERSION = 1
WORKSPACE_ENV = "OPMIN_WORKSPACE"


class SchemaError(ValueError):
    def __init__(self, path, msg):
        super().__init__(f"{path}: {msg}")
        self.path = path


# -- scalars and vectors --------------------------------------------------------

def dump_rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def load_rat(s, path="$"):
    if isinstance(s, bool) or isinstance(s, float):
        raise SchemaError(path, f"coefficient must be a 'p/q' string, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise SchemaError(path, f"coefficient must be a 'p/q' string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(path, f"malformed rational {s!r}") from None


def dump_vec(v):
    return [[i, dump_rat(c)] for i, c in sorted(v.items()) if c]


def load_vec(data, path):
    _expect(data, list, path)
    out = {}
    for k, e in enumerate(data):
        p = f"{path}[{k}]"
        if not (isinstance(e, list) and len(e) == 2 and isinstance(e[0], int)):
            raise SchemaError(p, "vector entries are [index, 'p/q']")
        c = load_rat(e[1], p + "[1]")
        if c:
            out[e[0]] = c
    return out


def dump_matrix(m: RatMatrix):
    return {"rows": m.rows, "cols": m.cols,
            "entries": [[i, j, dump_rat(c)] for (i, j), c in sorted(m.entries.items())]}


def load_matrix(data, path):
    _expect(data, dict, path)
    rows, cols = _field(data, "rows", int, path), _field(data, "cols", int, path)
    ent = {}
    for k, e in enumerate(_field(data, "entries", list, path)):
        p = f"{path}.entries[{k}]"
        if not (isinstance(e, list) and len(e) == 3 and isinstance(e[0], int) and isinstance(e[1], int)):
            raise SchemaError(p, "matrix entries are [row, col, 'p/q']")
        if not (0 <= e[0] < rows and 0 <= e[1] < cols):
            raise SchemaError(p, "entry outside the matrix shape")
        ent[(e[0], e[1])] = load_rat(e[2], p + "[2]")
    return RatMatrix(rows, cols, ent)


def _expect(x, typ, path):
    if not isinstance(x, typ):
        raise SchemaError(path, f"expected {typ.__name__}, got {type(x).__name__}")
    return x


def _field(d, key, typ, path):
    if key not in d:
        raise SchemaError(path, f"missing field {key!r}")
    return _expect(d[key], typ, f"{path}.{key}")


def _header(kind, convention):
    return {"schema": kind, "schema_version": SCHEMA_VERSION, "convention": Convention.parse(convention).name.lower()}


def _check_header(d, kind, path):
    _expect(d, dict, path)
    if d.get("schema") != kind:
        raise SchemaError(f"{path}.schema", f"expected {kind!r}, got {d.get('schema')!r}")
    if "schema_version" not in d:
        raise SchemaError(path, "missing field 'schema_version'")
    if d["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(f"{path}.schema_version", f"unsupported version {d['schema_version']!r}")
    conv = _field(d, "convention", str, path)
    try:
        return Convention.parse(conv)
    except ValueError as e:
        raise SchemaError(f"{path}.convention", str(e)) from None


# -- operads ----------------------------------------------------------------------

def operad_to_json(p: OperadTable, inline=True):
    if not inline and getattr(p, "family", None) is not None and not getattr(p, "suspension", 0):
        return {**_header("opmin.operad", p.convention), "builtin": p.name}
    d = _header("opmin.operad", p.convention)
    d.update({"name": p.name, "unitary": p.unitary, "unit_label": p.unit_label})
    if p.floor_slope is not None:
        d["floor_slope"] = p.floor_slope
    ar = {}
    for n in range(p.arity_bound + 1):
        per = {}
        for q in p.degrees(n):
            per[str(q)] = {"labels": list(p.labels(n, q)),
                           "transpositions": [dump_matrix(p.transposition(n, q, i)) for i in range(1, n)]}
        ar[str(n)] = per
    d["arities"] = ar
    d["compositions"] = [[i, p.label(*x), p.label(*y), p.labels(x[0] + y[0] - 1, x[1] + y[1])[c], dump_rat(v)]
                         for i, x, y, c, v in p.composition_entries()]
    diff = []
    for n in range(p.arity_bound + 1):
        for q in p.degrees(n):
            m = p.d_matrix(n, q)
            for (r, c), v in sorted(m.entries.items()):
                diff.append([p.label(n, q, c), p.labels(n, q + p.delta)[r], dump_rat(v)])
    d["differential"] = diff
    return d


def operad_from_json(d, path="$") -> OperadTable:
    conv = _check_header(d, "opmin.operad", path)
    if "builtin" in d:
        name = _field(d, "builtin", str, path)
        try:
            return shared_builtin(name, conv, d.get("arity_bound", 4))
        except ValueError as e:
            raise SchemaError(f"{path}.builtin", str(e)) from None
    name = _field(d, "name", str, path)
    unitary = _field(d, "unitary", bool, path)
    ar = _field(d, "arities", dict, path)
    basis, trans = {}, {}
    for ns, per in ar.items():
        p = f"{path}.arities.{ns}"
        try:
            n = int(ns)
        except ValueError:
            raise SchemaError(p, "arity keys are integers") from None
        _expect(per, dict, p)
        basis[n], trans[n] = {}, {}
        for qs, ent in per.items():
            pq = f"{p}.{qs}"
            try:
                q = int(qs)
            except ValueError:
                raise SchemaError(pq, "degree keys are integers") from None
            labels = _field(ent, "labels", list, pq)
            basis[n][q] = [_expect(x, str, f"{pq}.labels") for x in labels]
            mats = _field(ent, "transpositions", list, pq)
            trans[n][q] = [load_matrix(m, f"{pq}.transpositions[{k}]") for k, m in enumerate(mats)]
    index = {}
    for n, per in basis.items():
        for q, labels in per.items():
            for i, lab in enumerate(labels):
                index[lab] = (n, q, i)

    def look(lab, p):
        if lab not in index:
            raise SchemaError(p, f"unknown operad basis label {lab!r}")
        return index[lab]

    comps = {}
    for k, e in enumerate(d.get("compositions", [])):
        p = f"{path}.compositions[{k}]"
        if not (isinstance(e, list) and len(e) == 5 and isinstance(e[0], int)):
            raise SchemaError(p, "composition entries are [i, src1, src2, dst, 'p/q']")
        x, y, z = look(e[1], p + "[1]"), look(e[2], p + "[2]"), look(e[3], p + "[3]")
        if z[0] != x[0] + y[0] - 1 or z[1] != x[1] + y[1]:
            raise SchemaError(p, "destination has the wrong arity or degree")
        comps.setdefault((e[0], x, y), {})[z[2]] = load_rat(e[4], p + "[4]")
    delta = conv.delta
    dent = {}
    for k, e in enumerate(d.get("differential", [])):
        p = f"{path}.differential[{k}]"
        if not (isinstance(e, list) and len(e) == 3):
            raise SchemaError(p, "differential entries are [src, dst, 'p/q']")
        x, z = look(e[0], p + "[0]"), look(e[1], p + "[1]")
        if z[0] != x[0] or z[1] != x[1] + delta:
            raise SchemaError(p, "differential must preserve arity and shift degree by delta")
        dent.setdefault((x[0], x[1]), {})[(z[2], x[2])] = load_rat(e[2], p + "[2]")
    diff = {}
    for (n, q), ent in dent.items():
        diff.setdefault(n, {})[q] = RatMatrix(len(basis[n].get(q + delta, [])), len(basis[n][q]), ent)
    try:
        return OperadTable(name, conv, unitary, basis, trans, comps, diff,
                           floor_slope=d.get("floor_slope"), unit_label=d.get("unit_label", "id"))
    except ValueError as e:
        raise SchemaError(path, str(e)) from None


# -- algebras -----------------------------------------------------------------------

def tabular_to_json(a: TabularAlgebra):
    d = _header("opmin.tabular_algebra", a.convention)
    p = a.operad
    lo, hi = a.window
    d["name"] = a.name
    d["operad"] = operad_to_json(p, inline=False)
    d["window"] = [lo, hi]
    d["basis"] = {str(k): list(a.complex.space.labels(k)) for k in range(lo, hi + 1) if a.dim(k)}
    d["differential"] = {str(k): dump_matrix(a.d_matrix(k)) for k in range(lo, hi + 1)
                         if a.complex.has_d(k) and a.d_matrix(k).nnz()}
    d["arities"] = sorted(a.arities)
    tabs = []
    for x, tab in sorted(a.tables.items()):
        for args, out in sorted(tab.items()):
            tabs.append({"op": p.label(*x), "args": [list(t) for t in args], "out": dump_vec(out)})
    d["tables"] = tabs
    return d


def tabular_from_json(d, path="$", operad=None):
    conv = _check_header(d, "opmin.tabular_algebra", path)
    p = operad or operad_from_json(_field(d, "operad", dict, path), f"{path}.operad")
    if p.convention is not conv:
        raise SchemaError(f"{path}.convention", "algebra and operad conventions differ")
    win = _field(d, "window", list, path)
    if len(win) != 2 or not all(isinstance(x, int) for x in win):
        raise SchemaError(f"{path}.window", "window is [lo, hi]")
    basis = {}
    for ks, labs in _field(d, "basis", dict, path).items():
        basis[int(ks)] = [str(x) for x in _expect(labs, list, f"{path}.basis.{ks}")]
    try:
        space = GradedSpace(basis, tuple(win))
    except (ValueError, LookupError) as e:
        raise SchemaError(f"{path}.basis", str(e)) from None
    dm = {int(k): load_matrix(m, f"{path}.differential.{k}") for k, m in d.get("differential", {}).items()}
    try:
        cx = ChainComplex(space, conv, dm)
    except (ValueError, ArithmeticError, LookupError) as e:
        raise SchemaError(f"{path}.differential", str(e)) from None
    tables = {}
    for k, e in enumerate(_field(d, "tables", list, path)):
        pk = f"{path}.tables[{k}]"
        lab = _field(e, "op", str, pk)
        try:
            x = p.lookup(lab)
        except KeyError as err:
            raise SchemaError(f"{pk}.op", str(err.args[0])) from None
        args = tuple(tuple(t) for t in _field(e, "args", list, pk))
        if len(args) != x[0]:
            raise SchemaError(f"{pk}.args", f"operation of arity {x[0]} needs {x[0]} arguments")
        tables.setdefault(x, {})[args] = load_vec(_field(e, "out", list, pk), f"{pk}.out")
    return TabularAlgebra(p, cx, tables, arities=d.get("arities", ()), name=d.get("name", ""),
                          labels=basis)


def element_to_json(M: FreeAlgebra, el: FreeElement):
    out = []
    for key in sorted(el.terms, key=lambda k: (len(k[0]), k)):
        n, q, vec, u = M.representative(key)
        c = el.terms[key]
        ops = [[M.operad.label(n, q, b), dump_rat(c * x)] for b, x in sorted(vec.items())] if n else \
            [[M.operad.label(0, 0, 0), dump_rat(c)]]
        out.append({"args": list(u), "op": ops})
    return out


def element_from_json(M: FreeAlgebra, degree, data, path):
    out = FreeElement(degree, {})
    for k, t in enumerate(_expect(data, list, path)):
        pk = f"{path}[{k}]"
        args = [str(x) for x in _field(t, "args", list, pk)]
        for x in args:
            if x not in M.gen:
                raise SchemaError(f"{pk}.args", f"unknown generator {x!r}")
        vec, q = {}, None
        for j, (lab, c) in enumerate(_field(t, "op", list, pk)):
            try:
                n, qq, i = M.operad.lookup(lab)
            except KeyError as err:
                raise SchemaError(f"{pk}.op[{j}]", str(err.args[0])) from None
            if n != len(args) or (q is not None and qq != q):
                raise SchemaError(f"{pk}.op[{j}]", "operation arity or degree does not match the term")
            q = qq
            vec[i] = vec.get(i, 0) + load_rat(c, f"{pk}.op[{j}][1]")
        if q is None:
            continue
        if not args:
            term = M.unit_element().scale(vec.get(0, 0))
        else:
            term = M.theta((len(args), q, vec), [M.generator_element(x) for x in args])
        if term.terms and term.degree != degree:
            raise SchemaError(pk, f"term has degree {term.degree}, expected {degree}")
        out = out + FreeElement(degree, term.terms)
    return out


def free_to_json(M: FreeAlgebra):
    d = _header("opmin.free_algebra", M.convention)
    d["operad"] = operad_to_json(M.operad, inline=False)
    d.update({"max_degree": M.max_degree, "lo": M.lo, "r": M.r, "arity_cap": M.arity_cap})
    d["generators"] = [{"label": g.label, "degree": g.degree, "stage": g.stage} for g in M.generators]
    d["differential"] = {g.label: element_to_json(M, M.d_generator(g.label))
                         for g in M.generators if M.d_generator(g.label).terms}
    return d


def free_from_json(d, path="$", operad=None):
    conv = _check_header(d, "opmin.free_algebra", path)
    p = operad or operad_from_json(_field(d, "operad", dict, path), f"{path}.operad")
    if p.convention is not conv:
        raise SchemaError(f"{path}.convention", "algebra and operad conventions differ")
    gens = []
    for k, g in enumerate(_field(d, "generators", list, path)):
        pk = f"{path}.generators[{k}]"
        gens.append(Generator(_field(g, "label", str, pk), _field(g, "degree", int, pk), g.get("stage", 0)))
    kw = dict(max_degree=d.get("max_degree", 10), lo=d.get("lo", -1), r=d.get("r"), arity_cap=d.get("arity_cap"))
    M = FreeAlgebra(p, [], **kw)
    stages = {}
    for g in gens:
        stages.setdefault(g.stage, []).append(g)
    diff = _expect(d.get("differential", {}), dict, f"{path}.differential")
    for lab in diff:
        if lab not in {g.label for g in gens}:
            raise SchemaError(f"{path}.differential", f"unknown generator {lab!r}")
    for s in sorted(stages):
        st = stages[s]
        dmap = {}
        for g in st:
            if g.label in diff:
                dmap[g.label] = element_from_json(M, g.degree + conv.delta, diff[g.label],
                                                  f"{path}.differential.{g.label}")
        try:
            M = M.ks_extend([Generator(g.label, g.degree) for g in st], dmap)
        except ValueError as e:
            raise SchemaError(f"{path}.differential", str(e)) from None
    return M


def algebra_to_json(a):
    return free_to_json(a) if isinstance(a, FreeAlgebra) else tabular_to_json(a)


def algebra_from_json(d, path="$", operad=None):
    kind = _expect(d, dict, path).get("schema")
    if kind == "opmin.free_algebra":
        return free_from_json(d, path, operad)
    if kind == "opmin.tabular_algebra":
        return tabular_from_json(d, path, operad)
    raise SchemaError(f"{path}.schema", f"expected an algebra document, got {kind!r}")


# -- morphisms, models, homotopies ------------------------------------------------------

def morphism_to_json(f: AlgebraMorphism):
    d = _header("opmin.morphism", f.convention)
    d["source"] = algebra_to_json(f.source)
    d["target"] = algebra_to_json(f.target)
    d["images"] = {lab: dump_vec(v) for lab, v in f.images.items()}
    return d


def morphism_from_json(d, path="$", loader=None):
    _check_header(d, "opmin.morphism", path)
    load = loader or algebra_from_json
    src = load(_field(d, "source", dict, path), f"{path}.source")
    tgt = load(_field(d, "target", dict, path), f"{path}.target", operad=src.operad) \
        if loader is None else load(d["target"], f"{path}.target")
    imgs = {k: load_vec(v, f"{path}.images.{k}") for k, v in _field(d, "images", dict, path).items()}
    try:
        return AlgebraMorphism(src, tgt, imgs)
    except (ValueError, KeyError) as e:
        raise SchemaError(f"{path}.images", str(e)) from None


def model_to_json(m: MinimalModel):
    d = _header("opmin.model", m.convention)
    d.update({"r": m.r, "N": m.N})
    d["model"] = free_to_json(m.model)
    d["target"] = algebra_to_json(m.target)
    d["images"] = {lab: dump_vec(v) for lab, v in m.f.images.items()}
    d["stages"] = [{"degree": s.degree, "iteration": s.iteration, "kind": s.kind, "labels": list(s.labels),
                    "cone_dim": s.cone_dim} for s in m.stages]
    d["iterations"] = {str(k): v for k, v in sorted(m.iterations.items())}
    d["capped"] = list(m.capped)
    d["log"] = list(m.log)
    if m.certificate is not None:
        d["certificate"] = {"ok": m.certificate.ok, "up_to": m.certificate.up_to,
                            "cone_dims": {str(k): v for k, v in sorted(m.certificate.cone_dims.items())}}
    return d


def model_from_json(d, path="$", loader=None):
    _check_header(d, "opmin.model", path)
    load = loader or algebra_from_json
    M = free_from_json(_field(d, "model", dict, path), f"{path}.model")
    tgt = load(_field(d, "target", dict, path), f"{path}.target") if loader else \
        algebra_from_json(d["target"], f"{path}.target", operad=M.operad)
    if tgt.operad is not M.operad:
        M = free_from_json(d["model"], f"{path}.model", operad=tgt.operad)
    imgs = {k: load_vec(v, f"{path}.images.{k}") for k, v in _field(d, "images", dict, path).items()}
    try:
        f = AlgebraMorphism(M, tgt, imgs)
    except (ValueError, KeyError) as e:
        raise SchemaError(f"{path}.images", str(e)) from None
    res = MinimalModel(M, f, tgt, _field(d, "r", int, path), _field(d, "N", int, path))
    res.stages = [StageRecord(s["degree"], s["iteration"], s["kind"], list(s["labels"]), s["cone_dim"])
                  for s in d.get("stages", [])]
    res.iterations = {int(k): v for k, v in d.get("iterations", {}).items()}
    res.capped = list(d.get("capped", []))
    res.log = list(d.get("log", []))
    c = d.get("certificate")
    if c is not None:
        res.certificate = QisoCertificate(c["ok"], c["up_to"], {int(k): v for k, v in c["cone_dims"].items()})
    return res


def homotopy_to_json(h: Homotopy):
    d = _header("opmin.homotopy", h.path.convention)
    d["T"] = h.path.T
    d["source"] = free_to_json(h.h.source)
    d["base"] = algebra_to_json(h.path.base)
    imgs = {}
    for lab, comps in h.images().items():
        imgs[lab] = [{"dt": kind, "t": j, "vec": dump_vec(v)} for (kind, j), v in sorted(comps.items())]
    d["images"] = imgs
    return d


def homotopy_from_json(d, path="$", source=None, base=None):
    _check_header(d, "opmin.homotopy", path)
    src = source or free_from_json(_field(d, "source", dict, path), f"{path}.source")
    b = base or algebra_from_json(_field(d, "base", dict, path), f"{path}.base", operad=src.operad)
    P = PathAlgebra(b, _field(d, "T", int, path))
    imgs = {}
    for lab, terms in _field(d, "images", dict, path).items():
        if lab not in src.gen:
            raise SchemaError(f"{path}.images", f"unknown generator {lab!r}")
        comps = {}
        for k, t in enumerate(terms):
            pk = f"{path}.images.{lab}[{k}]"
            comps[(_field(t, "dt", int, pk), _field(t, "t", int, pk))] = load_vec(_field(t, "vec", list, pk), pk)
        imgs[lab] = P.element(src.gen[lab].degree, comps)
    return Homotopy(AlgebraMorphism(src, P, imgs), P)


# -- files and workspace -----------------------------------------------------------------

def dumps(d) -> str:
    return json.dumps(d, indent=1, sort_keys=True) + "\n"


def save(d, path):
    Path(path).write_text(dumps(d))


def resolve(path):
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(WORKSPACE_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


def read_json(path):
    p = resolve(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise SchemaError(str(path), f"cannot read file: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None


_LOADERS = {
    "opmin.operad": lambda ws, d, p: operad_from_json(d, p),
    "opmin.tabular_algebra": lambda ws, d, p: ws.algebra(d, p),
    "opmin.free_algebra": lambda ws, d, p: ws.algebra(d, p),
    "opmin.model": lambda ws, d, p: model_from_json(d, p, loader=ws.algebra),
    "opmin.morphism": lambda ws, d, p: morphism_from_json(d, p, loader=ws.algebra),
}


class Workspace:
    """Registry of loaded objects; identical algebra documents load to one object."""

    def __init__(self, config=None):
        self.config = config
        self.objects = {}
        self._algebras = {}
        self.convention = None

    def _note_convention(self, conv, path):
        if self.convention is None:
            self.convention = conv
        elif conv is not self.convention:
            raise SchemaError(path, f"mixes {conv.name.lower()} with {self.convention.name.lower()} inputs")

    def algebra(self, d, path="$", operad=None):
        key = json.dumps(d, sort_keys=True)
        hit = self._algebras.get(key)
        if hit is None:
            hit = algebra_from_json(d, path)
            self._algebras[key] = hit
        return hit

    def load(self, path, name=None):
        d = read_json(path)
        _expect(d, dict, "$")
        kind = d.get("schema")
        if kind not in _LOADERS:
            raise SchemaError("$.schema", f"unknown document kind {kind!r}")
        conv = _check_header(d, kind, "$")
        self._note_convention(conv, "$.convention")
        obj = _LOADERS[kind](self, d, "$")
        self.objects[name or str(path)] = obj
        return obj
