"""Presented dg-categories.

A presentation has finitely many objects, a graded hom space with a chosen
basis for every ordered pair, differential matrices ``d^n: hom^n → hom^{n+1}``
and sparse composition tensors.  Elements of hom spaces are plain tuples of
field elements in the chosen basis.

The composition tensor for objects A, B, C and degrees p, q maps
``g ⊗ f`` with ``f ∈ hom^p(A,B)`` and ``g ∈ hom^q(B,C)`` to ``g∘f`` in
``hom^{p+q}(A,C)``.  It is stored as ``{(index of g, index of f): ((k, c), ...)}``.

Throughout, ``compose(a, b, c, p, q, f, g)`` lists objects and degrees along
the path a → b → c and returns ``g∘f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Dict, Iterable, List, Optional

from .errors import ContractError, ShapeError, StructuralError
from .exactlin import Field, LinearSolver, Matrix, cohomology_of_pair, is_zero_vec, vec_add, vec_sub


# ---------------------------------------------------------------------------
# validation reports


@dataclass(frozen=True)
class Violation:
    axiom: str
    location: tuple
    residual: tuple


@dataclass
class ValidationReport:
    violations: List[Violation] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, axiom, location, residual):
        self.violations.append(Violation(axiom, tuple(location), tuple(residual)))

    def axioms(self) -> set:
        return {v.axiom for v in self.violations}

    def locations(self, axiom=None) -> list:
        return [v.location for v in self.violations if axiom is None or v.axiom == axiom]

    def __bool__(self):
        return self.passed


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


# ---------------------------------------------------------------------------
# presentations


class DgCategory:
    """A presented dg-category.

    Args:
        field: coefficient field.
        objects: object ids (strings).
        hom_dims: ``{(A, B): {n: dim}}``; missing entries are zero.
        differentials: ``{(A, B, n): Matrix}`` of shape dim(n+1) × dim(n);
            missing entries are zero maps.
        compositions: ``{(A, B, C, p, q): {(ig, jf): [(k, coeff), ...]}}``.
        units: ``{A: coordinates of 1_A in hom^0(A, A)}``.
        zero: id of the formal zero object, if any.
        nonpositive: declared flag that hom^n = 0 for n > 0.
    """

    def __init__(self, field: Field, objects, hom_dims, differentials=None, compositions=None,
                 units=None, zero: Optional[str] = None, nonpositive: bool = True):
        self.field = field
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise StructuralError("duplicate object ids")
        self.zero = zero
        self.nonpositive = bool(nonpositive)
        if zero is not None and zero not in self.objects:
            raise StructuralError(f"zero object {zero!r} is not an object")
        objs = set(self.objects)
        self._dims: Dict[tuple, Dict[int, int]] = {}
        for (a, b), dims in (hom_dims or {}).items():
            if a not in objs or b not in objs:
                raise StructuralError(f"hom space for unknown pair {(a, b)!r}")
            clean = {int(n): int(d) for n, d in dims.items() if d}
            if any(d < 0 for d in clean.values()):
                raise StructuralError(f"negative dimension for {(a, b)!r}")
            if clean:
                self._dims[(a, b)] = clean
        F = field
        self._diff: Dict[tuple, Matrix] = {}
        for (a, b, n), M in (differentials or {}).items():
            if not isinstance(M, Matrix):
                try:
                    M = Matrix.from_rows(F, M, self.dim(a, b, n))
                except ShapeError as exc:
                    raise StructuralError(f"differential {(a, b, n)!r}: {exc}") from None
            if M.shape != (self.dim(a, b, n + 1), self.dim(a, b, n)):
                raise StructuralError(
                    f"differential {(a, b, n)!r} has shape {M.shape}, expected "
                    f"{(self.dim(a, b, n + 1), self.dim(a, b, n))}")
            if not M.is_zero():
                self._diff[(a, b, n)] = M
        self._comp: Dict[tuple, Dict[tuple, tuple]] = {}
        for key, table in (compositions or {}).items():
            a, b, c, p, q = key
            if not {a, b, c} <= objs:
                raise StructuralError(f"composition tensor for unknown objects {key!r}")
            dg, df, dout = self.dim(b, c, q), self.dim(a, b, p), self.dim(a, c, p + q)
            clean = {}
            for (ig, jf), entries in table.items():
                if not (0 <= ig < dg and 0 <= jf < df):
                    raise StructuralError(f"composition tensor {key!r}: input index {(ig, jf)} out of range")
                row = []
                for k, coeff in entries:
                    if not 0 <= k < dout:
                        raise StructuralError(f"composition tensor {key!r}: output index {k} out of range")
                    coeff = F(coeff)
                    if coeff:
                        row.append((k, coeff))
                if row:
                    clean[(ig, jf)] = tuple(row)
            if clean:
                self._comp[key] = clean
        self._units = {}
        for a in self.objects:
            u = (units or {}).get(a)
            n0 = self.dim(a, a, 0)
            if u is None:
                u = F.zeros(n0)
            u = F.vector(u)
            if len(u) != n0:
                raise StructuralError(f"unit of {a!r} has length {len(u)}, expected {n0}")
            self._units[a] = u
        self._opposite = None

    # -- structure access -----------------------------------------------------
    def check_object(self, a):
        if a not in self.objects:
            raise StructuralError(f"unknown object {a!r}")

    def is_zero_object(self, a) -> bool:
        return a == self.zero

    def dim(self, a, b, n: int) -> int:
        dims = self._dims.get((a, b))
        return dims.get(n, 0) if dims else 0

    def degrees(self, a, b) -> tuple:
        dims = self._dims.get((a, b))
        return tuple(sorted(dims)) if dims else ()

    def hom_dims(self, a, b) -> dict:
        return dict(self._dims.get((a, b), {}))

    def d(self, a, b, n: int) -> Matrix:
        M = self._diff.get((a, b, n))
        if M is None:
            return Matrix.zeros(self.field, self.dim(a, b, n + 1), self.dim(a, b, n))
        return M

    def apply_d(self, a, b, n: int, v) -> tuple:
        M = self._diff.get((a, b, n))
        if M is None:
            return self.field.zeros(self.dim(a, b, n + 1))
        return M.apply(v)

    def compose(self, a, b, c, p: int, q: int, f, g) -> tuple:
        """g∘f for f ∈ hom^p(a,b), g ∈ hom^q(b,c)."""
        F = self.field
        nout = self.dim(a, c, p + q)
        if len(f) != self.dim(a, b, p) or len(g) != self.dim(b, c, q):
            raise StructuralError(f"composition inputs do not fit hom spaces along {a}->{b}->{c}")
        t = self._comp.get((a, b, c, p, q))
        if not t or not nout:
            return F.zeros(nout)
        out = [F.zero] * nout
        fnz = [(j, y) for j, y in enumerate(f) if y]
        for i, x in enumerate(g):
            if not x:
                continue
            for j, y in fnz:
                e = t.get((i, j))
                if e:
                    xy = x * y
                    for k, coeff in e:
                        out[k] = out[k] + xy * coeff
        return tuple(out)

    def unit(self, a) -> tuple:
        return self._units[a]

    def basis(self, a, b, n: int) -> list:
        F = self.field
        d = self.dim(a, b, n)
        return [tuple(F.one if k == i else F.zero for k in range(d)) for i in range(d)]

    def zero_element(self, a, b, n: int) -> tuple:
        return self.field.zeros(self.dim(a, b, n))

    def to_opposite(self, a, b, n, v) -> tuple:
        """Element of hom(a,b) read as an element of hom^op(b,a)."""
        return tuple(v)

    def from_opposite(self, a, b, n, v) -> tuple:
        return tuple(v)

    # raw data, used by serialization and constructions
    def differential_items(self):
        return sorted(self._diff.items(), key=lambda kv: kv[0])

    def composition_items(self):
        return sorted(self._comp.items(), key=lambda kv: kv[0])

    def units(self) -> dict:
        return dict(self._units)

    def pairs(self):
        return list(product(self.objects, repeat=2))

    # -- equality -------------------------------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DgCategory):
            return NotImplemented
        return (self.field == other.field and self.objects == other.objects
                and self.zero == other.zero and self.nonpositive == other.nonpositive
                and self._dims == other._dims and self._diff == other._diff
                and self._comp == other._comp and self._units == other._units)

    def __hash__(self):
        return hash((self.field, self.objects))

    def __repr__(self):
        return f"DgCategory({self.field}, objects={list(self.objects)})"

    def opposite(self) -> "DgCategory":
        if self._opposite is None:
            op = opposite_cat(self)
            op._opposite = self
            self._opposite = op
        return self._opposite


# ---------------------------------------------------------------------------
# validation


def _dims_of(cat, a, b):
    return {n: cat.dim(a, b, n) for n in cat.degrees(a, b)}


def validate_dgcat(P, objects: Optional[Iterable] = None) -> ValidationReport:
    """Check every dg-category axiom on basis elements.

    ``objects`` restricts the check to a finite set of objects, which is
    needed for categories with infinitely many objects (additive closures).
    """
    rep = ValidationReport()
    objs = list(P.objects if objects is None else objects)
    F = P.field

    for a in objs:
        for b in objs:
            degs = P.degrees(a, b)
            if P.nonpositive:
                for n in degs:
                    if n > 0:
                        rep.add("nonpositive", (a, b, n), (F(P.dim(a, b, n)),))
            if (P.is_zero_object(a) or P.is_zero_object(b)) and degs:
                rep.add("zero-object", (a, b), tuple(F(P.dim(a, b, n)) for n in degs))
            for n in degs:
                dd = P.d(a, b, n + 1) @ P.d(a, b, n)
                if not dd.is_zero():
                    for j, col in enumerate(dd.columns()):
                        if not is_zero_vec(col):
                            rep.add("d^2", (a, b, n, j), col)

    for a in objs:
        u = P.unit(a)
        du = P.apply_d(a, a, 0, u)
        if not is_zero_vec(du):
            rep.add("unit-closed", (a,), du)
    for a in objs:
        for b in objs:
            for n in P.degrees(a, b):
                for k, f in enumerate(P.basis(a, b, n)):
                    left = P.compose(a, b, b, n, 0, f, P.unit(b))
                    if left != f:
                        rep.add("unit-left", (a, b, n, k), vec_sub(left, f))
                    right = P.compose(a, a, b, 0, n, P.unit(a), f)
                    if right != f:
                        rep.add("unit-right", (a, b, n, k), vec_sub(right, f))

    for a in objs:
        for b in objs:
            for c in objs:
                for p in P.degrees(a, b):
                    for q in P.degrees(b, c):
                        fb = P.basis(a, b, p)
                        gb = P.basis(b, c, q)
                        for i, g in enumerate(gb):
                            dg = P.apply_d(b, c, q, g)
                            for j, f in enumerate(fb):
                                lhs = P.apply_d(a, c, p + q, P.compose(a, b, c, p, q, f, g))
                                df = P.apply_d(a, b, p, f)
                                t1 = P.compose(a, b, c, p, q + 1, f, dg)
                                t2 = P.compose(a, b, c, p + 1, q, df, g)
                                rhs = vec_add(t1, t2) if q % 2 == 0 else vec_sub(t1, t2)
                                if lhs != rhs:
                                    rep.add("leibniz", (a, b, c, p, q, i, j), vec_sub(lhs, rhs))

    for a in objs:
        for b in objs:
            for c in objs:
                for e in objs:
                    for p in P.degrees(a, b):
                        for q in P.degrees(b, c):
                            for r in P.degrees(c, e):
                                for i, h in enumerate(P.basis(c, e, r)):
                                    for j, g in enumerate(P.basis(b, c, q)):
                                        hg = P.compose(b, c, e, q, r, g, h)
                                        for k, f in enumerate(P.basis(a, b, p)):
                                            l1 = P.compose(a, b, e, p, q + r, f, hg)
                                            gf = P.compose(a, b, c, p, q, f, g)
                                            l2 = P.compose(a, c, e, p + q, r, gf, h)
                                            if l1 != l2:
                                                rep.add("associativity", (a, b, c, e, p, q, r, i, j, k),
                                                        vec_sub(l1, l2))
    return rep


# ---------------------------------------------------------------------------
# dg-functors


class DgFunctor:
    """Functor data: an object map and, per (A, B, n), a matrix
    hom^n_source(A,B) → hom^n_target(uA, uB)."""

    def __init__(self, source, target, objects: dict, maps: dict):
        self.source = source
        self.target = target
        self.objects = dict(objects)
        self.maps = dict(maps)
        self._validated = None

    def obj(self, a):
        return self.objects[a]

    def matrix(self, a, b, n) -> Matrix:
        M = self.maps.get((a, b, n))
        if M is None:
            return Matrix.zeros(self.source.field, self.target.dim(self.obj(a), self.obj(b), n),
                                self.source.dim(a, b, n))
        return M

    def apply(self, a, b, n, v) -> tuple:
        return self.matrix(a, b, n).apply(v)

    def validate(self, objects: Optional[Iterable] = None) -> ValidationReport:
        S, T = self.source, self.target
        rep = ValidationReport()
        objs = list(S.objects if objects is None else objects)
        for a in objs:
            if a not in self.objects:
                rep.add("object-map", (a,), ())
        if not rep.passed:
            return rep
        for a in objs:
            for b in objs:
                ua, ub = self.obj(a), self.obj(b)
                for n in S.degrees(a, b):
                    M = self.matrix(a, b, n)
                    if M.shape != (T.dim(ua, ub, n), S.dim(a, b, n)):
                        rep.add("shape", (a, b, n), ())
                        continue
                    lhs = T.d(ua, ub, n) @ M
                    rhs = self.matrix(a, b, n + 1) @ S.d(a, b, n)
                    if lhs != rhs:
                        for j, col in enumerate((lhs - rhs).columns()):
                            if not is_zero_vec(col):
                                rep.add("chain-map", (a, b, n, j), col)
            uu = self.apply(a, a, 0, S.unit(a))
            if uu != tuple(T.unit(self.obj(a))):
                rep.add("unit", (a,), vec_sub(uu, T.unit(self.obj(a))))
        if not rep.passed:
            return rep
        for a in objs:
            for b in objs:
                for c in objs:
                    ua, ub, uc = self.obj(a), self.obj(b), self.obj(c)
                    for p in S.degrees(a, b):
                        for q in S.degrees(b, c):
                            for i, g in enumerate(S.basis(b, c, q)):
                                ug = self.apply(b, c, q, g)
                                for j, f in enumerate(S.basis(a, b, p)):
                                    lhs = self.apply(a, c, p + q, S.compose(a, b, c, p, q, f, g))
                                    rhs = T.compose(ua, ub, uc, p, q, self.apply(a, b, p, f), ug)
                                    if lhs != rhs:
                                        rep.add("composition", (a, b, c, p, q, i, j), vec_sub(lhs, rhs))
        return rep

    def check(self, objects: Optional[Iterable] = None):
        """Raise ContractError unless the data is a dg-functor."""
        if objects is None and self._validated is not None:
            rep = self._validated
        else:
            rep = self.validate(objects)
            if objects is None:
                self._validated = rep
        if not rep.passed:
            v = rep.violations[0]
            raise ContractError(f"not a dg-functor: {v.axiom} fails at {v.location}")

    def then(self, other: "DgFunctor") -> "DgFunctor":
        """The composite other∘self."""
        maps = {}
        for a in self.source.objects:
            for b in self.source.objects:
                for n in self.source.degrees(a, b):
                    maps[(a, b, n)] = other.matrix(self.obj(a), self.obj(b), n) @ self.matrix(a, b, n)
        objs = {a: other.obj(self.obj(a)) for a in self.source.objects}
        return DgFunctor(self.source, other.target, objs, maps)


def identity_functor(P) -> DgFunctor:
    F = P.field
    maps = {}
    for a in P.objects:
        for b in P.objects:
            for n in P.degrees(a, b):
                maps[(a, b, n)] = Matrix.identity(F, P.dim(a, b, n))
    return DgFunctor(P, P, {a: a for a in P.objects}, maps)


def inclusion_functor(P, C: "AdditiveClosure") -> DgFunctor:
    """P → additive closure, A ↦ (A,), with the formal zero sent to ()."""
    F = P.field
    objs = {a: (() if P.is_zero_object(a) else (a,)) for a in P.objects}
    maps = {}
    for a in P.objects:
        for b in P.objects:
            for n in P.degrees(a, b):
                maps[(a, b, n)] = Matrix.identity(F, P.dim(a, b, n))
    return DgFunctor(P, C, objs, maps)


# ---------------------------------------------------------------------------
# constructions


def field_category(F: Field, name: str = "k", with_zero: bool = True) -> DgCategory:
    """The field as a one-object dg-category (plus a formal zero by default)."""
    objs = [name] + (["0"] if with_zero else [])
    return DgCategory(F, objs, {(name, name): {0: 1}}, {},
                      {(name, name, name, 0, 0): {(0, 0): [(0, 1)]}},
                      {name: [1]}, zero="0" if with_zero else None)


def _fresh_zero_name(objects) -> str:
    name = "0"
    while name in objects:
        name += "'"
    return name


def adjoin_zero(P: DgCategory) -> DgCategory:
    """Add a formal zero object; returns P itself if one is present."""
    if P.zero is not None:
        return P
    z = _fresh_zero_name(P.objects)
    return DgCategory(P.field, P.objects + (z,), {k: P.hom_dims(*k) for k in P.pairs()},
                      dict(P.differential_items()), dict(P.composition_items()), P.units(),
                      zero=z, nonpositive=P.nonpositive)


def truncate_leq0(P: DgCategory):
    """Left truncation τ≤0 of every hom complex.

    Returns ``(T, incl)`` where ``incl: T → P`` is the inclusion dg-functor.
    The new degree-0 basis is the kernel basis of d^0 from row reduction, so
    a presentation that is already nonpositive comes back unchanged.
    """
    F = P.field
    kernels = {}
    dims = {}
    diffs = {}
    incl = {}
    for a, b in P.pairs():
        dd = {}
        for n in P.degrees(a, b):
            if n < 0:
                dd[n] = P.dim(a, b, n)
                incl[(a, b, n)] = Matrix.identity(F, P.dim(a, b, n))
        n0 = P.dim(a, b, 0)
        if n0:
            K = P.d(a, b, 0).nullspace()
            Kmat = Matrix.from_columns(F, K, n0)
            kernels[(a, b)] = (Kmat, LinearSolver(Kmat))
            if K:
                dd[0] = len(K)
            incl[(a, b, 0)] = Kmat
        dims[(a, b)] = dd
    for a, b in P.pairs():
        for n in P.degrees(a, b):
            if n < -1:
                diffs[(a, b, n)] = P.d(a, b, n)
            elif n == -1:
                M = P.d(a, b, -1)
                if (a, b) in kernels and dims[(a, b)].get(0):
                    _, solver = kernels[(a, b)]
                    cols = [solver.solve(c) for c in M.columns()]
                    if any(c is None for c in cols):
                        raise ContractError("d^{-1} does not land in the cycles: input is not a complex")
                    diffs[(a, b, -1)] = Matrix.from_columns(F, cols, dims[(a, b)][0])

    def to_old(a, b, n, v):
        if n < 0:
            return v
        return kernels[(a, b)][0].apply(v)

    def to_new(a, c, n, v):
        if n < 0:
            return v
        if not dims[(a, c)].get(0):
            return ()
        x = kernels[(a, c)][1].solve(v)
        if x is None:
            raise ContractError("a composite of cycles is not a cycle: input is not a dg-category")
        return x

    comps = {}
    for a in P.objects:
        for b in P.objects:
            for c in P.objects:
                for p, dp in dims[(a, b)].items():
                    for q, dq in dims[(b, c)].items():
                        if p + q < 0 or (p + q == 0 and dims[(a, c)].get(0)):
                            table = {}
                            for i in range(dq):
                                g = to_old(b, c, q, tuple(F.one if k == i else F.zero for k in range(dq)))
                                for j in range(dp):
                                    f = to_old(a, b, p, tuple(F.one if k == j else F.zero for k in range(dp)))
                                    r = to_new(a, c, p + q, P.compose(a, b, c, p, q, f, g))
                                    ent = [(k, x) for k, x in enumerate(r) if x]
                                    if ent:
                                        table[(i, j)] = ent
                            if table:
                                comps[(a, b, c, p, q)] = table
    units = {}
    for a in P.objects:
        if dims[(a, a)].get(0):
            units[a] = to_new(a, a, 0, P.unit(a))
    T = DgCategory(F, P.objects, dims, diffs, comps, units, zero=P.zero, nonpositive=True)
    return T, DgFunctor(T, P, {a: a for a in P.objects}, incl)


def opposite_cat(P: DgCategory) -> DgCategory:
    """hom^op(A,B) = hom(B,A), comp^op(g,f) = (−1)^{|f||g|} comp(f,g)."""
    dims = {(b, a): P.hom_dims(a, b) for a, b in P.pairs()}
    diffs = {(b, a, n): M for (a, b, n), M in P.differential_items()}
    comps = {}
    for (c, b, a, q, p), table in P.composition_items():
        # P-composite hom^p(b,a) ∘ hom^q(c,b); in the opposite this is g∘op f
        # with f ∈ hom^op,p(a,b) and g ∈ hom^op,q(b,c)
        s = _sign(p * q)
        comps[(a, b, c, p, q)] = {(jg, if_): [(k, s * x) for k, x in ent]
                                  for (if_, jg), ent in table.items()}
    return DgCategory(P.field, P.objects, dims, diffs, comps, P.units(), zero=P.zero,
                      nonpositive=P.nonpositive)


def hom_cohomology(P, a, b, n: int):
    """H^n of hom(a, b) with representatives (a Cohomology record)."""
    for x in (a, b):
        if hasattr(P, "check_object"):
            P.check_object(x)
    return cohomology_of_pair(P.d(a, b, n - 1), P.d(a, b, n))


# ---------------------------------------------------------------------------
# additive closure


class AdditiveClosure:
    """Closure of a presentation under finite direct sums.

    Objects are tuples of base object ids; the empty tuple is the zero
    object and concatenation is the direct sum.  An element of
    hom^n(S, T) is the row-major concatenation of its blocks
    ``(r, c) ∈ hom^n_base(S[c], T[r])`` over r in T and c in S.
    """

    zero = ()
    nonpositive: bool

    def __init__(self, base: DgCategory):
        self.base = base
        self.field = base.field
        self.nonpositive = base.nonpositive
        self._layouts = {}
        self._opposite = None

    def __repr__(self):
        return f"AdditiveClosure({self.base!r})"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, AdditiveClosure):
            return NotImplemented
        return self.base == other.base

    def __hash__(self):
        return hash(("add", self.base))

    def check_object(self, S):
        if not isinstance(S, tuple):
            raise StructuralError(f"objects of an additive closure are tuples, got {S!r}")
        for a in S:
            self.base.check_object(a)

    def is_zero_object(self, S) -> bool:
        return all(self.base.is_zero_object(a) for a in S)

    @staticmethod
    def direct_sum(*objs) -> tuple:
        out = ()
        for S in objs:
            out += tuple(S)
        return out

    # layouts
    def layout(self, S, T, n):
        key = (S, T, n)
        lay = self._layouts.get(key)
        if lay is None:
            offs = {}
            pos = 0
            B = self.base
            for r, t in enumerate(T):
                for c, s in enumerate(S):
                    d = B.dim(s, t, n)
                    if d:
                        offs[(r, c)] = (pos, d)
                        pos += d
            lay = (offs, pos)
            self._layouts[key] = lay
        return lay

    def dim(self, S, T, n) -> int:
        return self.layout(S, T, n)[1]

    def degrees(self, S, T) -> tuple:
        degs = set()
        for t in T:
            for s in S:
                degs.update(self.base.degrees(s, t))
        return tuple(sorted(degs))

    def block(self, S, T, n, v, r, c) -> tuple:
        offs, _ = self.layout(S, T, n)
        o = offs.get((r, c))
        if o is None:
            return self.field.zeros(self.base.dim(S[c], T[r], n))
        return tuple(v[o[0]:o[0] + o[1]])

    def from_blocks(self, S, T, n, blocks: dict) -> tuple:
        offs, total = self.layout(S, T, n)
        out = [self.field.zero] * total
        for (r, c), v in blocks.items():
            o = offs.get((r, c))
            if o is None:
                if any(v):
                    raise StructuralError(f"block {(r, c)} has no room in degree {n}")
                continue
            if len(v) != o[1]:
                raise StructuralError(f"block {(r, c)} has length {len(v)}, expected {o[1]}")
            out[o[0]:o[0] + o[1]] = v
        return tuple(out)

    def d(self, S, T, n) -> Matrix:
        offs_in, din = self.layout(S, T, n)
        offs_out, dout = self.layout(S, T, n + 1)
        F = self.field
        rows = [[F.zero] * din for _ in range(dout)]
        for (r, c), (o_in, sz_in) in offs_in.items():
            oo = offs_out.get((r, c))
            if oo is None:
                continue
            M = self.base.d(S[c], T[r], n)
            for i in range(oo[1]):
                for j in range(sz_in):
                    rows[oo[0] + i][o_in + j] = M.rows[i][j]
        return Matrix(F, dout, din, rows)

    def apply_d(self, S, T, n, v) -> tuple:
        offs_in, _ = self.layout(S, T, n)
        offs_out, dout = self.layout(S, T, n + 1)
        out = [self.field.zero] * dout
        B = self.base
        for (r, c), (o, sz) in offs_in.items():
            oo = offs_out.get((r, c))
            if oo is None:
                continue
            piece = v[o:o + sz]
            if any(piece):
                out[oo[0]:oo[0] + oo[1]] = B.apply_d(S[c], T[r], n, piece)
        return tuple(out)

    def compose(self, S, M, T, p, q, f, g) -> tuple:
        B = self.base
        F = self.field
        offs_f, nf = self.layout(S, M, p)
        offs_g, ng = self.layout(M, T, q)
        offs_o, nout = self.layout(S, T, p + q)
        if len(f) != nf or len(g) != ng:
            raise StructuralError("composition inputs do not fit the block layout")
        out = [F.zero] * nout
        if not nout:
            return ()
        fblocks = {}
        for (m, c), (o, sz) in offs_f.items():
            piece = f[o:o + sz]
            if any(piece):
                fblocks.setdefault(m, []).append((c, piece))
        if not fblocks:
            return tuple(out)
        for (r, m), (o, sz) in offs_g.items():
            if m not in fblocks:
                continue
            gpiece = g[o:o + sz]
            if not any(gpiece):
                continue
            for c, fpiece in fblocks[m]:
                oo = offs_o.get((r, c))
                if oo is None:
                    continue
                res = B.compose(S[c], M[m], T[r], p, q, fpiece, gpiece)
                start = oo[0]
                for k, x in enumerate(res):
                    if x:
                        out[start + k] = out[start + k] + x
        return tuple(out)

    def unit(self, S) -> tuple:
        return self.from_blocks(S, S, 0, {(r, r): self.base.unit(a) for r, a in enumerate(S)})

    def basis(self, S, T, n) -> list:
        F = self.field
        d = self.dim(S, T, n)
        return [tuple(F.one if k == i else F.zero for k in range(d)) for i in range(d)]

    def zero_element(self, S, T, n) -> tuple:
        return self.field.zeros(self.dim(S, T, n))

    # biproduct structure on concatenations
    def embed(self, tgt_parts, src_parts, n, blocks: dict) -> tuple:
        """Assemble an element of hom^n(concat(src_parts), concat(tgt_parts))
        from elements ``blocks[(I, J)] ∈ hom^n(src_parts[J], tgt_parts[I])``."""
        S = self.direct_sum(*src_parts)
        T = self.direct_sum(*tgt_parts)
        roff = _offsets(tgt_parts)
        coff = _offsets(src_parts)
        inner = {}
        for (I, J), v in blocks.items():
            if not any(v):
                continue
            Si, Ti = src_parts[J], tgt_parts[I]
            for (r, c), _ in self.layout(Si, Ti, n)[0].items():
                inner[(roff[I] + r, coff[J] + c)] = self.block(Si, Ti, n, v, r, c)
        return self.from_blocks(S, T, n, inner)

    def extract(self, tgt_parts, src_parts, n, v, I, J) -> tuple:
        S = self.direct_sum(*src_parts)
        T = self.direct_sum(*tgt_parts)
        roff = _offsets(tgt_parts)
        coff = _offsets(src_parts)
        Si, Ti = src_parts[J], tgt_parts[I]
        blocks = {}
        for (r, c), _ in self.layout(Si, Ti, n)[0].items():
            blocks[(r, c)] = self.block(S, T, n, v, roff[I] + r, coff[J] + c)
        return self.from_blocks(Si, Ti, n, blocks)

    def inclusion(self, parts, k) -> tuple:
        """Canonical ι_k: parts[k] → concat(parts), degree 0."""
        return self.embed(parts, [parts[k]], 0, {(k, 0): self.unit(parts[k])})

    def projection(self, parts, k) -> tuple:
        return self.embed([parts[k]], parts, 0, {(0, k): self.unit(parts[k])})

    # opposites
    def opposite(self) -> "AdditiveClosure":
        if self._opposite is None:
            op = AdditiveClosure(self.base.opposite())
            op._opposite = self
            self._opposite = op
        return self._opposite

    def to_opposite(self, S, T, n, v) -> tuple:
        """Element of hom(S,T) read in hom_{op}(T,S): block (r,c) becomes (c,r)."""
        op = self.opposite()
        blocks = {}
        for (r, c), _ in self.layout(S, T, n)[0].items():
            blocks[(c, r)] = self.block(S, T, n, v, r, c)
        return op.from_blocks(T, S, n, blocks)

    def from_opposite(self, S, T, n, v) -> tuple:
        """Inverse of to_opposite: v ∈ hom_{op}(T,S) back to hom(S,T)."""
        return self.opposite().to_opposite(T, S, n, v)


def _offsets(parts):
    offs = []
    pos = 0
    for p in parts:
        offs.append(pos)
        pos += len(p)
    return offs


def additive_closure(P: DgCategory) -> AdditiveClosure:
    return AdditiveClosure(P)


def object_name(S) -> str:
    if isinstance(S, tuple):
        return "(" + ",".join(S) + ")"
    return str(S)


def full_subcategory(cat, objects, zero=None) -> DgCategory:
    """Materialize a full subcategory on finitely many objects as a presentation.

    Object ids are rendered with ``object_name``; for additive closures the
    empty tuple becomes the formal zero.
    """
    objects = list(objects)
    names = [object_name(S) for S in objects]
    F = cat.field
    dims, diffs, comps, units = {}, {}, {}, {}
    z = None
    for S, s in zip(objects, names):
        if cat.is_zero_object(S) and z is None:
            z = s
    for S, s in zip(objects, names):
        for T, t in zip(objects, names):
            dd = {n: cat.dim(S, T, n) for n in cat.degrees(S, T) if cat.dim(S, T, n)}
            dims[(s, t)] = dd
            for n in dd:
                M = cat.d(S, T, n)
                if not M.is_zero():
                    diffs[(s, t, n)] = M
    for (A, a) in zip(objects, names):
        units[a] = cat.unit(A)
        for (B, b) in zip(objects, names):
            for (C, c) in zip(objects, names):
                for p in dims[(a, b)]:
                    for q in dims[(b, c)]:
                        table = {}
                        for i, g in enumerate(cat.basis(B, C, q)):
                            for j, f in enumerate(cat.basis(A, B, p)):
                                r = cat.compose(A, B, C, p, q, f, g)
                                ent = [(k, x) for k, x in enumerate(r) if x]
                                if ent:
                                    table[(i, j)] = ent
                        if table:
                            comps[(a, b, c, p, q)] = table
    if zero is not None:
        z = zero
    return DgCategory(F, names, dims, diffs, comps, units, zero=z, nonpositive=cat.nonpositive)
