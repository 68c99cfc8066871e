"""One-sided twisted complexes and their morphisms.

A twisted complex X over a nonpositive dg-category has objects X^i (finitely
many nonzero) and components x_i^j ∈ hom^{i-j+1}(X^i, X^j) for i < j subject to

    (-1)^j d x_i^j + Σ_k x_k^j ∘ x_i^k = 0.

A degree-p morphism f: X → Y has components f_i^j ∈ hom^{i-j+p}(X^i, Y^j) with

    (df)_i^j = (-1)^j d f_i^j + Σ_k ( y_k^j f_i^k − (-1)^p f_k^j x_i^k ),
    (g∘f)_i^j = Σ_k g_k^j f_i^k.

Cones, sums and weight triangles need strict finite direct sums, i.e. a
complex over an ``AdditiveClosure`` whose objects are tuples.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .dgcore import AdditiveClosure, ValidationReport, _sign
from .errors import ContractError, InternalConsistencyError, StructuralError, UnsupportedInput
from .exactlin import is_zero_vec, vec_add, vec_neg, vec_scale

BOUNDS = ("both", "above", "below", "none")


def _flip_bounds(b):
    return {"above": "below", "below": "above"}.get(b, b)


class TwistedComplex:
    """Finite-support twisted complex.

    Args:
        cat: coefficient category (presentation or additive closure).
        components: ``{i: object}``; zero objects may be omitted.
        twist: ``{(i, j): element of hom^{i-j+1}(X^i, X^j)}`` for i < j.
        bounds: metadata flag.  ``"both"`` (bounded), ``"above"`` (stands
            for an object of Tw⁻), ``"below"`` (Tw⁺), ``"none"`` (Tw).
    """

    def __init__(self, cat, components: dict, twist: Optional[dict] = None, bounds: str = "both"):
        if getattr(cat, "zero", None) is None:
            raise ContractError("twisted complexes need a coefficient category with a formal zero")
        if not getattr(cat, "nonpositive", False):
            raise ContractError("twisted complexes need a strictly nonpositive coefficient category")
        if bounds not in BOUNDS:
            raise ValueError(f"bounds flag must be one of {BOUNDS}")
        self.cat = cat
        self.bounds = bounds
        comps = {}
        for i, A in components.items():
            if isinstance(cat, AdditiveClosure):
                A = tuple(A)
            cat.check_object(A)
            if not cat.is_zero_object(A):
                comps[int(i)] = A
        self.components: Dict[int, object] = dict(sorted(comps.items()))
        if comps:
            self.lo, self.hi = min(comps), max(comps)
        else:
            self.lo, self.hi = 0, -1
        F = cat.field
        tw = {}
        for (i, j), v in (twist or {}).items():
            if not i < j:
                raise StructuralError(f"twist component {(i, j)} must have i < j")
            n = i - j + 1
            need = cat.dim(self.obj(i), self.obj(j), n)
            v = tuple(F(x) for x in v)
            if len(v) != need:
                raise StructuralError(f"twist component {(i, j)} has length {len(v)}, expected {need}")
            if any(v):
                tw[(i, j)] = v
        self.twist: Dict[tuple, tuple] = dict(sorted(tw.items()))
        self._out = defaultdict(list)
        self._in = defaultdict(list)
        for (i, j) in self.twist:
            self._out[i].append(j)
            self._in[j].append(i)

    # access
    def obj(self, i):
        return self.components.get(i, self.cat.zero)

    def x(self, i, j) -> tuple:
        v = self.twist.get((i, j))
        if v is None:
            return self.cat.zero_element(self.obj(i), self.obj(j), i - j + 1)
        return v

    @property
    def support(self):
        return (self.lo, self.hi)

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def is_zero(self) -> bool:
        return not self.components

    def outgoing(self, i) -> list:
        return self._out.get(i, [])

    def incoming(self, j) -> list:
        return self._in.get(j, [])

    @property
    def field(self):
        return self.cat.field

    def __eq__(self, other):
        if not isinstance(other, TwistedComplex):
            return NotImplemented
        return ((self.cat is other.cat or self.cat == other.cat)
                and self.components == other.components and self.twist == other.twist)

    def __hash__(self):
        return hash((tuple(self.components.items()), tuple(self.twist)))

    def __repr__(self):
        parts = ", ".join(f"{i}: {self.components[i]!r}" for i in self.components)
        return f"TwistedComplex({{{parts}}}, {len(self.twist)} twist components)"

    def with_bounds(self, bounds: str) -> "TwistedComplex":
        return TwistedComplex(self.cat, self.components, self.twist, bounds)

    def identity(self) -> "TwMorphism":
        return identity(self)


class TwMorphism:
    """Degree-p morphism of twisted complexes, stored by nonzero components."""

    def __init__(self, source: TwistedComplex, target: TwistedComplex, degree: int, components: dict):
        if not (source.cat is target.cat or source.cat == target.cat):
            raise ContractError("source and target live over different categories")
        self.source = source
        self.target = target
        self.degree = int(degree)
        cat = source.cat
        F = cat.field
        comps = {}
        for (i, j), v in components.items():
            n = i - j + self.degree
            need = cat.dim(source.obj(i), target.obj(j), n)
            v = tuple(F(x) for x in v)
            if len(v) != need:
                raise StructuralError(f"component {(i, j)} has length {len(v)}, expected {need}")
            if any(v):
                comps[(i, j)] = v
        self.components: Dict[tuple, tuple] = dict(sorted(comps.items()))

    @property
    def cat(self):
        return self.source.cat

    def comp(self, i, j) -> tuple:
        v = self.components.get((i, j))
        if v is None:
            return self.cat.zero_element(self.source.obj(i), self.target.obj(j), i - j + self.degree)
        return v

    def is_zero(self) -> bool:
        return not self.components

    def _check_parallel(self, other):
        if self.degree != other.degree or self.source != other.source or self.target != other.target:
            raise ContractError("morphisms are not parallel")

    def __add__(self, other):
        self._check_parallel(other)
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = vec_add(comps[k], v) if k in comps else v
        return TwMorphism(self.source, self.target, self.degree, comps)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TwMorphism(self.source, self.target, self.degree,
                          {k: vec_neg(v) for k, v in self.components.items()})

    def scale(self, c):
        c = self.cat.field(c)
        return TwMorphism(self.source, self.target, self.degree,
                          {k: vec_scale(c, v) for k, v in self.components.items()})

    def __matmul__(self, other: "TwMorphism") -> "TwMorphism":
        return tw_compose(self, other)

    def d(self) -> "TwMorphism":
        return tw_diff(self)

    def __eq__(self, other):
        if not isinstance(other, TwMorphism):
            return NotImplemented
        return (self.degree == other.degree and self.source == other.source
                and self.target == other.target and self.components == other.components)

    def __hash__(self):
        return hash((self.degree, tuple(self.components)))

    def __repr__(self):
        return f"TwMorphism(degree {self.degree}, components {sorted(self.components)})"


# ---------------------------------------------------------------------------
# basic morphisms


def identity(X: TwistedComplex) -> TwMorphism:
    return TwMorphism(X, X, 0, {(i, i): X.cat.unit(A) for i, A in X.components.items()})


def zero_morphism(X: TwistedComplex, Y: TwistedComplex, p: int = 0) -> TwMorphism:
    return TwMorphism(X, Y, p, {})


def object_complex(cat, A, degree: int = 0) -> TwistedComplex:
    """A single object placed in one degree."""
    return TwistedComplex(cat, {degree: A}, {})


embed_object = object_complex


def zero_complex(cat) -> TwistedComplex:
    return TwistedComplex(cat, {}, {})


# ---------------------------------------------------------------------------
# validation, differential, composition


def mc_residual(X: TwistedComplex, i: int, j: int) -> tuple:
    cat = X.cat
    Ai, Aj = X.obj(i), X.obj(j)
    n = i - j + 2
    F = cat.field
    res = list(F.zeros(cat.dim(Ai, Aj, n)))
    if not res:
        return ()
    v = X.twist.get((i, j))
    if v is not None:
        dv = cat.apply_d(Ai, Aj, i - j + 1, v)
        s = _sign(j)
        res = [a + s * b for a, b in zip(res, dv)]
    for k in X.outgoing(i):
        if (k, j) in X.twist:
            t = cat.compose(Ai, X.obj(k), Aj, i - k + 1, k - j + 1, X.twist[(i, k)], X.twist[(k, j)])
            res = [a + b for a, b in zip(res, t)]
    return tuple(res)


def validate_twisted(X: TwistedComplex) -> ValidationReport:
    """Exact MC residual at every (i, j) in the window."""
    rep = ValidationReport()
    cat = X.cat
    if getattr(cat, "zero", None) is None or not cat.nonpositive:
        rep.add("coefficients", (), ())
        return rep
    for i in X.degrees():
        for j in range(i + 1, X.hi + 1):
            r = mc_residual(X, i, j)
            if r and not is_zero_vec(r):
                rep.add("maurer-cartan", (i, j), r)
    return rep


def _acc(out, key, v):
    if key in out:
        out[key] = vec_add(out[key], v)
    else:
        out[key] = v


def tw_diff(f: TwMorphism) -> TwMorphism:
    X, Y, p = f.source, f.target, f.degree
    cat = X.cat
    out = {}
    for (i, j), v in f.components.items():
        n = i - j + p
        Xi, Yj = X.obj(i), Y.obj(j)
        dv = cat.apply_d(Xi, Yj, n, v)
        if dv and any(dv):
            _acc(out, (i, j), dv if j % 2 == 0 else vec_neg(dv))
        for m in Y.outgoing(j):
            t = cat.compose(Xi, Yj, Y.obj(m), n, j - m + 1, v, Y.twist[(j, m)])
            if any(t):
                _acc(out, (i, m), t)
        for l in X.incoming(i):
            t = cat.compose(X.obj(l), Xi, Yj, l - i + 1, n, X.twist[(l, i)], v)
            if any(t):
                _acc(out, (l, j), t if p % 2 else vec_neg(t))
    return TwMorphism(X, Y, p + 1, out)


def tw_compose(g: TwMorphism, f: TwMorphism) -> TwMorphism:
    """g∘f (no sign)."""
    if not (f.target == g.source):
        raise ContractError("target of f is not the source of g")
    X, Y, Z = f.source, f.target, g.target
    p, q = f.degree, g.degree
    cat = X.cat
    by_src = defaultdict(list)
    for (k, j), w in g.components.items():
        by_src[k].append((j, w))
    out = {}
    for (i, k), v in f.components.items():
        for j, w in by_src.get(k, ()):
            t = cat.compose(X.obj(i), Y.obj(k), Z.obj(j), i - k + p, k - j + q, v, w)
            if any(t):
                _acc(out, (i, j), t)
    return TwMorphism(X, Z, p + q, out)


def is_closed(f: TwMorphism) -> bool:
    return tw_diff(f).is_zero()


# ---------------------------------------------------------------------------
# shifts


def tw_shift(X: TwistedComplex, n: int) -> TwistedComplex:
    """X[n]^i = X^{i+n}, x[n]_i^j = (-1)^n x_{i+n}^{j+n}."""
    comps = {i - n: A for i, A in X.components.items()}
    tw = {(i - n, j - n): (v if n % 2 == 0 else vec_neg(v)) for (i, j), v in X.twist.items()}
    return TwistedComplex(X.cat, comps, tw, X.bounds)


def tw_shift_mor(f: TwMorphism, n: int) -> TwMorphism:
    """f[n]_i^j = (-1)^{np} f_{i+n}^{j+n}; commutes with d and composition."""
    s = (n * f.degree) % 2
    comps = {(i - n, j - n): (vec_neg(v) if s else v) for (i, j), v in f.components.items()}
    return TwMorphism(tw_shift(f.source, n), tw_shift(f.target, n), f.degree, comps)


def reindex_mor(f: TwMorphism, n: int, source=None, target=None) -> TwMorphism:
    """Plain reindexing f_{i+n}^{j+n} without sign.

    This is conjugation of f by the shifted identities; it satisfies
    d(reindex(f)) = (-1)^n reindex(df) and is the convention used for the
    upper-left block of morphisms between cones.
    """
    comps = {(i - n, j - n): v for (i, j), v in f.components.items()}
    src = tw_shift(f.source, n) if source is None else source
    tgt = tw_shift(f.target, n) if target is None else target
    return TwMorphism(src, tgt, f.degree, comps)


def shifted_identity(X: TwistedComplex, n: int, m: int) -> TwMorphism:
    """The closed degree-(n−m) map 1_{(X,n,m)}: X[n] → X[m]."""
    src, tgt = tw_shift(X, n), tw_shift(X, m)
    comps = {(i - n, i - m): X.cat.unit(A) for i, A in X.components.items()}
    return TwMorphism(src, tgt, n - m, comps)


def shift_hom_bijection(f: TwMorphism, n: int) -> TwMorphism:
    """Hom(X, Y[n])^p → Hom(X, Y)^{p+n}: g_i^{j+n} = f_i^j (no sign).

    With the usual differential (-1)^n d on Hom(X,Y)[n] this commutes with
    differentials.
    """
    X = f.source
    Y = tw_shift(f.target, -n)
    comps = {(i, j + n): v for (i, j), v in f.components.items()}
    return TwMorphism(X, Y, f.degree + n, comps)


# ---------------------------------------------------------------------------
# sums and cones


def _require_additive(cat):
    if not isinstance(cat, AdditiveClosure):
        raise UnsupportedInput("this construction needs strict finite sums: use an additive closure")


@dataclass
class SumData:
    total: TwistedComplex
    summands: List[TwistedComplex]
    inclusions: List[TwMorphism]
    projections: List[TwMorphism]


def tw_sum(complexes: Sequence[TwistedComplex]) -> SumData:
    """Termwise direct sum with canonical inclusions and projections."""
    complexes = list(complexes)
    if not complexes:
        raise ContractError("tw_sum needs at least one summand")
    cat = complexes[0].cat
    _require_additive(cat)
    lo = min(X.lo for X in complexes if not X.is_zero()) if any(not X.is_zero() for X in complexes) else 0
    hi = max(X.hi for X in complexes if not X.is_zero()) if any(not X.is_zero() for X in complexes) else -1
    parts = {i: [X.obj(i) for X in complexes] for i in range(lo, hi + 1)}
    comps = {i: cat.direct_sum(*ps) for i, ps in parts.items()}
    tw = {}
    for i in range(lo, hi + 1):
        for j in range(i + 1, hi + 1):
            blocks = {(s, s): X.twist[(i, j)] for s, X in enumerate(complexes) if (i, j) in X.twist}
            if blocks:
                tw[(i, j)] = cat.embed(parts[j], parts[i], i - j + 1, blocks)
    bounds = "both" if all(X.bounds == "both" for X in complexes) else complexes[0].bounds
    S = TwistedComplex(cat, comps, tw, bounds)
    incs, projs = [], []
    for s, X in enumerate(complexes):
        incs.append(TwMorphism(X, S, 0, {(i, i): cat.inclusion(parts[i], s) for i in X.components}))
        projs.append(TwMorphism(S, X, 0, {(i, i): cat.projection(parts[i], s) for i in X.components}))
    return SumData(S, complexes, incs, projs)


@dataclass
class Pretriangle:
    """A → B → cone(f) → A[1] with the four structure maps.

    j: B → C, p: C → A[1], i: A[1] → C, s: C → B, all of degree 0;
    ``one`` is the shifted identity 1_{(A,1,0)}: A[1] → A of degree 1.
    """

    f: TwMorphism
    cone: TwistedComplex
    j: TwMorphism
    p: TwMorphism
    i: TwMorphism
    s: TwMorphism
    one: TwMorphism

    def failures(self) -> list:
        """Names of the pretriangle identities that do not hold exactly."""
        f, j, p, i, s, one = self.f, self.j, self.p, self.i, self.s, self.one
        A1 = i.source
        out = []
        checks = [
            ("dj=0", lambda: tw_diff(j).is_zero()),
            ("dp=0", lambda: tw_diff(p).is_zero()),
            ("di=jf1", lambda: tw_diff(i) == j @ f @ one),
            ("ds=-f1p", lambda: tw_diff(s) == -(f @ one @ p)),
            ("pi=1", lambda: p @ i == identity(A1)),
            ("sj=1", lambda: s @ j == identity(f.target)),
            ("pj=0", lambda: (p @ j).is_zero()),
            ("si=0", lambda: (s @ i).is_zero()),
            ("ip+js=1", lambda: i @ p + j @ s == identity(self.cone)),
        ]
        for name, check in checks:
            if not check():
                out.append(name)
        return out

    def holds(self) -> bool:
        return not self.failures()


def cone_parts(f: TwMorphism, i: int):
    """Summand list of cone(f)^i: [X^{i+1}, Y^i]."""
    return [f.source.obj(i + 1), f.target.obj(i)]


def tw_cone(f: TwMorphism, check: bool = True) -> Pretriangle:
    """Mapping cone of a closed degree-0 morphism.

    cone(f)^i = X^{i+1} ⊕ Y^i with twist [[−x_{i+1}^{j+1}, 0], [f_{i+1}^j, y_i^j]].
    """
    if f.degree != 0:
        raise ContractError("cones are taken of degree-0 morphisms")
    X, Y = f.source, f.target
    cat = X.cat
    _require_additive(cat)
    if check:
        df = tw_diff(f)
        if not df.is_zero():
            raise ContractError(f"cone of a non-closed morphism: df has components {sorted(df.components)}")
    degs = set(i - 1 for i in X.components) | set(Y.components)
    if degs:
        lo, hi = min(degs), max(degs)
    else:
        lo, hi = 0, -1
    parts = {i: cone_parts(f, i) for i in range(lo, hi + 1)}
    comps = {i: cat.direct_sum(*ps) for i, ps in parts.items()}
    tw = {}
    for i in range(lo, hi + 1):
        for j in range(i + 1, hi + 1):
            n = i - j + 1
            blocks = {}
            if (i + 1, j + 1) in X.twist:
                blocks[(0, 0)] = vec_neg(X.twist[(i + 1, j + 1)])
            if (i + 1, j) in f.components:
                blocks[(1, 0)] = f.components[(i + 1, j)]
            if (i, j) in Y.twist:
                blocks[(1, 1)] = Y.twist[(i, j)]
            if blocks:
                tw[(i, j)] = cat.embed(parts[j], parts[i], n, blocks)
    bounds = X.bounds if X.bounds == Y.bounds else "none"
    C = TwistedComplex(cat, comps, tw, bounds)
    A1 = tw_shift(X, 1)
    jm = TwMorphism(Y, C, 0, {(i, i): cat.embed(parts[i], [Y.obj(i)], 0, {(1, 0): cat.unit(Y.obj(i))})
                              for i in Y.components})
    sm = TwMorphism(C, Y, 0, {(i, i): cat.embed([Y.obj(i)], parts[i], 0, {(0, 1): cat.unit(Y.obj(i))})
                              for i in Y.components})
    im = TwMorphism(A1, C, 0, {(i, i): cat.embed(parts[i], [A1.obj(i)], 0, {(0, 0): cat.unit(A1.obj(i))})
                               for i in A1.components})
    pm = TwMorphism(C, A1, 0, {(i, i): cat.embed([A1.obj(i)], parts[i], 0, {(0, 0): cat.unit(A1.obj(i))})
                               for i in A1.components})
    return Pretriangle(f, C, jm, pm, im, sm, shifted_identity(X, 1, 0))


def cone_morphism(src: Pretriangle, tgt: Pretriangle, u: TwMorphism, v: TwMorphism,
                  h: TwMorphism) -> TwMorphism:
    """The block morphism [[u[1], 0], [h·1, v]]: cone(f) → cone(f').

    u: A → A', v: B → B' of degree n and h: A → B' of degree n−1.  The
    upper-left block is the plain reindexing of u and the lower-left block
    is h∘1_{(A,1,0)}, i.e. (h·1)_i^j = h_{i+1}^j.
    """
    n = u.degree
    if v.degree != n or h.degree != n - 1:
        raise ContractError("cone_morphism needs deg u = deg v = deg h + 1")
    f, g = src.f, tgt.f
    cat = f.cat
    C, D = src.cone, tgt.cone
    blocks = defaultdict(dict)
    for (a, b), val in u.components.items():
        blocks[(a - 1, b - 1)][(0, 0)] = val
    for (a, b), val in h.components.items():
        blocks[(a - 1, b)][(1, 0)] = val
    for (a, b), val in v.components.items():
        blocks[(a, b)][(1, 1)] = val
    comps = {}
    for (i, j), bl in blocks.items():
        comps[(i, j)] = cat.embed(cone_parts(g, j), cone_parts(f, i), i - j + n, bl)
    return TwMorphism(C, D, n, comps)


def cone_morphism_blocks(w: TwMorphism, src: Pretriangle, tgt: Pretriangle):
    """Inverse of cone_morphism: recover (u, v, h) from a block morphism."""
    f, g = src.f, tgt.f
    cat = f.cat
    n = w.degree
    u, v, h, ur = {}, {}, {}, {}
    for (i, j), val in w.components.items():
        ps, pt = cone_parts(f, i), cone_parts(g, j)
        e = lambda I, J: cat.extract(pt, ps, i - j + n, val, I, J)
        x = e(0, 0)
        if any(x):
            u[(i + 1, j + 1)] = x
        x = e(1, 0)
        if any(x):
            h[(i + 1, j)] = x
        x = e(1, 1)
        if any(x):
            v[(i, j)] = x
        x = e(0, 1)
        if any(x):
            ur[(i, j + 1)] = x
    if ur:
        raise ContractError("morphism has a nonzero upper-right block")
    return (TwMorphism(f.source, g.source, n, u), TwMorphism(f.target, g.target, n, v),
            TwMorphism(f.source, g.target, n - 1, h))


# ---------------------------------------------------------------------------
# brutal truncations


def sigma_geq(X: TwistedComplex, N: int) -> TwistedComplex:
    return TwistedComplex(X.cat, {i: A for i, A in X.components.items() if i >= N},
                          {k: v for k, v in X.twist.items() if k[0] >= N}, X.bounds)


def sigma_leq(X: TwistedComplex, N: int) -> TwistedComplex:
    return TwistedComplex(X.cat, {i: A for i, A in X.components.items() if i <= N},
                          {k: v for k, v in X.twist.items() if k[1] <= N}, X.bounds)


def sigma_window(X: TwistedComplex, n: int, m: int) -> TwistedComplex:
    return sigma_leq(sigma_geq(X, n), m)


def _diag_identity(S: TwistedComplex, T: TwistedComplex, degrees) -> TwMorphism:
    cat = S.cat
    return TwMorphism(S, T, 0, {(i, i): cat.unit(S.obj(i)) for i in degrees})


def j_map(X: TwistedComplex, N: int) -> TwMorphism:
    """j_N: σ≥N X → X."""
    S = sigma_geq(X, N)
    return _diag_identity(S, X, S.components)


def p_map(X: TwistedComplex, N: int) -> TwMorphism:
    """p_N: X → σ≤N X."""
    S = sigma_leq(X, N)
    return _diag_identity(X, S, S.components)


def j_step(X: TwistedComplex, N: int) -> TwMorphism:
    """j_{N,N-1}: σ≥N X → σ≥N-1 X."""
    S, T = sigma_geq(X, N), sigma_geq(X, N - 1)
    return _diag_identity(S, T, S.components)


def p_step(X: TwistedComplex, N: int) -> TwMorphism:
    """p_{N,N-1}: σ≤N X → σ≤N-1 X."""
    S, T = sigma_leq(X, N), sigma_leq(X, N - 1)
    return _diag_identity(S, T, T.components)


def brutal_truncate(X: TwistedComplex, kind: str, bounds):
    """σ-truncation with its canonical maps.

    kind "geq": bounds = N, returns (σ≥N X, {"j": j_N}).
    kind "leq": bounds = N, returns (σ≤N X, {"p": p_N}).
    kind "window": bounds = (n, m), returns (σ≥n σ≤m X, {"p": X → σ≤m X,
    "j": σ≥n σ≤m X → σ≤m X}).
    """
    if kind == "geq":
        return sigma_geq(X, bounds), {"j": j_map(X, bounds)}
    if kind == "leq":
        return sigma_leq(X, bounds), {"p": p_map(X, bounds)}
    if kind == "window":
        n, m = bounds
        L = sigma_leq(X, m)
        return sigma_geq(L, n), {"p": p_map(X, m), "j": j_map(L, n)}
    raise ValueError(f"unknown truncation kind {kind!r}")


def truncate_morphism_leq(f: TwMorphism, m: int) -> TwMorphism:
    """f_{≤m}: σ≤m X → σ≤m Y (for closed degree-0 f)."""
    S, T = sigma_leq(f.source, m), sigma_leq(f.target, m)
    return TwMorphism(S, T, f.degree, {k: v for k, v in f.components.items() if k[0] <= m and k[1] <= m})


def truncate_morphism_geq(f: TwMorphism, n: int) -> TwMorphism:
    S, T = sigma_geq(f.source, n), sigma_geq(f.target, n)
    return TwMorphism(S, T, f.degree, {k: v for k, v in f.components.items() if k[0] >= n and k[1] >= n})


# ---------------------------------------------------------------------------
# weight triangle, connecting homotopy, iterated extensions


@dataclass
class WeightTriangle:
    upper: TwistedComplex       # σ≥n X
    lower: TwistedComplex       # σ≤n-1 X
    xt: TwMorphism              # (σ≤n-1 X)[-1] → σ≥n X
    j: TwMorphism               # j_n
    p: TwMorphism               # p_{n-1}
    pretriangle: Pretriangle    # cone of xt

    def realizes(self, X: TwistedComplex) -> bool:
        return self.pretriangle.cone == X


def weight_triangle(X: TwistedComplex, n: int) -> WeightTriangle:
    upper = sigma_geq(X, n)
    lower = sigma_leq(X, n - 1)
    A = tw_shift(lower, -1)
    comps = {(i + 1, j): v for (i, j), v in X.twist.items() if i <= n - 1 < n <= j}
    xt = TwMorphism(A, upper, 0, comps)
    if not is_closed(xt):
        raise InternalConsistencyError("the attaching map of a weight triangle is not closed")
    pre = tw_cone(xt, check=False) if isinstance(X.cat, AdditiveClosure) else None
    if pre is not None and pre.cone != X:
        raise InternalConsistencyError("cone of the attaching map does not reproduce X")
    return WeightTriangle(upper, lower, xt, j_map(X, n), p_map(X, n - 1), pre)


def connecting_homotopy(f: TwMorphism, n: int) -> TwMorphism:
    """Degree −1 map h: (σ≤n-1 X)[-1] → σ≥n Y with dh = f≥n∘x̃ − ỹ∘f≤n-1[-1].

    h collects the components of f that cross from degrees ≤ n−1 to ≥ n.
    The relation is verified exactly before returning.
    """
    if f.degree != 0 or not is_closed(f):
        raise ContractError("connecting_homotopy needs a closed degree-0 morphism")
    X, Y = f.source, f.target
    wx, wy = weight_triangle(X, n), weight_triangle(Y, n)
    A, B = wx.xt.source, wy.upper
    h = TwMorphism(A, B, -1, {(i + 1, j): v for (i, j), v in f.components.items() if i <= n - 1 < n <= j})
    u = reindex_mor(truncate_morphism_leq(f, n - 1), -1, A, wy.xt.source)
    v = truncate_morphism_geq(f, n)
    if tw_diff(h) != v @ wx.xt - wy.xt @ u:
        raise InternalConsistencyError("connecting homotopy fails dh = v x̃ − ỹ u")
    if wy.j @ v != f @ wx.j or wy.p @ f != truncate_morphism_leq(f, n - 1) @ wx.p:
        raise InternalConsistencyError("truncation squares do not commute")
    return h


def extend_below(X0: TwistedComplex, A, n: int, attach: TwMorphism):
    """Adjoin A in degree −n through a closed attaching map A[n−1] → X0.

    Returns the new complex X and the pretriangle A[n−1] → X0 → X → A[n].
    σ≥−n+1 X equals X0 on the nose.
    """
    if not X0.is_zero() and X0.lo < -n + 1:
        raise ContractError(f"X0 must be concentrated in degrees ≥ {-n + 1}")
    src = object_complex(X0.cat, A, 1 - n)
    if attach.source != src or attach.target != X0 or attach.degree != 0:
        raise ContractError("attach must be a degree-0 map A[n−1] → X0")
    pre = tw_cone(attach)
    X = pre.cone
    if sigma_geq(X, 1 - n) != X0:
        raise InternalConsistencyError("extension does not restrict to X0")
    return X, pre


# ---------------------------------------------------------------------------
# functoriality


class AdditiveExtension:
    """Extension of a dg-functor P → Q to additive closures, blockwise."""

    def __init__(self, u):
        self.u = u
        self.source = AdditiveClosure(u.source) if not isinstance(u.source, AdditiveClosure) else u.source
        tgt = u.target
        self.target = tgt if isinstance(tgt, AdditiveClosure) else AdditiveClosure(tgt)
        self._tuple_target = isinstance(tgt, AdditiveClosure)

    def obj(self, S):
        if self._tuple_target:
            return self.target.direct_sum(*[self.u.obj(a) for a in S])
        return tuple(self.u.obj(a) for a in S)

    def apply(self, S, T, n, v):
        C, D = self.source, self.target
        uS = [self._part(a) for a in S]
        uT = [self._part(b) for b in T]
        blocks = {}
        for (r, c), _ in C.layout(S, T, n)[0].items():
            blocks[(r, c)] = self.u.apply(S[c], T[r], n, C.block(S, T, n, v, r, c))
        return D.embed(uT, uS, n, blocks)

    def _part(self, a):
        o = self.u.obj(a)
        return o if self._tuple_target else (o,)

    def check(self, objects=None):
        self.u.check(objects)


def _functor_for(u, cat):
    if u.source is cat or u.source == cat:
        return u
    if isinstance(cat, AdditiveClosure) and (u.source is cat.base or u.source == cat.base):
        return AdditiveExtension(u)
    raise ContractError("functor source does not match the coefficient category")


def _map_complex(U, X: TwistedComplex, target_cat) -> TwistedComplex:
    comps = {i: U.obj(A) for i, A in X.components.items()}
    tw = {(i, j): U.apply(X.obj(i), X.obj(j), i - j + 1, v) for (i, j), v in X.twist.items()}
    return TwistedComplex(target_cat, comps, tw, X.bounds)


def map_functor(u, Z, check: bool = True):
    """Image of a complex or morphism under Tw(u)."""
    if isinstance(Z, TwMorphism):
        U = _functor_for(u, Z.cat)
        if check:
            U.check()
        S = _map_complex(U, Z.source, U.target)
        T = _map_complex(U, Z.target, U.target)
        p = Z.degree
        comps = {(i, j): U.apply(Z.source.obj(i), Z.target.obj(j), i - j + p, v)
                 for (i, j), v in Z.components.items()}
        return TwMorphism(S, T, p, comps)
    U = _functor_for(u, Z.cat)
    if check:
        U.check()
    return _map_complex(U, Z, U.target)


# ---------------------------------------------------------------------------
# opposites


def _twist_op_sign(i, j) -> bool:
    d = j - i
    return (d * (d + 1) // 2 + 1) % 2 == 1


def _mor_op_sign(i, j, p) -> bool:
    return (p * (p + 1) // 2) % 2 == 1


def opposite_tw(X: TwistedComplex) -> TwistedComplex:
    """X ↦ X^op over the opposite category, X^op^i = X^{-i}.

    x^op_i^j = ε·x_{-j}^{-i} with ε = (−1)^{δ(δ+1)/2+1}, δ = j − i; ordinary
    complexes (δ = 1) acquire no signs.
    """
    cat = X.cat
    op = cat.opposite()
    comps = {-i: A for i, A in X.components.items()}
    tw = {}
    for (a, b), v in X.twist.items():
        i, j = -b, -a
        w = cat.to_opposite(X.obj(a), X.obj(b), a - b + 1, v)
        tw[(i, j)] = vec_neg(w) if _twist_op_sign(i, j) else w
    return TwistedComplex(op, comps, tw, _flip_bounds(X.bounds))


def opposite_mor(f: TwMorphism) -> TwMorphism:
    """f: X → Y of degree p ↦ f^op: Y^op → X^op with sign (−1)^{p(p+1)/2}.

    This makes op a dg-functor Tw(A) → Tw(A^op)^op:
    (g∘f)^op = (−1)^{pq} f^op∘g^op and (df)^op = d(f^op).
    """
    X, Y, p = f.source, f.target, f.degree
    cat = X.cat
    comps = {}
    for (a, b), v in f.components.items():
        i, j = -b, -a
        w = cat.to_opposite(X.obj(a), Y.obj(b), a - b + p, v)
        comps[(i, j)] = vec_neg(w) if _mor_op_sign(i, j, p) else w
    return TwMorphism(opposite_tw(Y), opposite_tw(X), p, comps)


# ---------------------------------------------------------------------------
# towers


@dataclass
class Tower:
    """A finite stretch of a sequence of complexes that is eventually constant.

    direction "inverse": transitions[n]: entries[n+1] → entries[n];
    direction "direct": transitions[n]: entries[n] → entries[n+1].
    The sequence continues past the last entry by identities; when
    ``stabilization_index`` is s, transitions with index ≥ s are identities.
    """

    direction: str
    entries: List[TwistedComplex]
    transitions: List[TwMorphism]
    stabilization_index: Optional[int] = None

    def __post_init__(self):
        if self.direction not in ("inverse", "direct"):
            raise ValueError("direction must be 'inverse' or 'direct'")
        if len(self.transitions) != len(self.entries) - 1:
            raise ContractError("a tower with N entries has N−1 transitions")
        for n, t in enumerate(self.transitions):
            src, tgt = (self.entries[n + 1], self.entries[n]) if self.direction == "inverse" else \
                (self.entries[n], self.entries[n + 1])
            if t.source != src or t.target != tgt or t.degree != 0:
                raise ContractError(f"transition {n} does not connect the neighbouring entries")

    def check_stabilization(self) -> bool:
        s = self.stabilization_index
        if s is None:
            return False
        for n in range(s, len(self.transitions)):
            t = self.transitions[n]
            if not (t.source == t.target and t == identity(t.source)):
                return False
        return s <= len(self.entries) - 1


def truncation_tower_leq(X: TwistedComplex, start: int, stop: int) -> Tower:
    """Inverse tower σ≤k X, k = start..stop, with the projections p_{k+1,k}."""
    entries = [sigma_leq(X, k) for k in range(start, stop + 1)]
    trans = [p_step(X, k + 1) for k in range(start, stop)]
    s = max(X.hi, start) - start if not X.is_zero() else 0
    return Tower("inverse", entries, trans, s if s <= len(entries) - 1 else None)


def truncation_tower_geq(X: TwistedComplex, start: int, stop: int) -> Tower:
    """Direct tower σ≥−k X, k = start..stop, with the inclusions j_{−k,−k−1}."""
    entries = [sigma_geq(X, -k) for k in range(start, stop + 1)]
    trans = [j_step(X, -k) for k in range(start, stop)]
    s = max(-X.lo, start) - start if not X.is_zero() else 0
    return Tower("direct", entries, trans, s if s <= len(entries) - 1 else None)


def opposite_tower(T: Tower) -> Tower:
    """Reverse the direction of a tower by passing to opposite complexes."""
    d = "inverse" if T.direction == "direct" else "direct"
    return Tower(d, [opposite_tw(X) for X in T.entries], [opposite_mor(t) for t in T.transitions],
                 T.stabilization_index)
