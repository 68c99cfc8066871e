"""Small standard categories and seeded random generators.

The generators feed the property tests and the shipped examples. Every
random object is built so that it is valid by construction (iterated cones
of closed attaching maps) and then validated anyway by the callers.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from .dgcore import AdditiveClosure, DgCategory, DgFunctor, field_category
from .exactlin import Matrix
from .twisted import (
    TwistedComplex, TwMorphism, extend_below, identity, object_complex, tw_diff,
)


# ---------------------------------------------------------------------------
# categories


def a2_category(F, zero: bool = True) -> DgCategory:
    """Indecomposable projectives of the upper-triangular 2×2 algebra.

    Objects P1, P2 with Hom(P2, P1) one-dimensional and Hom(P1, P2) = 0.
    """
    objs = ["P1", "P2"] + (["0"] if zero else [])
    dims = {("P1", "P1"): {0: 1}, ("P2", "P2"): {0: 1}, ("P2", "P1"): {0: 1}}
    comps = {
        ("P1", "P1", "P1", 0, 0): {(0, 0): [(0, 1)]},
        ("P2", "P2", "P2", 0, 0): {(0, 0): [(0, 1)]},
        ("P2", "P2", "P1", 0, 0): {(0, 0): [(0, 1)]},
        ("P2", "P1", "P1", 0, 0): {(0, 0): [(0, 1)]},
    }
    return DgCategory(F, objs, dims, {}, comps, {"P1": [1], "P2": [1]}, zero="0" if zero else None)


def dual_numbers_category(F, zero: bool = True) -> DgCategory:
    """k[x]/(x²) as a one-object category; basis (1, x) of hom^0."""
    objs = ["R"] + (["0"] if zero else [])
    comps = {("R", "R", "R", 0, 0): {(0, 0): [(0, 1)], (0, 1): [(1, 1)], (1, 0): [(1, 1)]}}
    return DgCategory(F, objs, {("R", "R"): {0: 2}}, {}, comps, {"R": [1, 0]}, zero="0" if zero else None)


def acyclic_extension(P: DgCategory, m: int = 1) -> DgCategory:
    """P ⊗ Λ_m for P concentrated in degree 0.

    Λ_m has basis 1, s_1..s_m (degree −1), t_1..t_m (degree 0), ds_i = t_i,
    and all products of the s_i, t_i vanish.  The projection Λ_m → k is a
    quasi-isomorphism, so P ⊗ Λ_m → P is a quasi-equivalence.
    Degree 0 basis: e ⊗ 1, e ⊗ t_1, ..., e ⊗ t_m (blocks of dim P(a,b));
    degree −1 basis: e ⊗ s_1, ..., e ⊗ s_m.
    """
    F = P.field
    if any(n != 0 for a in P.objects for b in P.objects for n in P.degrees(a, b)):
        raise ValueError("acyclic_extension needs a category concentrated in degree 0")
    dims, diffs, comps, units = {}, {}, {}, {}
    for a in P.objects:
        for b in P.objects:
            d = P.dim(a, b, 0)
            if not d:
                continue
            dims[(a, b)] = {0: (m + 1) * d, -1: m * d}
            rows = [[F.zero] * (m * d) for _ in range((m + 1) * d)]
            for i in range(m):
                for e in range(d):
                    rows[(i + 1) * d + e][i * d + e] = F.one
            diffs[(a, b, -1)] = Matrix(F, (m + 1) * d, m * d, rows)
    for a in P.objects:
        u = P.unit(a)
        units[a] = list(u) + [F.zero] * (m * len(u))
        for b in P.objects:
            for c in P.objects:
                df, dg = P.dim(a, b, 0), P.dim(b, c, 0)
                if not (df and dg):
                    continue
                base = P._comp.get((a, b, c, 0, 0), {})
                t00, t0m, tm0 = {}, {}, {}
                # 1·1, λ·1 and 1·μ survive; products of two ideal elements vanish
                for (ig, jf), ent in base.items():
                    ent = list(ent)
                    t00[(ig, jf)] = ent
                    for i in range(m):
                        # (g ⊗ t_i)(f ⊗ 1) and (g ⊗ 1)(f ⊗ t_i)
                        t00[((i + 1) * dg + ig, jf)] = [((i + 1) * P.dim(a, c, 0) + k, x) for k, x in ent]
                        t00[(ig, (i + 1) * df + jf)] = [((i + 1) * P.dim(a, c, 0) + k, x) for k, x in ent]
                        # (g ⊗ s_i)(f ⊗ 1) and (g ⊗ 1)(f ⊗ s_i); f, g have degree 0 so no Koszul sign
                        tm0[(i * dg + ig, jf)] = [(i * P.dim(a, c, 0) + k, x) for k, x in ent]
                        t0m[(ig, i * df + jf)] = [(i * P.dim(a, c, 0) + k, x) for k, x in ent]
                if t00:
                    comps[(a, b, c, 0, 0)] = t00
                if tm0:
                    comps[(a, b, c, 0, -1)] = tm0
                if t0m:
                    comps[(a, b, c, -1, 0)] = t0m
    return DgCategory(F, P.objects, dims, diffs, comps, units, zero=P.zero)


def contractible_extension(F) -> DgCategory:
    """One object E with hom^0 = span(1, t), hom^{-1} = span(s), ds = t."""
    return acyclic_extension(field_category(F, "E"), 1)


def collapse_functor(P: DgCategory, PL: DgCategory, m: int = 1) -> DgFunctor:
    """P ⊗ Λ_m → P killing the s_i and t_i."""
    F = P.field
    maps = {}
    for a in P.objects:
        for b in P.objects:
            d = P.dim(a, b, 0)
            if d:
                rows = [[F.one if c == r else F.zero for c in range((m + 1) * d)] for r in range(d)]
                maps[(a, b, 0)] = Matrix(F, d, (m + 1) * d, rows)
                maps[(a, b, -1)] = Matrix.zeros(F, 0, m * d)
    return DgFunctor(PL, P, {a: a for a in P.objects}, maps)


def section_functor(P: DgCategory, PL: DgCategory, m: int = 1) -> DgFunctor:
    """P → P ⊗ Λ_m, f ↦ f ⊗ 1."""
    F = P.field
    maps = {}
    for a in P.objects:
        for b in P.objects:
            d = P.dim(a, b, 0)
            if d:
                rows = [[F.one if c == r else F.zero for c in range(d)] for r in range((m + 1) * d)]
                maps[(a, b, 0)] = Matrix(F, (m + 1) * d, d, rows)
    return DgFunctor(P, PL, {a: a for a in P.objects}, maps)


# ---------------------------------------------------------------------------
# random data


def rand_scalar(F, rng: random.Random, nonzero: bool = False):
    while True:
        if F.characteristic:
            x = F(rng.randrange(F.characteristic))
        else:
            x = F(rng.randint(-3, 3))
        if x or not nonzero:
            return x


def rand_vector(F, rng: random.Random, n: int, density: float = 0.7) -> tuple:
    return tuple(rand_scalar(F, rng) if rng.random() < density else F.zero for _ in range(n))


def random_element(H, p: int, rng: random.Random, density: float = 0.7) -> TwMorphism:
    """Uniform-ish element of Hom^p in a hom window complex."""
    return H.morphism(p, rand_vector(H.field, rng, H.dim(p), density))


def random_closed(H, p: int, rng: random.Random) -> TwMorphism:
    """Random cocycle of degree p: a random combination of a kernel basis."""
    F = H.field
    basis = H.differential(p).nullspace()
    vec = [F.zero] * H.dim(p)
    for b in basis:
        c = rand_scalar(F, rng)
        vec = [x + c * y for x, y in zip(vec, b)]
    return H.morphism(p, tuple(vec))


def random_object(C: AdditiveClosure, rng: random.Random, objects: Sequence[str], max_parts: int = 2,
                  allow_zero: bool = False) -> tuple:
    lo = 0 if allow_zero else 1
    k = rng.randint(lo, max_parts)
    return tuple(rng.choice(list(objects)) for _ in range(k))


def random_complex(C: AdditiveClosure, rng: random.Random, lo: int, hi: int,
                   objects: Optional[Sequence[str]] = None, max_parts: int = 2) -> TwistedComplex:
    """Iterated extension: start with one term in degree hi and adjoin terms
    below through random closed attaching maps."""
    from .homotopy import HomWindowComplex
    base = C.base
    if objects is None:
        objects = [a for a in base.objects if not base.is_zero_object(a)]
    X = object_complex(C, random_object(C, rng, objects, max_parts), hi)
    for d in range(hi - 1, lo - 1, -1):
        A = random_object(C, rng, objects, max_parts)
        n = -d
        src = object_complex(C, A, 1 - n)
        H = HomWindowComplex(src, X)
        attach = random_closed(H, 0, rng)
        X, _ = extend_below(X, A, n, attach)
    return X


def random_closed_map(X: TwistedComplex, Y: TwistedComplex, rng: random.Random, p: int = 0) -> TwMorphism:
    from .homotopy import HomWindowComplex
    return random_closed(HomWindowComplex(X, Y), p, rng)


def random_diagonal_iso(X: TwistedComplex, rng: random.Random) -> TwMorphism:
    """c·1_X + dh with h strictly above the diagonal, so every diagonal
    component is the invertible scalar c."""
    from .homotopy import HomWindowComplex
    F = X.cat.field
    H = HomWindowComplex(X, X)
    h = random_element(H, -1, rng)
    h = TwMorphism(X, X, -1, {k: v for k, v in h.components.items() if k[1] > k[0]})
    return identity(X).scale(rand_scalar(F, rng, nonzero=True)) + tw_diff(h)


def random_h0_iso(A: TwistedComplex, rng: random.Random, C: Optional[AdditiveClosure] = None,
                  objects: Optional[Sequence[str]] = None):
    """A closed degree-0 map out of A that is an H^0-isomorphism.

    Either a diagonal-invertible self-map or the inclusion of A into
    A ⊕ cone(1_Z) for a random Z.  Returns (u, target).
    """
    from .twisted import tw_cone, tw_sum
    if rng.random() < 0.5 or C is None:
        u = random_diagonal_iso(A, rng)
        return u, A
    Z = random_complex(C, rng, A.lo if not A.is_zero() else 0, A.lo if not A.is_zero() else 0, objects, 1)
    K = tw_cone(identity(Z)).cone
    S = tw_sum([A, K])
    return S.inclusions[0], S.total


def random_witness_tuple(C: AdditiveClosure, rng: random.Random, lo: int = -1, hi: int = 0, objects=None):
    """Data (f, f', u, v, h, u', v', ũ, ṽ, ũ', ṽ') for the cone inverse transfer.

    u'u = 1 − dũ, v'v = 1 + dṽ, uu' = 1 − dũ', vv' = 1 + dṽ', dh = vf − f'u.
    """
    from .homotopy import HomWindowComplex, homotopy_inverse
    A = random_complex(C, rng, lo, hi, objects)
    B = random_complex(C, rng, lo, hi, objects)
    f = random_closed_map(A, B, rng)
    u, A2 = random_h0_iso(A, rng, C, objects)
    v, B2 = random_h0_iso(B, rng, C, objects)
    cu, cv = homotopy_inverse(u), homotopy_inverse(v)
    u_inv, ut, ut_r = cu.g, -cu.h_l, -cu.h_r
    v_inv, vt, vt_r = cv.g, cv.h_l, cv.h_r
    fp = v @ f @ u_inv
    h = v @ f @ ut
    # perturb f' by a boundary and h by a cocycle
    k = random_element(HomWindowComplex(A2, B2), -1, rng)
    fp = fp + tw_diff(k)
    h = h - k @ u + random_closed(HomWindowComplex(A, B2), -1, rng)
    return dict(f=f, fp=fp, u=u, v=v, h=h, u_inv=u_inv, v_inv=v_inv, ut=ut, vt=vt, ut_r=ut_r, vt_r=vt_r)
