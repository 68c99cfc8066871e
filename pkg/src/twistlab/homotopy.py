"""Homotopy-category computations on twisted complexes.

Every question here becomes one linear system over a finite window of a hom
complex: closedness, nullhomotopies, inverses up to homotopy, lifts along
quasi-fully-faithful functors, and comparisons of (homotopy) limits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

from .dgcore import AdditiveClosure, _sign
from .errors import ContractError, InternalConsistencyError, UnsupportedInput
from .exactlin import ChainComplex, ChainMap, LinearSolver, Matrix, is_zero_vec, vec_sub
from .twisted import (
    Pretriangle, Tower, TwistedComplex, TwMorphism, _functor_for, cone_morphism, identity, is_closed,
    map_functor, opposite_mor, opposite_tw, opposite_tower, reindex_mor, tw_cone, tw_diff, tw_shift,
    tw_shift_mor, tw_sum, truncate_morphism_geq, truncate_morphism_leq, weight_triangle,
    connecting_homotopy, zero_complex, sigma_geq, j_map, j_step,
)


# ---------------------------------------------------------------------------
# hom complexes


class HomWindowComplex:
    """Hom(X, Y) as a finite cochain complex of vector spaces.

    Degree p is spanned by the component spaces hom^{i-j+p}(X^i, Y^j),
    ordered by (i, j) and then by the coefficient basis.
    """

    def __init__(self, X: TwistedComplex, Y: TwistedComplex):
        if not (X.cat is Y.cat or X.cat == Y.cat):
            raise ContractError("complexes live over different categories")
        self.source, self.target = X, Y
        self.cat = X.cat
        self.field = X.cat.field
        blocks: Dict[int, list] = {}
        cat = self.cat
        for i, A in X.components.items():
            for j, B in Y.components.items():
                for n in cat.degrees(A, B):
                    p = n - i + j
                    blocks.setdefault(p, []).append((i, j, n, cat.dim(A, B, n)))
        self._layout = {}
        for p, bl in blocks.items():
            bl.sort()
            offs = {}
            pos = 0
            for i, j, n, d in bl:
                if d:
                    offs[(i, j)] = (pos, d)
                    pos += d
            self._layout[p] = (offs, pos)
        self._diff = {}

    def degrees(self) -> list:
        return sorted(p for p, (_, d) in self._layout.items() if d)

    def dim(self, p: int) -> int:
        lay = self._layout.get(p)
        return lay[1] if lay else 0

    def vector(self, f: TwMorphism) -> tuple:
        p = f.degree
        offs, total = self._layout.get(p, ({}, 0))
        out = [self.field.zero] * total
        for key, v in f.components.items():
            o = offs.get(key)
            if o is None:
                raise ContractError(f"component {key} is outside the hom window")
            out[o[0]:o[0] + o[1]] = v
        return tuple(out)

    def morphism(self, p: int, vec) -> TwMorphism:
        offs, total = self._layout.get(p, ({}, 0))
        if len(vec) != total:
            raise ContractError(f"vector of length {len(vec)} for Hom^{p} of dimension {total}")
        comps = {key: tuple(vec[o:o + d]) for key, (o, d) in offs.items()}
        return TwMorphism(self.source, self.target, p, comps)

    def basis(self, p: int) -> list:
        F = self.field
        d = self.dim(p)
        return [self.morphism(p, tuple(F.one if k == e else F.zero for k in range(d))) for e in range(d)]

    def differential(self, p: int) -> Matrix:
        """Matrix of d: Hom^p → Hom^{p+1}."""
        M = self._diff.get(p)
        if M is None:
            cols = [self.vector(tw_diff(b)) for b in self.basis(p)]
            M = Matrix.from_columns(self.field, cols, self.dim(p + 1))
            self._diff[p] = M
        return M

    def chain_complex(self, lo=None, hi=None) -> ChainComplex:
        degs = self.degrees()
        if not degs:
            return ChainComplex(self.field, {}, {})
        lo = degs[0] if lo is None else lo
        hi = degs[-1] if hi is None else hi
        dims = {p: self.dim(p) for p in range(lo, hi + 1)}
        diffs = {p: self.differential(p) for p in range(lo, hi)}
        return ChainComplex(self.field, dims, diffs, check=False)

    def cohomology(self, p: int):
        from .exactlin import cohomology_of_pair
        return cohomology_of_pair(self.differential(p - 1), self.differential(p))

    def cycles(self, p: int) -> list:
        return [self.morphism(p, v) for v in self.differential(p).nullspace()]

    def postcompose_matrix(self, g: TwMorphism, p: int, other: "HomWindowComplex") -> Matrix:
        """Matrix of f ↦ g∘f from Hom^p(X,Y) to ``other`` = Hom(X, Z)."""
        cols = [other.vector(g @ b) for b in self.basis(p)]
        return Matrix.from_columns(self.field, cols, other.dim(p + g.degree))

    def precompose_matrix(self, f: TwMorphism, p: int, other: "HomWindowComplex") -> Matrix:
        """Matrix of g ↦ g∘f from Hom^p(Y,Z) to ``other`` = Hom(X, Z)."""
        cols = [other.vector(b @ f) for b in self.basis(p)]
        return Matrix.from_columns(self.field, cols, other.dim(p + f.degree))


def _block_matrix(F, rows: List[List[Optional[Matrix]]], row_dims, col_dims) -> Matrix:
    out = []
    for r, rd in enumerate(row_dims):
        for k in range(rd):
            line = []
            for c, cd in enumerate(col_dims):
                M = rows[r][c]
                if M is None:
                    line.extend([F.zero] * cd)
                else:
                    line.extend(M.rows[k])
            out.append(line)
    return Matrix(F, sum(row_dims), sum(col_dims), out)


# ---------------------------------------------------------------------------
# closedness and nullhomotopies


def nullhomotopy(f: TwMorphism) -> Optional[TwMorphism]:
    """Some h with dh = f, or None when f is not a boundary."""
    H = HomWindowComplex(f.source, f.target)
    p = f.degree
    target = H.vector(f)
    D = H.differential(p - 1)
    sol = LinearSolver(D).solve(target)
    if sol is None:
        return None
    h = H.morphism(p - 1, sol)
    if tw_diff(h) != f:
        raise InternalConsistencyError("nullhomotopy solve returned a wrong witness")
    return h


def is_nullhomotopic(f: TwMorphism) -> bool:
    return nullhomotopy(f) is not None


def is_contractible(X: TwistedComplex) -> bool:
    return is_nullhomotopic(identity(X))


# ---------------------------------------------------------------------------
# isomorphisms in H^0


@dataclass
class IsoCertificate:
    """g∘f = 1 + d h_l and f∘g = 1 + d h_r, with g closed of degree 0."""

    f: TwMorphism
    g: TwMorphism
    h_l: TwMorphism
    h_r: TwMorphism
    method: str = "solve"

    def failures(self) -> list:
        out = []
        f, g = self.f, self.g
        if g.degree != 0 or not is_closed(g):
            out.append("g closed of degree 0")
        if g @ f != identity(f.source) + tw_diff(self.h_l):
            out.append("g∘f = 1 + d h_l")
        if f @ g != identity(f.target) + tw_diff(self.h_r):
            out.append("f∘g = 1 + d h_r")
        return out

    def holds(self) -> bool:
        return not self.failures()


def homotopy_inverse(f: TwMorphism) -> Optional[IsoCertificate]:
    """Solve jointly for g, h_l, h_r; None when f is not an H^0-isomorphism."""
    if f.degree != 0:
        raise ContractError("homotopy_inverse needs a degree-0 morphism")
    X, Y = f.source, f.target
    F = X.cat.field
    YX = HomWindowComplex(Y, X)
    XX = HomWindowComplex(X, X)
    YY = HomWindowComplex(Y, Y)
    g0, hl0, hr0 = YX.dim(0), XX.dim(-1), YY.dim(-1)
    r1, r2, r3 = YX.dim(1), XX.dim(0), YY.dim(0)
    pre = YX.precompose_matrix(f, 0, XX)
    post = YX.postcompose_matrix(f, 0, YY)
    M = _block_matrix(F, [
        [YX.differential(0), None, None],
        [pre, -XX.differential(-1), None],
        [post, None, -YY.differential(-1)],
    ], [r1, r2, r3], [g0, hl0, hr0])
    rhs = F.zeros(r1) + XX.vector(identity(X)) + YY.vector(identity(Y))
    sol = LinearSolver(M).solve(rhs)
    if sol is None:
        return None
    g = YX.morphism(0, sol[:g0])
    hl = XX.morphism(-1, sol[g0:g0 + hl0])
    hr = YY.morphism(-1, sol[g0 + hl0:])
    cert = IsoCertificate(f, g, hl, hr, "solve")
    if not cert.holds():
        raise InternalConsistencyError("homotopy inverse solve returned a wrong certificate")
    return cert


def two_sided_from_one_sided(w, wl, wr, Hl, Hr) -> IsoCertificate:
    """From wl∘w = 1 + dHl and w∘wr = 1 + dHr build a two-sided certificate
    with inverse wl: f∘wl = 1 + d(Hr + w∘(Hl∘wr − wl∘Hr))."""
    hr = Hr + w @ (Hl @ wr - wl @ Hr)
    return IsoCertificate(w, wl, Hl, hr, "induction")


@dataclass
class ConeTransfer:
    """Output of cone_iso_transfer.

    ``w``: cone(f) → cone(f'); ``w_left``, ``w_right``: cone(f') → cone(f)
    with w_left∘w = 1 + d(h_left) and w∘w_right = 1 + d(h_right).
    """

    w: TwMorphism
    w_left: TwMorphism
    w_right: TwMorphism
    h_left: TwMorphism
    h_right: TwMorphism
    h0: TwMorphism
    r: TwMorphism
    r_prime: TwMorphism

    def failures(self) -> list:
        out = []
        for name, m in (("w", self.w), ("w_left", self.w_left), ("w_right", self.w_right)):
            if not is_closed(m):
                out.append(f"{name} closed")
        if self.w_left @ self.w != identity(self.w.source) + tw_diff(self.h_left):
            out.append("w_left∘w = 1 + d h_left")
        if self.w @ self.w_right != identity(self.w.target) + tw_diff(self.h_right):
            out.append("w∘w_right = 1 + d h_right")
        return out

    def certificate(self) -> IsoCertificate:
        return two_sided_from_one_sided(self.w, self.w_left, self.w_right, self.h_left, self.h_right)


def cone_iso_transfer(src: Pretriangle, tgt: Pretriangle, u: TwMorphism, v: TwMorphism, h: TwMorphism,
                      u_inv: TwMorphism, v_inv: TwMorphism, ut: TwMorphism, vt: TwMorphism,
                      ut_r: TwMorphism, vt_r: TwMorphism) -> ConeTransfer:
    """Invert w = [[u[1],0],[h·1,v]]: cone(f) → cone(f') up to homotopy.

    Witness conventions: u'u = 1 − dũ, v'v = 1 + dṽ, uu' = 1 − dũ',
    vv' = 1 + dṽ', and dh = v f − f' u.  With h₀ := −v'hu' + v'f'ũ' + ṽfu'
    (so dh₀ = v'f' − fu'), r := fũ + ṽf − h₀u − v'h and
    r' := f'ũ' + ṽ'f' − hu' − vh₀, the maps
    w_l = [[u'[1],0],[(h₀ + r u')·1, v']] and w_r = [[u'[1],0],[(h₀ + v'r')·1, v']]
    satisfy w_l∘w = 1 + d[[ũ[1],0],[(rũ)·1, ṽ]] and
    w∘w_r = 1 + d[[ũ'[1],0],[(ṽ'r')·1, ṽ']].
    """
    f, fp = src.f, tgt.f
    A, B, A2, B2 = f.source, f.target, fp.source, fp.target
    checks = [
        ("u closed of degree 0", lambda: u.degree == 0 and is_closed(u)),
        ("v closed of degree 0", lambda: v.degree == 0 and is_closed(v)),
        ("u' closed of degree 0", lambda: u_inv.degree == 0 and is_closed(u_inv)),
        ("v' closed of degree 0", lambda: v_inv.degree == 0 and is_closed(v_inv)),
        ("dh = vf − f'u", lambda: tw_diff(h) == v @ f - fp @ u),
        ("u'u = 1 − dũ", lambda: u_inv @ u == identity(A) - tw_diff(ut)),
        ("v'v = 1 + dṽ", lambda: v_inv @ v == identity(B) + tw_diff(vt)),
        ("uu' = 1 − dũ'", lambda: u @ u_inv == identity(A2) - tw_diff(ut_r)),
        ("vv' = 1 + dṽ'", lambda: v @ v_inv == identity(B2) + tw_diff(vt_r)),
    ]
    for name, check in checks:
        if not check():
            raise ContractError(f"witness equation fails: {name}")
    h0 = -(v_inv @ h @ u_inv) + v_inv @ fp @ ut_r + vt @ f @ u_inv
    if tw_diff(h0) != v_inv @ fp - f @ u_inv:
        raise InternalConsistencyError("dh₀ = v'f' − fu' fails")
    r = f @ ut + vt @ f - h0 @ u - v_inv @ h
    rp = fp @ ut_r + vt_r @ fp - h @ u_inv - v @ h0
    w = cone_morphism(src, tgt, u, v, h)
    wl = cone_morphism(tgt, src, u_inv, v_inv, h0 + r @ u_inv)
    wr = cone_morphism(tgt, src, u_inv, v_inv, h0 + v_inv @ rp)
    Hl = cone_morphism(src, src, ut, vt, r @ ut)
    Hr = cone_morphism(tgt, tgt, ut_r, vt_r, vt_r @ rp)
    out = ConeTransfer(w, wl, wr, Hl, Hr, h0, r, rp)
    bad = out.failures()
    if bad:
        raise InternalConsistencyError(f"cone transfer identities fail: {bad}")
    return out


def strict_cone_inverse(src: Pretriangle, tgt: Pretriangle, u, v, h, u_inv, v_inv) -> TwMorphism:
    """For strict inverses u', v' the strict inverse of w uses h' = −v'hu'."""
    hp = -(v_inv @ h @ u_inv)
    return cone_morphism(tgt, src, u_inv, v_inv, hp)


def _diagonal_certificate(f: TwMorphism, i: int) -> Optional[IsoCertificate]:
    X1 = TwistedComplex(f.cat, {i: f.source.obj(i)})
    Y1 = TwistedComplex(f.cat, {i: f.target.obj(i)})
    fi = TwMorphism(X1, Y1, 0, {(i, i): f.comp(i, i)})
    return homotopy_inverse(fi)


def diagonal_h0_invertible(f: TwMorphism) -> bool:
    lo = min(f.source.lo, f.target.lo)
    hi = max(f.source.hi, f.target.hi)
    return all(_diagonal_certificate(f, i) is not None for i in range(lo, hi + 1))


def iso_certificate_by_induction(f: TwMorphism) -> Optional[IsoCertificate]:
    """Build an inverse of f window by window when every f_i^i is an H^0-iso.

    The window [m, hi] is split as the cone of (degree m part)[−1] → σ≥m+1,
    the inverse on σ≥m+1 comes from the previous step, the inverse on the
    single degree m from a direct solve, and cone_iso_transfer glues them.
    Returns None if some diagonal component is not an H^0-isomorphism.
    """
    if not isinstance(f.cat, AdditiveClosure):
        raise UnsupportedInput("the inductive certificate needs strict finite sums")
    X, Y = f.source, f.target
    if X.is_zero() and Y.is_zero():
        return IsoCertificate(f, TwMorphism(Y, X, 0, {}), TwMorphism(X, X, -1, {}), TwMorphism(Y, Y, -1, {}),
                              "induction")
    lo = min(d for d, Z in ((X.lo, X), (Y.lo, Y)) if not Z.is_zero())
    hi = max(d for d, Z in ((X.hi, X), (Y.hi, Y)) if not Z.is_zero())
    diag = {}
    for i in range(lo, hi + 1):
        c = _diagonal_certificate(f, i)
        if c is None:
            return None
        diag[i] = c
    cert = diag[hi]
    # the single-degree complexes of the top step coincide with σ≥hi
    cur = truncate_morphism_geq(f, hi)
    cert = IsoCertificate(cur, _retarget(cert.g, cur.target, cur.source),
                          _retarget(cert.h_l, cur.source, cur.source),
                          _retarget(cert.h_r, cur.target, cur.target), "induction")
    for m in range(hi - 1, lo - 1, -1):
        fm = truncate_morphism_geq(f, m)
        wx = weight_triangle(fm.source, m + 1)
        wy = weight_triangle(fm.target, m + 1)
        src, tgt = wx.pretriangle, wy.pretriangle
        u = reindex_mor(truncate_morphism_leq(fm, m), -1, wx.xt.source, wy.xt.source)
        v = cert.f
        h = connecting_homotopy(fm, m + 1)
        d = diag[m]
        g0 = _retarget(d.g, wy.lower, wx.lower)
        hl0 = _retarget(d.h_l, wx.lower, wx.lower)
        hr0 = _retarget(d.h_r, wy.lower, wy.lower)
        u_inv = tw_shift_mor(g0, -1)
        ut = -tw_shift_mor(hl0, -1)
        ut_r = -tw_shift_mor(hr0, -1)
        tr = cone_iso_transfer(src, tgt, u, v, h, u_inv, cert.g, ut, cert.h_l, ut_r, cert.h_r)
        if tr.w != fm:
            raise InternalConsistencyError("glued morphism differs from the truncated input")
        cert = tr.certificate()
        if not cert.holds():
            raise InternalConsistencyError(f"inductive certificate fails at window start {m}")
    cert.method = "induction"
    return cert


def _retarget(m: TwMorphism, source: TwistedComplex, target: TwistedComplex) -> TwMorphism:
    return TwMorphism(source, target, m.degree, m.components)


@dataclass
class IsoDecision:
    iso: bool
    certificate: Optional[IsoCertificate]
    cone_contraction: Optional[TwMorphism]
    diagonal_invertible: bool


def h0_iso_decide(f: TwMorphism, certify: bool = True) -> IsoDecision:
    """f is an isomorphism in H^0 iff the identity of cone(f) is nullhomotopic."""
    if f.degree != 0:
        raise ContractError("h0_iso_decide needs a degree-0 morphism")
    df = tw_diff(f)
    if not df.is_zero():
        raise ContractError(f"morphism is not closed: df has components {sorted(df.components)}")
    pre = tw_cone(f)
    H = nullhomotopy(identity(pre.cone))
    iso = H is not None
    cert = None
    diag_ok = False
    if iso and certify:
        cert = iso_certificate_by_induction(f)
        diag_ok = cert is not None
        if cert is None:
            cert = homotopy_inverse(f)
            if cert is None:
                raise InternalConsistencyError("cone is contractible but no homotopy inverse was found")
    return IsoDecision(iso, cert, H, diag_ok)


# ---------------------------------------------------------------------------
# quasi-isomorphisms and quasi-fully-faithful functors


def quasiiso_lift(f: ChainMap, p: int, y, x_prime):
    """Given dy = f(x') with y ∈ W^p, x' ∈ V^{p+1}, find x ∈ V^p and z ∈ W^{p−1}
    with dx = x' and y − dz = f(x)."""
    V, W = f.source, f.target
    F = V.field
    y = tuple(F(a) for a in y)
    x_prime = tuple(F(a) for a in x_prime)
    if W.d(p).apply(y) != f.at(p + 1).apply(x_prime):
        raise ContractError("input does not satisfy dy = f(x')")
    if not is_zero_vec(V.d(p + 1).apply(x_prime)):
        raise ContractError("x' is not a cocycle")
    x0 = LinearSolver(V.d(p)).solve(x_prime)
    if x0 is None:
        raise ContractError(f"x' is not a coboundary: f is not injective on H^{p + 1}")
    rest = vec_sub(y, f.at(p).apply(x0))
    nV, nW = V.dim(p), W.dim(p - 1)
    M = _block_matrix(F, [[V.d(p), None], [f.at(p), W.d(p - 1)]], [V.dim(p + 1), W.dim(p)], [nV, nW])
    sol = LinearSolver(M).solve(F.zeros(V.dim(p + 1)) + rest)
    if sol is None:
        raise ContractError(f"no lift: f is not surjective on H^{p}")
    x = tuple(a + b for a, b in zip(x0, sol[:nV]))
    z = sol[nV:]
    if V.d(p).apply(x) != x_prime or vec_sub(y, W.d(p - 1).apply(z)) != f.at(p).apply(x):
        raise InternalConsistencyError("quasi-isomorphism lift fails verification")
    return x, z


def hom_chain_map(u, a, b) -> ChainMap:
    """u on the hom complex (a, b) as a chain map."""
    S, T = u.source, u.target
    ua, ub = u.obj(a), u.obj(b)
    degs = set(S.degrees(a, b)) | set(T.degrees(ua, ub))
    lo, hi = (min(degs), max(degs)) if degs else (0, -1)
    Vd = {n: S.dim(a, b, n) for n in range(lo, hi + 1)}
    Wd = {n: T.dim(ua, ub, n) for n in range(lo, hi + 1)}
    V = ChainComplex(S.field, Vd, {n: S.d(a, b, n) for n in range(lo - 1, hi + 1)}, check=False)
    W = ChainComplex(S.field, Wd, {n: T.d(ua, ub, n) for n in range(lo - 1, hi + 1)}, check=False)
    mats = {}
    for n in range(lo, hi + 1):
        cols = [u.apply(a, b, n, e) for e in S.basis(a, b, n)]
        mats[n] = Matrix.from_columns(S.field, cols, T.dim(ua, ub, n))
    return ChainMap(V, W, mats)


def is_quasi_fully_faithful(u, pairs=None) -> bool:
    S = u.source
    objs = list(S.objects) if hasattr(S, "objects") else []
    if pairs is None:
        pairs = [(a, b) for a in objs for b in objs]
    return all(hom_chain_map(u, a, b).is_quasi_isomorphism() for a, b in pairs)


class LiftFailure(ContractError):
    def __init__(self, i, n, what):
        super().__init__(f"quasi-full-faithfulness fails at component i={i}, anti-diagonal n={n}: {what}")
        self.i, self.n = i, n


def qff_lift(u, A: TwistedComplex, B: TwistedComplex, g: TwMorphism, check_functor: bool = True):
    """Lift a closed degree-0 g: u(A) → u(B) to f: A → B with g − dα = u(f).

    Components f_i^{i+n}, α_i^{i+n} are produced by increasing n; each step
    solves one coboundary problem in the source category and one joint
    cocycle/coboundary problem mapping into the target category.
    """
    U = _functor_for(u, A.cat)
    if check_functor:
        U.check()
    uA = map_functor(u, A, check=False)
    uB = map_functor(u, B, check=False)
    if g.source != uA or g.target != uB or g.degree != 0:
        raise ContractError("g must be a degree-0 map u(A) → u(B)")
    if not is_closed(g):
        raise ContractError("g is not closed")
    S, T = U.source, U.target
    F = S.field
    f: Dict[tuple, tuple] = {}
    alpha: Dict[tuple, tuple] = {}
    if A.is_zero() or B.is_zero():
        return TwMorphism(A, B, 0, {}), TwMorphism(uA, uB, -1, {})
    nmax = B.hi - A.lo
    for n in range(0, nmax + 1):
        for i in A.degrees():
            j = i + n
            if j not in B.components or i not in A.components:
                continue
            Ai, Bj = A.obj(i), B.obj(j)
            deg = i - j
            # coboundary problem: (−1)^j dφ = −Σ_k (b_k^j f_i^k − f_k^j a_i^k)
            s = list(F.zeros(S.dim(Ai, Bj, deg + 1)))
            for k in range(i, j):
                if (i, k) in f and (k, j) in B.twist:
                    t = S.compose(Ai, B.obj(k), Bj, i - k, k - j + 1, f[(i, k)], B.twist[(k, j)])
                    s = [x + y for x, y in zip(s, t)]
            for k in range(i + 1, j + 1):
                if (i, k) in A.twist and (k, j) in f:
                    t = S.compose(Ai, A.obj(k), Bj, i - k + 1, k - j, A.twist[(i, k)], f[(k, j)])
                    s = [x - y for x, y in zip(s, t)]
            sg = _sign(j + 1)
            rhs = tuple(sg * x for x in s)
            Dsrc = S.d(Ai, Bj, deg)
            phi = LinearSolver(Dsrc).solve(rhs)
            if phi is None:
                raise LiftFailure(i, n, "obstruction class is not a coboundary")
            # joint problem: dx = 0, u(x) − (−1)^j dα = u(φ) − g_i^j + Σ (u(b)α + αu(a))
            uAi, uBj = uA.obj(i), uB.obj(j)
            tvec = list(F.zeros(T.dim(uAi, uBj, deg)))
            for k in range(i - 1, j):
                if (i, k) in alpha and (k, j) in uB.twist:
                    t = T.compose(uAi, uB.obj(k), uBj, i - k - 1, k - j + 1, alpha[(i, k)], uB.twist[(k, j)])
                    tvec = [x + y for x, y in zip(tvec, t)]
            for k in range(i + 1, j + 2):
                if (i, k) in uA.twist and (k, j) in alpha:
                    t = T.compose(uAi, uA.obj(k), uBj, i - k + 1, k - j - 1, uA.twist[(i, k)], alpha[(k, j)])
                    tvec = [x + y for x, y in zip(tvec, t)]
            uphi = U.apply(Ai, Bj, deg, phi)
            rhs2 = tuple(a - b + c for a, b, c in zip(uphi, g.comp(i, j), tvec))
            nx, na = S.dim(Ai, Bj, deg), T.dim(uAi, uBj, deg - 1)
            umat = Matrix.from_columns(F, [U.apply(Ai, Bj, deg, e) for e in S.basis(Ai, Bj, deg)],
                                       T.dim(uAi, uBj, deg))
            Dtgt = T.d(uAi, uBj, deg - 1)
            if j % 2:
                Dtgt_signed = Dtgt
            else:
                Dtgt_signed = -Dtgt
            M = _block_matrix(F, [[Dsrc, None], [umat, Dtgt_signed]],
                              [S.dim(Ai, Bj, deg + 1), T.dim(uAi, uBj, deg)], [nx, na])
            sol = LinearSolver(M).solve(F.zeros(S.dim(Ai, Bj, deg + 1)) + rhs2)
            if sol is None:
                raise LiftFailure(i, n, "class does not lift along u")
            x, a = sol[:nx], sol[nx:]
            fij = vec_sub(phi, x)
            if any(fij):
                f[(i, j)] = fij
            if any(a):
                alpha[(i, j)] = a
    fm = TwMorphism(A, B, 0, f)
    am = TwMorphism(uA, uB, -1, alpha)
    if not is_closed(fm):
        raise InternalConsistencyError("lifted morphism is not closed")
    if g - tw_diff(am) != map_functor(u, fm, check=False):
        raise InternalConsistencyError("g − dα ≠ u(f)")
    return fm, am


# ---------------------------------------------------------------------------
# towers


@dataclass
class TowerLimit:
    limit: TwistedComplex
    maps: List[TwMorphism]          # limit → entries[n] (inverse) or entries[n] → colimit (direct)


def _composite(transitions, a, b, start):
    """Composite of inverse-tower transitions from entries[b] down to entries[a]."""
    m = identity(start)
    for n in range(b - 1, a - 1, -1):
        m = transitions[n] @ m
    return m


def tower_lim(T: Tower) -> TowerLimit:
    """Limit of an inverse tower (colimit of a direct one) as its eventual value."""
    if T.stabilization_index is None or not T.check_stabilization():
        raise UnsupportedInput("tower does not carry a verified stabilization index")
    if T.direction == "direct":
        opT = opposite_tower(T)
        L = tower_lim(opT)
        colim = opposite_tw(L.limit)
        maps = [opposite_mor(m) for m in L.maps]
        return TowerLimit(colim, maps)
    s = T.stabilization_index
    L = T.entries[s]
    maps = []
    for n in range(len(T.entries)):
        if n <= s:
            maps.append(_composite(T.transitions, n, s, L))
        else:
            maps.append(identity(L))
    return TowerLimit(L, maps)


@dataclass
class TowerHolim:
    holim: TwistedComplex
    nu: TwMorphism            # 1 − ν: product → shorter product
    comparison: TwMorphism    # lim → holim
    limit: TwistedComplex


def tower_holim(T: Tower) -> TowerHolim:
    """cone(1 − ν)[−1] over the finite product of the entries, with the
    comparison map from the limit."""
    if T.direction != "inverse":
        raise UnsupportedInput("homotopy limits are taken of inverse towers")
    if T.stabilization_index is None or not T.check_stabilization():
        raise UnsupportedInput("tower does not carry a verified stabilization index")
    cat = T.entries[0].cat
    N = len(T.entries) - 1
    P = tw_sum(T.entries)
    L = T.entries[N]
    if N == 0:
        Pp = zero_complex(cat)
        nu = TwMorphism(P.total, Pp, 0, {})
    else:
        Q = tw_sum(T.entries[:N])
        Pp = Q.total
        nu = None
        for n in range(N):
            term = Q.inclusions[n] @ P.projections[n] - Q.inclusions[n] @ T.transitions[n] @ P.projections[n + 1]
            nu = term if nu is None else nu + term
    pre = tw_cone(nu)
    H = tw_shift(pre.cone, -1)
    c = None
    for n in range(N + 1):
        term = P.inclusions[n] @ _composite(T.transitions, n, N, L)
        c = term if c is None else c + term
    if not (nu @ c).is_zero():
        raise InternalConsistencyError("limit does not map into the kernel of 1 − ν")
    comp = tw_shift_mor(pre.i, -1)
    comp = TwMorphism(P.total, H, 0, comp.components) @ c
    if not is_closed(comp):
        raise InternalConsistencyError("comparison map lim → holim is not closed")
    return TowerHolim(H, nu, comp, L)


def hom_surjectivity(Z: TwistedComplex, T: Tower) -> bool:
    """Whether every transition induces surjections Hom(Z, T_{n+1})^p → Hom(Z, T_n)^p."""
    for n, t in enumerate(T.transitions):
        Hs = HomWindowComplex(Z, T.entries[n + 1])
        Ht = HomWindowComplex(Z, T.entries[n])
        for p in set(Hs.degrees()) | set(Ht.degrees()):
            M = Hs.postcompose_matrix(t, p, Ht)
            if M.rank() != Ht.dim(p):
                return False
    return True


def comparison_on_hom(Z: TwistedComplex, res: TowerHolim) -> ChainMap:
    """Post-composition with lim → holim as a chain map Hom(Z, lim) → Hom(Z, holim)."""
    Hl = HomWindowComplex(Z, res.limit)
    Hh = HomWindowComplex(Z, res.holim)
    degs = sorted(set(Hl.degrees()) | set(Hh.degrees()))
    lo, hi = (degs[0], degs[-1]) if degs else (0, -1)
    mats = {p: Hl.postcompose_matrix(res.comparison, p, Hh) for p in range(lo, hi + 1)}
    return ChainMap(Hl.chain_complex(lo, hi), Hh.chain_complex(lo, hi), mats)


@dataclass
class ExactSequenceCheck:
    degree: int
    dim_hom: int
    dim_product: int
    dim_coproduct: int
    injective: bool
    composite_zero: bool
    surjective: bool
    middle_exact: bool

    @property
    def exact(self) -> bool:
        return self.injective and self.composite_zero and self.surjective and self.middle_exact


def truncation_sequence(X: TwistedComplex, Z: TwistedComplex, p: int) -> ExactSequenceCheck:
    """0 → Hom(X,Z)^p → Π_k Hom(σ≥−k X, Z)^p --(1−μ)--> Π_k Hom(σ≥−k X, Z)^p → 0.

    k runs over 0..K with σ≥−K X = X; the factors for larger k repeat the
    last one through identities, so the finite sequence has the same kernel
    and cokernel as the infinite one.
    """
    F = X.cat.field
    K = max(0, -X.lo) if not X.is_zero() else 0
    homs = [HomWindowComplex(sigma_geq(X, -k), Z) for k in range(K + 1)]
    HX = HomWindowComplex(X, Z)
    dims = [H.dim(p) for H in homs]
    dom = sum(dims)
    cod = sum(dims[:K])
    # ι: f ↦ (f∘j_{−k})_k
    iota_cols = []
    for b in HX.basis(p):
        col = []
        for k in range(K + 1):
            col.extend(homs[k].vector(b @ _retarget(j_map(X, -k), sigma_geq(X, -k), X)))
        iota_cols.append(col)
    iota = Matrix.from_columns(F, iota_cols, dom)
    # 1 − μ: (f_k) ↦ (f_k − f_{k+1}∘j_{−k,−k−1})_{k<K}
    rows = [[F.zero] * dom for _ in range(cod)]
    roff = [sum(dims[:k]) for k in range(K + 1)]
    for k in range(K):
        for a in range(dims[k]):
            rows[roff[k] + a][roff[k] + a] = F.one
        jm = j_step(X, -k)
        M = homs[k + 1].precompose_matrix(jm, p, homs[k])
        for a in range(dims[k]):
            for b in range(dims[k + 1]):
                rows[roff[k] + a][roff[k + 1] + b] = rows[roff[k] + a][roff[k + 1] + b] - M.rows[a][b]
    mu = Matrix(F, cod, dom, rows)
    r_iota = iota.rank()
    r_mu = mu.rank()
    return ExactSequenceCheck(p, HX.dim(p), dom, cod, r_iota == HX.dim(p), (mu @ iota).is_zero(),
                              r_mu == cod, dom - r_mu == r_iota)
