"""t-structures and weight (co-t-) structures on complexes of projectives.

Complexes over Proj(R) live in degree 0, so a twisted complex over the
additive closure is an ordinary complex of projective modules.  Truncations
are produced as explicit complexes of projectives together with their
structure maps, and every claim is checked with exact linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional

from .algebras import (  # noqa: F401  re-exported for convenience
    AlgebraPresentation, FpModule, ProjCategory, a2_algebra, dual_numbers_algebra, field_algebra,
    is_module_map, is_projective_module, kernel_module, module_hom_space, proj_category,
    projective_cover, projective_resolution,
)
from .errors import ContractError, InternalConsistencyError, UnsupportedInput
from .exactlin import LinearSolver, Matrix
from .homotopy import HomWindowComplex, h0_iso_decide, nullhomotopy
from .twisted import (
    Tower, TwistedComplex, TwMorphism, identity, is_closed, j_map, opposite_tw, p_map, p_step,
    sigma_leq, tw_cone, tw_shift, validate_twisted,
)


# ---------------------------------------------------------------------------
# complexes of modules


class ModComplex:
    """A complex of projectives as module matrices: objs[m] a tuple of
    generator names, d[m]: module(objs[m]) → module(objs[m+1])."""

    def __init__(self, pc: ProjCategory, objs: dict, d: dict):
        self.pc = pc
        self.objs = {m: tuple(S) for m, S in objs.items() if S}
        self.d = {}
        for m, M in d.items():
            if m in self.objs and m + 1 in self.objs and not M.is_zero():
                self.d[m] = M

    @classmethod
    def from_tw(cls, pc: ProjCategory, X: TwistedComplex) -> "ModComplex":
        if not (X.cat is pc.closure or X.cat == pc.closure):
            raise ContractError("complex is not over this category of projectives")
        d = {}
        for (i, j), v in X.twist.items():
            if j != i + 1:
                raise ContractError("degree-0 coefficients admit only adjacent twisted differentials")
            d[i] = pc.map_matrix(X.obj(i), X.obj(j), v)
        return cls(pc, dict(X.components), d)

    def dim(self, m) -> int:
        return self.pc.module(self.objs[m]).dim if m in self.objs else 0

    def module(self, m) -> FpModule:
        return self.pc.module(self.objs.get(m, ()))

    def diff(self, m) -> Matrix:
        M = self.d.get(m)
        if M is None:
            return Matrix.zeros(self.pc.field, self.dim(m + 1), self.dim(m))
        return M

    def to_tw(self, bounds="both") -> TwistedComplex:
        tw = {}
        for m, M in self.d.items():
            tw[(m, m + 1)] = self.pc.coords(self.objs[m], self.objs[m + 1], M)
        return TwistedComplex(self.pc.closure, dict(self.objs), tw, bounds)

    def support(self) -> list:
        return sorted(self.objs)


def _diag_morphism(pc, S: TwistedComplex, T: TwistedComplex, mats: dict) -> TwMorphism:
    comps = {}
    for m, M in mats.items():
        if m in S.components and m in T.components and not M.is_zero():
            comps[(m, m)] = pc.coords(S.obj(m), T.obj(m), M)
    return TwMorphism(S, T, 0, comps)


def _diag_matrices(pc, f: TwMorphism) -> dict:
    out = {}
    for (i, j), v in f.components.items():
        if i != j:
            raise ContractError("degree-0 maps of complexes of projectives are diagonal")
        out[i] = pc.map_matrix(f.source.obj(i), f.target.obj(j), v)
    return out


def heart_cohomology(pc: ProjCategory, X: TwistedComplex, n: int) -> FpModule:
    """H^n of the complex of modules underlying X, with its module structure."""
    MC = ModComplex.from_tw(pc, X)
    Mn = MC.module(n)
    if Mn.dim == 0:
        return FpModule(pc.algebra, 0, [Matrix.zeros(pc.field, 0, 0)] * pc.algebra.dim)
    Z, inc = kernel_module(Mn, MC.diff(n))
    if Z.dim == 0:
        return Z
    solver = LinearSolver(inc)
    B = [solver.solve(c) for c in MC.diff(n - 1).columns()]
    H, _ = Z.quotient(B)
    return H


def dim_vector(pc: ProjCategory, M: FpModule) -> tuple:
    if M.dim == 0:
        return tuple(0 for _ in pc.algebra.idempotents)
    return M.dim_vector()


def cohomology_dims(pc: ProjCategory, X: TwistedComplex, degrees) -> dict:
    return {k: dim_vector(pc, heart_cohomology(pc, X, k)) for k in degrees}


# ---------------------------------------------------------------------------
# Gaussian elimination


@dataclass
class Minimized:
    complex: TwistedComplex
    F: TwMorphism         # original → minimized
    G: TwMorphism         # minimized → original, F∘G = 1
    removed: int


def minimize(pc: ProjCategory, X: TwistedComplex, verify: bool = True) -> Minimized:
    """Cancel invertible differential blocks between equal indecomposables.

    Each cancellation of φ: B → C inside d^i = [[φ, b], [c, e]] replaces d^i
    by e − cφ⁻¹b and comes with F = (1, [−cφ⁻¹, 1]) and G = ([−φ⁻¹b; 1], 1);
    F∘G is the identity and G∘F is homotopic to it.
    """
    MC = ModComplex.from_tw(pc, X)
    objs = {m: list(S) for m, S in MC.objs.items()}
    d = dict(MC.d)
    F_ = pc.field
    sizes = {a: pc.modules[a].dim for a in pc.names}

    def offs(S):
        out, pos = [], 0
        for a in S:
            out.append((pos, sizes[a]))
            pos += sizes[a]
        return out, pos

    Fm = {m: Matrix.identity(F_, MC.dim(m)) for m in objs}
    Gm = {m: Matrix.identity(F_, MC.dim(m)) for m in objs}
    removed = 0
    while True:
        hit = None
        for i in sorted(d):
            S, T = objs[i], objs[i + 1]
            so, _ = offs(S)
            to, _ = offs(T)
            for c, a in enumerate(S):
                for r, b in enumerate(T):
                    if a != b:
                        continue
                    blk = d[i].submatrix(range(to[r][0], to[r][0] + to[r][1]), range(so[c][0], so[c][0] + so[c][1]))
                    inv = blk.inverse()
                    if inv is not None:
                        hit = (i, c, r, inv)
                        break
                if hit:
                    break
            if hit:
                break
        if hit is None:
            break
        i, c, r, phinv = hit
        S, T = objs[i], objs[i + 1]
        so, sn = offs(S)
        to, tn = offs(T)
        Bc = list(range(so[c][0], so[c][0] + so[c][1]))
        Uc = [k for k in range(sn) if k not in Bc]
        Cr = list(range(to[r][0], to[r][0] + to[r][1]))
        Vr = [k for k in range(tn) if k not in Cr]
        D = d[i]
        b = D.submatrix(Cr, Uc)
        cc = D.submatrix(Vr, Bc)
        e = D.submatrix(Vr, Uc)
        new_d = e - cc @ phinv @ b
        # maps between old and new terms in degrees i and i+1
        Fi = Matrix.identity(F_, sn).submatrix(Uc, range(sn))
        Gi_rows = []
        top = -(phinv @ b)
        for k in range(sn):
            if k in Bc:
                Gi_rows.append(list(top.rows[Bc.index(k)]))
            else:
                Gi_rows.append([F_.one if Uc.index(k) == j else F_.zero for j in range(len(Uc))])
        Gi = Matrix(F_, sn, len(Uc), Gi_rows)
        left = -(cc @ phinv)
        Fi1_rows = []
        for row_idx, k in enumerate(Vr):
            row = [F_.zero] * tn
            for jj, cidx in enumerate(Cr):
                row[cidx] = left.rows[row_idx][jj]
            row[k] = F_.one
            Fi1_rows.append(row)
        Fi1 = Matrix(F_, len(Vr), tn, Fi1_rows)
        Gi1 = Matrix.identity(F_, tn).submatrix(range(tn), Vr)
        # new differentials around
        if i - 1 in d:
            d[i - 1] = d[i - 1].submatrix(Uc, range(d[i - 1].ncols))
        if i + 1 in d:
            d[i + 1] = d[i + 1].submatrix(range(d[i + 1].nrows), Vr)
        d[i] = new_d
        Fm[i] = Fi @ Fm[i]
        Fm[i + 1] = Fi1 @ Fm[i + 1]
        Gm[i] = Gm[i] @ Gi
        Gm[i + 1] = Gm[i + 1] @ Gi1
        objs[i] = S[:c] + S[c + 1:]
        objs[i + 1] = T[:r] + T[r + 1:]
        for m in (i, i + 1):
            if not objs[m]:
                del objs[m]
        for m in list(d):
            if m not in objs or m + 1 not in objs or d[m].nrows == 0 or d[m].ncols == 0:
                del d[m]
        removed += 1
    Y = ModComplex(pc, objs, d).to_tw(X.bounds)
    Fmor = _diag_morphism(pc, X, Y, Fm)
    Gmor = _diag_morphism(pc, Y, X, Gm)
    if verify:
        if not (is_closed(Fmor) and is_closed(Gmor)):
            raise InternalConsistencyError("elimination maps are not chain maps")
        if Fmor @ Gmor != identity(Y):
            raise InternalConsistencyError("elimination maps do not split")
        if removed and nullhomotopy(identity(X) - Gmor @ Fmor) is None:
            raise InternalConsistencyError("elimination is not a homotopy equivalence")
    return Minimized(Y, Fmor, Gmor, removed)


# ---------------------------------------------------------------------------
# smart truncation


@dataclass
class TTriangle:
    """τ≤n X → X → τ≥n+1 X with the counit and unit maps.

    ``exact`` is False when the projective resolution was cut by the depth
    cap; then ``validity`` is the range of degrees k where H^k of τ≤n X is
    guaranteed to be right.
    """

    X: TwistedComplex
    n: int
    tau_le: TwistedComplex
    tau_ge: TwistedComplex
    counit: TwMorphism
    unit: TwMorphism
    exact: bool
    validity: Optional[tuple]
    pattern: Dict[int, tuple] = dc_field(default_factory=dict)
    pattern_ok: bool = True
    composite_null: bool = True

    def dims(self, which) -> dict:
        return {k: v[{"X": 0, "le": 1, "ge": 2}[which]] for k, v in self.pattern.items()}


def _lift_through(pc, epi: Matrix, target: Matrix, S, T, src_dim) -> Matrix:
    """Module map λ: module(S) → module(T) with epi∘λ = target."""
    C = pc.closure
    basis = C.basis(S, T, 0)
    mats = [pc.map_matrix(S, T, b) for b in basis]
    F = pc.field
    cols = [tuple(x for row in (epi @ M).rows for x in row) for M in mats]
    rhs = tuple(x for row in target.rows for x in row)
    if not cols:
        if any(rhs):
            raise InternalConsistencyError("no map to lift through")
        return Matrix.zeros(F, pc.module(T).dim, src_dim)
    sol = LinearSolver(Matrix.from_columns(F, cols, len(rhs))).solve(rhs)
    if sol is None:
        raise InternalConsistencyError("lift through a projective cover failed")
    out = Matrix.zeros(F, pc.module(T).dim, src_dim)
    for x, M in zip(sol, mats):
        if x:
            out = out + M.scale(x)
    return out


def _block2(F, A, B, Cm, D, r1, r2, c1, c2) -> Matrix:
    """[[A, B], [C, D]] with None meaning zero."""
    out = [[F.zero] * (c1 + c2) for _ in range(r1 + r2)]
    for (M, ro, co) in ((A, 0, 0), (B, 0, c1), (Cm, r1, 0), (D, r1, c1)):
        if M is None:
            continue
        for i in range(M.nrows):
            for j in range(M.ncols):
                out[ro + i][co + j] = M.rows[i][j]
    return Matrix(F, r1 + r2, c1 + c2, out)


def _check_bounded_above(X: TwistedComplex):
    if X.bounds not in ("both", "above"):
        raise UnsupportedInput("t-truncation needs a complex bounded above (Tw⁻ flag)")


def t_truncate(pc: ProjCategory, X: TwistedComplex, n: int, depth_cap: int = 8, minimal: bool = True) -> TTriangle:
    """Truncation triangle for the projective t-structure at level n.

    τ≤n X is X^{<n} glued to a projective resolution R_• of Z^n = ker d^n:
    Q^m = X^m ⊕ R_{n−m}, Q^n = R_0, d_Q = [[d_X, 0], [λ, ρ]], where λ_{n−1}
    lifts d^{n−1} through R_0 → Z^n and ρλ_m = −λ_{m+1}d^m below.  The counit
    is the identity on X^{<n} and R_0 → Z^n ⊂ X^n in degree n, and τ≥n+1 X is
    its cone.  Both are minimized by Gaussian elimination.
    """
    if depth_cap < 1:
        raise ContractError("depth_cap must be at least 1")
    _check_bounded_above(X)
    rep = validate_twisted(X)
    if not rep.passed:
        raise ContractError("input complex violates the Maurer–Cartan equation")
    F = pc.field
    MC = ModComplex.from_tw(pc, X)
    Xn = MC.module(n)
    if Xn.dim:
        Z, incZ = kernel_module(Xn, MC.diff(n))
    else:
        Z, incZ = Xn, Matrix.zeros(F, 0, 0)
    if Z.dim:
        Robjs, rho, pi, complete = projective_resolution(pc, Z, depth_cap)
    else:
        Robjs, rho, pi, complete = [()], [None], Matrix.zeros(F, 0, 0), True
    D = len(Robjs)
    lo_x = min(MC.objs) if MC.objs else n
    lo = min(lo_x, n - D + 1)
    Rdim = [pc.module(S).dim if S else 0 for S in Robjs]
    # λ_m: X^m → R_{n−m−1}
    lam = {}
    zsolver = LinearSolver(incZ) if Z.dim else None
    if n - 1 in MC.objs and D >= 1 and Robjs[0]:
        dn1 = MC.diff(n - 1)
        target = Matrix.from_columns(F, [zsolver.solve(c) for c in dn1.columns()], Z.dim)
        lam[n - 1] = _lift_through(pc, pi, target, MC.objs[n - 1], Robjs[0], MC.dim(n - 1))
    for m in range(n - 2, lo - 1, -1):
        k = n - m - 1          # target R_k, k ≥ 1
        if k >= D or m not in MC.objs or not Robjs[k]:
            continue
        prev = lam.get(m + 1)
        if prev is None:
            continue
        target = -(prev @ MC.diff(m))
        if target.is_zero():
            continue
        lam[m] = _lift_through(pc, rho[k], target, MC.objs[m], Robjs[k], MC.dim(m))
    objs, dq = {}, {}
    for m in range(lo, n + 1):
        xs = MC.objs.get(m, ()) if m < n else ()
        rk = n - m
        rs = Robjs[rk] if rk < D else ()
        objs[m] = xs + rs
    for m in range(lo, n):
        xs_dim = MC.dim(m) if m < n else 0
        rk = n - m
        r_dim = Rdim[rk] if rk < D else 0
        xs1_dim = MC.dim(m + 1) if m + 1 < n else 0
        r1_dim = Rdim[rk - 1] if rk - 1 < D else 0
        A = MC.diff(m) if (m + 1 < n and xs_dim and xs1_dim) else None
        Lm = lam.get(m)
        Rho = rho[rk] if (rk < D and rk >= 1 and r_dim and r1_dim) else None
        dq[m] = _block2(F, A, None, Lm, Rho, xs1_dim, r1_dim, xs_dim, r_dim)
    Q = ModComplex(pc, objs, dq).to_tw("above")
    if not validate_twisted(Q).passed:
        raise InternalConsistencyError("glued complex violates d² = 0")
    eps_m = {}
    for m in range(lo, n + 1):
        if m not in Q.components or m not in X.components:
            continue
        if m < n:
            xd = MC.dim(m)
            eps_m[m] = _block2(F, Matrix.identity(F, xd), None, None, None, xd, 0, xd, pc.module(Q.obj(m)).dim - xd)
        else:
            eps_m[m] = incZ @ pi
    eps = _diag_morphism(pc, Q, X, eps_m)
    if not is_closed(eps):
        raise InternalConsistencyError("counit is not a chain map")
    pre = tw_cone(eps)
    ge_raw = pre.cone
    unit_raw = pre.j
    if minimal:
        mq = minimize(pc, Q)
        mg = minimize(pc, ge_raw)
        tau_le, counit = mq.complex, eps @ mq.G
        tau_ge, unit = mg.complex, mg.F @ unit_raw
    else:
        tau_le, counit, tau_ge, unit = Q, eps, ge_raw, unit_raw
    tau_le = tau_le.with_bounds("above")
    counit = TwMorphism(tau_le, X, 0, counit.components)
    validity = None if complete else (n - D + 2, n)
    tri = TTriangle(X, n, tau_le, tau_ge, counit, unit, complete, validity)
    _fill_pattern(pc, tri)
    return tri


def _fill_pattern(pc, tri: TTriangle):
    X, n = tri.X, tri.n
    degs = set(X.components) | set(tri.tau_le.components) | set(tri.tau_ge.components)
    if not degs:
        degs = {n}
    lo, hi = min(degs) - 1, max(degs) + 1
    ok = True
    zero = tuple(0 for _ in pc.algebra.idempotents)
    for k in range(lo, hi + 1):
        hx = dim_vector(pc, heart_cohomology(pc, X, k))
        hl = dim_vector(pc, heart_cohomology(pc, tri.tau_le, k))
        hg = dim_vector(pc, heart_cohomology(pc, tri.tau_ge, k))
        tri.pattern[k] = (hx, hl, hg)
        in_window = tri.validity is None or tri.validity[0] <= k
        if k <= n:
            if in_window and (hl != hx or hg != zero):
                ok = False
        else:
            if hl != zero or hg != hx:
                ok = False
    tri.pattern_ok = ok
    comp = tri.unit @ tri.counit
    tri.composite_null = nullhomotopy(comp) is not None
    if tri.exact and not (ok and tri.composite_null):
        raise InternalConsistencyError("truncation triangle fails its cohomology pattern")


# ---------------------------------------------------------------------------
# unbounded route through a stabilizing tower


@dataclass
class UnboundedTruncation:
    triangle: TTriangle
    tower: Tower
    steps: int
    stabilized_at: int
    agrees: bool


def factor_through(eps: TwMorphism, f: TwMorphism):
    """Closed g: A → B and h with eps∘g − f = dh, or None (eps: B → Y, f: A → Y)."""
    from .homotopy import _block_matrix
    A, B, Y = f.source, eps.source, eps.target
    F = A.cat.field
    AB = HomWindowComplex(A, B)
    AY = HomWindowComplex(A, Y)
    post = AB.postcompose_matrix(eps, 0, AY)
    M = _block_matrix(F, [[AB.differential(0), None], [post, -AY.differential(-1)]],
                      [AB.dim(1), AY.dim(0)], [AB.dim(0), AY.dim(-1)])
    sol = LinearSolver(M).solve(F.zeros(AB.dim(1)) + AY.vector(f))
    if sol is None:
        return None
    g = AB.morphism(0, sol[:AB.dim(0)])
    h = AY.morphism(-1, sol[AB.dim(0):])
    return g, h


def proj_t_truncate_unbounded(pc: ProjCategory, X: TwistedComplex, n: int, depth_cap: int = 8) -> UnboundedTruncation:
    """τ≤n X as the limit of the tower τ≤n σ≤k X for k = lo, ..., hi + 1.

    Transitions are the maps induced by σ≤k X → σ≤k−1 X, found by factoring
    through the counits.  The stabilization index is the first k after which
    all entries agree and all transitions are identities; the limit is
    checked against the direct truncation.
    """
    if X.is_zero():
        tri = t_truncate(pc, X, n, depth_cap)
        return UnboundedTruncation(tri, Tower("inverse", [tri.tau_le], [], 0), 1, n, True)
    lo, hi = X.lo, X.hi
    entries, trans, tris = [], [], []
    for k in range(lo, hi + 2):
        Xk = sigma_leq(X, k)
        tri = t_truncate(pc, Xk, n, depth_cap)
        if tris:
            prev = tris[-1]
            p = TwMorphism(Xk, prev.X, 0, p_step(X, k).components)
            if tri.tau_le == prev.tau_le and p @ tri.counit == TwMorphism(tri.tau_le, prev.X, 0, prev.counit.components):
                t = identity(tri.tau_le)
            else:
                res = factor_through(prev.counit, p @ tri.counit)
                if res is None:
                    raise InternalConsistencyError(f"no transition map between truncations at k = {k}")
                t = res[0]
            trans.append(t)
        entries.append(tri.tau_le)
        tris.append(tri)
    s = len(entries) - 1
    while s > 0 and entries[s - 1] == entries[s] and trans[s - 1] == identity(entries[s]):
        s -= 1
    if s == len(entries) - 1:
        raise InternalConsistencyError("truncation tower did not stabilize within hi − lo + 2 steps")
    tower = Tower("inverse", entries, trans, s)
    from .homotopy import tower_lim
    L = tower_lim(tower)
    direct = t_truncate(pc, X, n, depth_cap)
    agrees = L.limit == direct.tau_le
    if not agrees:
        raise InternalConsistencyError("tower limit differs from the direct truncation")
    return UnboundedTruncation(direct, tower, s + 1, lo + s, agrees)


def retag(X: TwistedComplex, cat) -> TwistedComplex:
    return TwistedComplex(cat, dict(X.components), dict(X.twist), X.bounds)


def injective_t_truncate_geq(pc: ProjCategory, X: TwistedComplex, n: int, depth_cap: int = 8):
    """Dual truncation: τ≥n X := (τ≤−n X^op)^op computed over Proj(R^op).

    Returns (tau_ge, unit: X → tau_ge, triangle over the opposite side).
    """
    opc = pc.opposite()
    Xop = retag(opposite_tw(X), opc.closure)
    tri = t_truncate(opc, Xop.with_bounds("above"), -n, depth_cap)
    back = retag(opposite_tw(tri.tau_le), pc.closure)
    from .twisted import opposite_mor
    u = opposite_mor(tri.counit)
    unit = TwMorphism(X, back, 0, u.components)
    if not is_closed(unit):
        raise InternalConsistencyError("dual unit is not closed")
    return back, unit, tri


# ---------------------------------------------------------------------------
# aisles


@dataclass
class Membership:
    which: str
    n: int
    member: bool
    witness: dict


def aisle_membership(X: TwistedComplex, which: str, n: int = 0, pc: Optional[ProjCategory] = None) -> Membership:
    """Decide X ∈ w≤n, w≥n, t≤n or t≥n.

    w≥n holds iff p_{n−1}: X → σ≤n−1 X is nullhomotopic: then X is a summand
    of σ≥n X in H^0, and co-t-aisles are closed under summands; conversely
    maps from w≥n to w≤n−1 vanish.  Dually for w≤n with j_{n+1}.
    t-aisles are read off from H^k_t.
    """
    if which == "w>=":
        if X.is_zero() or X.lo >= n:
            return Membership(which, n, True, {"supported": True})
        p = p_map(X, n - 1)
        h = nullhomotopy(p)
        w = {"supported": False, "homotopy": h}
        if h is not None:
            w["iso_to_truncation"] = h0_iso_decide(j_map(X, n), certify=False).iso
        return Membership(which, n, h is not None, w)
    if which == "w<=":
        if X.is_zero() or X.hi <= n:
            return Membership(which, n, True, {"supported": True})
        j = j_map(X, n + 1)
        h = nullhomotopy(j)
        w = {"supported": False, "homotopy": h}
        if h is not None:
            w["iso_to_truncation"] = h0_iso_decide(p_map(X, n), certify=False).iso
        return Membership(which, n, h is not None, w)
    if which in ("t<=", "t>="):
        if pc is None:
            raise ContractError("t-aisles need the category of projectives")
        if X.is_zero():
            return Membership(which, n, True, {"cohomology": {}})
        degs = range(X.lo, X.hi + 1)
        dims = cohomology_dims(pc, X, degs)
        zero = tuple(0 for _ in pc.algebra.idempotents)
        if which == "t<=":
            bad = [k for k, v in dims.items() if k > n and v != zero]
        else:
            bad = [k for k, v in dims.items() if k < n and v != zero]
        return Membership(which, n, not bad, {"cohomology": dims, "offending": bad})
    raise ValueError(f"unknown aisle {which!r}")


# ---------------------------------------------------------------------------
# derived projectives


@dataclass
class DerivedProjCert:
    passed: bool
    in_aisle: bool
    h0: tuple
    h0_projective: bool
    tests: List[dict]
    failures: List[str]


def derived_projective_cert(pc: ProjCategory, Q: TwistedComplex, tests: List[TwistedComplex]) -> DerivedProjCert:
    """Check Q ∈ t≤0, H^0 Hom(Q, Z[1]) = 0 for each supplied Z ∈ t≤0, and
    that H^0_t(Q) is projective.  The certificate is scoped to the family."""
    failures = []
    mem = aisle_membership(Q, "t<=", 0, pc)
    if not mem.member:
        failures.append("Q is not in the t≤0 aisle")
    results = []
    for idx, Z in enumerate(tests):
        zm = aisle_membership(Z, "t<=", 0, pc)
        if not zm.member:
            raise ContractError(f"test object {idx} is not in the t≤0 aisle")
        H = HomWindowComplex(Q, tw_shift(Z, 1))
        coh = H.cohomology(0)
        entry = {"index": idx, "h0_dim": coh.dim}
        if coh.dim:
            entry["witness"] = H.morphism(0, coh.reps()[0])
            failures.append(f"H^0 Hom(Q, Z[1]) ≠ 0 for test object {idx}")
        results.append(entry)
    H0 = heart_cohomology(pc, Q, 0)
    proj = is_projective_module(pc, H0) if H0.dim else True
    if not proj:
        failures.append("H^0_t(Q) is not projective")
    return DerivedProjCert(not failures, mem.member, dim_vector(pc, H0), proj, results, failures)
