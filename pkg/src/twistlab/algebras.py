"""Finite-dimensional algebras, their modules and categories of projectives.

Modules are right modules stored as action matrices on column vectors:
``v·a = rho(a) v``, so rho(ab) = rho(b) rho(a).  A module map is a matrix
phi with phi rho_M(a) = rho_N(a) phi.
"""

from __future__ import annotations

from typing import Dict, List, Sequence

from .dgcore import AdditiveClosure, DgCategory
from .errors import ContractError, StructuralError, UnsupportedInput
from .exactlin import LinearSolver, Matrix, QQ, column_space_basis, is_zero_vec


class AlgebraPresentation:
    """Basis e_0..e_{d-1}, products e_i e_j = sum_k c[i][j][k] e_k.

    ``idempotents`` should be a complete set of orthogonal primitive
    idempotents and ``radical`` a basis of the Jacobson radical; both are
    checked by ``validate`` (the radical as a nilpotent two-sided ideal with
    semisimple split quotient, not computed from scratch).
    """

    def __init__(self, field, dim: int, structure, unit, idempotents, radical, names=None,
                 basis_names=None):
        F = field
        self.field = F
        self.dim = int(dim)
        d = self.dim
        self.c = [[tuple(F(x) for x in structure[i][j]) for j in range(d)] for i in range(d)]
        for i in range(d):
            for j in range(d):
                if len(self.c[i][j]) != d:
                    raise StructuralError(f"structure constant e{i}·e{j} has length {len(self.c[i][j])}")
        self.unit = F.vector(unit)
        self.idempotents = [F.vector(e) for e in idempotents]
        self.radical = [F.vector(r) for r in radical]
        for v in [self.unit] + self.idempotents + self.radical:
            if len(v) != d:
                raise StructuralError("algebra element of the wrong length")
        self.names = list(names) if names is not None else [f"P{i + 1}" for i in range(len(self.idempotents))]
        self.basis_names = list(basis_names) if basis_names is not None else [f"b{i}" for i in range(d)]
        self._left = {}

    def zero(self) -> tuple:
        return self.field.zeros(self.dim)

    def basis_vector(self, i: int) -> tuple:
        F = self.field
        return tuple(F.one if k == i else F.zero for k in range(self.dim))

    def mul(self, a, b) -> tuple:
        F = self.field
        out = [F.zero] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for k, c in enumerate(self.c[i][j]):
                    if c:
                        out[k] = out[k] + xy * c
        return tuple(out)

    def left_matrix(self, a) -> Matrix:
        """Matrix of x ↦ a x."""
        cols = [self.mul(a, self.basis_vector(j)) for j in range(self.dim)]
        return Matrix.from_columns(self.field, cols, self.dim)

    def right_matrix(self, a) -> Matrix:
        """Matrix of x ↦ x a."""
        cols = [self.mul(self.basis_vector(j), a) for j in range(self.dim)]
        return Matrix.from_columns(self.field, cols, self.dim)

    def span(self, vectors) -> list:
        vs = [v for v in vectors if not is_zero_vec(v)]
        if not vs:
            return []
        return column_space_basis(Matrix.from_columns(self.field, vs, self.dim))

    def corner(self, e, f) -> list:
        """Basis of e R f."""
        return self.span(self.mul(self.mul(e, self.basis_vector(j)), f) for j in range(self.dim))

    def opposite(self) -> "AlgebraPresentation":
        d = self.dim
        st = [[self.c[j][i] for j in range(d)] for i in range(d)]
        return AlgebraPresentation(self.field, d, st, self.unit, self.idempotents, self.radical, self.names,
                                   self.basis_names)

    def validate(self) -> list:
        """List of failed axioms (empty when the presentation is usable)."""
        d = self.dim
        bad = []
        E = [self.basis_vector(i) for i in range(d)]
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    if self.mul(self.mul(E[i], E[j]), E[k]) != self.mul(E[i], self.mul(E[j], E[k])):
                        bad.append(("associativity", (i, j, k)))
        for i in range(d):
            if self.mul(self.unit, E[i]) != E[i] or self.mul(E[i], self.unit) != E[i]:
                bad.append(("unit", (i,)))
        total = self.zero()
        for a, e in enumerate(self.idempotents):
            total = tuple(x + y for x, y in zip(total, e))
            for b, f in enumerate(self.idempotents):
                want = e if a == b else self.zero()
                if self.mul(e, f) != want:
                    bad.append(("idempotents", (a, b)))
        if total != self.unit:
            bad.append(("idempotents-sum", ()))
        rad = self.radical
        rspan = self.span(rad)
        if len(rspan) != len(rad):
            bad.append(("radical-basis", ()))
        for r in rad:
            for e in E:
                for prod in (self.mul(r, e), self.mul(e, r)):
                    if not self._in_span(prod, rspan):
                        bad.append(("radical-ideal", ()))
                        break
        power = rspan
        for _ in range(d + 1):
            if not power:
                break
            power = self.span(self.mul(x, y) for x in power for y in rspan)
        if power:
            bad.append(("radical-nilpotent", ()))
        # R/rad must be a product of copies of the field, one per idempotent
        for a, e in enumerate(self.idempotents):
            for b, f in enumerate(self.idempotents):
                full = self.corner(e, f)
                radc = self.span(self.mul(self.mul(e, r), f) for r in rspan)
                if len(full) - len(radc) != (1 if a == b else 0):
                    bad.append(("basic-split", (a, b)))
        return bad

    def check(self):
        bad = self.validate()
        if bad:
            raise StructuralError(f"invalid algebra presentation: {bad[0][0]} fails at {bad[0][1]}")
        return self

    def _in_span(self, v, basis) -> bool:
        if is_zero_vec(v):
            return True
        if not basis:
            return False
        M = Matrix.from_columns(self.field, basis, self.dim)
        return LinearSolver(M).solve(v) is not None


class FpModule:
    """Finite-dimensional right module with action matrices per algebra basis element."""

    def __init__(self, algebra: AlgebraPresentation, dim: int, action: Sequence[Matrix], label: str = ""):
        self.algebra = algebra
        self.dim = int(dim)
        self.action = list(action)
        self.label = label
        F = algebra.field
        if len(self.action) != algebra.dim:
            raise StructuralError("one action matrix per algebra basis element is required")
        for M in self.action:
            if M.shape != (self.dim, self.dim):
                raise StructuralError(f"action matrix of shape {M.shape} on a module of dimension {self.dim}")
        self.field = F

    def rho(self, a) -> Matrix:
        F = self.field
        out = Matrix.zeros(F, self.dim, self.dim)
        for k, x in enumerate(a):
            if x:
                out = out + self.action[k].scale(x)
        return out

    def validate(self) -> list:
        R = self.algebra
        bad = []
        for i in range(R.dim):
            for j in range(R.dim):
                lhs = self.rho(R.mul(R.basis_vector(i), R.basis_vector(j)))
                if lhs != self.action[j] @ self.action[i]:
                    bad.append(("associativity", (i, j)))
        if self.rho(R.unit) != Matrix.identity(self.field, self.dim):
            bad.append(("unit", ()))
        return bad

    def dim_vector(self) -> tuple:
        return tuple(self.rho(e).rank() for e in self.algebra.idempotents)

    def is_zero(self) -> bool:
        return self.dim == 0

    def submodule(self, vectors):
        """(N, inclusion) for the submodule spanned by ``vectors`` (must be closed)."""
        F = self.field
        basis = column_space_basis(Matrix.from_columns(F, list(vectors), self.dim)) if vectors else []
        inc = Matrix.from_columns(F, basis, self.dim)
        solver = LinearSolver(inc)
        acts = []
        for A in self.action:
            cols = []
            for b in basis:
                c = solver.solve(A.apply(b))
                if c is None:
                    raise ContractError("vectors do not span a submodule")
                cols.append(c)
            acts.append(Matrix.from_columns(F, cols, len(basis)))
        return FpModule(self.algebra, len(basis), acts), inc

    def quotient(self, vectors):
        """(Q, projection) for the quotient by the submodule spanned by ``vectors``."""
        F = self.field
        sub = column_space_basis(Matrix.from_columns(F, list(vectors), self.dim)) if vectors else []
        std = [tuple(F.one if k == j else F.zero for k in range(self.dim)) for j in range(self.dim)]
        M = Matrix.from_columns(F, sub + std, self.dim)
        _, piv = M.rref()
        comp = [M.column(j) for j in piv if j >= len(sub)]
        solver = LinearSolver(Matrix.from_columns(F, comp + sub, self.dim))
        q = len(comp)

        def coords(v):
            return solver.solve(v)[:q]

        proj = Matrix.from_columns(F, [coords(e) for e in std], q)
        acts = [Matrix.from_columns(F, [coords(A.apply(c)) for c in comp], q) for A in self.action]
        return FpModule(self.algebra, q, acts), proj

    @staticmethod
    def direct_sum(algebra, modules: Sequence["FpModule"]) -> "FpModule":
        F = algebra.field
        n = sum(m.dim for m in modules)
        acts = []
        for k in range(algebra.dim):
            rows = [[F.zero] * n for _ in range(n)]
            off = 0
            for m in modules:
                A = m.action[k]
                for r in range(m.dim):
                    for c in range(m.dim):
                        rows[off + r][off + c] = A.rows[r][c]
                off += m.dim
            acts.append(Matrix(F, n, n, rows))
        return FpModule(algebra, n, acts)


def is_module_map(M: FpModule, N: FpModule, phi: Matrix) -> bool:
    if phi.shape != (N.dim, M.dim):
        return False
    return all(phi @ A == B @ phi for A, B in zip(M.action, N.action))


def module_hom_space(M: FpModule, N: FpModule) -> List[Matrix]:
    """Basis of Hom_R(M, N) from the linear system phi rho_M = rho_N phi."""
    F = M.field
    m, n = M.dim, N.dim
    rows = []
    for A, B in zip(M.action, N.action):
        for r in range(n):
            for c in range(m):
                row = [F.zero] * (n * m)
                for s in range(m):
                    if A.rows[s][c]:
                        row[r * m + s] = row[r * m + s] + A.rows[s][c]
                for s in range(n):
                    if B.rows[r][s]:
                        row[s * m + c] = row[s * m + c] - B.rows[r][s]
                rows.append(row)
    if n * m == 0:
        return []
    sol = Matrix(F, len(rows), n * m, rows).nullspace() if rows else \
        [tuple(F.one if k == j else F.zero for k in range(n * m)) for j in range(n * m)]
    return [Matrix(F, n, m, [list(v[r * m:(r + 1) * m]) for r in range(n)]) for v in sol]


def regular_module(R: AlgebraPresentation) -> FpModule:
    return FpModule(R, R.dim, [R.right_matrix(R.basis_vector(k)) for k in range(R.dim)], "R")


def idempotent_module(R: AlgebraPresentation, e):
    """(eR, basis vectors of eR inside R)."""
    F = R.field
    basis = R.span(R.mul(e, R.basis_vector(j)) for j in range(R.dim))
    inc = Matrix.from_columns(F, basis, R.dim)
    solver = LinearSolver(inc)
    acts = []
    for k in range(R.dim):
        cols = [solver.solve(R.mul(b, R.basis_vector(k))) for b in basis]
        acts.append(Matrix.from_columns(F, cols, len(basis)))
    return FpModule(R, len(basis), acts), basis


class ProjCategory:
    """Proj(R) on chosen idempotents: objects e_aR, hom = module maps.

    ``cat`` is the degree-0 dg-category (with a formal zero object "0") and
    ``closure`` its additive closure, over which complexes of projectives
    are twisted complexes.
    """

    def __init__(self, algebra: AlgebraPresentation, generators=None, names=None, _hom_bases=None):
        R = algebra
        R.check()
        F = R.field
        if generators is None:
            generators = R.idempotents
        self.algebra = R
        self.generators = [F.vector(g) for g in generators]
        if names is None:
            names = []
            for g in self.generators:
                hit = [R.names[i] for i, e in enumerate(R.idempotents) if e == g]
                names.append(hit[0] if hit else f"Q{len(names) + 1}")
        self.names = list(names)
        if "0" in self.names or len(set(self.names)) != len(self.names):
            raise StructuralError("generator names must be distinct and different from '0'")
        for g in self.generators:
            if R.mul(g, g) != g:
                raise StructuralError("generator is not an idempotent")
        self.modules: Dict[str, FpModule] = {}
        self.embeddings: Dict[str, list] = {}
        for a, g in zip(self.names, self.generators):
            mod, basis = idempotent_module(R, g)
            mod.label = a
            self.modules[a] = mod
            self.embeddings[a] = basis
        self.bases: Dict[tuple, List[Matrix]] = {}
        for a in self.names:
            for b in self.names:
                if _hom_bases is not None:
                    self.bases[(a, b)] = _hom_bases[(a, b)]
                else:
                    self.bases[(a, b)] = module_hom_space(self.modules[a], self.modules[b])
        self._solvers = {}
        dims = {(a, b): {0: len(v)} for (a, b), v in self.bases.items() if v}
        comps = {}
        for a in self.names:
            for b in self.names:
                for c in self.names:
                    table = {}
                    for i, g in enumerate(self.bases[(b, c)]):
                        for j, f in enumerate(self.bases[(a, b)]):
                            v = self._coords(a, c, g @ f)
                            ent = [(k, x) for k, x in enumerate(v) if x]
                            if ent:
                                table[(i, j)] = ent
                    if table:
                        comps[(a, b, c, 0, 0)] = table
        units = {a: list(self._coords(a, a, Matrix.identity(F, self.modules[a].dim))) for a in self.names}
        self.cat = DgCategory(F, self.names + ["0"], dims, {}, comps, units, zero="0")
        self.closure = AdditiveClosure(self.cat)

    @property
    def field(self):
        return self.algebra.field

    def _coords(self, a, b, phi: Matrix) -> tuple:
        key = (a, b)
        solver = self._solvers.get(key)
        basis = self.bases[key]
        if solver is None:
            cols = [tuple(x for row in m.rows for x in row) for m in basis]
            n = self.modules[a].dim * self.modules[b].dim
            solver = LinearSolver(Matrix.from_columns(self.field, cols, n))
            self._solvers[key] = solver
        flat = tuple(x for row in phi.rows for x in row)
        if not basis:
            if any(flat):
                raise ContractError(f"matrix is not a module map {a} → {b}")
            return ()
        v = solver.solve(flat)
        if v is None:
            raise ContractError(f"matrix is not a module map {a} → {b}")
        return v

    # objects of the additive closure are tuples of generator names

    def module(self, S) -> FpModule:
        S = tuple(S)
        if len(S) == 1:
            return self.modules[S[0]]
        return FpModule.direct_sum(self.algebra, [self.modules[a] for a in S])

    def map_matrix(self, S, T, v) -> Matrix:
        """Module map module(S) → module(T) of a degree-0 morphism of the closure."""
        C = self.closure
        S, T = tuple(S), tuple(T)
        F = self.field
        ms = [self.modules[a].dim for a in S]
        mt = [self.modules[b].dim for b in T]
        rows = [[F.zero] * sum(ms) for _ in range(sum(mt))]
        for r, b in enumerate(T):
            for c, a in enumerate(S):
                blk = C.block(S, T, 0, v, r, c)
                M = Matrix.zeros(F, mt[r], ms[c])
                for x, B in zip(blk, self.bases[(a, b)]):
                    if x:
                        M = M + B.scale(x)
                ro, co = sum(mt[:r]), sum(ms[:c])
                for i in range(mt[r]):
                    for j in range(ms[c]):
                        rows[ro + i][co + j] = M.rows[i][j]
        return Matrix(F, sum(mt), sum(ms), rows)

    def coords(self, S, T, phi: Matrix) -> tuple:
        """Inverse of map_matrix; raises if phi is not a module map."""
        C = self.closure
        S, T = tuple(S), tuple(T)
        ms = [self.modules[a].dim for a in S]
        mt = [self.modules[b].dim for b in T]
        blocks = {}
        for r, b in enumerate(T):
            for c, a in enumerate(S):
                ro, co = sum(mt[:r]), sum(ms[:c])
                sub = phi.submatrix(range(ro, ro + mt[r]), range(co, co + ms[c]))
                blocks[(r, c)] = self._coords(a, b, sub)
        return C.from_blocks(S, T, 0, blocks)

    def generator_index(self, name) -> int:
        """Index of the algebra idempotent equal to the generator ``name``."""
        g = self.generators[self.names.index(name)]
        for i, e in enumerate(self.algebra.idempotents):
            if e == g:
                return i
        raise UnsupportedInput(f"generator {name} is not one of the primitive idempotents")

    def opposite(self) -> "ProjCategory":
        """Proj(R^op) on the same idempotents, with bases transported so that
        its category equals ``cat.opposite()`` on the nose."""
        R = self.algebra
        Rop = R.opposite()
        F = self.field
        mods = {}
        for a, g in zip(self.names, self.generators):
            mods[a] = idempotent_module(Rop, g)
        bases = {}
        for a in self.names:
            for b in self.names:
                # hom^op(b, a) = hom(a, b); phi: e_aR → e_bR is left multiplication by r = phi(e_a)
                ga = self.generators[self.names.index(a)]
                Pa_basis = self.embeddings[a]
                Pb_basis = self.embeddings[b]
                ea = LinearSolver(Matrix.from_columns(F, Pa_basis, R.dim)).solve(ga)
                out = []
                modb, bbasis = mods[b]
                moda, abasis = mods[a]
                asolver = LinearSolver(Matrix.from_columns(F, abasis, R.dim)) if abasis else None
                for phi in self.bases[(a, b)]:
                    img = phi.apply(ea)
                    r = tuple(sum((c * v[k] for c, v in zip(img, Pb_basis)), F.zero) for k in range(R.dim))
                    # in R^op: x ↦ r *op x = x r, from e_bR^op to e_aR^op
                    cols = [asolver.solve(R.mul(x, r)) for x in bbasis]
                    out.append(Matrix.from_columns(F, cols, len(abasis)))
                bases[(b, a)] = out
        op = ProjCategory(Rop, self.generators, self.names, _hom_bases=bases)
        if op.cat != self.cat.opposite():
            raise StructuralError("transported opposite presentation does not match the opposite category")
        return op


def proj_category(R: AlgebraPresentation, generators=None, names=None) -> ProjCategory:
    return ProjCategory(R, generators, names)


def projective_cover(pc: ProjCategory, M: FpModule):
    """(S, epi): S a tuple of generator names, epi: module(S) → M surjective.

    One copy of e_aR per basis vector of the top (M / M·rad)·e_a.
    """
    R = pc.algebra
    F = pc.field
    if M.dim == 0:
        return (), Matrix.zeros(F, 0, 0)
    radimg = []
    for r in R.radical:
        A = M.rho(r)
        radimg.extend(A.columns())
    S = []
    cols = []
    chosen = []
    for a in pc.names:
        e = R.idempotents[pc.generator_index(a)]
        E = M.rho(e)
        base = [E.apply(w) for w in radimg]
        for v in E.columns():
            span = [x for x in base + chosen if not is_zero_vec(x)]
            if is_zero_vec(v):
                continue
            if span and LinearSolver(Matrix.from_columns(F, span, M.dim)).solve(v) is not None:
                continue
            chosen.append(v)
            S.append(a)
            for b in pc.embeddings[a]:
                cols.append(M.rho(b).apply(v))
    epi = Matrix.from_columns(F, cols, M.dim)
    if epi.rank() != M.dim:
        raise UnsupportedInput("generators do not cover the module (incomplete idempotent set)")
    P = pc.module(tuple(S))
    if not is_module_map(P, M, epi):
        raise ContractError("projective cover map is not a module map")
    return tuple(S), epi


def kernel_module(P: FpModule, phi: Matrix):
    return P.submodule(phi.nullspace())


def projective_resolution(pc: ProjCategory, M: FpModule, depth: int):
    """Cover-by-cover resolution R_0 ← R_1 ← ... of M.

    Returns (objects, diffs, pi, complete): ``diffs[k]`` is the module map
    R_k → R_{k−1} (k ≥ 1), ``pi`` the cover R_0 → M and ``complete`` whether
    the last kernel vanished within ``depth`` terms.
    """
    objs, diffs = [], [None]
    S, pi = projective_cover(pc, M)
    objs.append(S)
    K, inc = kernel_module(pc.module(S), pi)
    complete = K.dim == 0
    while not complete and len(objs) < depth:
        S1, pi1 = projective_cover(pc, K)
        diffs.append(inc @ pi1)
        objs.append(S1)
        K, inc = kernel_module(pc.module(S1), pi1)
        complete = K.dim == 0
    return objs, diffs, pi, complete


def is_projective_module(pc: ProjCategory, M: FpModule) -> bool:
    S, epi = projective_cover(pc, M)
    return pc.module(S).dim == M.dim


# ---------------------------------------------------------------------------
# standard algebras


def field_algebra(F=QQ) -> AlgebraPresentation:
    return AlgebraPresentation(F, 1, [[[1]]], [1], [[1]], [], names=["P"], basis_names=["1"])


def a2_algebra(F=QQ) -> AlgebraPresentation:
    """Upper-triangular 2×2 matrices, basis e11, e12, e22."""
    z = [0, 0, 0]
    st = [[z[:] for _ in range(3)] for _ in range(3)]
    st[0][0] = [1, 0, 0]     # e11 e11
    st[0][1] = [0, 1, 0]     # e11 e12
    st[1][2] = [0, 1, 0]     # e12 e22
    st[2][2] = [0, 0, 1]     # e22 e22
    return AlgebraPresentation(F, 3, st, [1, 0, 1], [[1, 0, 0], [0, 0, 1]], [[0, 1, 0]],
                               names=["P1", "P2"], basis_names=["e11", "e12", "e22"])


def dual_numbers_algebra(F=QQ) -> AlgebraPresentation:
    """k[x]/(x²), basis 1, x."""
    st = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    return AlgebraPresentation(F, 2, st, [1, 0], [[1, 0]], [[0, 1]], names=["R"], basis_names=["1", "x"])
