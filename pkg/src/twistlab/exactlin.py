"""Exact linear algebra over the rationals and prime fields.

Everything above this module reduces its questions (is this map closed, is
this class zero, lift this cocycle) to row reduction here.  Pivoting is
deterministic: the leftmost column with a nonzero entry wins, and within that
column the topmost available row.  Free variables of a solve are set to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import ContractError, ShapeError


# ---------------------------------------------------------------------------
# fields


class Field:
    """A field tag plus coercion of Python numbers into canonical elements."""

    name: str

    def __call__(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def parse(self, token):
        """Parse a serialized scalar ("p/q" string or int)."""
        raise NotImplementedError

    def dump(self, x):
        """Canonical serialized form of a scalar."""
        raise NotImplementedError

    def vector(self, entries: Iterable) -> tuple:
        return tuple(self(x) for x in entries)

    def zeros(self, n: int) -> tuple:
        z = self.zero
        return (z,) * n

    def __repr__(self):
        return self.name


class RationalField(Field):
    name = "Q"
    characteristic = 0

    def __call__(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, str):
            return Fraction(x)
        return Fraction(x)

    def parse(self, token):
        if isinstance(token, bool) or not isinstance(token, (str, int)):
            raise ValueError(f"rational entry must be a 'p/q' string or an integer, got {token!r}")
        return Fraction(token)

    def dump(self, x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")


QQ = RationalField()


class ModP:
    """An element of F_p.  Concrete subclasses fix the class attribute ``p``."""

    __slots__ = ("v",)
    p = 2

    def __init__(self, v):
        if isinstance(v, ModP):
            v = v.v
        elif isinstance(v, Fraction):
            if v.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            v = v.numerator * pow(v.denominator, -1, self.p)
        self.v = int(v) % self.p

    def _co(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise TypeError("mixing elements of different prime fields")
            return other.v
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return type(self)(self.v + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return type(self)(self.v - o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return type(self)(o - self.v)

    def __mul__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return type(self)(self.v * o)

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(-self.v)

    def __pos__(self):
        return self

    def inverse(self):
        if self.v == 0:
            raise ZeroDivisionError("inverse of zero in a prime field")
        return type(self)(pow(self.v, -1, self.p))

    def __truediv__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return self * type(self)(o).inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return type(self)(o) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return type(self)(pow(self.v, e, self.p))

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return (other - self.v) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.v))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return str(self.v)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


class PrimeField(Field):
    def __init__(self, p: int):
        if not isinstance(p, int) or not _is_prime(p) or p >= 2**31:
            raise ValueError(f"{p!r} is not a prime below 2^31")
        self.p = p
        self.characteristic = p
        self.name = f"Fp:{p}"
        self.element = type(f"GF{p}", (ModP,), {"__slots__": (), "p": p})

    def __call__(self, x):
        if isinstance(x, self.element):
            return x
        return self.element(x)

    def parse(self, token):
        if isinstance(token, bool) or not isinstance(token, int):
            raise ValueError(f"F_{self.p} entry must be an integer, got {token!r}")
        return self.element(token)

    def dump(self, x):
        return int(self(x))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    """The prime field F_p (instances are cached, so ``GF(p) is GF(p)``)."""
    return PrimeField(p)


def field_from_tag(tag: str) -> Field:
    """Parse a field header: ``"Q"`` or ``"Fp:<p>"``."""
    if tag == "Q":
        return QQ
    if isinstance(tag, str) and tag.startswith("Fp:"):
        try:
            p = int(tag[3:])
        except ValueError:
            raise ValueError(f"bad field tag {tag!r}") from None
        return GF(p)
    raise ValueError(f"bad field tag {tag!r}")


# ---------------------------------------------------------------------------
# vectors


def vec_add(u: Sequence, v: Sequence) -> tuple:
    if len(u) != len(v):
        raise ShapeError(f"vector lengths differ: {len(u)} vs {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> tuple:
    if len(u) != len(v):
        raise ShapeError(f"vector lengths differ: {len(u)} vs {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def vec_neg(v: Sequence) -> tuple:
    return tuple(-a for a in v)


def is_zero_vec(v: Sequence) -> bool:
    return not any(v)


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense immutable matrix over an exact field."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, nrows: int, ncols: int, rows=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            z = field.zero
            rows = tuple((z,) * ncols for _ in range(nrows))
        else:
            rows = tuple(tuple(field(x) for x in r) for r in rows)
            if len(rows) != nrows or any(len(r) != ncols for r in rows):
                raise ShapeError(f"entry grid does not have shape {nrows}x{ncols}")
        self.rows = rows

    # constructors
    @classmethod
    def from_rows(cls, field: Field, rows, ncols: Optional[int] = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(field, len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, field: Field, cols, nrows: int) -> "Matrix":
        cols = [list(c) for c in cols]
        for c in cols:
            if len(c) != nrows:
                raise ShapeError("column of wrong length")
        rows = [[c[i] for c in cols] for i in range(nrows)]
        return cls(field, nrows, len(cols), rows)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, nrows, ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        one, zero = field.one, field.zero
        return cls(field, n, n, [[one if i == j else zero for j in range(n)] for i in range(n)])

    # basic access
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.ncols)]

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: [{body}])"

    def tolist(self) -> list:
        return [list(r) for r in self.rows]

    # arithmetic
    def _check_same(self, other):
        if self.shape != other.shape:
            raise ShapeError(f"shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        return Matrix(self.field, self.nrows, self.ncols,
                      [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check_same(other)
        return Matrix(self.field, self.nrows, self.ncols,
                      [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return Matrix(self.field, self.nrows, self.ncols, [[-a for a in r] for r in self.rows])

    def scale(self, c):
        c = self.field(c)
        return Matrix(self.field, self.nrows, self.ncols, [[c * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            zero = self.field.zero
            out = []
            for r in self.rows:
                nz = [(k, a) for k, a in enumerate(r) if a]
                out.append([sum((a * c[k] for k, a in nz), zero) for c in cols])
            return Matrix(self.field, self.nrows, other.ncols, out)
        return self.apply(other)

    def apply(self, v: Sequence) -> tuple:
        """Matrix times column vector."""
        if len(v) != self.ncols:
            raise ShapeError(f"vector of length {len(v)} does not fit {self.shape}")
        zero = self.field.zero
        nz = [(k, a) for k, a in enumerate(v) if a]
        return tuple(sum((r[k] * a for k, a in nz), zero) for r in self.rows)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.ncols, self.nrows, [self.column(j) for j in range(self.ncols)])

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ShapeError("hstack needs equal row counts")
        return Matrix(self.field, self.nrows, self.ncols + other.ncols,
                      [r + s for r, s in zip(self.rows, other.rows)])

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ShapeError("vstack needs equal column counts")
        return Matrix(self.field, self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.field, len(rows), len(cols), [[self.rows[i][j] for j in cols] for i in rows])

    # reduction
    def rref(self):
        """Reduced row echelon form and the tuple of pivot columns."""
        R, pivots, _ = _rref(self.rows, self.ncols, self.field, track=False)
        return Matrix(self.field, self.nrows, self.ncols, R), tuple(pivots)

    def rank(self) -> int:
        return len(_rref(self.rows, self.ncols, self.field, track=False)[1])

    def nullspace(self) -> list:
        """Basis of the kernel, one vector per free column (free entry 1)."""
        R, pivots, _ = _rref(self.rows, self.ncols, self.field, track=False)
        return _nullspace_from_rref(R, pivots, self.ncols, self.field)

    def inverse(self) -> Optional["Matrix"]:
        if self.nrows != self.ncols:
            raise ShapeError("only square matrices have inverses")
        n = self.nrows
        R, pivots, T = _rref(self.rows, n, self.field, track=True)
        if len(pivots) < n:
            return None
        return Matrix(self.field, n, n, T)


def _rref(rows, ncols, F, track=False):
    A = [list(r) for r in rows]
    m = len(A)
    T = None
    if track:
        one, zero = F.one, F.zero
        T = [[one if i == j else zero for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            A[r], A[piv] = A[piv], A[r]
            if track:
                T[r], T[piv] = T[piv], T[r]
        inv = F.one / A[r][c]
        if inv != 1:
            A[r] = [x * inv for x in A[r]]
            if track:
                T[r] = [x * inv for x in T[r]]
        prow = A[r]
        pnz = [k for k in range(c, ncols) if prow[k]]
        if track:
            trow = T[r]
            tnz = [k for k in range(m) if trow[k]]
        for i in range(m):
            if i != r:
                f = A[i][c]
                if f:
                    row = A[i]
                    for k in pnz:
                        row[k] = row[k] - f * prow[k]
                    if track:
                        trow_i = T[i]
                        for k in tnz:
                            trow_i[k] = trow_i[k] - f * trow[k]
        pivots.append(c)
        r += 1
    return A, pivots, T


def _nullspace_from_rref(R, pivots, ncols, F):
    pivset = set(pivots)
    basis = []
    zero, one = F.zero, F.one
    for fcol in range(ncols):
        if fcol in pivset:
            continue
        v = [zero] * ncols
        v[fcol] = one
        for k, pc in enumerate(pivots):
            v[pc] = -R[k][fcol]
        basis.append(tuple(v))
    return basis


class LinearSolver:
    """Row reduction of a fixed matrix, reusable for many right-hand sides.

    ``solve(b)`` returns the same vector as reducing the augmented matrix
    ``[A | b]`` would: pivot unknowns are read off, free unknowns are zero.
    """

    def __init__(self, A: Matrix):
        self.A = A
        self.field = A.field
        R, pivots, T = _rref(A.rows, A.ncols, A.field, track=True)
        self.R = R
        self.pivots = tuple(pivots)
        self.T = T
        self.rank = len(pivots)

    def solve(self, b: Sequence) -> Optional[tuple]:
        A = self.A
        if len(b) != A.nrows:
            raise ShapeError(f"right-hand side of length {len(b)} for a {A.shape} system")
        F = self.field
        zero = F.zero
        bnz = [(k, F(x)) for k, x in enumerate(b) if x]
        c = [sum((row[k] * x for k, x in bnz), zero) for row in self.T]
        for i in range(self.rank, A.nrows):
            if c[i]:
                return None
        x = [zero] * A.ncols
        for k, pc in enumerate(self.pivots):
            x[pc] = c[k]
        return tuple(x)

    def nullspace(self) -> list:
        return _nullspace_from_rref(self.R, self.pivots, self.A.ncols, self.field)


def solve_linear(A: Matrix, b: Sequence) -> Optional[tuple]:
    """One solution x of A·x = b, or None when the system is inconsistent."""
    return LinearSolver(A).solve(b)


def nullspace(A: Matrix) -> list:
    return A.nullspace()


def column_space_basis(A: Matrix) -> list:
    """Pivot columns of A (a basis of its image, in column order)."""
    _, pivots = A.rref()
    return [A.column(j) for j in pivots]


# ---------------------------------------------------------------------------
# cohomology of a composable pair


@dataclass
class Cohomology:
    """H = ker(d_out)/im(d_in) with chosen representatives.

    ``representatives`` has one column per class.  ``lift(z)`` writes a
    cocycle z as reps·coeffs + d_in·preimage.
    """

    dim: int
    representatives: Matrix
    d_in: Matrix
    d_out: Matrix
    _solver: LinearSolver = dc_field(repr=False, default=None)

    def lift(self, z: Sequence):
        F = self.d_out.field
        z = tuple(F(x) for x in z)
        if not is_zero_vec(self.d_out.apply(z)):
            raise ContractError("lift called on a vector that is not a cocycle")
        sol = self._solver.solve(z)
        if sol is None:  # cannot happen for a cocycle
            raise ContractError("cocycle outside the span of representatives and boundaries")
        return sol[: self.dim], sol[self.dim:]

    lift_map = lift

    def class_of(self, z: Sequence) -> tuple:
        return self.lift(z)[0]

    def is_coboundary(self, z: Sequence) -> bool:
        return is_zero_vec(self.class_of(z))

    def reps(self) -> list:
        return self.representatives.columns()


def cohomology_of_pair(d_in: Matrix, d_out: Matrix) -> Cohomology:
    """Cohomology at the middle of V0 --d_in--> V1 --d_out--> V2."""
    if d_out.ncols != d_in.nrows:
        raise ShapeError(f"maps of shapes {d_in.shape} and {d_out.shape} are not composable")
    F = d_in.field
    if not (d_out @ d_in).is_zero():
        raise ContractError("d_out·d_in is not zero")
    m1 = d_in.nrows
    cycles = d_out.nullspace()
    M = Matrix.from_columns(F, d_in.columns() + cycles, m1)
    _, pivots = M.rref()
    reps = [M.column(j) for j in pivots if j >= d_in.ncols]
    R = Matrix.from_columns(F, reps, m1)
    solver = LinearSolver(R.hstack(d_in))
    return Cohomology(len(reps), R, d_in, d_out, solver)


# ---------------------------------------------------------------------------
# finite cochain complexes of vector spaces


class ChainComplex:
    """A bounded cochain complex of finite-dimensional spaces.

    ``dims[n]`` is dim V^n, ``diffs[n]`` the matrix V^n → V^{n+1}.
    Degrees not present have dimension zero.
    """

    def __init__(self, field: Field, dims: dict, diffs: dict, check: bool = True):
        self.field = field
        self.dims = {n: d for n, d in dims.items() if d}
        self.diffs = {}
        for n, M in diffs.items():
            if M.shape != (self.dim(n + 1), self.dim(n)):
                raise ShapeError(f"differential in degree {n} has shape {M.shape}")
            if M.nrows and M.ncols:
                self.diffs[n] = M
        if check:
            for n in self.diffs:
                if n + 1 in self.diffs and not (self.diffs[n + 1] @ self.diffs[n]).is_zero():
                    raise ContractError(f"d∘d ≠ 0 at degree {n}")

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d(self, n: int) -> Matrix:
        M = self.diffs.get(n)
        if M is None:
            return Matrix.zeros(self.field, self.dim(n + 1), self.dim(n))
        return M

    def degrees(self) -> list:
        return sorted(self.dims)

    def cohomology(self, n: int) -> Cohomology:
        return cohomology_of_pair(self.d(n - 1), self.d(n))

    def betti(self) -> dict:
        out = {}
        for n in self.degrees():
            h = self.cohomology(n).dim
            if h:
                out[n] = h
        return out


class ChainMap:
    """Degree-preserving map of chain complexes, given per degree."""

    def __init__(self, source: ChainComplex, target: ChainComplex, mats: dict):
        self.source = source
        self.target = target
        F = source.field
        self.mats = {}
        for n in set(source.dims) | set(target.dims):
            M = mats.get(n)
            if M is None:
                M = Matrix.zeros(F, target.dim(n), source.dim(n))
            if M.shape != (target.dim(n), source.dim(n)):
                raise ShapeError(f"chain map component in degree {n} has shape {M.shape}")
            self.mats[n] = M

    def at(self, n: int) -> Matrix:
        M = self.mats.get(n)
        if M is None:
            return Matrix.zeros(self.source.field, self.target.dim(n), self.source.dim(n))
        return M

    def commutes(self) -> bool:
        for n in set(self.source.dims) | set(self.target.dims) | {k - 1 for k in self.target.dims}:
            if not (self.target.d(n) @ self.at(n) - self.at(n + 1) @ self.source.d(n)).is_zero():
                return False
        return True

    def cohomology_matrix(self, n: int) -> Matrix:
        """The induced map H^n(source) → H^n(target) in representative bases."""
        Hs = self.source.cohomology(n)
        Ht = self.target.cohomology(n)
        cols = [Ht.class_of(self.at(n).apply(z)) for z in Hs.reps()]
        return Matrix.from_columns(self.source.field, cols, Ht.dim)

    def is_quasi_isomorphism(self) -> bool:
        degs = set(self.source.dims) | set(self.target.dims)
        for n in degs:
            M = self.cohomology_matrix(n)
            if M.nrows != M.ncols or M.rank() != M.nrows:
                return False
        return True
