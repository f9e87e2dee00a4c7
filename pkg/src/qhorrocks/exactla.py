"""Exact dense linear algebra over a prime field or the rationals.

Every computation in the package bottoms out here: ranks, kernel bases,
linear solves and quotient projections of dense matrices.  Two scalar
backends share one elimination code path: residues mod a prime p stored in
int64 numpy arrays (vectorised row operations), and arbitrary-precision
`fractions.Fraction` stored in object arrays.  Pivoting is deterministic
(first nonzero entry), so every basis produced anywhere downstream is
reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_PRIME = 32003


class NoSolution(Exception):
    """Raised when a right-hand side is not in the column space."""


class FieldMismatch(TypeError):
    """Raised when values from two different fields are combined."""


class PrimeField:
    """The field F_p for an (assumed) prime p, elements stored as ints in [0, p)."""

    def __init__(self, p: int = DEFAULT_PRIME):
        if p < 2:
            raise ValueError(f"not a usable prime: {p}")
        self.p = p

    @property
    def name(self) -> str:
        return f"p={self.p}"

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def array(self, data) -> np.ndarray:
        a = np.array(data, dtype=np.int64)
        return np.mod(a, self.p)

    def reduce(self, a: np.ndarray) -> np.ndarray:
        return np.mod(a, self.p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # entries < p ~ 2**15 and inner dims stay far below 2**30, so int64 is safe
        return np.mod(a @ b, self.p)

    def inv(self, x) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(x, -1, self.p)

    def neg(self, x):
        return (-int(x)) % self.p

    def scalar(self, x) -> int:
        if isinstance(x, str):
            x = x.strip()
            if "/" in x:
                num, den = x.split("/")
                return int(num) * self.inv(int(den) % self.p) % self.p
            x = int(x)
        if isinstance(x, Fraction):
            return int(x.numerator) * self.inv(int(x.denominator)) % self.p
        return int(x) % self.p

    def random_scalar(self, rng) -> int:
        return rng.randrange(self.p)

    def format_scalar(self, x) -> str:
        # balanced representative: -1 reads better than p - 1
        x = int(x) % self.p
        return str(x - self.p if x > self.p // 2 else x)


class RationalField:
    """The rationals, elements stored as `fractions.Fraction` in object arrays."""

    p = None

    @property
    def name(self) -> str:
        return "rationals"

    def __repr__(self):
        return "RationalField()"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        a = np.empty((rows, cols), dtype=object)
        a[:] = Fraction(0)
        return a

    def array(self, data) -> np.ndarray:
        a = np.empty(np.shape(data), dtype=object)
        flat = a.reshape(-1)
        src = np.array(data, dtype=object).reshape(-1)
        for k in range(flat.shape[0]):
            flat[k] = Fraction(src[k])
        return a

    def reduce(self, a: np.ndarray) -> np.ndarray:
        return a

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return a @ b

    def inv(self, x) -> Fraction:
        if x == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(x)

    def neg(self, x):
        return -Fraction(x)

    def scalar(self, x) -> Fraction:
        if isinstance(x, str):
            return Fraction(x.strip())
        return Fraction(x)

    def random_scalar(self, rng) -> Fraction:
        return Fraction(rng.randrange(-20, 21))

    def format_scalar(self, x) -> str:
        return str(Fraction(x))


def get_field(spec) -> PrimeField | RationalField:
    """Build a field from an int, 'rationals'/'q', or 'p=<prime>' text."""
    if isinstance(spec, (PrimeField, RationalField)):
        return spec
    if isinstance(spec, int):
        return PrimeField(spec)
    s = str(spec).strip().lower()
    if s in ("q", "qq", "rationals", "rational"):
        return RationalField()
    if s.startswith("p="):
        s = s[2:]
    return PrimeField(int(s))


@dataclass(frozen=True, eq=False)
class Matrix:
    """A dense matrix over a fixed field.  Immutable; all ops return new values."""

    field: PrimeField | RationalField
    a: np.ndarray  # 2-D, row-major

    def __post_init__(self):
        if self.a.ndim != 2:
            raise ValueError("matrix storage must be 2-D")

    # -- constructors -------------------------------------------------
    @staticmethod
    def make(field, rows) -> "Matrix":
        data = [[field.scalar(x) for x in row] for row in rows]
        if not data:
            return Matrix(field, field.zeros(0, 0))
        return Matrix(field, field.array(data))

    @staticmethod
    def zeros(field, rows: int, cols: int) -> "Matrix":
        return Matrix(field, field.zeros(rows, cols))

    @staticmethod
    def identity(field, n: int) -> "Matrix":
        a = field.zeros(n, n)
        one = field.scalar(1)
        for i in range(n):
            a[i, i] = one
        return Matrix(field, a)

    @staticmethod
    def from_columns(field, cols, rows_dim: int | None = None) -> "Matrix":
        cols = list(cols)
        if not cols:
            return Matrix(field, field.zeros(rows_dim or 0, 0))
        a = field.zeros(len(cols[0]), len(cols))
        for j, c in enumerate(cols):
            a[:, j] = c
        return Matrix(field, a)

    # -- shape --------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def col(self, j: int) -> np.ndarray:
        return self.a[:, j].copy()

    def columns(self):
        for j in range(self.cols):
            yield self.a[:, j].copy()

    def is_zero(self) -> bool:
        return not np.any(self.a != 0)

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            self._check(other)
            return Matrix(self.field, self.field.matmul(self.a, other.a))
        v = np.asarray(other).reshape(-1, 1)
        return self.field.matmul(self.a, v)[:, 0]

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, self.field.reduce(self.a + other.a))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, self.field.reduce(self.a - other.a))

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, self.field.reduce(-self.a))

    def scale(self, c) -> "Matrix":
        return Matrix(self.field, self.field.reduce(self.a * self.field.scalar(c)))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.a.T.copy())

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.a.shape == other.a.shape
            and bool(np.all(self.a == other.a))
        )

    def __repr__(self):
        return f"Matrix({self.field.name}, {self.rows}x{self.cols})"

    # -- elimination kernels -------------------------------------------
    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form and pivot columns; first-nonzero pivoting."""
        r, pivots = _rref(self.field, self.a)
        return Matrix(self.field, r), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> list[np.ndarray]:
        """Basis of the right kernel, one vector per non-pivot column."""
        r, pivots = _rref(self.field, self.a)
        field = self.field
        pivset = set(pivots)
        free = [j for j in range(self.cols) if j not in pivset]
        out = []
        one = field.scalar(1)
        for f in free:
            v = field.zeros(self.cols, 1)[:, 0]
            v[f] = one
            for i, pc in enumerate(pivots):
                v[pc] = field.neg(r[i, f])
            out.append(v)
        return out

    def kernel_matrix(self) -> "Matrix":
        return Matrix.from_columns(self.field, self.kernel_basis(), rows_dim=self.cols)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """One exact solution of self @ x = rhs, free variables set to zero."""
        sol = self.solve_matrix(Matrix.from_columns(self.field, [np.asarray(rhs)], rows_dim=self.rows))
        return sol.a[:, 0]

    def solve_matrix(self, rhs: "Matrix") -> "Matrix":
        """Solve self @ X = rhs column-wise; raises NoSolution if any column fails."""
        self._check(rhs)
        if rhs.rows != self.rows:
            raise ValueError("rhs row count mismatch")
        aug = hstack([self, rhs])
        r, pivots = _rref(self.field, aug.a)
        n = self.cols
        x = self.field.zeros(n, rhs.cols)
        for i, pc in enumerate(pivots):
            if pc >= n:
                raise NoSolution("rhs outside column space")
            x[pc, :] = r[i, n:]
        return Matrix(self.field, x)

    def column_space_basis(self) -> "Matrix":
        """Canonical basis of the column span (rref of the transpose, as columns)."""
        r, pivots = _rref(self.field, self.a.T.copy())
        cols = [r[i, :] for i in range(len(pivots))]
        return Matrix.from_columns(self.field, cols, rows_dim=self.rows)


def _rref(field, a: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    a = a.copy()
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        nz = np.nonzero(a[r:, c] != 0)[0]
        if nz.shape[0] == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i], :] = a[[i, r], :]
        inv = field.inv(a[r, c])
        a[r, :] = field.reduce(a[r, :] * inv)
        col = a[:, c].copy()
        col[r] = 0 * col[r]
        a -= np.outer(col, a[r, :])
        a = field.reduce(a)
        pivots.append(c)
        r += 1
    return a, tuple(pivots)


def hstack(mats: list[Matrix]) -> Matrix:
    mats = list(mats)
    return Matrix(mats[0].field, np.concatenate([m.a for m in mats], axis=1))


def vstack(mats: list[Matrix]) -> Matrix:
    mats = list(mats)
    return Matrix(mats[0].field, np.concatenate([m.a for m in mats], axis=0))


def quotient_data(field, ambient_dim: int, subspace: list[np.ndarray]) -> tuple[Matrix, Matrix]:
    """Coset data for ambient / span(subspace).

    Returns (reps, proj): `reps` has one column per coset basis vector (they are
    standard basis vectors at the non-pivot coordinates of the subspace rref),
    and `proj` is the surjection ambient -> quotient with kernel exactly the
    span.  By construction proj @ reps is the identity.
    """
    vecs = [np.asarray(v) for v in subspace if np.any(np.asarray(v) != 0)]
    if not vecs:
        return Matrix.identity(field, ambient_dim), Matrix.identity(field, ambient_dim)
    rows = field.zeros(len(vecs), ambient_dim)
    for i, v in enumerate(vecs):
        rows[i, :] = v
    r, pivots = _rref(field, rows)
    pivset = set(pivots)
    free = [j for j in range(ambient_dim) if j not in pivset]
    q = len(free)
    proj = field.zeros(q, ambient_dim)
    one = field.scalar(1)
    for i, f in enumerate(free):
        proj[i, f] = one
        for k, pc in enumerate(pivots):
            proj[i, pc] = field.neg(r[k, f])
    reps = field.zeros(ambient_dim, q)
    for i, f in enumerate(free):
        reps[f, i] = one
    return Matrix(field, reps), Matrix(field, proj)


def span_basis(field, vectors, ambient_dim: int) -> Matrix:
    """Canonical basis (rref rows, as columns) of the span of the given vectors."""
    vecs = [np.asarray(v) for v in vectors]
    vecs = [v for v in vecs if np.any(v != 0)]
    if not vecs:
        return Matrix.zeros(field, ambient_dim, 0)
    rows = field.zeros(len(vecs), ambient_dim)
    for i, v in enumerate(vecs):
        rows[i, :] = v
    r, pivots = _rref(field, rows)
    return Matrix.from_columns(field, [r[i, :] for i in range(len(pivots))], rows_dim=ambient_dim)


def preimage_basis(m: Matrix, target_span: Matrix) -> Matrix:
    """Basis of {x : m @ x lies in the column span of target_span}."""
    stacked = hstack([m, -target_span]) if target_span.cols else m
    kern = stacked.kernel_basis()
    parts = [v[: m.cols] for v in kern]
    return span_basis(m.field, parts, m.cols)


def subspace_equal(a: Matrix, b: Matrix) -> bool:
    """Whether two column-span subspaces of the same ambient space coincide."""
    if a.rows != b.rows:
        return False
    sa = span_basis(a.field, list(a.columns()), a.rows)
    sb = span_basis(b.field, list(b.columns()), b.rows)
    return sa == sb


def subspace_contains(a: Matrix, vectors) -> bool:
    """Whether every given vector lies in the column span of `a`."""
    try:
        a.solve_matrix(Matrix.from_columns(a.field, [np.asarray(v) for v in vectors], rows_dim=a.rows))
        return True
    except NoSolution:
        return False


def random_matrix(field, rng, rows: int, cols: int) -> Matrix:
    a = field.zeros(rows, cols)
    for i in range(rows):
        for j in range(cols):
            a[i, j] = field.random_scalar(rng)
    return Matrix(field, a)
