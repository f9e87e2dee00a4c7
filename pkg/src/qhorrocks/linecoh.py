"""Cohomology of split bundles on the quadric via the Kunneth formula.

On P1 with coordinates s, t the cohomology of O(p) has a canonical monomial
model: H0 is spanned by s^i t^j with i, j >= 0 and i + j = p, while H1 is
spanned by the "negative cone" monomials with i, j <= -1 and i + j = p.
Multiplication by a form adds exponents and truncates anything that leaves
the cone.  Tensoring two copies gives every H^i of O(a, b) on P1 x P1 an
explicit finite monomial basis:

    H0: all four exponents >= 0
    H1: s,t exponents >= 0 and u,v exponents <= -1, or the mirror image
    H2: all four exponents <= -1

All higher machinery reduces its cohomology questions to matrices of this
multiplication action, so no Cech complex appears anywhere in the package.

A twist (a, b) denotes the line bundle O(a, b).  The two spinor line bundles
are O(1, 0) and O(0, 1); O(d) means O(d, d).  The ACM twists, those with no
intermediate cohomology in any diagonal twist, are exactly |a - b| <= 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .exactla import Matrix
from .bipoly import BiForm, deg_add, deg_sub

Twist = tuple[int, int]
SplitBundle = tuple[Twist, ...]

SIGMA1: Twist = (1, 0)
SIGMA2: Twist = (0, 1)


class MalformedMatrix(ValueError):
    """Raised when a form matrix entry does not fit its twist slot."""


class Undecided(RuntimeError):
    """Raised when window widening cannot settle sheaf surjectivity."""


def is_acm_twist(t: Twist) -> bool:
    return abs(t[0] - t[1]) <= 1


def is_free_twist(t: Twist) -> bool:
    return t[0] == t[1]


def spinor_kind(t: Twist) -> int | None:
    """1 for twists of O(1,0), 2 for twists of O(0,1), None otherwise."""
    gap = t[0] - t[1]
    if gap == 1:
        return 1
    if gap == -1:
        return 2
    return None


def twist_sum(ts: SplitBundle) -> Twist:
    a = sum(t[0] for t in ts)
    b = sum(t[1] for t in ts)
    return (a, b)


def euler_char(s: SplitBundle) -> int:
    """chi of a direct sum of line bundles; (a+1)(b+1) per summand."""
    return sum((a + 1) * (b + 1) for a, b in s)


def _h01(p: int) -> int:
    return max(p + 1, 0)


def _h11(p: int) -> int:
    return max(-p - 1, 0)


def kunneth_dim(i: int, t: Twist) -> int:
    a, b = t
    if i == 0:
        return _h01(a) * _h01(b)
    if i == 1:
        return _h01(a) * _h11(b) + _h11(a) * _h01(b)
    if i == 2:
        return _h11(a) * _h11(b)
    return 0


@dataclass(frozen=True)
class CohBasis:
    """Ordered monomial basis of H^i(O(twist)); monomials are (ps, pt, pu, pv)."""

    i: int
    twist: Twist
    monomials: tuple[tuple[int, int, int, int], ...]

    @property
    def dim(self) -> int:
        return len(self.monomials)


@lru_cache(maxsize=None)
def coh_basis(i: int, t: Twist) -> CohBasis:
    a, b = t
    monos: list[tuple[int, int, int, int]] = []
    if i == 0:
        monos = [(ps, a - ps, pu, b - pu) for ps in range(a, -1, -1) for pu in range(b, -1, -1)]
        if a < 0 or b < 0:
            monos = []
    elif i == 1:
        if a >= 0 and b <= -2:
            monos += [(ps, a - ps, pu, b - pu) for ps in range(a, -1, -1) for pu in range(-1, b, -1)]
        if a <= -2 and b >= 0:
            monos += [(ps, a - ps, pu, b - pu) for ps in range(-1, a, -1) for pu in range(b, -1, -1)]
    elif i == 2:
        if a <= -2 and b <= -2:
            monos = [(ps, a - ps, pu, b - pu) for ps in range(-1, a, -1) for pu in range(-1, b, -1)]
    basis = CohBasis(i, t, tuple(monos))
    assert basis.dim == kunneth_dim(i, t)
    return basis


@lru_cache(maxsize=None)
def _coh_index(i: int, t: Twist) -> dict[tuple[int, int, int, int], int]:
    return {m: k for k, m in enumerate(coh_basis(i, t).monomials)}


def _in_cone(i: int, m: tuple[int, int, int, int]) -> bool:
    ps, pt, pu, pv = m
    if i == 0:
        return ps >= 0 and pt >= 0 and pu >= 0 and pv >= 0
    if i == 1:
        return (ps >= 0 and pt >= 0 and pu <= -1 and pv <= -1) or (ps <= -1 and pt <= -1 and pu >= 0 and pv >= 0)
    return ps <= -1 and pt <= -1 and pu <= -1 and pv <= -1


@lru_cache(maxsize=None)
def _coh_action_cached(f: BiForm, i: int, t: Twist) -> Matrix:
    field = f.field
    src = coh_basis(i, t)
    dst_twist = deg_add(t, f.deg)
    dst_idx = _coh_index(i, dst_twist)
    (fa, fb) = f.deg
    m = field.zeros(kunneth_dim(i, dst_twist), src.dim)
    for col, (ps, pt, pu, pv) in enumerate(src.monomials):
        for (fi, fj), c in f.coeffs:
            tgt = (ps + fi, pt + fa - fi, pu + fj, pv + fb - fj)
            k = dst_idx.get(tgt)
            if k is not None:
                m[k, col] = field.scalar(m[k, col] + c)
    out = Matrix(field, m)
    out.a.setflags(write=False)
    return out


def coh_action(f: BiForm, i: int, t: Twist) -> Matrix:
    """Matrix of cup product with f: H^i(O(t)) -> H^i(O(t + deg f)).

    Monomials multiply by adding exponents; products leaving the cone drop to
    zero.  Functorial: coh_action(f*g) = coh_action(f) o coh_action(g).
    """
    return _coh_action_cached(f, i, t)


@dataclass(frozen=True)
class FormMatrix:
    """A matrix of forms between split bundles, entry (i, j): O(src_j) -> O(dst_i).

    Entry bidegrees are forced to dst_i - src_j; slots where that has a
    negative component must hold the zero form.  Construction validates all
    of this up front so malformed matrices fail early.
    """

    field: object
    src: SplitBundle
    dst: SplitBundle
    entries: tuple[tuple[BiForm, ...], ...]  # [dst index][src index]

    def __post_init__(self):
        if len(self.entries) != len(self.dst):
            raise MalformedMatrix("row count != number of target summands")
        for i, row in enumerate(self.entries):
            if len(row) != len(self.src):
                raise MalformedMatrix("column count != number of source summands")
            for j, f in enumerate(row):
                want = deg_sub(self.dst[i], self.src[j])
                if f.deg != want:
                    raise MalformedMatrix(f"entry ({i},{j}) has bidegree {f.deg}, slot needs {want}")
                if not f.is_zero() and (want[0] < 0 or want[1] < 0):
                    raise MalformedMatrix(f"entry ({i},{j}) must be zero for twist gap {want}")

    @staticmethod
    def make(field, src: SplitBundle, dst: SplitBundle, rows) -> "FormMatrix":
        out = []
        for i, row in enumerate(rows):
            r = []
            for j, f in enumerate(row):
                want = deg_sub(dst[i], src[j])
                if isinstance(f, BiForm):
                    r.append(f)
                elif f == 0:
                    r.append(BiForm.zero(field, want))
                else:
                    raise MalformedMatrix(f"entry ({i},{j}) is not a form")
            out.append(tuple(r))
        return FormMatrix(field, tuple(src), tuple(dst), tuple(out))

    @staticmethod
    def zero(field, src: SplitBundle, dst: SplitBundle) -> "FormMatrix":
        rows = [[BiForm.zero(field, deg_sub(d, s)) for s in src] for d in dst]
        return FormMatrix(field, tuple(src), tuple(dst), tuple(tuple(r) for r in rows))

    @staticmethod
    def identity(field, s: SplitBundle) -> "FormMatrix":
        rows = []
        for i in range(len(s)):
            row = []
            for j in range(len(s)):
                want = deg_sub(s[i], s[j])
                if i == j:
                    row.append(BiForm.constant(field, 1))
                else:
                    row.append(BiForm.zero(field, want))
            rows.append(tuple(row))
        return FormMatrix(field, tuple(s), tuple(s), tuple(rows))

    @property
    def rows(self) -> int:
        return len(self.dst)

    @property
    def cols(self) -> int:
        return len(self.src)

    def entry(self, i: int, j: int) -> BiForm:
        return self.entries[i][j]

    def compose(self, other: "FormMatrix") -> "FormMatrix":
        """self o other, defined when other.dst == self.src."""
        if other.dst != self.src:
            raise MalformedMatrix("composition twist mismatch")
        rows = []
        for i in range(self.rows):
            row = []
            for k in range(other.cols):
                acc = BiForm.zero(self.field, deg_sub(self.dst[i], other.src[k]))
                for j in range(self.cols):
                    acc = acc + self.entries[i][j] * other.entries[j][k]
                row.append(acc)
            rows.append(tuple(row))
        return FormMatrix(self.field, other.src, self.dst, tuple(rows))

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        rows = tuple(
            tuple(self.entries[i][j] + other.entries[i][j] for j in range(self.cols)) for i in range(self.rows)
        )
        return FormMatrix(self.field, self.src, self.dst, rows)

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        rows = tuple(
            tuple(self.entries[i][j] - other.entries[i][j] for j in range(self.cols)) for i in range(self.rows)
        )
        return FormMatrix(self.field, self.src, self.dst, rows)

    def is_zero(self) -> bool:
        return all(f.is_zero() for row in self.entries for f in row)

    def twist(self, e: Twist) -> "FormMatrix":
        src = tuple(deg_add(s, e) for s in self.src)
        dst = tuple(deg_add(d, e) for d in self.dst)
        return FormMatrix(self.field, src, dst, self.entries)

    def dual(self) -> "FormMatrix":
        """Transpose with negated twists: O(-dst) -> O(-src)."""
        src = tuple((-a, -b) for a, b in self.dst)
        dst = tuple((-a, -b) for a, b in self.src)
        rows = tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols))
        return FormMatrix(self.field, src, dst, rows)

    def select_columns(self, idx) -> "FormMatrix":
        src = tuple(self.src[j] for j in idx)
        rows = tuple(tuple(self.entries[i][j] for j in idx) for i in range(self.rows))
        return FormMatrix(self.field, src, self.dst, rows)

    def select_rows(self, idx) -> "FormMatrix":
        dst = tuple(self.dst[i] for i in idx)
        rows = tuple(self.entries[i] for i in idx)
        return FormMatrix(self.field, self.src, dst, rows)

    def evaluate(self, s, t, u, v) -> Matrix:
        vals = [[f.evaluate(s, t, u, v) for f in row] for row in self.entries]
        if not vals or not vals[0]:
            return Matrix.zeros(self.field, self.rows, self.cols)
        return Matrix.make(self.field, vals)

    def __repr__(self):
        return f"FormMatrix({list(self.src)} -> {list(self.dst)})"


def form_hstack(blocks: list[FormMatrix]) -> FormMatrix:
    field, dst = blocks[0].field, blocks[0].dst
    src = tuple(t for b in blocks for t in b.src)
    rows = tuple(tuple(f for b in blocks for f in b.entries[i]) for i in range(len(dst)))
    return FormMatrix(field, src, dst, rows)


def form_vstack(blocks: list[FormMatrix]) -> FormMatrix:
    field, src = blocks[0].field, blocks[0].src
    dst = tuple(t for b in blocks for t in b.dst)
    rows = tuple(row for b in blocks for row in b.entries)
    return FormMatrix(field, src, dst, rows)


def form_blockdiag(blocks: list[FormMatrix], field=None) -> FormMatrix:
    field = field if field is not None else blocks[0].field
    src = tuple(t for b in blocks for t in b.src)
    dst = tuple(t for b in blocks for t in b.dst)
    out = FormMatrix.zero(field, src, dst)
    rows = [list(r) for r in out.entries]
    i0 = j0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                rows[i0 + i][j0 + j] = b.entries[i][j]
        i0 += b.rows
        j0 += b.cols
    return FormMatrix(field, src, dst, tuple(tuple(r) for r in rows))


def split_dims(i: int, s: SplitBundle, e: Twist) -> list[int]:
    """Per-summand H^i dimensions of the bundle twisted by e."""
    return [kunneth_dim(i, deg_add(t, e)) for t in s]


def split_dim(i: int, s: SplitBundle, e: Twist) -> int:
    return sum(split_dims(i, s, e))


def split_h(i: int, s: SplitBundle, e: Twist) -> list[CohBasis]:
    """Concatenated summand bases of H^i of the shifted split bundle."""
    return [coh_basis(i, deg_add(t, e)) for t in s]


def induced_h(m: FormMatrix, i: int, e: Twist) -> Matrix:
    """Block matrix of H^i(src(e)) -> H^i(dst(e)) induced by a form matrix."""
    field = m.field
    rd = split_dims(i, m.dst, e)
    cd = split_dims(i, m.src, e)
    out = field.zeros(sum(rd), sum(cd))
    r0 = 0
    for bi in range(m.rows):
        c0 = 0
        for bj in range(m.cols):
            if rd[bi] and cd[bj]:
                block = coh_action(m.entries[bi][bj], i, deg_add(m.src[bj], e))
                out[r0 : r0 + rd[bi], c0 : c0 + cd[bj]] = block.a
            c0 += cd[bj]
        r0 += rd[bi]
    return Matrix(field, out)


def h0_mult_on_split(s: SplitBundle, f: BiForm, e: Twist) -> Matrix:
    """Multiplication by f on H0 of a shifted split bundle, summand by summand."""
    field = f.field
    rd = [kunneth_dim(0, deg_add(deg_add(t, e), f.deg)) for t in s]
    cd = split_dims(0, s, e)
    out = field.zeros(sum(rd), sum(cd))
    r0 = c0 = 0
    for k, t in enumerate(s):
        if rd[k] and cd[k]:
            block = coh_action(f, 0, deg_add(t, e))
            out[r0 : r0 + rd[k], c0 : c0 + cd[k]] = block.a
        r0 += rd[k]
        c0 += cd[k]
    return Matrix(field, out)


@dataclass
class SurjectivityReport:
    surjective: bool
    window: tuple[int, int]
    coker_dims: dict[Twist, int]


def sheaf_surjective(m: FormMatrix, widenings: int = 2) -> SurjectivityReport:
    """Decide surjectivity of a split-bundle map as a map of sheaves.

    The cokernel sheaf, if nonzero, has nonzero sections in every
    sufficiently positive twist, while for a surjection the section-level
    cokernel dies beyond a regularity bound.  So: scan a square window of
    shifts starting just above the largest target twist; all-zero cokernels
    mean surjective, all-nonzero mean not, and a mixed answer moves the
    window up (twice by default) before giving up.
    """
    if m.rows == 0:
        return SurjectivityReport(True, (0, 0), {})
    w = 1 + max(max(a, b) for a, b in m.dst)
    for attempt in range(widenings + 1):
        lo = w + 2 * attempt
        hi = lo + 3
        dims = {}
        for ea in range(lo, hi + 1):
            for eb in range(lo, hi + 1):
                e = (ea, eb)
                mat = induced_h(m, 0, e)
                dims[e] = mat.rows - mat.rank()
        if all(d == 0 for d in dims.values()):
            return SurjectivityReport(True, (lo, hi), dims)
        if all(d > 0 for d in dims.values()):
            return SurjectivityReport(False, (lo, hi), dims)
    raise Undecided(f"surjectivity undecided after {widenings} widenings: {dims}")
