import random

import pytest

from qhorrocks.exactla import DEFAULT_PRIME, PrimeField, RationalField
from qhorrocks.bipoly import parse_biform
from qhorrocks.linecoh import FormMatrix
from qhorrocks.presheaf import KerPresentation
from qhorrocks.stability import ShapeMismatch, jumping_determinants, le_potier_check

F = PrimeField(DEFAULT_PRIME)


def gm(src, dst, rows_text, field=F):
    rows = []
    for i, row in enumerate(rows_text):
        r = []
        for j, cell in enumerate(row):
            want = (dst[i][0] - src[j][0], dst[i][1] - src[j][1])
            r.append(parse_biform(field, cell, want))
        rows.append(r)
    return FormMatrix.make(field, tuple(src), tuple(dst), rows)


SRC = [(0, 1), (0, 1), (1, 0), (1, 0)]
DST = [(1, 1), (1, 1)]


def lepotier():
    return KerPresentation(gm(SRC, DST, [["s", "t", "u", "v"], ["0-t", "s-2*t", "v", "0"]]))


def split_sum():
    return KerPresentation(gm(SRC, DST, [["s", "t", "0", "0"], ["0", "0", "u", "v"]]))


def family_member():
    return KerPresentation(gm(SRC, DST, [["s", "t", "u", "v"], ["0-t", "s-t", "v", "0"]]))


def test_lepotier_is_stable():
    rep = le_potier_check(lepotier())
    assert (rep.h0, rep.h0_right, rep.h0_left) == (0, 0, 0)
    assert rep.stable


def test_split_sum_is_not_stable():
    rep = le_potier_check(split_sum())
    assert rep.h0 == 0
    assert rep.h0_right == 1  # section of E(1,-1) from the O(-1,1) summand
    assert not rep.stable


def test_rank_guard():
    p = KerPresentation(gm([(-1, 0), (-1, 0)], [(0, 0)], [["s", "t"]]))
    with pytest.raises(ShapeMismatch):
        le_potier_check(p)


def test_lepotier_determinants():
    d1, d2 = jumping_determinants(lepotier())
    # det of [[s, t], [-t, s-2t]] is s^2 - 2 s t + t^2 = (s - t)^2
    assert str(d1.form) in ("s^2 - 2*s*t + t^2", "s^2 + 32001*s*t + t^2")
    assert d1.has_repeated_root
    assert d1.roots == [((1, 1), 2)]
    # det of [[u, v], [v, 0]] is -v^2
    assert d2.has_repeated_root
    assert d2.roots == [((1, 0), 2)]


def test_family_member_determinants():
    d1, d2 = jumping_determinants(family_member())
    # s^2 - s t + t^2 has discriminant -3, nonzero in the field
    assert not d1.has_repeated_root
    assert d2.has_repeated_root


def test_determinant_scaling_invariance():
    rng = random.Random(3)
    base = lepotier()
    d1, d2 = jumping_determinants(base)
    # conjugate by constant row/column operations: scale a column and swap rows
    rows = [["0-t", "s-2*t", "v", "0"], ["s", "t", "u", "v"]]
    swapped = KerPresentation(gm(SRC, DST, rows))
    e1, e2 = jumping_determinants(swapped)
    assert e1.has_repeated_root == d1.has_repeated_root
    assert e2.has_repeated_root == d2.has_repeated_root
    assert e1.roots == d1.roots


def test_split_sum_determinants_vanish():
    # the degenerate blocks of the split bundle have zero determinant, the
    # determinant-level witness of instability
    d1, d2 = jumping_determinants(split_sum())
    assert d1.is_zero and d2.is_zero


def test_diagonal_block_determinant():
    # diagonal blocks multiply out: det [[s,0],[0,t]] = s*t with two simple roots
    p = KerPresentation(
        gm(SRC, DST, [["s", "0", "u", "0"], ["0", "t", "0", "v"]]), verify=False
    )
    d1, d2 = jumping_determinants(p)
    assert str(d1.form) == "s*t"
    assert sorted(d1.roots) == [((0, 1), 1), ((1, 0), 1)]
    assert not d1.has_repeated_root and not d2.has_repeated_root


def test_zero_block_flagged():
    p = KerPresentation(
        gm(SRC, DST, [["s", "t", "u", "v"], ["0", "0", "v", "u"]]), verify=False
    )
    d1, d2 = jumping_determinants(p)
    assert d1.is_zero and d1.has_repeated_root


def test_rational_field_repeated_root_detection():
    q = RationalField()
    g = gm(SRC, DST, [["s", "t", "u", "v"], ["0-t", "s-2*t", "v", "0"]], field=q)
    p = KerPresentation(g, verify=False)
    d1, d2 = jumping_determinants(p)
    assert d1.has_repeated_root and d2.has_repeated_root
    assert d1.roots == [((1, 1), 2)]


def test_stability_report_carries_determinants():
    rep = le_potier_check(lepotier())
    assert rep.det_st is not None and rep.det_uv is not None
    assert rep.det_st.has_repeated_root and rep.det_uv.has_repeated_root


def test_summand_permutation_leaves_report_invariant():
    # permute the middle-term summands (swap the two u,v columns and the two
    # s,t columns): section counts and root structure must not move
    base = le_potier_check(lepotier())
    permuted = KerPresentation(
        gm(SRC, DST, [["t", "s", "v", "u"], ["s-2*t", "0-t", "0", "v"]])
    )
    rep = le_potier_check(permuted)
    assert (rep.h0, rep.h0_right, rep.h0_left) == (base.h0, base.h0_right, base.h0_left)
    assert rep.stable == base.stable
    assert rep.det_st.has_repeated_root == base.det_st.has_repeated_root
    assert sorted(rep.det_st.roots) == sorted(base.det_st.roots)
