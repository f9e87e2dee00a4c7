"""Built-in worked examples, available to the CLI as `example:<name>`.

The gamma-form matrices below present the standard small bundles on the
quadric: the restricted cotangent bundle and its partner with both socle
subspaces full, the rank-one bundles of unbalanced twist, three bundles
that depend on moduli parameters, the rank-two bundle of the explicit
2 x 4 matrix whose block determinants both have double roots, the split
rank-two comparison case, and a member of the family with one square
block determinant squarefree.
"""

from __future__ import annotations

from .bipoly import parse_biform
from .linecoh import FormMatrix
from .presheaf import KerPresentation

_FIXTURES = {
    # kernel of the four coordinate forms: the restricted cotangent bundle
    "omega1": ([(-1, -1)] * 4, [(0, 0)], [["x0", "x1", "x2", "x3"]]),
    # both subspaces full: the twisted second exterior power
    "omega2-2": ([(-1, 0), (-1, 0), (0, -1), (0, -1)], [(0, 0)], [["s", "t", "u", "v"]]),
    # rank one, W full, V empty: the line bundle O(-2,0)
    "o-20": ([(-1, 0), (-1, 0)], [(0, 0)], [["s", "t"]]),
    # one-dimensional W: a rank-two bundle in a one-parameter family
    "case4": ([(-1, 0), (-1, -1), (-1, -1)], [(0, 0)], [["s", "x2", "x3"]]),
    # W full, V one-dimensional
    "case5": ([(-1, 0), (-1, 0), (0, -1)], [(0, 0)], [["s", "t", "u"]]),
    # W and V both one-dimensional: twisting by O(1) leaves a single section
    "case6": ([(-1, 0), (0, -1), (-1, -1)], [(0, 0)], [["s", "u", "x3"]]),
    # the explicit stable rank-two bundle with double roots in both rulings
    "lepotier": (
        [(0, 1), (0, 1), (1, 0), (1, 0)],
        [(1, 1), (1, 1)],
        [["s", "t", "u", "v"], ["0-t", "s-2*t", "v", "0"]],
    ),
    # the split comparison bundle O(-1,1) + O(1,-1)
    "split-sum": (
        [(0, 1), (0, 1), (1, 0), (1, 0)],
        [(1, 1), (1, 1)],
        [["s", "t", "0", "0"], ["0", "0", "u", "v"]],
    ),
    # a family member whose s,t block determinant is squarefree
    "null-corr-family": (
        [(0, 1), (0, 1), (1, 0), (1, 0)],
        [(1, 1), (1, 1)],
        [["s", "t", "u", "v"], ["0-t", "s-t", "v", "0"]],
    ),
}


def fixture_names() -> list[str]:
    return sorted(_FIXTURES)


def load_fixture(name: str, field) -> KerPresentation:
    if name not in _FIXTURES:
        raise KeyError(f"unknown example {name!r}; available: {', '.join(fixture_names())}")
    src, dst, rows_text = _FIXTURES[name]
    rows = []
    for i, row in enumerate(rows_text):
        r = []
        for j, cell in enumerate(row):
            want = (dst[i][0] - src[j][0], dst[i][1] - src[j][1])
            r.append(parse_biform(field, cell, want))
        rows.append(r)
    g = FormMatrix.make(field, tuple(src), tuple(dst), rows)
    return KerPresentation(g, verify=False)
