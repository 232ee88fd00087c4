import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sftkit import (
    Block,
    BudgetError,
    CubeSet,
    DEFAULT_CAPS,
    OrderTag,
    ShapeError,
    block_allowed,
    enumerate_allowed_cubes,
    level0_matrices,
    literal_vert_pairs,
    normalize_to_cubes,
    order_key,
    otimes,
    step_literal,
    transpose,
)
from sftkit.matrices import _colwise_pos, _rowwise_pos
from sftkit.normalize import iter_cubes


def test_order_key_2x2():
    b = Block((2, 2), (0, 1, 2, 3))  # a b / c d
    assert order_key(b, OrderTag.rowwise(2)) == (0, 1, 2, 3)
    assert order_key(b, OrderTag.colwise()) == (0, 2, 1, 3)


@given(st.integers(1, 4), st.integers(1, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_order_key_colwise_is_rowwise_of_transpose(rows, cols, data):
    cells = tuple(data.draw(st.integers(0, 2)) for _ in range(rows * cols))
    b = Block((rows, cols), cells)
    assert order_key(b, OrderTag.colwise()) == order_key(transpose(b), OrderTag.rowwise(2))


def test_otimes_annihilation():
    p = [[0, 0], [0, 0]]
    m = [[1] * 4 for _ in range(4)]
    assert otimes(p, m) == (0,) * 16


def test_otimes_identity_times_ones():
    p = [[1, 0], [0, 1]]
    m = [[1] * 4 for _ in range(4)]
    assert otimes(p, m) == (1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1)


def test_otimes_shape_errors():
    with pytest.raises(ShapeError):
        otimes([[1, 0]], [[1]])
    with pytest.raises(ShapeError):
        otimes([[1, 0], [0, 1]], [[1] * 3 for _ in range(3)])


def test_index_equation_corner_values():
    k = 2
    r = lambda a, b, g, d: a * k**3 + b * k**2 + g * k + d - (k**3 + k**2 + k)
    assert r(1, 1, 1, 1) == 1
    assert r(2, 2, 2, 2) == 16


def test_otimes_index_equation():
    # entry r (1-based) must equal p[a][b] * block(a,b)[g][d] for the unique
    # base-k digits of r
    rng = random.Random(1)
    for k in (2, 3):
        p = [[rng.randrange(2) for _ in range(k)] for _ in range(k)]
        m = [[rng.randrange(2) for _ in range(k * k)] for _ in range(k * k)]
        row = otimes(p, m)
        assert len(row) == k**4
        for a, b, g, d in itertools.product(range(1, k + 1), repeat=4):
            r = a * k**3 + b * k**2 + g * k + d - (k**3 + k**2 + k)
            want = p[a - 1][b - 1] * m[(a - 1) * k + (g - 1)][(b - 1) * k + (d - 1)]
            assert row[r - 1] == want


def _index_and_cubes(spec):
    cubes = normalize_to_cubes(spec)
    return enumerate_allowed_cubes(spec, cubes), cubes


def test_level0_full_shift(full_shift):
    index, cubes = _index_and_cubes(full_shift)
    lvl = level0_matrices(index, cubes)
    assert lvl.vert.shape == (2, 2) and lvl.vert.ones_count() == 4
    assert lvl.horiz.shape == (4, 4) and lvl.horiz.ones_count() == 16
    from sftkit import literal_horiz_pairs

    pairs = literal_horiz_pairs(lvl)
    assert len(pairs) == 16
    assert all(a.shape == (2, 1) and b.shape == (2, 1) for a, b in pairs)


def test_level0_hard_squares_reduced_index(hard_squares):
    index, cubes = _index_and_cubes(hard_squares)
    lvl = level0_matrices(index, cubes)
    assert lvl.vert.ones_count() == 41
    assert lvl.horiz.ones_count() == 1234


def test_level0_hard_squares_literal_index(hard_squares):
    cubes = normalize_to_cubes(hard_squares)
    lvl = level0_matrices(tuple(iter_cubes(hard_squares, 2)), cubes)
    assert lvl.vert.shape == (16, 16)
    assert lvl.vert.ones_count() == 41
    assert lvl.horiz.ones_count() == 1234


def test_zero_row_law(hard_squares):
    cubes = normalize_to_cubes(hard_squares)
    letters = tuple(iter_cubes(hard_squares, 2))
    lvl = level0_matrices(letters, cubes)
    row_has_one = {r for r, _ in lvl.vert.ones}
    for i, blk in enumerate(letters):
        if not block_allowed(blk, cubes):
            assert i not in row_has_one
    for r, c in lvl.vert.ones:
        assert block_allowed(letters[r], cubes)
        assert block_allowed(letters[c], cubes)


def test_step_literal_full_shift_all_ones(full_shift):
    index, cubes = _index_and_cubes(full_shift)
    lvl = level0_matrices(index, cubes)
    nxt = step_literal(lvl, DEFAULT_CAPS.but(max_work=10**6))
    assert nxt.vert.shape == (16, 16)
    assert nxt.vert.ones_count() == 256  # all-ones: every stack of 2x2s is fine
    assert nxt.horiz.shape == (256, 256)
    assert nxt.horiz.ones_count() == 256 * 256


def test_step_literal_zero_when_no_squares():
    # only the cube 01/10 is allowed; it cannot sit on top of itself, so
    # there are no allowed 2l-squares and the next matrix is zero
    keep = (0, 1, 1, 0)
    cubes = CubeSet(
        2,
        frozenset(
            Block((2, 2), d) for d in itertools.product(range(2), repeat=4) if d != keep
        ),
        2,
    )
    lvl = level0_matrices((Block((2, 2), keep),), cubes)
    assert lvl.vert.is_zero() and lvl.horiz.is_zero()
    nxt = step_literal(lvl)
    assert nxt.vert.is_zero()
    # the same conclusion holds over the full 16-cube index
    full = level0_matrices(tuple(iter_cubes_like(cubes)), cubes)
    assert full.vert.is_zero() and full.horiz.is_zero()
    nxt_full = step_literal(full, DEFAULT_CAPS.but(max_index=16**4), compute_h=False)
    assert nxt_full.vert.is_zero()


def iter_cubes_like(cubes):
    for data in itertools.product(range(cubes.alphabet_size), repeat=cubes.side**2):
        yield Block((cubes.side, cubes.side), data)


def test_step_literal_budget_advises_reduced(hard_squares):
    cubes = normalize_to_cubes(hard_squares)
    lvl = level0_matrices(tuple(iter_cubes(hard_squares, 2)), cubes)
    with pytest.raises(BudgetError) as exc:
        step_literal(lvl)  # 16^4 = 65536 > default cap
    assert "reduced" in str(exc.value)


def test_step_literal_rows_match_otimes_and_rescan(checkerboard):
    # dual route: sparse rows == otimes expansion == direct block rescans
    index, cubes = _index_and_cubes(checkerboard)
    lvl = level0_matrices(index, cubes)
    k = len(lvl.letters)
    nxt = step_literal(lvl, DEFAULT_CAPS.but(max_work=10**6))

    # dense horizontal matrix in pair order
    h = [[0] * (k * k) for _ in range(k * k)]
    for (a, b), (c, d) in lvl.pair_ones:
        h[a * k + b][c * k + d] = 1

    ones = nxt.vert.ones
    for q in itertools.product(range(k), repeat=4):
        i, j, r, s = q
        allowed_q = ((i, r), (j, s)) in lvl.pair_ones
        block_r = [[h[r * k + u][s * k + v] for v in range(k)] for u in range(k)]
        row = otimes(block_r, h) if allowed_q else (0,) * k**4
        for p in itertools.product(range(k), repeat=4):
            got = (_colwise_pos(k, q), _colwise_pos(k, p)) in ones
            assert got == bool(row[_rowwise_pos(k, p)])
            # independent recomputation: the stacked pair must rescan clean
            qa = _assemble_square(lvl.letters, q)
            pa = _assemble_square(lvl.letters, p)
            stacked = Block((8, 4), qa.data + pa.data)
            assert got == block_allowed(stacked, cubes)


def _assemble_square(letters, q):
    from sftkit import assemble

    i, j, r, s = q
    return assemble([[letters[i], letters[j]], [letters[r], letters[s]]])


def test_reorder_round_trip(hard_squares):
    index, cubes = _index_and_cubes(hard_squares)
    lvl = level0_matrices(index, cubes)
    m = lvl.vert
    there = m.reorder(OrderTag.colwise(), OrderTag.colwise())
    back = there.reorder(OrderTag.rowwise(2), OrderTag.rowwise(2))
    assert back.row_blocks == m.row_blocks
    assert back.col_blocks == m.col_blocks
    assert back.ones == m.ones


def test_literal_vert_pairs_are_allowed_stacks(checkerboard):
    index, cubes = _index_and_cubes(checkerboard)
    lvl = level0_matrices(index, cubes)
    nxt = step_literal(lvl, DEFAULT_CAPS.but(max_work=10**6), compute_h=False)
    for top, bottom in literal_vert_pairs(nxt):
        assert block_allowed(Block((8, 4), top.data + bottom.data), cubes)
