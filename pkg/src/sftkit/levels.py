"""Reduced doubling pipeline over allowed squares, plus analysis/report glue.

A level holds the set of allowed squares of side 2^n*l (sorted canonically),
the vertical relation (pairs whose 2:1 stack is allowed), and the horizontal
relation (pairs of stacks whose side-by-side square is allowed). Level 0 is
built from exhaustive window scans; from level 1 on, everything reduces to
set lookups:

* a stack A-over-B is allowed iff A, B and the half-overlapping middle
  square (bottom half of A on top half of B) are allowed;
* a side-by-side square of two stacks is allowed iff both stacks and the
  seam-straddling middle stack are.

Both reductions are exact because a forbidden cube spans at most half of a
level-(n>=1) side, so every cube window lies inside one of the aligned
half-step windows those lookups certify.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

from .caps import DEFAULT_CAPS, Caps
from .core import (
    Block,
    CubeSet,
    SftSpec,
    allowed_data,
    assemble,
    block_allowed,
)
from .errors import BudgetError, EmptyStateError, SpecError
from .matrices import LiteralLevel, level0_matrices, step_literal
from .normalize import (
    MODE_ALL,
    build_report,
    enumerate_allowed_cubes,
    normalize_to_cubes,
)


@dataclass(frozen=True)
class LevelState:
    """Allowed squares of one level and their compatibility relations.

    Relations are stored positionally against the sorted `squares` tuple:
    `vrel` holds (upper, lower) index pairs; `hrel` holds (a, b, c, d)
    meaning stack a-over-b is horizontally compatible with stack c-over-d.
    Either may be None when a level was built only far enough to count its
    squares.
    """

    level: int
    side: int
    squares: tuple[Block, ...]
    vrel: frozenset[tuple[int, int]] | None
    hrel: frozenset[tuple[int, int, int, int]] | None

    def square_index(self) -> dict[tuple[int, ...], int]:
        return {b.data: i for i, b in enumerate(self.squares)}

    def vrel_blocks(self) -> Iterator[tuple[Block, Block]]:
        if self.vrel is None:
            raise SpecError("vertical relation not computed for this level")
        for a, b in self.vrel:
            yield self.squares[a], self.squares[b]

    def rect_count(self) -> int | None:
        return None if self.vrel is None else len(self.vrel)


def level0_state(allowed_cubes: Sequence[Block], cubes: CubeSet, caps: Caps = DEFAULT_CAPS) -> LevelState:
    """Base level: allowed cubes with full-scan relations."""
    squares = tuple(allowed_cubes)
    k = len(squares)
    side = cubes.side
    if k * k > caps.max_work:
        raise BudgetError(
            f"base vertical relation needs {k * k} scans (cap {caps.max_work})",
            required=k * k,
        )
    vshape = (2 * side, side)
    vrel = frozenset(
        (i, j)
        for i in range(k)
        for j in range(k)
        if allowed_data(squares[i].data + squares[j].data, vshape, cubes)
    )
    if len(vrel) ** 2 > caps.max_work:
        raise BudgetError(
            f"base horizontal relation needs {len(vrel) ** 2} scans (cap {caps.max_work})",
            required=len(vrel) ** 2,
        )
    rows_of = {
        (i, j): tuple(squares[i].data[r * side : (r + 1) * side] for r in range(side))
        + tuple(squares[j].data[r * side : (r + 1) * side] for r in range(side))
        for (i, j) in vrel
    }
    sshape = (2 * side, 2 * side)
    hrel = set()
    for (a, b), left in rows_of.items():
        for (c, d), right in rows_of.items():
            data = tuple(itertools.chain.from_iterable(lr + rr for lr, rr in zip(left, right)))
            if allowed_data(data, sshape, cubes):
                hrel.add((a, b, c, d))
    return LevelState(0, side, squares, vrel, frozenset(hrel))


def _seam_square(a: Block, c: Block, side: int, half: int) -> tuple[int, ...]:
    # right half of `a` glued to left half of `c`, row by row
    return tuple(
        itertools.chain.from_iterable(
            a.data[r * side + half : (r + 1) * side] + c.data[r * side : r * side + half]
            for r in range(side)
        )
    )


def with_relations(
    state: LevelState, caps: Caps = DEFAULT_CAPS, need_hrel: bool = True
) -> LevelState:
    """Fill vrel (and, unless `need_hrel` is off, hrel) of a level >= 1
    state by middle-window lookups."""
    if state.vrel is not None and (state.hrel is not None or not need_hrel):
        return state
    if state.level == 0:
        raise SpecError("level-0 relations come from level0_state")
    squares = state.squares
    n = len(squares)
    side = state.side
    half = side // 2
    index = state.square_index()
    cells = side * side

    if state.vrel is not None:
        vrel = set(state.vrel)
    else:
        if n * n > caps.max_work:
            raise BudgetError(
                f"vertical relation needs {n * n} pair checks (cap {caps.max_work})",
                required=n * n,
            )
        vrel = set()
        for a in range(n):
            top = squares[a].data[cells // 2 :]
            for b in range(n):
                # middle square: bottom half of a over top half of b
                if top + squares[b].data[: cells // 2] in index:
                    vrel.add((a, b))
    if not need_hrel:
        return replace(state, vrel=frozenset(vrel))

    if len(vrel) ** 2 > caps.max_work:
        raise BudgetError(
            f"horizontal relation needs {len(vrel) ** 2} pair checks (cap {caps.max_work})",
            required=len(vrel) ** 2,
        )
    vrel_f = frozenset(vrel)
    hrel = set()
    seam_cache: dict[tuple[int, int], int] = {}

    def seam_pos(x: int, y: int) -> int:
        key = (x, y)
        got = seam_cache.get(key)
        if got is None:
            got = index.get(_seam_square(squares[x], squares[y], side, half), -1)
            seam_cache[key] = got
        return got

    for (a, b) in vrel_f:
        for (c, d) in vrel_f:
            mt = seam_pos(a, c)
            if mt < 0:
                continue
            mb = seam_pos(b, d)
            if mb < 0:
                continue
            if (mt, mb) in vrel_f:
                hrel.add((a, b, c, d))
    return replace(state, vrel=vrel_f, hrel=frozenset(hrel))


def reduced_step(state: LevelState, caps: Caps = DEFAULT_CAPS) -> LevelState:
    """Assemble the next level's squares from the horizontal relation.

    Each horizontal one (a, b, c, d) contributes exactly the square with
    quadrants a c / b d; distinct ones give distinct squares. The result
    carries no relations yet (they are only needed to step again).
    """
    if state.hrel is None:
        if state.level == 0:
            raise SpecError("level-0 relations come from level0_state")
        state = with_relations(state, caps)
    assert state.hrel is not None
    if len(state.hrel) > caps.max_blocks:
        raise BudgetError(
            f"next level would hold {len(state.hrel)} squares (cap {caps.max_blocks})",
            required=len(state.hrel),
            partial=len(state.hrel),
        )
    squares = state.squares
    side = state.side
    shape = (2 * side, 2 * side)
    rows = range(2 * side)
    datas = []
    for (a, b, c, d) in state.hrel:
        left = squares[a].data + squares[b].data  # stacked columns are contiguous
        right = squares[c].data + squares[d].data
        datas.append(
            tuple(
                itertools.chain.from_iterable(
                    left[r * side : (r + 1) * side] + right[r * side : (r + 1) * side]
                    for r in rows
                )
            )
        )
    datas.sort()
    return LevelState(state.level + 1, 2 * side, tuple(Block(shape, d) for d in datas), None, None)


def nine_window_admissible(q: Block, prev: LevelState) -> bool:
    """Direct form of the admission rule for a doubled square: all aligned
    half-step windows must be allowed squares of the previous level.
    Equivalent to membership of (a,b,c,d) in the previous hrel; kept as an
    independently checkable predicate."""
    side = prev.side
    half = side // 2
    members = {b.data for b in prev.squares}
    for ro in (0, half, side):
        for co in (0, half, side):
            win = tuple(
                itertools.chain.from_iterable(
                    q.data[(ro + r) * 2 * side + co : (ro + r) * 2 * side + co + side]
                    for r in range(side)
                )
            )
            if win not in members:
                return False
    return True


# ---------------------------------------------------------------------------
# analysis


@dataclass(frozen=True)
class LevelRow:
    level: int
    stage: str
    block_count: int
    relation_count: int | None


@dataclass(frozen=True)
class LevelReport:
    mode: str
    side: int
    cube_count: int
    allowed_count: int
    rows: tuple[LevelRow, ...]
    verdict: str
    reason: str | None = None

    def exit_code(self) -> int:
        if self.verdict == "empty":
            return 2
        if self.verdict == "inconclusive":
            return 3
        return 0


@dataclass(frozen=True)
class AnalysisResult:
    spec: SftSpec
    cubes: CubeSet
    index: tuple[Block, ...]
    levels: tuple[LevelState, ...]
    report: LevelReport


def _verdict_rows_reduced(levels: Sequence[LevelState]) -> list[LevelRow]:
    rows = []
    for st in levels:
        rows.append(
            LevelRow(st.level, "squares", len(st.squares), None if st.vrel is None else len(st.vrel))
        )
        if st.vrel is not None:
            rows.append(
                LevelRow(st.level, "rects", len(st.vrel), None if st.hrel is None else len(st.hrel))
            )
    return rows


def analyze(
    spec: SftSpec,
    levels: int,
    mode: str = "reduced",
    caps: Caps = DEFAULT_CAPS,
) -> AnalysisResult:
    """Run normalization and the doubling pipeline up to the level budget.

    The verdict is "empty" as soon as some computed square set is empty
    (sound: every configuration contains allowed squares of every side),
    "nonempty-to-level-N" when squares of side 2^N*l exist, and
    "inconclusive" when a budget stop intervened. No finite level ever
    certifies unconditional nonemptiness.
    """
    if levels < 0:
        raise SpecError("level budget must be >= 0")
    if mode not in ("reduced", "literal"):
        raise SpecError(f"unknown engine mode {mode!r}")
    if mode == "literal" and spec.dimension != 2:
        raise SpecError("literal mode is 2-dimensional only; use reduced")
    cubes = normalize_to_cubes(spec, MODE_ALL, caps)
    index = enumerate_allowed_cubes(spec, cubes, caps)
    norm = build_report(spec, cubes, len(index))
    if spec.dimension != 2:
        from .chain import chain_report  # local import to avoid a cycle

        return chain_report(spec, cubes, index, norm, levels, caps)
    if mode == "literal":
        return _analyze_literal(spec, cubes, index, norm, levels, caps)
    return _analyze_reduced(spec, cubes, index, norm, levels, caps)


def _analyze_reduced(spec, cubes, index, norm, levels, caps) -> AnalysisResult:
    states: list[LevelState] = []
    reason = None
    verdict = None
    try:
        st = level0_state(index, cubes, caps)
        states.append(st)
        while st.level < levels and st.squares:
            if st.vrel is None or st.hrel is None:
                st = with_relations(st, caps)
                states[-1] = st
            nxt = reduced_step(st, caps)
            states.append(nxt)
            st = nxt
    except BudgetError as e:
        verdict = "inconclusive"
        reason = str(e)
    if verdict is None:
        if any(not s.squares for s in states):
            verdict = "empty"
        else:
            verdict = f"nonempty-to-level-{states[-1].level}"
    else:
        if any(not s.squares for s in states):
            verdict = "empty"
            reason = None
    rows = _verdict_rows_reduced(states)
    report = LevelReport(
        "reduced", norm.side, norm.cube_count, norm.allowed_count, tuple(rows), verdict, reason
    )
    return AnalysisResult(spec, cubes, index, tuple(states), report)


def _analyze_literal(spec, cubes, index, norm, levels, caps) -> AnalysisResult:
    rows: list[LevelRow] = []
    reason = None
    verdict = None
    lits: list[LiteralLevel] = []
    empty_seen = not index
    try:
        if levels >= 1 and index:
            lit = level0_matrices(index, cubes, caps)
            lits.append(lit)
            rows.append(LevelRow(0, "vert", len(lit.vert.row_blocks), lit.vert.ones_count()))
            rows.append(LevelRow(0, "horiz", len(lit.horiz.row_blocks), lit.horiz.ones_count()))
            while lit.level + 2 <= levels and not lit.zero():
                lit = step_literal(lit, caps)
                lits.append(lit)
                rows.append(
                    LevelRow(lit.level, "vert", len(lit.vert.row_blocks), lit.vert.ones_count())
                )
                rows.append(
                    LevelRow(lit.level, "horiz", len(lit.horiz.row_blocks), lit.horiz.ones_count())
                )
            empty_seen = empty_seen or any(l.zero() for l in lits)
    except BudgetError as e:
        verdict = "inconclusive"
        reason = str(e)
    if empty_seen:
        verdict = "empty"
        reason = None
    elif verdict is None:
        reached = lits[-1].level + 1 if lits else 0
        verdict = f"nonempty-to-level-{min(levels, reached) if levels else 0}"
    report = LevelReport(
        "literal", norm.side, norm.cube_count, norm.allowed_count, tuple(rows), verdict, reason
    )
    # literal analysis keeps no reduced level states
    return AnalysisResult(spec, cubes, index, (), report)


# ---------------------------------------------------------------------------
# witnesses and patches


@dataclass(frozen=True)
class WitnessResult:
    block: Block | None
    nodes: int
    reason: str | None


def witness_search(
    spec: SftSpec,
    level: int,
    caps: Caps = DEFAULT_CAPS,
) -> WitnessResult:
    """Try to build one allowed square of side 2^level * l by recursive
    2x2 assembly with backtracking over allowed sub-squares.

    Absence is not an emptiness proof: the search is budgeted and
    incomplete. Any returned block has passed a full window rescan.
    """
    cubes = normalize_to_cubes(spec, MODE_ALL, caps)
    base = enumerate_allowed_cubes(spec, cubes, caps)
    if not base:
        return WitnessResult(None, 0, "no allowed cubes: the space is empty")
    budget = caps.witness_nodes
    spent = 0

    class _Out(Exception):
        pass

    def spend():
        nonlocal spent
        spent += 1
        if spent > budget:
            raise _Out()

    grid_shape = (2,) * spec.dimension
    corners = 2**spec.dimension

    def pair_ok(left: Block, cand: Block) -> bool:
        # last-axis neighbours share a seam worth checking before recursing
        spend()
        if spec.dimension == 1:
            return block_allowed(assemble([left, cand]), cubes)
        if spec.dimension == 2:
            return block_allowed(assemble([[left, cand]]), cubes)
        return True  # higher dimensions rely on the final full check

    def candidates(lv: int):
        if lv == 0:
            yield from base
            return

        def place(i: int, chosen: list[Block]):
            if i == corners:
                q = assemble(_nest(chosen, grid_shape))
                spend()
                if block_allowed(q, cubes):
                    yield q
                return
            for cand in candidates(lv - 1):
                if i % 2 == 1 and not pair_ok(chosen[i - 1], cand):
                    continue
                chosen.append(cand)
                yield from place(i + 1, chosen)
                chosen.pop()

        yield from place(0, [])

    try:
        for blk in candidates(level):
            return WitnessResult(blk, spent, None)
    except _Out:
        return WitnessResult(None, spent, f"node budget {budget} exhausted")
    return WitnessResult(None, spent, "search space exhausted without a witness")


def _nest(flat: Sequence[Block], gshape: tuple[int, ...]):
    if len(gshape) == 1:
        return list(flat)
    sub = len(flat) // gshape[0]
    return [_nest(flat[i * sub : (i + 1) * sub], gshape[1:]) for i in range(gshape[0])]


def sample_patch(state: LevelState, seed: int) -> Block:
    """Deterministic uniform draw from a level's square set.

    The draw is a central patch of some convergent sequence of larger and
    larger blocks; an individual allowed square need not extend to a full
    configuration, so this is a patch, not a certificate.
    """
    if not state.squares:
        raise EmptyStateError(f"level {state.level} has no allowed squares")
    rng = random.Random(seed)
    return state.squares[rng.randrange(len(state.squares))]
