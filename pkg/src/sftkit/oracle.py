"""Ground-truth counters the engine is validated against.

`brute_force_allowed` enumerates every symbol assignment of a shape and
filters; `profile_count` is a row-sweep DP that scales to shapes the brute
force cannot reach. They cross-check each other wherever both run.
"""
from __future__ import annotations

import itertools
import multiprocessing
from dataclasses import dataclass

from .caps import DEFAULT_CAPS, Caps
from .core import Block, CubeSet, SftSpec, allowed_data, occurs_in, prod
from .errors import BudgetError, SpecError
from .normalize import MODE_ALL, normalize_to_cubes

RETAIN_CAP = 2**16


@dataclass(frozen=True)
class OracleResult:
    shape: tuple[int, ...]
    count: int
    blocks: tuple[Block, ...] | None


def _scan_range(args) -> tuple[int, list | None]:
    shape, ka, lo, hi, cube_data, side, raw_patterns = args
    cells = prod(shape)
    cubes = CubeSet(side, frozenset(Block((side,) * len(shape), d) for d in cube_data), ka)
    count = 0
    kept: list | None = []
    undersized = any(s < side for s in shape)
    for idx in range(lo, hi):
        # decode the candidate index as base-ka digits, row-major
        data = [0] * cells
        v = idx
        for pos in range(cells - 1, -1, -1):
            data[pos] = v % ka
            v //= ka
        data_t = tuple(data)
        if raw_patterns is not None:
            blk = Block(shape, data_t)
            ok = not any(occurs_in(blk, p) for p in raw_patterns)
        else:
            ok = undersized or allowed_data(data_t, shape, cubes)
        if ok:
            count += 1
            if kept is not None:
                kept.append(data_t)
                if len(kept) > RETAIN_CAP:
                    kept = None
    return count, kept


def brute_force_allowed(
    spec: SftSpec,
    shape: tuple[int, ...],
    cubes: CubeSet | None = None,
    mode: str = "cubes",
    caps: Caps = DEFAULT_CAPS,
) -> OracleResult:
    """Exact allowed-block count by exhaustive enumeration.

    `mode="cubes"` filters with the window scanner against the normalized
    cube set; `mode="patterns"` rescans against the raw forbidden patterns,
    bypassing normalization entirely (a check on the normalizer itself).
    """
    if len(shape) != spec.dimension:
        raise SpecError(f"shape {shape} does not match dimension {spec.dimension}")
    total = spec.alphabet_size ** prod(shape)
    if total > caps.oracle_candidates:
        raise BudgetError(
            f"brute force would enumerate {total} candidates "
            f"(cap {caps.oracle_candidates}); try profile_count",
            required=total,
        )
    if mode not in ("cubes", "patterns"):
        raise SpecError(f"unknown oracle mode {mode!r}")
    raw = spec.forbidden if mode == "patterns" else None
    if cubes is None and mode == "cubes":
        cubes = normalize_to_cubes(spec, MODE_ALL, caps)
    side = cubes.side if cubes is not None else 1
    cube_data = tuple(sorted(c.data for c in cubes.cubes)) if cubes is not None else ()

    workers = max(1, caps.threads)
    if workers == 1 or total < 4096:
        count, kept = _scan_range((shape, spec.alphabet_size, 0, total, cube_data, side, raw))
    else:
        bounds = [total * i // workers for i in range(workers + 1)]
        jobs = [
            (shape, spec.alphabet_size, bounds[i], bounds[i + 1], cube_data, side, raw)
            for i in range(workers)
        ]
        try:
            with multiprocessing.Pool(workers) as pool:
                parts = pool.map(_scan_range, jobs)
        except (OSError, AssertionError):
            count, kept = _scan_range((shape, spec.alphabet_size, 0, total, cube_data, side, raw))
        else:
            count = sum(c for c, _ in parts)
            kept = [] if all(k is not None for _, k in parts) and count <= RETAIN_CAP else None
            if kept is not None:
                for _, k in parts:
                    kept.extend(k)
    blocks = None
    if kept is not None and count <= RETAIN_CAP:
        blocks = tuple(Block(shape, d) for d in kept)  # enumeration order is canonical
    return OracleResult(shape, count, blocks)


def profile_count(
    spec: SftSpec,
    shape: tuple[int, int],
    cubes: CubeSet | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> int:
    """Row-sweep DP count of allowed r x s arrays (2-d only).

    The state is the last l-1 rows; appending a row checks every newly
    completed l x l window. Must agree with brute force wherever both run.
    Undersized shapes hold no cube and count k_A^(r*s).
    """
    if spec.dimension != 2:
        raise SpecError("profile counting is 2-dimensional only")
    if cubes is None:
        cubes = normalize_to_cubes(spec, MODE_ALL, caps)
    r, s = shape
    side = cubes.side
    ka = spec.alphabet_size
    if r < side or s < side:
        return ka ** (r * s)
    states = ka ** (s * (side - 1))
    if states > caps.profile_states:
        raise BudgetError(
            f"profile DP needs {states} states (cap {caps.profile_states})",
            required=states,
        )
    bad = cubes.data_set()
    rows = list(itertools.product(range(ka), repeat=s))

    def windows_ok(stack_rows) -> bool:
        # stack_rows has exactly `side` rows; slide the cube horizontally
        for c in range(s - side + 1):
            win = tuple(
                itertools.chain.from_iterable(row[c : c + side] for row in stack_rows)
            )
            if win in bad:
                return False
        return True

    # grow row by row; profiles shorter than side-1 cannot complete a window
    succ: dict[tuple, list] = {}

    def successors(profile):
        got = succ.get(profile)
        if got is None:
            got = [row for row in rows if windows_ok(profile + (row,))]
            succ[profile] = got
        return got

    counts: dict[tuple, int] = {(): 1}
    for _ in range(r):
        nxt: dict[tuple, int] = {}
        for profile, cnt in counts.items():
            nextrows = successors(profile) if len(profile) == side - 1 else rows
            for row in nextrows:
                new_profile = (profile + (row,))[-(side - 1) :] if side > 1 else ()
                nxt[new_profile] = nxt.get(new_profile, 0) + cnt
        counts = nxt
    return sum(counts.values())
