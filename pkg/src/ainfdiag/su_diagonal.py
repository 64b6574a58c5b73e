"""Step matrices, shift moves, derived matrices and the permutahedral diagonal.

A step matrix places 1..N once each along a lattice path that starts in the
top-right corner and moves left or down, so that values increase to the
right and downwards and every diagonal of the r x s grid holds exactly one
entry. Derived matrices are obtained from step matrices by admissible right
shifts (columns left to right) followed by admissible down shifts (rows top
to bottom). Reading the columns and the rows (bottom-up) of a derived matrix
gives a complementary pairing, one term of the top-cell diagonal.

Indices are 1-based throughout, matching the usual matrix notation.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Sequence,
    Tuple,
)

from .exceptions import ContractViolation, ResourceLimitError, VerificationError
from .scalars import Scalar

logger = logging.getLogger(__name__)

DEFAULT_STEP_MATRIX_CAP = 9
DEFAULT_ENUMERATION_CAP = 8

Cell = Tuple[int, int]
# positions of the values 1..N, index v - 1 holds the (row, col) of v
_State = Tuple[Cell, ...]


@dataclass(frozen=True)
class SparseIntMatrix:
    """Injective placement of the integers 1..N in a tight r x s grid.

    ``entries`` holds ``(row, col, value)`` triples in row-major order; this
    listing is also the canonical form used for hashing and ordering.
    """

    rows: int
    cols: int
    entries: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.entries))
        object.__setattr__(self, "entries", ordered)

        if self.rows < 1 or self.cols < 1:
            raise ContractViolation("matrix shape must be positive", "shape")

        seen_cells = set()
        values = []
        for row, col, value in ordered:
            if not (1 <= row <= self.rows and 1 <= col <= self.cols):
                raise ContractViolation(
                    f"position ({row}, {col}) outside {self.rows}x{self.cols}",
                    "entries",
                )
            if (row, col) in seen_cells:
                raise ContractViolation(f"cell ({row}, {col}) used twice", "entries")
            seen_cells.add((row, col))
            values.append(value)

        if sorted(values) != list(range(1, len(values) + 1)):
            raise ContractViolation(
                "entries must use every value 1..N exactly once", "entries"
            )
        if {r for r, _, _ in ordered} != set(range(1, self.rows + 1)) or {
            c for _, c, _ in ordered
        } != set(range(1, self.cols + 1)):
            raise ContractViolation("every row and column needs an entry", "entries")

    @classmethod
    def from_cells(cls, cells: Mapping[Cell, int]) -> "SparseIntMatrix":
        """Build a matrix from a cell map, dropping empty rows and columns."""
        if not cells:
            raise ContractViolation("a matrix needs at least one entry", "cells")
        row_index = {r: i for i, r in enumerate(sorted({r for r, _ in cells}), 1)}
        col_index = {c: j for j, c in enumerate(sorted({c for _, c in cells}), 1)}
        entries = tuple(
            (row_index[r], col_index[c], value) for (r, c), value in cells.items()
        )
        return cls(len(row_index), len(col_index), entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        """Build a matrix from a dense listing where 0 marks an absent cell."""
        cells = {
            (i, j): value
            for i, row in enumerate(rows, 1)
            for j, value in enumerate(row, 1)
            if value
        }
        return cls.from_cells(cells)

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @cached_property
    def cells(self) -> Dict[Cell, int]:
        return {(r, c): v for r, c, v in self.entries}

    @cached_property
    def positions(self) -> Dict[int, Cell]:
        return {v: (r, c) for r, c, v in self.entries}

    def column(self, j: int) -> List[Tuple[int, int]]:
        """Return ``(row, value)`` pairs of column ``j`` from top to bottom."""
        return sorted((r, v) for r, c, v in self.entries if c == j)

    def row(self, i: int) -> List[Tuple[int, int]]:
        """Return ``(col, value)`` pairs of row ``i`` from left to right."""
        return sorted((c, v) for r, c, v in self.entries if r == i)

    def column_values(self, j: int) -> List[int]:
        return [v for _, v in self.column(j)]

    def row_values(self, i: int) -> List[int]:
        return [v for _, v in self.row(i)]

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(
            self.cols, self.rows, tuple((c, r, v) for r, c, v in self.entries)
        )

    def to_rows(self) -> List[List[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries:
            dense[r - 1][c - 1] = v
        return dense

    def render(self) -> str:
        """Rows on lines, entries space-separated, absent cells as 0."""
        return "\n".join(" ".join(str(v) for v in row) for row in self.to_rows())

    def sort_key(self) -> Tuple[int, int, Tuple[Tuple[int, int, int], ...]]:
        return self.rows, self.cols, self.entries

    def to_json(self) -> Dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [list(e) for e in self.entries],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SparseIntMatrix":
        try:
            return cls(
                int(data["rows"]),
                int(data["cols"]),
                tuple(tuple(int(x) for x in e) for e in data["entries"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ContractViolation(f"malformed matrix payload: {e}", "data")

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class OrderedPartition:
    """Ordered list of disjoint non-empty blocks covering {1..ground}."""

    ground: int
    blocks: Tuple[FrozenSet[int], ...]

    def __post_init__(self) -> None:
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if self.ground < 0:
            raise ContractViolation("ground set size must be non-negative", "ground")
        if any(not b for b in blocks):
            raise ContractViolation("blocks must be non-empty", "blocks")
        union: List[int] = sorted(itertools.chain.from_iterable(blocks))
        if union != list(range(1, self.ground + 1)):
            raise ContractViolation(
                f"blocks must partition 1..{self.ground} without overlap", "blocks"
            )

    @classmethod
    def of(cls, ground: int, *blocks: Iterable[int]) -> "OrderedPartition":
        return cls(ground, tuple(frozenset(b) for b in blocks))

    @classmethod
    def parse(cls, text: str) -> "OrderedPartition":
        """Parse the ``1,3|2`` text form."""
        text = text.strip()
        if not text:
            return cls(0, ())
        try:
            blocks = tuple(
                frozenset(int(x) for x in part.split(",")) for part in text.split("|")
            )
        except ValueError as e:
            raise ContractViolation(f"malformed partition {text!r}: {e}", "text")
        ground = sum(len(b) for b in blocks)
        return cls(ground, blocks)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def block_of(self, element: int) -> int:
        """Return the 1-based index of the block holding ``element``."""
        for index, block in enumerate(self.blocks, 1):
            if element in block:
                return index
        raise ContractViolation(f"{element} is not in 1..{self.ground}", "element")

    def render(self) -> str:
        return "|".join(",".join(str(x) for x in sorted(b)) for b in self.blocks)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class DiagonalTermP:
    """One term ``left ⊗ right`` of the top-cell permutahedral diagonal."""

    left: OrderedPartition
    right: OrderedPartition
    coeff: Scalar = field(default_factory=Scalar.one)

    def __post_init__(self) -> None:
        if self.left.ground != self.right.ground:
            raise ContractViolation("both sides need the same ground set", "right")
        ground = self.left.ground
        if ground and self.left.block_count + self.right.block_count != ground + 1:
            raise ContractViolation(
                f"block counts {self.left.block_count} + {self.right.block_count}"
                f" must equal {ground + 1}",
                "blocks",
            )

    @property
    def ground(self) -> int:
        return self.left.ground

    def render(self) -> str:
        left = self.left.render() or "e0"
        right = self.right.render() or "e0"
        return f"{left} ⊗ {right}"


@dataclass(frozen=True)
class ShiftMove:
    """A recorded right (``R``) or down (``D``) shift of a set of values."""

    direction: str
    index: int
    values: FrozenSet[int]

    def render(self) -> str:
        inner = ",".join(str(v) for v in sorted(self.values))
        return f"{self.direction}{self.index}{{{inner}}}"


@dataclass(frozen=True)
class DerivationWitness:
    """A step matrix together with the shift sequence producing a matrix."""

    step_matrix: SparseIntMatrix
    moves: Tuple[ShiftMove, ...]

    def replay(self) -> SparseIntMatrix:
        """Re-apply every move, checking that each one is admissible.

        Raises:
            VerificationError: If a recorded move turns out to be inadmissible
        """
        current = self.step_matrix
        for move in self.moves:
            shift = right_shift if move.direction == "R" else down_shift
            moved = shift(current, move.index, move.values, extend=False)
            if moved == current:
                raise VerificationError(
                    f"move {move.render()} is not admissible",
                    {"matrix": current.render(), "move": move.render()},
                )
            current = moved
        return current


def permutation_to_step_matrix(permutation: Sequence[int]) -> SparseIntMatrix:
    """Lay a permutation out along a left/down lattice path.

    The first value sits in the top-right corner; a descent steps left, an
    ascent steps down.
    """
    values = list(permutation)
    if sorted(values) != list(range(1, len(values) + 1)) or not values:
        raise ContractViolation(f"{values} is not a permutation", "permutation")

    descents = sum(1 for a, b in zip(values, values[1:]) if b < a)
    row, col = 1, descents + 1
    cells = {(row, col): values[0]}
    for previous, current in zip(values, values[1:]):
        if current < previous:
            col -= 1
        else:
            row += 1
        cells[(row, col)] = current
    return SparseIntMatrix.from_cells(cells)


def step_matrix_to_permutation(matrix: SparseIntMatrix) -> Tuple[int, ...]:
    """Read a step matrix along its path from the top-right corner."""
    if not is_step_matrix(matrix):
        raise ContractViolation("matrix is not a step matrix", "matrix")
    cells = matrix.cells
    row, col = 1, matrix.cols
    path = [cells[(row, col)]]
    while len(path) < matrix.size:
        if (row, col - 1) in cells:
            col -= 1
        else:
            row += 1
        path.append(cells[(row, col)])
    return tuple(path)


def _is_contiguous_increasing(line: List[Tuple[int, int]]) -> bool:
    indices = [i for i, _ in line]
    values = [v for _, v in line]
    contiguous = indices == list(range(indices[0], indices[0] + len(indices)))
    increasing = all(a < b for a, b in zip(values, values[1:]))
    return contiguous and increasing


def is_step_matrix(matrix: SparseIntMatrix) -> bool:
    """Return True iff ``matrix`` satisfies the four step-matrix conditions.

    Args:
        matrix: Any valid sparse matrix

    Returns:
        True when entries are contiguous and increasing in every row and
        column and each diagonal of the full grid holds exactly one entry
    """
    values = sorted(v for _, _, v in matrix.entries)
    if values != list(range(1, matrix.size + 1)):
        return False

    for i in range(1, matrix.rows + 1):
        if not _is_contiguous_increasing(matrix.row(i)):
            return False
    for j in range(1, matrix.cols + 1):
        if not _is_contiguous_increasing(matrix.column(j)):
            return False

    diagonal_counts: Dict[int, int] = {}
    for r, c, _ in matrix.entries:
        diagonal_counts[c - r] = diagonal_counts.get(c - r, 0) + 1
    return all(
        diagonal_counts.get(d, 0) == 1 for d in range(1 - matrix.rows, matrix.cols)
    )


def enumerate_step_matrices(
    n: int, cap: int = DEFAULT_STEP_MATRIX_CAP
) -> List[SparseIntMatrix]:
    """Enumerate all step matrices with entries 1..n.

    The output follows the lexicographic order of the permutations the
    matrices encode, so its length is n!.

    Raises:
        ContractViolation: If ``n`` < 1
        ResourceLimitError: If ``n`` exceeds ``cap``
    """
    if n < 1:
        raise ContractViolation("N must be at least 1", "n")
    if n > cap:
        raise ResourceLimitError(f"step matrix enumeration capped at N={cap}", cap)
    matrices = [
        permutation_to_step_matrix(p) for p in itertools.permutations(range(1, n + 1))
    ]
    logger.debug(f"enumerated {len(matrices)} step matrices for N={n}")
    return matrices


def right_shift(
    matrix: SparseIntMatrix,
    j: int,
    values: Iterable[int],
    *,
    extend: bool = True,
) -> SparseIntMatrix:
    """Move a set of column-``j`` entries one column to the right.

    The move happens only if the smallest moved value exceeds every entry of
    column j + 1 and column j + 1 is empty from the row of that value down to
    the bottom row; otherwise ``matrix`` is returned unchanged. With
    ``extend`` a move out of the last column opens a new column; without it
    such a move is inadmissible. Emptied columns are trimmed.

    Args:
        matrix: Matrix to shift
        j: Column index (1-based)
        values: Non-empty subset of the entries of column j
        extend: Whether the last column may grow a new column

    Returns:
        The shifted matrix, or ``matrix`` itself when the move is inadmissible

    Raises:
        ContractViolation: If ``values`` is empty or not inside column j
    """
    moving = frozenset(values)
    column = dict((v, r) for r, v in matrix.column(j))
    if not moving or not moving <= column.keys():
        raise ContractViolation(
            f"{sorted(moving)} is not a non-empty subset of column {j}", "values"
        )
    if j == matrix.cols and not extend:
        return matrix

    neighbour = matrix.column(j + 1) if j < matrix.cols else []
    lowest = min(moving)
    if neighbour and lowest <= max(v for _, v in neighbour):
        return matrix
    start_row = column[lowest]
    occupied_rows = {r for r, _ in neighbour}
    if any(r >= start_row for r in occupied_rows):
        return matrix
    if any(column[v] in occupied_rows for v in moving):
        return matrix

    cells = dict(matrix.cells)
    for v in moving:
        cells.pop((column[v], j))
        cells[(column[v], j + 1)] = v
    return SparseIntMatrix.from_cells(cells)


def down_shift(
    matrix: SparseIntMatrix,
    i: int,
    values: Iterable[int],
    *,
    extend: bool = True,
) -> SparseIntMatrix:
    """Move a set of row-``i`` entries one row down.

    Exact transpose of :func:`right_shift`.
    """
    transposed = matrix.transpose()
    shifted = right_shift(transposed, i, values, extend=extend)
    return matrix if shifted is transposed else shifted.transpose()


def _movable_segment(state: _State, line: int, axis: int) -> List[int]:
    # axis 1: columns (right shifts), axis 0: rows (down shifts)
    cross = 1 - axis
    target_max = 0
    target_last = 0
    for value, cell in enumerate(state, 1):
        if cell[axis] == line + 1:
            target_max = max(target_max, value)
            target_last = max(target_last, cell[cross])
    return [
        value
        for value, cell in enumerate(state, 1)
        if cell[axis] == line and cell[cross] > target_last and value > target_max
    ]


def _apply_move(state: _State, moving: Tuple[int, ...], axis: int) -> _State:
    cells = list(state)
    for value in moving:
        r, c = cells[value - 1]
        cells[value - 1] = (r, c + 1) if axis == 1 else (r + 1, c)
    return tuple(cells)


def _derive_from_seed(
    seed: SparseIntMatrix, track_witnesses: bool
) -> Dict[_State, Tuple[ShiftMove, ...]]:
    """Run one right phase and one down phase inside the seed's frame."""
    start: _State = tuple(seed.positions[v] for v in range(1, seed.size + 1))
    states: Dict[_State, Tuple[ShiftMove, ...]] = {start: ()}

    phases = [(1, "R", seed.cols), (0, "D", seed.rows)]
    for axis, direction, extent in phases:
        for line in range(1, extent):
            expanded: Dict[_State, Tuple[ShiftMove, ...]] = {}
            for state, moves in states.items():
                expanded.setdefault(state, moves)
                segment = _movable_segment(state, line, axis)
                for size in range(1, len(segment) + 1):
                    for subset in itertools.combinations(segment, size):
                        moved = _apply_move(state, subset, axis)
                        if moved in expanded:
                            continue
                        expanded[moved] = (
                            moves + (ShiftMove(direction, line, frozenset(subset)),)
                            if track_witnesses
                            else ()
                        )
            states = expanded
    return states


@lru_cache(maxsize=None)
def _derived_table(
    n: int, track_witnesses: bool, threads: int
) -> Dict[SparseIntMatrix, DerivationWitness]:
    seeds = enumerate_step_matrices(n, cap=max(n, DEFAULT_STEP_MATRIX_CAP))

    def run(seed: SparseIntMatrix) -> Dict[_State, Tuple[ShiftMove, ...]]:
        return _derive_from_seed(seed, track_witnesses)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, seeds))
    else:
        results = [run(seed) for seed in seeds]

    table: Dict[SparseIntMatrix, DerivationWitness] = {}
    for seed, states in zip(seeds, results):
        for state, moves in states.items():
            matrix = SparseIntMatrix.from_cells(
                {cell: value for value, cell in enumerate(state, 1)}
            )
            if matrix not in table:
                table[matrix] = DerivationWitness(seed, moves)
    logger.info(f"derived matrices for N={n}: {len(table)} from {len(seeds)} seeds")
    return table


def derived_matrices_with_witnesses(
    n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    threads: int = 1,
    track_witnesses: bool = True,
) -> Dict[SparseIntMatrix, DerivationWitness]:
    """Map every derived matrix with entries 1..n to one derivation.

    Columns are processed left to right, then rows top to bottom, each line
    taking one admissible subset (possibly empty). The frame of the seed step
    matrix is kept, so every result has ``rows + cols = n + 1``. Seeds are
    visited in permutation order and the first derivation found is kept,
    which makes the witnesses independent of ``threads``.

    Raises:
        ContractViolation: If ``n`` < 1
        ResourceLimitError: If ``n`` exceeds ``cap``
    """
    if n < 1:
        raise ContractViolation("N must be at least 1", "n")
    if n > cap:
        raise ResourceLimitError(f"derived matrix enumeration capped at N={cap}", cap)
    return _derived_table(n, track_witnesses, max(1, threads))


def derived_matrices(
    n: int, cap: int = DEFAULT_ENUMERATION_CAP, threads: int = 1
) -> FrozenSet[SparseIntMatrix]:
    """Return the set of derived matrices with entries 1..n."""
    table = derived_matrices_with_witnesses(n, cap, threads, track_witnesses=False)
    return frozenset(table)


def sorted_matrices(matrices: Iterable[SparseIntMatrix]) -> List[SparseIntMatrix]:
    return sorted(matrices, key=SparseIntMatrix.sort_key)


def complementary_pairing(matrix: SparseIntMatrix, p: int = 2) -> DiagonalTermP:
    """Read the pairing of a derived matrix.

    Columns give the left partition from left to right; rows give the right
    partition from the bottom row up.
    """
    n = matrix.size
    left = OrderedPartition(
        n, tuple(frozenset(matrix.column_values(j)) for j in range(1, matrix.cols + 1))
    )
    right = OrderedPartition(
        n, tuple(frozenset(matrix.row_values(i)) for i in range(matrix.rows, 0, -1))
    )
    if left.block_count + right.block_count != n + 1:
        raise VerificationError(
            "derived matrix does not give a complementary pairing",
            {"matrix": matrix.render()},
        )
    return DiagonalTermP(left, right, Scalar.one(p))


def matrix_from_pairing(term: DiagonalTermP) -> SparseIntMatrix:
    """Intersect column blocks with row blocks to rebuild the matrix.

    Raises:
        ContractViolation: If two elements land in the same cell
    """
    rows = term.right.block_count
    cells: Dict[Cell, int] = {}
    for g in range(1, term.ground + 1):
        cell = (rows + 1 - term.right.block_of(g), term.left.block_of(g))
        if cell in cells:
            raise ContractViolation(
                f"{cells[cell]} and {g} share cell {cell}", "term"
            )
        cells[cell] = g
    return SparseIntMatrix.from_cells(cells)


def complementary_pairings(
    n: int, cap: int = DEFAULT_ENUMERATION_CAP, p: int = 2, threads: int = 1
) -> List[DiagonalTermP]:
    """One pairing per derived matrix, in canonical matrix order."""
    return [
        complementary_pairing(matrix, p)
        for matrix in sorted_matrices(derived_matrices(n, cap, threads))
    ]


def delta_P_top(
    n: int, cap: int = DEFAULT_ENUMERATION_CAP, p: int = 2, threads: int = 1
) -> List[DiagonalTermP]:
    """Top-cell diagonal on the permutahedron with ground set 1..n.

    ``n = 0`` is the base case ``e0 ⊗ e0``.
    """
    if n < 0:
        raise ContractViolation("ground set size must be non-negative", "n")
    if n == 0:
        empty = OrderedPartition(0, ())
        return [DiagonalTermP(empty, empty, Scalar.one(p))]
    return complementary_pairings(n, cap, p, threads)


def render_matrices(matrices: Iterable[SparseIntMatrix]) -> str:
    """Blank-line separated text blocks, one per matrix."""
    return "\n\n".join(m.render() for m in matrices)
