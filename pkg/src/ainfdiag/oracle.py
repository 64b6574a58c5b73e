"""Brute-force cross-checks for the main pipeline.

Everything here is deliberately naive: no memoization, no admissible-segment
shortcuts, no feasibility filters. Only the domain types are shared with the
main modules, so agreement at small sizes is meaningful.
"""

import itertools
import logging
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from sympy.utilities.iterables import multiset_partitions

from .ainf_core import Element, Monomial, TensorMonomial
from .exceptions import ContractViolation, ResourceLimitError
from .scalars import Scalar
from .su_diagonal import (
    DiagonalTermP,
    OrderedPartition,
    SparseIntMatrix,
    derived_matrices,
    sorted_matrices,
)
from .trees import PlanarTree

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP = 6

# value -> (row, col); the frame stays fixed while moves are applied
_Frame = Tuple[int, int]
_Cells = Dict[int, Tuple[int, int]]


def _check_size(n: int, cap: int) -> None:
    if n < 1:
        raise ContractViolation("N must be at least 1", "n")
    if n > cap:
        raise ResourceLimitError(f"oracle capped at N={cap}", cap)


def _step_matrices(n: int) -> Iterator[Tuple[_Frame, _Cells]]:
    # Walk each permutation from the top-right corner: descents go left.
    for perm in itertools.permutations(range(1, n + 1)):
        descents = sum(1 for a, b in zip(perm, perm[1:]) if b < a)
        row, col = 1, descents + 1
        cells = {perm[0]: (row, col)}
        for a, b in zip(perm, perm[1:]):
            if b < a:
                col -= 1
            else:
                row += 1
            cells[b] = (row, col)
        yield (row, descents + 1), cells


def _shift(
    cells: _Cells, frame: _Frame, axis: int, line: int, subset: Sequence[int]
) -> _Cells:
    """Literal shift from ``line`` to ``line + 1``; ``cells`` itself if refused."""
    if not subset or line >= frame[axis]:
        return cells
    cross = 1 - axis
    target = {v: cell for v, cell in cells.items() if cell[axis] == line + 1}
    if target and min(subset) <= max(target):
        return cells
    start = cells[min(subset)][cross]
    if any(cell[cross] >= start for cell in target.values()):
        return cells
    taken = {cell[cross] for cell in target.values()}
    if any(cells[v][cross] in taken for v in subset):
        return cells
    moved = dict(cells)
    for v in subset:
        r, c = moved[v]
        moved[v] = (r, c + 1) if axis == 1 else (r + 1, c)
    return moved


def _to_matrix(cells: _Cells) -> SparseIntMatrix:
    return SparseIntMatrix.from_cells({cell: v for v, cell in cells.items()})


def _freeze(cells: _Cells) -> Tuple[Tuple[int, int], ...]:
    return tuple(cells[v] for v in sorted(cells))


def _subsets(values: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    for size in range(len(values) + 1):
        yield from itertools.combinations(values, size)


def literal_derived_matrices(
    n: int, cap: int = DEFAULT_ORACLE_CAP
) -> FrozenSet[SparseIntMatrix]:
    """Apply the defining formula literally.

    For every step matrix, every column from left to right and then every
    row from top to bottom picks an arbitrary subset of its entries; a shift
    that is not admissible leaves the matrix as it was.
    """
    _check_size(n, cap)
    found: Set[SparseIntMatrix] = set()
    for frame, seed in _step_matrices(n):
        states = {_freeze(seed): seed}
        for axis in (1, 0):
            for line in range(1, frame[axis]):
                expanded: Dict[Tuple[Tuple[int, int], ...], _Cells] = {}
                for cells in states.values():
                    on_line = sorted(
                        v for v, cell in cells.items() if cell[axis] == line
                    )
                    for subset in _subsets(on_line):
                        moved = _shift(cells, frame, axis, line, subset)
                        expanded.setdefault(_freeze(moved), moved)
                states = expanded
        for cells in states.values():
            matrix = _to_matrix(cells)
            if matrix.rows + matrix.cols == n + 1:
                found.add(matrix)
    return frozenset(found)


def unrestricted_closure(
    n: int, cap: int = DEFAULT_ORACLE_CAP, complementary_only: bool = True
) -> FrozenSet[SparseIntMatrix]:
    """Close the step matrices under single shifts in any order.

    Shifts inside the fixed frame can empty a row or a column. Those
    collapsed shapes have rows + cols != N + 1 and are not pairings; they are
    dropped unless ``complementary_only`` is False.
    """
    _check_size(n, cap)
    found: Set[SparseIntMatrix] = set()
    for frame, seed in _step_matrices(n):
        seen = {_freeze(seed)}
        queue = [seed]
        while queue:
            cells = queue.pop()
            matrix = _to_matrix(cells)
            if not complementary_only or matrix.rows + matrix.cols == n + 1:
                found.add(matrix)
            for axis in (1, 0):
                for line in range(1, frame[axis]):
                    on_line = sorted(
                        v for v, cell in cells.items() if cell[axis] == line
                    )
                    for subset in _subsets(on_line):
                        moved = _shift(cells, frame, axis, line, subset)
                        key = _freeze(moved)
                        if key not in seen:
                            seen.add(key)
                            queue.append(moved)
    logger.debug(f"unrestricted closure for N={n}: {len(found)} matrices")
    return frozenset(found)


def closure_difference(
    n: int, cap: int = DEFAULT_ORACLE_CAP
) -> List[SparseIntMatrix]:
    """Pairing matrices reachable in some order but not by the ordered pass."""
    extra = unrestricted_closure(n, cap) - derived_matrices(n, max(n, cap))
    return sorted_matrices(extra)


def _ordered_partitions(n: int, blocks: int) -> Iterator[OrderedPartition]:
    for partition in multiset_partitions(list(range(1, n + 1)), blocks):
        for order in itertools.permutations(partition):
            yield OrderedPartition(n, tuple(frozenset(b) for b in order))


def _place(
    left: OrderedPartition, right: OrderedPartition
) -> Optional[SparseIntMatrix]:
    rows = right.block_count
    cells: Dict[Tuple[int, int], int] = {}
    for col, block in enumerate(left.blocks, 1):
        for g in block:
            row = rows + 1 - next(i for i, b in enumerate(right.blocks, 1) if g in b)
            if (row, col) in cells:
                return None
            cells[(row, col)] = g
    return SparseIntMatrix.from_cells(cells)


def naive_delta_P(n: int, cap: int = DEFAULT_ORACLE_CAP) -> List[DiagonalTermP]:
    """Every pairing ``λ_A ⊗ λ_B`` with s + r = n + 1 whose matrix is derived.

    Pairs whose blocks meet in two or more elements cannot be placed and are
    rejected before the membership test.
    """
    _check_size(n, cap)
    derived = literal_derived_matrices(n, cap)
    kept: List[Tuple[SparseIntMatrix, DiagonalTermP]] = []
    for s in range(1, n + 1):
        for left in _ordered_partitions(n, s):
            for right in _ordered_partitions(n, n + 1 - s):
                matrix = _place(left, right)
                if matrix is None or matrix not in derived:
                    continue
                kept.append((matrix, DiagonalTermP(left, right, Scalar.one())))
    kept.sort(key=lambda pair: pair[0].sort_key())
    return [term for _, term in kept]


def _naive_tree(partition: OrderedPartition) -> Optional[PlanarTree]:
    # Split at the highest level; a level reused by two corollas is degenerate.
    level = {g: i for i, block in enumerate(partition.blocks, 1) for g in block}
    used: Set[int] = set()

    def build(first: int, last: int) -> Optional[PlanarTree]:
        if first == last:
            return PlanarTree.leaf()
        gaps = range(first, last)
        top = max(level[g] for g in gaps)
        if top in used:
            return None
        used.add(top)
        cuts = [g for g in gaps if level[g] == top]
        bounds = [first] + [g + 1 for g in cuts]
        ends = cuts + [last]
        children = []
        for a, b in zip(bounds, ends):
            child = build(a, b)
            if child is None:
                return None
            children.append(child)
        return PlanarTree(tuple(children))

    return build(1, partition.ground + 1)


def _naive_delta_K(k: int, cap: int) -> Dict[Tuple[PlanarTree, PlanarTree], int]:
    counts: Dict[Tuple[PlanarTree, PlanarTree], int] = {}
    for term in naive_delta_P(k - 1, cap):
        left = _naive_tree(term.left)
        right = _naive_tree(term.right)
        if left is None or right is None:
            continue
        counts[(left, right)] = counts.get((left, right), 0) + 1
    return {pair: c % 2 for pair, c in counts.items() if c % 2}


_Poly = Dict[Monomial, int]


def _madsen(n: int, ycap: int, values: List[_Poly]) -> _Poly:
    out: _Poly = {}
    for combo in itertools.product(*(list(v.items()) for v in values)):
        coeff = 1
        for _, c in combo:
            coeff *= c
        monos = [mono for mono, _ in combo]
        if len(monos) == 2:
            eps = monos[0].eps + monos[1].eps
            if eps > 1:
                continue
            result = Monomial(eps, monos[0].a + monos[1].a)
        elif len(monos) == n and all(mono.eps for mono in monos):
            result = Monomial(0, sum(mono.a for mono in monos) + 1)
        else:
            continue
        if result.a > ycap:
            continue
        out[result] = (out.get(result, 0) + coeff) % 2
    return {mono: c for mono, c in out.items() if c}


def _naive_evaluate(
    tree: PlanarTree, n: int, ycap: int, leaves: List[Monomial]
) -> _Poly:
    feed = iter(leaves)

    def walk(node: PlanarTree) -> _Poly:
        if not node.children:
            return {next(feed): 1}
        return _madsen(n, ycap, [walk(child) for child in node.children])

    return walk(tree)


def naive_tensor_op(
    n: int,
    m: int,
    k: int,
    args: Sequence[TensorMonomial],
    ycap: int = 6,
    cap: int = DEFAULT_ORACLE_CAP,
) -> Element:
    """m_k on H*(C_n) ⊗ H*(C_m) over F_2 straight from the pairings."""
    if k < 2 or len(args) != k:
        raise ContractViolation(f"need k >= 2 and {k} arguments, got {len(args)}")
    if k > cap:
        raise ResourceLimitError(f"naive tensor operations capped at arity {cap}", cap)

    total: Dict[TensorMonomial, int] = {}
    for (left, right), _ in _naive_delta_K(k, max(cap, k - 1)).items():
        a_value = _naive_evaluate(left, n, ycap, [a.left for a in args])
        if not a_value:
            continue
        b_value = _naive_evaluate(right, m, ycap, [a.right for a in args])
        for (u, cu), (v, cv) in itertools.product(a_value.items(), b_value.items()):
            key = TensorMonomial(u, v)
            total[key] = total.get(key, 0) + cu * cv
    return Element.from_mapping(2, total)
