"""Leveled trees, the Tonks projection and the associahedral diagonal."""

import itertools
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Tuple

from jinja2 import Environment, PackageLoader, StrictUndefined

from .exceptions import ContractViolation, ResourceLimitError, VerificationError
from .scalars import Scalar
from .su_diagonal import (
    DEFAULT_ENUMERATION_CAP,
    OrderedPartition,
    SparseIntMatrix,
    complementary_pairing,
    derived_matrices,
    sorted_matrices,
)

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"\(|\)|\d+")


@dataclass(frozen=True)
class PlanarTree:
    """Rooted planar tree; a leaf has no children, internal nodes have >= 2."""

    children: Tuple["PlanarTree", ...] = ()

    def __post_init__(self) -> None:
        if len(self.children) == 1:
            raise ContractViolation("internal nodes need at least two children")

    @classmethod
    def leaf(cls) -> "PlanarTree":
        return cls(())

    @classmethod
    def node(cls, *children: "PlanarTree") -> "PlanarTree":
        return cls(tuple(children))

    @classmethod
    def corolla(cls, k: int) -> "PlanarTree":
        if k < 2:
            raise ContractViolation("a corolla needs at least two leaves", "k")
        return cls(tuple(cls.leaf() for _ in range(k)))

    @classmethod
    def left_comb(cls, k: int) -> "PlanarTree":
        """Binary tree ((1 2) 3) ... k."""
        if k < 2:
            raise ContractViolation("a comb needs at least two leaves", "k")
        tree = cls.corolla(2)
        for _ in range(k - 2):
            tree = cls.node(tree, cls.leaf())
        return tree

    @classmethod
    def right_comb(cls, k: int) -> "PlanarTree":
        """Binary tree 1 (2 (... (k-1 k)))."""
        if k < 2:
            raise ContractViolation("a comb needs at least two leaves", "k")
        tree = cls.corolla(2)
        for _ in range(k - 2):
            tree = cls.node(cls.leaf(), tree)
        return tree

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def arity(self) -> int:
        return len(self.children)

    @cached_property
    def leaf_count(self) -> int:
        if self.is_leaf:
            return 1
        return sum(child.leaf_count for child in self.children)

    @cached_property
    def internal_count(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + sum(child.internal_count for child in self.children)

    @property
    def deficiency(self) -> int:
        """Dimension of the associahedron face: leaves - 1 - internal nodes."""
        return self.leaf_count - 1 - self.internal_count

    @cached_property
    def corolla_arities(self) -> Tuple[int, ...]:
        """Arities of the internal nodes in preorder."""
        if self.is_leaf:
            return ()
        nested = (child.corolla_arities for child in self.children)
        return (self.arity,) + tuple(a for arities in nested for a in arities)

    def canonical(self) -> Tuple[int, ...]:
        """Preorder child counts; determines the tree."""
        if self.is_leaf:
            return (0,)
        return (self.arity,) + tuple(
            c for child in self.children for c in child.canonical()
        )

    def mirror(self) -> "PlanarTree":
        if self.is_leaf:
            return self
        return PlanarTree(tuple(child.mirror() for child in reversed(self.children)))

    def render(self) -> str:
        """Nested-parenthesis form with leaves numbered from 1."""
        counter = iter(range(1, self.leaf_count + 1))

        def walk(tree: "PlanarTree") -> str:
            if tree.is_leaf:
                return str(next(counter))
            return "(" + " ".join(walk(child) for child in tree.children) + ")"

        return walk(self)

    @classmethod
    def parse(cls, text: str) -> "PlanarTree":
        """Parse the nested-parenthesis form produced by :meth:`render`."""
        tokens = _TOKEN.findall(text)
        if "".join(tokens) != re.sub(r"\s+", "", text):
            raise ContractViolation(f"unexpected characters in {text!r}", "text")
        position = 0

        def parse_node() -> "PlanarTree":
            nonlocal position
            if position >= len(tokens):
                raise ContractViolation(f"unbalanced tree {text!r}", "text")
            token = tokens[position]
            position += 1
            if token == "(":
                children = []
                while position < len(tokens) and tokens[position] != ")":
                    children.append(parse_node())
                if position >= len(tokens):
                    raise ContractViolation(f"unbalanced tree {text!r}", "text")
                position += 1
                return cls(tuple(children))
            if token == ")":
                raise ContractViolation(f"unbalanced tree {text!r}", "text")
            return cls.leaf()

        tree = parse_node()
        if position != len(tokens):
            raise ContractViolation(f"trailing tokens in {text!r}", "text")
        return tree

    def to_json(self) -> Any:
        """Leaves become their 1-based index, internal nodes become lists."""
        counter = iter(range(1, self.leaf_count + 1))

        def walk(tree: "PlanarTree") -> Any:
            if tree.is_leaf:
                return next(counter)
            return [walk(child) for child in tree.children]

        return walk(self)

    @classmethod
    def from_json(cls, data: Any) -> "PlanarTree":
        if isinstance(data, int):
            return cls.leaf()
        if isinstance(data, list):
            return cls(tuple(cls.from_json(child) for child in data))
        raise ContractViolation(f"malformed tree payload {data!r}", "data")

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class LeveledCorolla:
    """A corolla created at ``level`` spanning leaves first..last."""

    level: int
    first_leaf: int
    last_leaf: int
    arity: int


@dataclass(frozen=True)
class LeveledTree:
    partition: OrderedPartition
    corollas: Tuple[LeveledCorolla, ...]
    tree: PlanarTree

    @property
    def leaf_count(self) -> int:
        return self.partition.ground + 1

    @property
    def levels(self) -> List[List[LeveledCorolla]]:
        grouped: List[List[LeveledCorolla]] = [
            [] for _ in range(self.partition.block_count)
        ]
        for corolla in self.corollas:
            grouped[corolla.level - 1].append(corolla)
        return grouped

    @property
    def is_degenerate(self) -> bool:
        return any(len(level) > 1 for level in self.levels)

    def meet_level(self, j: int) -> int:
        """Level at which the branches holding leaves j and j+1 meet."""
        return min(
            c.level for c in self.corollas if c.first_leaf <= j and c.last_leaf > j
        )


@dataclass
class _Component:
    first: int
    last: int
    tree: PlanarTree


def partition_to_leveled_tree(partition: OrderedPartition) -> LeveledTree:
    """Interpret ``j`` in block i as: leaves j and j+1 meet at level i.

    Gaps of one level that are adjacent once lower levels are merged form a
    single corolla; a level with several such runs carries several corollas.

    Args:
        partition: Ordered partition of 1..k-1

    Returns:
        The level-annotated tree with k leaves
    """
    if partition.ground < 1:
        raise ContractViolation("a leveled tree needs at least two leaves")

    components = [
        _Component(leaf, leaf, PlanarTree.leaf())
        for leaf in range(1, partition.ground + 2)
    ]
    corollas: List[LeveledCorolla] = []

    for level, block in enumerate(partition.blocks, 1):
        boundary = {c.last: index for index, c in enumerate(components)}
        cuts = sorted(boundary[gap] for gap in block)
        runs: List[List[int]] = []
        for cut in cuts:
            if runs and runs[-1][-1] == cut - 1:
                runs[-1].append(cut)
            else:
                runs.append([cut])

        run_at = {run[0]: run for run in runs}
        merged: List[_Component] = []
        index = 0
        while index < len(components):
            run = run_at.get(index)
            if run is None:
                merged.append(components[index])
                index += 1
                continue
            group = components[index : run[-1] + 2]
            node = PlanarTree(tuple(c.tree for c in group))
            corollas.append(
                LeveledCorolla(level, group[0].first, group[-1].last, len(group))
            )
            merged.append(_Component(group[0].first, group[-1].last, node))
            index = run[-1] + 2
        components = merged

    if len(components) != 1:
        raise VerificationError(
            "levels did not merge into a single root",
            {"partition": partition.render()},
        )
    return LeveledTree(partition, tuple(corollas), components[0].tree)


def corolla_profile(partition: OrderedPartition) -> List[List[int]]:
    """Corolla arities per level, left to right."""
    leveled = partition_to_leveled_tree(partition)
    return [[c.arity for c in level] for level in leveled.levels]


def tonks(partition: OrderedPartition) -> Optional[PlanarTree]:
    """Forget levels; degenerate leveled trees project to ``None`` (zero)."""
    leveled = partition_to_leveled_tree(partition)
    if leveled.is_degenerate:
        return None
    return leveled.tree


class Line(NamedTuple):
    """A matrix row or column selector."""

    kind: str
    index: int

    @classmethod
    def column(cls, j: int) -> "Line":
        return cls("column", j)

    @classmethod
    def row(cls, i: int) -> "Line":
        return cls("row", i)


def derived_consecutive_blocks(matrix: SparseIntMatrix, line: Line) -> List[List[int]]:
    """Split a line into maximal derived-consecutive runs.

    Consecutive entries g < g' stay in one block when every integer strictly
    between them sits in a column further left (for a column) or in a row
    further down (for a row).
    """
    positions = matrix.positions
    if line.kind == "column":
        values = matrix.column_values(line.index)

        def filled_earlier(v: int) -> bool:
            return positions[v][1] < line.index

    elif line.kind == "row":
        values = matrix.row_values(line.index)

        def filled_earlier(v: int) -> bool:
            return positions[v][0] > line.index

    else:
        raise ContractViolation(f"unknown line kind {line.kind!r}", "line")

    if not values:
        raise ContractViolation(f"{line.kind} {line.index} is empty", "line")

    blocks = [[values[0]]]
    for previous, current in zip(values, values[1:]):
        if all(filled_earlier(v) for v in range(previous + 1, current)):
            blocks[-1].append(current)
        else:
            blocks.append([current])
    return blocks


def is_nondegenerate_matrix(matrix: SparseIntMatrix) -> bool:
    """True iff every row and column is a single derived-consecutive block."""
    lines = [Line.column(j) for j in range(1, matrix.cols + 1)] + [
        Line.row(i) for i in range(1, matrix.rows + 1)
    ]
    return all(len(derived_consecutive_blocks(matrix, line)) == 1 for line in lines)


@dataclass(frozen=True)
class DiagonalTermK:
    """``coeff * left ⊗ right`` with the derived matrices it came from."""

    left: PlanarTree
    right: PlanarTree
    coeff: Scalar = field(default_factory=Scalar.one)
    origins: Tuple[SparseIntMatrix, ...] = ()

    def __post_init__(self) -> None:
        k = self.left.leaf_count
        if self.right.leaf_count != k:
            raise ContractViolation("both trees need the same number of leaves")
        if self.left.deficiency + self.right.deficiency != k - 2:
            raise ContractViolation(
                f"dimensions {self.left.deficiency} + {self.right.deficiency}"
                f" do not add up to {k - 2}"
            )

    @property
    def arity(self) -> int:
        return self.left.leaf_count

    @property
    def multiplicity(self) -> int:
        return len(self.origins)

    def key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return self.left.canonical(), self.right.canonical()

    def render(self) -> str:
        prefix = "" if self.coeff.residue == 1 else f"{self.coeff} * "
        return f"{prefix}{self.left.render()} ⊗ {self.right.render()}"

    def to_json(self) -> Dict[str, Any]:
        return {
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "coeff": self.coeff.residue,
            "multiplicity": self.multiplicity,
        }


def mirror_term(term: DiagonalTermK) -> Tuple[PlanarTree, PlanarTree]:
    """Image of ``T ⊗ S`` under leaf reversal and factor swap."""
    return term.right.mirror(), term.left.mirror()


@lru_cache(maxsize=None)
def _delta_K(k: int, p: int, threads: int) -> Tuple[DiagonalTermK, ...]:
    origins: Dict[Tuple[PlanarTree, PlanarTree], List[SparseIntMatrix]] = {}
    cap = max(k - 1, DEFAULT_ENUMERATION_CAP)
    for matrix in sorted_matrices(derived_matrices(k - 1, cap, threads)):
        fast = is_nondegenerate_matrix(matrix)
        pairing = complementary_pairing(matrix, p)
        left = tonks(pairing.left)
        right = tonks(pairing.right)
        slow = left is not None and right is not None
        if fast != slow:
            raise VerificationError(
                "matrix and tree degeneracy criteria disagree",
                {"matrix": matrix.render(), "matrix_says": fast, "trees_say": slow},
            )
        if left is not None and right is not None:
            origins.setdefault((left, right), []).append(matrix)

    terms = tuple(
        DiagonalTermK(left, right, Scalar(len(found), p), tuple(found))
        for (left, right), found in origins.items()
        if len(found) % p
    )
    logger.info(f"delta_K({k}): {len(terms)} terms over F_{p}")
    return terms


def delta_K(
    k: int,
    cap: int = DEFAULT_ENUMERATION_CAP + 1,
    p: int = 2,
    threads: int = 1,
) -> List[DiagonalTermK]:
    """Diagonal of the top cell of the associahedron with k leaves.

    Every derived matrix on 1..k-1 is read as a pairing, both sides are
    projected with :func:`tonks`, and pairs with a degenerate side are
    dropped. Equal tree pairs are collected with their multiplicity; pairs
    whose multiplicity vanishes mod p cancel.

    Raises:
        ContractViolation: If ``k`` < 2
        ResourceLimitError: If ``k`` exceeds ``cap``
    """
    if k < 2:
        raise ContractViolation("arity must be at least 2", "k")
    if k > cap:
        raise ResourceLimitError(f"delta_K capped at arity {cap}", cap)
    return list(_delta_K(k, p, max(1, threads)))


@lru_cache(maxsize=1)
def _environment() -> Environment:
    return Environment(
        loader=PackageLoader("ainfdiag", "templates"),
        undefined=StrictUndefined,
        keep_trailing_newline=True,
    )


def _dot_nodes(
    tree: PlanarTree, prefix: str
) -> Tuple[List[Dict[str, str]], List[Tuple[str, str]]]:
    nodes: List[Dict[str, str]] = []
    edges: List[Tuple[str, str]] = []
    leaves = iter(range(1, tree.leaf_count + 1))
    counter = itertools.count()

    def walk(node: PlanarTree) -> str:
        name = f"{prefix}{next(counter)}"
        if node.is_leaf:
            nodes.append({"id": name, "label": str(next(leaves)), "shape": "plaintext"})
            return name
        nodes.append({"id": name, "label": f"m{node.arity}", "shape": "circle"})
        for child in node.children:
            edges.append((name, walk(child)))
        return name

    walk(tree)
    return nodes, edges


def render_dot(terms: Iterable[DiagonalTermK], name: str = "delta_K") -> str:
    """Render each term as a pair of clustered trees in Graphviz DOT."""
    rendered = []
    for index, term in enumerate(terms):
        sides = []
        for side, tree in (("L", term.left), ("R", term.right)):
            nodes, edges = _dot_nodes(tree, f"t{index}{side}")
            sides.append({"label": tree.render(), "nodes": nodes, "edges": edges})
        rendered.append({"index": index, "coeff": term.coeff.residue, "sides": sides})
    template = _environment().get_template("delta_k.dot.j2")
    return template.render(name=name, terms=rendered)
