"""Higher operations on H*(C_n × C_m).

The tensor structure of two Madsen algebras has non-zero operations exactly
in arities 2, n, m and n + m - 2 (plus the repeated snake families beyond).
This module scans arities, builds the zigzag ("snake") matrices that carry
the non-vanishing diagonal terms, replays their derivation from a step
matrix, and evaluates the operations on explicit witness arguments.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .ainf_core import (
    DEFAULT_DELTA_CAP,
    DEFAULT_YCAP,
    Element,
    MadsenAlgebra,
    Monomial,
    TensorBasis,
    TensorMonomial,
    TensorProductStructure,
    evaluate_tree,
)
from .ainf_core import live_arity_possible as _feasible
from .ainf_core import madsen_algebra, tensor_structure
from .exceptions import ContractViolation, ResourceLimitError, VerificationError
from .su_diagonal import (
    DEFAULT_ENUMERATION_CAP,
    DerivationWitness,
    ShiftMove,
    SparseIntMatrix,
    complementary_pairing,
    derived_matrices,
    down_shift,
    is_step_matrix,
    right_shift,
)
from .trees import PlanarTree, corolla_profile, delta_K, tonks

logger = logging.getLogger(__name__)

VARIANTS = ("full", "drop-right", "drop-down")
MODES = ("full-diagonal", "snake-only")

ONE = Monomial(0, 0)
X = Monomial(1, 0)
X1 = TensorMonomial(X, ONE)
X2 = TensorMonomial(ONE, X)
X1X2 = TensorMonomial(X, X)
UNIT = TensorMonomial(ONE, ONE)


@dataclass(frozen=True)
class SnakeSpec:
    """Parameters of one snake family member.

    Column runs hold n - 1 entries and feed n-ary corollas of the left
    factor; row runs hold m - 1 entries and feed m-ary corollas of the right
    factor.
    """

    n: int
    m: int
    k: int
    variant: str = "full"

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ContractViolation(f"unknown variant {self.variant!r}", "variant")
        if self.m <= 3 or self.n <= 3:
            raise ContractViolation(
                "snakes need n, m > 3: outputs of higher operations have even degree",
                "m",
            )
        if self.n < self.m:
            raise ContractViolation(f"need n >= m, got n={self.n}, m={self.m}", "n")
        minimum = 0 if self.variant == "full" else 1
        if self.k < minimum:
            raise ContractViolation(
                f"k must be at least {minimum} for the {self.variant} variant", "k"
            )

    @property
    def column_runs(self) -> int:
        return self.k - 1 if self.variant == "drop-down" else self.k

    @property
    def row_runs(self) -> int:
        return self.k - 1 if self.variant == "drop-right" else self.k

    @property
    def arity(self) -> int:
        return self.column_runs * (self.n - 2) + self.row_runs * (self.m - 2) + 2

    def render(self) -> str:
        return f"({self.n},{self.m},k={self.k},{self.variant})"


@dataclass
class _Runs:
    cells: Dict[Tuple[int, int], int]
    column_runs: List[List[int]]
    row_runs: List[List[int]]


def _trace(spec: SnakeSpec) -> _Runs:
    # Alternate down runs (n - 2 steps) and right runs (m - 2 steps) from (1, 1).
    first = ["right", "down"] if spec.variant == "drop-down" else ["down", "right"]
    order = (first * spec.k)[: spec.column_runs + spec.row_runs]

    row, col, value = 1, 1, 1
    cells = {(1, 1): 1}
    runs = _Runs(cells, [], [])
    for direction in order:
        steps = spec.n - 2 if direction == "down" else spec.m - 2
        run = [value]
        for _ in range(steps):
            if direction == "down":
                row += 1
            else:
                col += 1
            value += 1
            cells[(row, col)] = value
            run.append(value)
        (runs.column_runs if direction == "down" else runs.row_runs).append(run)
    return runs


def snake_matrix(spec: SnakeSpec) -> SparseIntMatrix:
    """The zigzag matrix of ``spec``; its largest entry is arity - 1."""
    return SparseIntMatrix.from_cells(_trace(spec).cells)


def snake_step_matrix(spec: SnakeSpec) -> SparseIntMatrix:
    """The ⌜-shaped step matrix the snake is derived from.

    Column 1 holds 1 and every column-run value except the run's top; row 1
    holds 1 and every row-run value except the run's first cell.
    """
    runs = _trace(spec)
    column = [1] + [v for run in runs.column_runs for v in run[1:]]
    row = [1] + [v for run in runs.row_runs for v in run[1:]]
    cells = {(i, 1): v for i, v in enumerate(column, 1)}
    cells.update({(1, j): v for j, v in enumerate(row, 1)})
    return SparseIntMatrix.from_cells(cells)


@dataclass(frozen=True)
class SnakeWitness:
    spec: SnakeSpec
    matrix: SparseIntMatrix
    derivation: DerivationWitness
    enumerated: Optional[bool] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.render(),
            "arity": self.spec.arity,
            "matrix": self.matrix.to_json(),
            "step_matrix": self.derivation.step_matrix.to_json(),
            "moves": [move.render() for move in self.derivation.moves],
            "enumerated": self.enumerated,
        }


def verify_snake_derived(
    spec: SnakeSpec, cross_check: bool = False, cap: int = DEFAULT_ENUMERATION_CAP
) -> SnakeWitness:
    """Replay the shifts that turn the step matrix into the snake.

    Each column first pushes right every entry that belongs further right,
    then each row pushes down every entry that belongs further down. Every
    move is checked for admissibility. With ``cross_check`` the snake is
    also looked up in the enumerated derived set when its size allows.

    Raises:
        VerificationError: If the start is not a step matrix, a move is
            inadmissible, or the replay misses the snake
    """
    target = snake_matrix(spec)
    start = snake_step_matrix(spec)
    if not is_step_matrix(start):
        raise VerificationError(
            f"start of snake {spec.render()} is not a step matrix",
            {"matrix": start.render()},
        )

    goal = target.positions
    current = start
    moves: List[ShiftMove] = []
    phases = (("R", 1, right_shift, start.cols), ("D", 0, down_shift, start.rows))
    for direction, axis, shift, extent in phases:
        for line in range(1, extent):
            line_values = (
                current.column_values(line) if axis == 1 else current.row_values(line)
            )
            moving = frozenset(v for v in line_values if goal[v][axis] > line)
            if not moving:
                continue
            moved = shift(current, line, moving, extend=False)
            move = ShiftMove(direction, line, moving)
            if moved is current:
                raise VerificationError(
                    f"move {move.render()} is not admissible for {spec.render()}",
                    {"matrix": current.render(), "move": move.render()},
                )
            moves.append(move)
            current = moved

    if current != target:
        raise VerificationError(
            f"replay for {spec.render()} did not reach the snake",
            {"reached": current.render(), "snake": target.render()},
        )
    derivation = DerivationWitness(start, tuple(moves))

    enumerated: Optional[bool] = None
    if cross_check and 1 <= target.size <= cap:
        enumerated = target in derived_matrices(target.size, cap)
        if not enumerated:
            raise VerificationError(
                f"snake {spec.render()} missing from the derived set",
                {"snake": target.render()},
            )
    logger.debug(f"snake {spec.render()} derived in {len(moves)} moves")
    return SnakeWitness(spec, target, derivation, enumerated)


def snake_trees(spec: SnakeSpec) -> Tuple[PlanarTree, PlanarTree]:
    """The diagonal term ``T ⊗ S`` read off the snake matrix."""
    pairing = complementary_pairing(snake_matrix(spec))
    left = tonks(pairing.left)
    right = tonks(pairing.right)
    if left is None or right is None:
        raise VerificationError(
            f"snake {spec.render()} gives a degenerate term",
            {"pairing": pairing.render()},
        )
    return left, right


def snake_corolla_profile(spec: SnakeSpec) -> Tuple[List[int], List[int]]:
    """Large corolla arities of the left and right snake trees, by level."""
    pairing = complementary_pairing(snake_matrix(spec))
    return (
        [a for level in corolla_profile(pairing.left) for a in level if a > 2],
        [a for level in corolla_profile(pairing.right) for a in level if a > 2],
    )


def witness_argument(spec: SnakeSpec, p: int = 2) -> List[Element]:
    """Arguments on which the snake term survives.

    Gap g sits between leaves g and g + 1. Leaf j carries x in the left
    factor iff gap j - 1 or gap j lies in a column run, and x in the right
    factor iff one of them lies in a row run.
    """
    if p != 2:
        raise ContractViolation("witness arguments are built over F_2", "p")
    runs = _trace(spec)
    in_column = {v for run in runs.column_runs for v in run}
    in_row = {v for run in runs.row_runs for v in run}

    arguments = []
    for leaf in range(1, spec.arity + 1):
        gaps = {leaf - 1, leaf}
        left = X if gaps & in_column else ONE
        right = X if gaps & in_row else ONE
        arguments.append(Element.basis(TensorMonomial(left, right), p))
    return arguments


def _factors(n: int, m: int, p: int, ycap: int) -> Tuple[MadsenAlgebra, MadsenAlgebra]:
    left = madsen_algebra(n, p, ycap, require_divisibility=False)
    right = madsen_algebra(m, p, ycap, require_divisibility=False)
    return left, right


def snake_structure(
    spec: SnakeSpec, p: int = 2, ycap: int = DEFAULT_YCAP
) -> TensorProductStructure:
    """Tensor structure large enough to evaluate ``spec`` on the full diagonal."""
    left, right = _factors(spec.n, spec.m, p, ycap)
    return tensor_structure(left, right, max_arity=max(2, spec.arity))


def evaluate_witness(
    spec: SnakeSpec,
    mode: str = "snake-only",
    arguments: Optional[Sequence[Element]] = None,
    ycap: int = DEFAULT_YCAP,
    cap: int = DEFAULT_DELTA_CAP,
) -> Element:
    """Evaluate the operation of arity ``spec.arity`` on the witness.

    ``snake-only`` evaluates just the snake term; ``full-diagonal`` sums every
    term of the diagonal and needs the arity within ``cap``.

    Raises:
        ContractViolation: On an unknown mode or a wrong argument count
        ResourceLimitError: If full-diagonal mode exceeds ``cap``
    """
    if mode not in MODES:
        raise ContractViolation(f"unknown mode {mode!r}", "mode")
    args = list(arguments) if arguments is not None else witness_argument(spec)
    if len(args) != spec.arity:
        raise ContractViolation(
            f"{spec.render()} has arity {spec.arity}, got {len(args)} arguments"
        )

    if mode == "full-diagonal":
        if spec.arity > cap:
            raise ResourceLimitError(
                f"full-diagonal evaluation capped at arity {cap}", cap
            )
        return snake_structure(spec, ycap=ycap).evaluate(args)

    left_factor, right_factor = _factors(spec.n, spec.m, 2, ycap)
    left_tree, right_tree = snake_trees(spec)
    total = Element.zero(2)
    for combo in itertools.product(*(arg.items() for arg in args)):
        coeff = 1
        for _, c in combo:
            coeff *= c
        lefts = [Element.basis(mono.left, 2) for mono, _ in combo]
        rights = [Element.basis(mono.right, 2) for mono, _ in combo]
        value_left = evaluate_tree(left_tree, left_factor, lefts)
        if value_left.is_zero():
            continue
        value_right = evaluate_tree(right_tree, right_factor, rights)
        total = total + value_left.tensor(value_right).scale(coeff)
    return total


def live_arity_possible(k: int, n: int, m: int) -> bool:
    """Whether H*(C_n) ⊗ H*(C_m) can have a live diagonal term in arity k."""
    return _feasible(k, (2, n), (2, m))


def mixed_term_arities(n: int, m: int, max_arity: int) -> List[int]:
    """Arities up to ``max_arity`` with a term pairing an n- and an m-corolla."""
    found = []
    for k in range(2, max_arity + 1):
        for term in delta_K(k, cap=max(k, DEFAULT_DELTA_CAP)):
            if n in term.left.corolla_arities and m in term.right.corolla_arities:
                found.append(k)
                break
    return found


SKIP_REASON = "no diagonal term can be live (counting bound); not evaluated"


def expected_support(n: int, m: int, max_arity: int) -> List[int]:
    return sorted(a for a in {2, n, m, n + m - 2} if a <= max_arity)


@dataclass
class AritySupportReport:
    n: int
    m: int
    p: int
    max_arity: int
    ycap: int
    support: List[int] = field(default_factory=list)
    witnesses: Dict[int, Tuple[Tuple[TensorMonomial, ...], Element]] = field(
        default_factory=dict
    )
    scanned: List[int] = field(default_factory=list)
    skipped: List[int] = field(default_factory=list)
    truncation_count: int = 0

    @property
    def expected(self) -> List[int]:
        return expected_support(self.n, self.m, self.max_arity)

    @property
    def matches(self) -> bool:
        return self.support == self.expected

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "ycap": self.ycap,
            "max_arity": self.max_arity,
            "support": self.support,
            "expected": self.expected,
            "scanned": self.scanned,
            "skipped": self.skipped,
            "skip_reason": SKIP_REASON,
            "witnesses": [
                {
                    "arity": k,
                    "args": [a.render() for a in args],
                    "value": value.to_json(),
                }
                for k, (args, value) in sorted(self.witnesses.items())
            ],
            "truncation_count": self.truncation_count,
        }


def arity_support(
    n: int,
    m: int,
    max_arity: int,
    ycap: int = DEFAULT_YCAP,
    p: int = 2,
    cap: int = DEFAULT_DELTA_CAP,
) -> AritySupportReport:
    """Find the arities with a non-zero tensor operation.

    Every operation is linear over k[y1, y2], so scanning the 4^k
    eps-patterns with trivial y-decorations is exhaustive. Arities where no
    diagonal term can be live are ruled out by counting corolla arities and
    recorded as skipped without evaluating anything.

    Raises:
        ContractViolation: If p is not 2
        ResourceLimitError: If ``max_arity`` exceeds ``cap``
    """
    if p != 2:
        raise ContractViolation("arity scans run over F_2", "p")
    if max_arity > cap:
        raise ResourceLimitError(f"arity scans capped at {cap}", cap)
    if max_arity > n + m - 1:
        logger.info(f"scanning past n+m-1={n + m - 1}; no predicted support there")

    left, right = _factors(n, m, p, ycap)
    structure = tensor_structure(left, right, max_arity, cap=cap)
    report = AritySupportReport(n=n, m=m, p=p, max_arity=max_arity, ycap=ycap)
    basis = TensorBasis(ycap)

    for k in range(2, max_arity + 1):
        if not live_arity_possible(k, n, m) or not structure.is_supported(k):
            report.skipped.append(k)
            continue
        report.scanned.append(k)
        for pattern in basis.eps_patterns(k):
            value = structure.op(k, pattern)
            if not value.is_zero():
                report.support.append(k)
                report.witnesses[k] = (pattern, value)
                break
        state = "non-zero" if k in report.witnesses else "zero"
        logger.debug(f"arity {k} on ({n},{m}): {state}")

    report.truncation_count = structure.truncation_count
    logger.info(f"support of ({n},{m}) up to arity {max_arity}: {report.support}")
    return report


_DECORATIONS = (
    (0, 0),
    (1, 0),
    (0, 1),
    (1, 1),
)


def _decorate(
    pattern: Tuple[TensorMonomial, ...], powers: Sequence[Tuple[int, int]]
) -> Tuple[TensorMonomial, ...]:
    return tuple(
        TensorMonomial(Monomial(t.left.eps, a), Monomial(t.right.eps, b))
        for t, (a, b) in zip(pattern, powers)
    )


def expected_m4(args: Tuple[TensorMonomial, ...], ycap: int) -> Element:
    """m_4 on C_4 × C_4 computed from the closed formula.

    m_4 = m_4 ⊗ (right comb) + (left comb) ⊗ m_4: the first summand needs x
    in every left part and at most one x in the right parts; the second is
    its mirror image.
    """
    y1 = sum(t.left.a for t in args)
    y2 = sum(t.right.a for t in args)
    left_x = sum(t.left.eps for t in args)
    right_x = sum(t.right.eps for t in args)
    result: Dict[Any, int] = {}
    if left_x == 4 and right_x <= 1:
        result[TensorMonomial(Monomial(0, y1 + 1), Monomial(right_x, y2))] = 1
    if right_x == 4 and left_x <= 1:
        result[TensorMonomial(Monomial(left_x, y1), Monomial(0, y2 + 1))] = 1
    result = {
        mono: c
        for mono, c in result.items()
        if mono.left.a <= ycap and mono.right.a <= ycap
    }
    return Element.from_mapping(2, result)


M6_REFERENCE_ARGS = (X2, X2, X1X2, X1X2, X1, X1)
CLAIMED_M6_PATTERNS = 102


@dataclass
class C4C4Report:
    ycap: int
    m4_identities: List[Tuple[Tuple[TensorMonomial, ...], Element, Element]] = field(
        default_factory=list
    )
    m4_nonzero_patterns: List[Tuple[TensorMonomial, ...]] = field(default_factory=list)
    m4_unexpected: List[Tuple[TensorMonomial, ...]] = field(default_factory=list)
    m6_patterns: List[Tuple[TensorMonomial, ...]] = field(default_factory=list)
    m6_single_decorations: int = 0
    m6_reference_value: Optional[Element] = None
    truncation_count: int = 0

    @property
    def m4_failures(self) -> List[Tuple[TensorMonomial, ...]]:
        return [args for args, want, got in self.m4_identities if want != got]

    @property
    def m6_some_decoration(self) -> int:
        return len(self.m6_patterns)

    @property
    def m6_reference_ok(self) -> bool:
        expected = Element.basis(TensorMonomial(Monomial(0, 1), Monomial(0, 1)), 2)
        return self.m6_reference_value == expected

    @property
    def m6_counted(self) -> bool:
        return bool(self.m6_patterns)

    @property
    def matches_claimed_count(self) -> bool:
        counts = (self.m6_some_decoration, self.m6_single_decorations)
        return CLAIMED_M6_PATTERNS in counts

    @property
    def m6_discrepancy(self) -> Optional[str]:
        """Text for a counted m_6 that reproduces the claim under neither count."""
        if not self.m6_counted or self.matches_claimed_count:
            return None
        return (
            f"{self.m6_some_decoration} (some decoration) and"
            f" {self.m6_single_decorations} (every single decoration)"
            f" ≠ claimed {CLAIMED_M6_PATTERNS}"
        )

    @property
    def passed(self) -> bool:
        return (
            not self.m4_failures
            and not self.m4_unexpected
            and len(self.m4_nonzero_patterns) == 10
            and self.m6_reference_ok
        )

    def to_json(self) -> Dict[str, Any]:
        def render(args: Sequence[TensorMonomial]) -> List[str]:
            return [a.render() for a in args]

        return {
            "ycap": self.ycap,
            "m4": {
                "identities_checked": len(self.m4_identities),
                "failures": [render(a) for a in self.m4_failures],
                "nonzero_patterns": [render(a) for a in self.m4_nonzero_patterns],
                "unexpected": [render(a) for a in self.m4_unexpected],
            },
            "m6": {
                "reference_args": render(M6_REFERENCE_ARGS),
                "reference_value": self.m6_reference_value.to_json()
                if self.m6_reference_value is not None
                else None,
                "some_decoration": self.m6_some_decoration,
                "single_decorations": self.m6_single_decorations,
                "claimed": CLAIMED_M6_PATTERNS,
                "counted": self.m6_counted,
                "matches_claimed": self.matches_claimed_count,
                "discrepancy": self.m6_discrepancy,
                "patterns": [render(a) for a in self.m6_patterns],
            },
            "truncation_count": self.truncation_count,
            "passed": self.passed,
        }


def c4c4_example(ycap: int = 4, count_m6: bool = True) -> C4C4Report:
    """Check the m_4 table and m_6 facts of H*(C_4 × C_4) over F_2.

    m_4 is compared with :func:`expected_m4` on every eps-pattern with
    decorations from {1, y1, y2, y1*y2} kept within ``ycap``. For m_6 the
    report lists the eps-patterns with a non-zero value at trivial
    decoration and counts those staying non-zero under every
    single-argument decoration.

    Raises:
        ContractViolation: If ``ycap`` < 3
    """
    if ycap < 3:
        raise ContractViolation("the C4 x C4 example needs ycap >= 3", "ycap")
    left, right = _factors(4, 4, 2, ycap)
    structure = tensor_structure(left, right, max_arity=6)
    report = C4C4Report(ycap=ycap)
    basis = TensorBasis(ycap)

    for pattern in basis.eps_patterns(4):
        value = structure.op(4, pattern)
        formula = expected_m4(pattern, ycap)
        if formula.is_zero():
            if not value.is_zero():
                report.m4_unexpected.append(pattern)
            continue
        report.m4_nonzero_patterns.append(pattern)
        for powers in itertools.product(_DECORATIONS, repeat=4):
            args = _decorate(pattern, powers)
            top = max(sum(a for a, _ in powers), sum(b for _, b in powers))
            if top + 1 > ycap:
                continue
            report.m4_identities.append(
                (args, expected_m4(args, ycap), structure.op(4, args))
            )

    report.m6_reference_value = structure.op(6, M6_REFERENCE_ARGS)
    if count_m6:
        for pattern in basis.eps_patterns(6):
            if structure.op(6, pattern).is_zero():
                continue
            report.m6_patterns.append(pattern)
            decorated = (
                [decoration if i == position else (0, 0) for i in range(6)]
                for position in range(6)
                for decoration in _DECORATIONS[1:]
            )
            survives = all(
                not structure.op(6, _decorate(pattern, powers)).is_zero()
                for powers in decorated
            )
            if survives:
                report.m6_single_decorations += 1
        logger.info(
            f"m6 on C4 x C4: {report.m6_some_decoration} patterns,"
            f" {report.m6_single_decorations} under every single decoration"
        )
        if report.m6_discrepancy:
            logger.warning(f"m6 pattern count: {report.m6_discrepancy}")

    report.truncation_count = structure.truncation_count
    return report
