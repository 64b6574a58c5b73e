"""A-infinity structures over prime fields.

Two families of structures live here:

* :class:`MadsenAlgebra` on H*(C_n) = Λ(x) ⊗ k[y], with the cup product as
  ``m_2`` and ``m_n(x y^i1, ..., x y^in) = y^(i1 + ... + in + 1)``;
* :class:`TensorProductStructure` on the tensor product of two structures,
  whose ``m_k`` sums, over the terms ``T ⊗ S`` of the associahedral diagonal,
  the tree operations ``T`` on the left factors tensored with ``S`` on the
  right factors.

Operations are evaluated on basis tuples and memoized; multilinear extension
to arbitrary :class:`Element` arguments happens in
:meth:`AInfStructure.evaluate`. y-exponents are capped (``ycap``); outputs
beyond the cap are truncated to zero and counted.
"""

import itertools
import logging
import re
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

from .exceptions import (
    ContractViolation,
    MonomialParseError,
    ResourceLimitError,
    VerificationError,
)
from .scalars import check_prime
from .trees import DiagonalTermK, PlanarTree, delta_K

logger = logging.getLogger(__name__)

DEFAULT_YCAP = 6
DEFAULT_DELTA_CAP = 9


@dataclass(frozen=True, order=True)
class Monomial:
    """``x^eps y^a`` in Λ(x) ⊗ k[y]; degree eps + 2a."""

    eps: int = 0
    a: int = 0

    def __post_init__(self) -> None:
        if self.eps not in (0, 1) or self.a < 0:
            raise ContractViolation(f"invalid monomial x^{self.eps} y^{self.a}")

    @property
    def degree(self) -> int:
        return self.eps + 2 * self.a

    def times(self, other: "Monomial") -> Optional["Monomial"]:
        """Cup product; ``None`` when x^2 appears."""
        if self.eps and other.eps:
            return None
        return Monomial(self.eps + other.eps, self.a + other.a)

    def render(self, x: str = "x", y: str = "y") -> str:
        factors = []
        if self.eps:
            factors.append(x)
        if self.a == 1:
            factors.append(y)
        elif self.a > 1:
            factors.append(f"{y}^{self.a}")
        return "*".join(factors) or "1"


@dataclass(frozen=True, order=True)
class TensorMonomial:
    """``u ⊗ v`` written with x1 = x⊗1, x2 = 1⊗x, y1 = y⊗1, y2 = 1⊗y."""

    left: Monomial
    right: Monomial

    @property
    def degree(self) -> int:
        return self.left.degree + self.right.degree

    def render(self) -> str:
        factors = []
        if self.left.eps:
            factors.append("x1")
        if self.right.eps:
            factors.append("x2")
        for name, power in (("y1", self.left.a), ("y2", self.right.a)):
            if power == 1:
                factors.append(name)
            elif power > 1:
                factors.append(f"{name}^{power}")
        return "*".join(factors) or "1"


BasisMonomial = Union[Monomial, TensorMonomial]


@dataclass(frozen=True)
class Element:
    """Finite F_p-combination of basis monomials, zero coefficients absent."""

    p: int
    terms: Tuple[Tuple[Any, int], ...] = ()

    @classmethod
    def from_mapping(cls, p: int, mapping: Mapping[Any, int]) -> "Element":
        reduced = ((m, c % p) for m, c in mapping.items())
        return cls(p, tuple(sorted((m, c) for m, c in reduced if c)))

    @classmethod
    def zero(cls, p: int) -> "Element":
        return cls(p, ())

    @classmethod
    def basis(cls, monomial: Any, p: int, coeff: int = 1) -> "Element":
        return cls.from_mapping(p, {monomial: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> Tuple[Tuple[Any, int], ...]:
        return self.terms

    def monomials(self) -> List[Any]:
        return [m for m, _ in self.terms]

    def coefficient(self, monomial: Any) -> int:
        return dict(self.terms).get(monomial, 0)

    def _check(self, other: "Element") -> None:
        if other.p != self.p:
            raise ContractViolation(
                f"cannot combine elements over F_{self.p} and F_{other.p}", "p"
            )

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        total: Dict[Any, int] = dict(self.terms)
        for m, c in other.terms:
            total[m] = total.get(m, 0) + c
        return Element.from_mapping(self.p, total)

    def scale(self, factor: int) -> "Element":
        return Element.from_mapping(self.p, {m: c * factor for m, c in self.terms})

    def __neg__(self) -> "Element":
        return self.scale(-1)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def tensor(self, other: "Element") -> "Element":
        """``self ⊗ other`` for two single-factor elements."""
        self._check(other)
        total: Dict[Any, int] = {}
        for ma, ca in self.terms:
            for mb, cb in other.terms:
                key = TensorMonomial(ma, mb)
                total[key] = total.get(key, 0) + ca * cb
        return Element.from_mapping(self.p, total)

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            text = m.render()
            parts.append(text if c == 1 else f"{c}*{text}")
        return " + ".join(parts)

    def to_json(self) -> List[Dict[str, Any]]:
        return [{"monomial": m.render(), "coeff": c} for m, c in self.terms]

    def __str__(self) -> str:
        return self.render()


def _power(token: str, text: str) -> int:
    if "^" not in token:
        return 1
    exponent = token.split("^", 1)[1]
    if not exponent.isdigit():
        raise MonomialParseError(f"bad exponent in {text!r}", token)
    return int(exponent)


_TENSOR_TOKEN = re.compile(r"^(x1|x2|x|z|y1|y2|y|w|1)(\^\d+)?$")
_CYCLIC_TOKEN = re.compile(r"^(x|y|1)(\^\d+)?$")


def parse_tensor_monomial(text: str) -> TensorMonomial:
    """Parse ``x1*x2*y1^2*y2`` (aliases x, z, y, w; ``1`` is the unit).

    Raises:
        MonomialParseError: On unknown tokens or a repeated exterior generator
    """
    eps = [0, 0]
    powers = [0, 0]
    for token in text.strip().split("*"):
        token = token.strip()
        match = _TENSOR_TOKEN.match(token)
        if not match:
            raise MonomialParseError(f"unknown token {token!r} in {text!r}", token)
        name = match.group(1)
        if name == "1":
            if match.group(2):
                raise MonomialParseError(
                    f"unit cannot carry a power in {text!r}", token
                )
            continue
        side = 0 if name in ("x1", "x", "y1", "y") else 1
        if name in ("x1", "x", "x2", "z"):
            if match.group(2) or eps[side]:
                raise MonomialParseError(
                    f"exterior generator squared in {text!r}", token
                )
            eps[side] = 1
        else:
            powers[side] += _power(token, text)
    return TensorMonomial(Monomial(eps[0], powers[0]), Monomial(eps[1], powers[1]))


def parse_cyclic_monomial(text: str) -> Monomial:
    """Parse ``x*y^2`` style monomials of a single cyclic factor."""
    eps = 0
    power = 0
    for token in text.strip().split("*"):
        token = token.strip()
        match = _CYCLIC_TOKEN.match(token)
        if not match:
            raise MonomialParseError(f"unknown token {token!r} in {text!r}", token)
        if match.group(1) == "x":
            if match.group(2) or eps:
                raise MonomialParseError(f"x squared in {text!r}", token)
            eps = 1
        elif match.group(1) == "y":
            power += _power(token, text)
    return Monomial(eps, power)


def parse_arguments(text: str) -> List[TensorMonomial]:
    """Parse a comma-separated list of tensor monomials."""
    if not text.strip():
        raise MonomialParseError("empty argument list", text)
    return [parse_tensor_monomial(part) for part in text.split(",")]


def element_from_json(payload: Sequence[Mapping[str, Any]], p: int) -> Element:
    """Inverse of :meth:`Element.to_json` for tensor elements."""
    mapping: Dict[Any, int] = {}
    for item in payload:
        monomial = parse_tensor_monomial(str(item["monomial"]))
        mapping[monomial] = mapping.get(monomial, 0) + int(item["coeff"])
    return Element.from_mapping(p, mapping)


class CyclicBasis:
    """Basis of H*(C_n) = Λ(x) ⊗ k[y] below a y-exponent cap."""

    def __init__(self, ycap: int):
        self.ycap = ycap
        self.unit = Monomial(0, 0)

    def contains(self, monomial: Any) -> bool:
        return isinstance(monomial, Monomial) and monomial.a <= self.ycap

    def monomials(self, max_degree: Optional[int] = None) -> List[Monomial]:
        found = [Monomial(e, a) for a in range(self.ycap + 1) for e in (0, 1)]
        if max_degree is not None:
            found = [m for m in found if m.degree <= max_degree]
        return sorted(found, key=lambda m: (m.degree, m))


class TensorBasis:
    """Basis of H*(C_n) ⊗ H*(C_m) below a per-factor y-exponent cap."""

    def __init__(self, ycap: int):
        self.ycap = ycap
        self.unit = TensorMonomial(Monomial(), Monomial())

    def contains(self, monomial: Any) -> bool:
        return (
            isinstance(monomial, TensorMonomial)
            and monomial.left.a <= self.ycap
            and monomial.right.a <= self.ycap
        )

    def monomials(self, max_degree: Optional[int] = None) -> List[TensorMonomial]:
        factor = CyclicBasis(self.ycap).monomials()
        found = [TensorMonomial(u, v) for u in factor for v in factor]
        if max_degree is not None:
            found = [m for m in found if m.degree <= max_degree]
        return sorted(found, key=lambda m: (m.degree, m))

    @staticmethod
    def exterior_monomials() -> List[TensorMonomial]:
        """The four eps-patterns 1, x1, x2, x1*x2."""
        return [
            TensorMonomial(Monomial(e1, 0), Monomial(e2, 0))
            for e1, e2 in ((0, 0), (1, 0), (0, 1), (1, 1))
        ]

    def eps_patterns(self, k: int) -> Iterator[Tuple[TensorMonomial, ...]]:
        return itertools.product(self.exterior_monomials(), repeat=k)


Basis = Union[CyclicBasis, TensorBasis]


def basis_tuples(
    basis: Basis, k: int, max_total_degree: int
) -> Iterator[Tuple[Any, ...]]:
    """All k-tuples of basis monomials with total degree <= the bound."""
    pool = basis.monomials(max_total_degree)

    def extend(prefix: Tuple[Any, ...], budget: int) -> Iterator[Tuple[Any, ...]]:
        if len(prefix) == k:
            yield prefix
            return
        for m in pool:
            if m.degree > budget:
                break
            yield from extend(prefix + (m,), budget - m.degree)

    yield from extend((), max_total_degree)


class AInfStructure(ABC):
    """Arity-indexed operations given on basis tuples.

    Subclasses implement :meth:`_compute` for supported arities; this class
    handles arity checks, memoization, degree homogeneity and the multilinear
    extension. ``m_1`` is always zero.
    """

    def __init__(self, name: str, p: int, basis: Basis, ycap: int):
        self.name = name
        self.p = check_prime(p)
        self.basis = basis
        self.ycap = ycap
        self._cache: Dict[Tuple[int, Tuple[Any, ...]], Element] = {}
        self._lock = threading.Lock()
        self._truncations = 0

    @property
    @abstractmethod
    def max_arity(self) -> Optional[int]:
        """Largest arity that can be evaluated, ``None`` when unbounded."""

    @property
    @abstractmethod
    def supported_arities(self) -> Optional[FrozenSet[int]]:
        """Arities with possibly non-zero operations, ``None`` if unbounded."""

    @abstractmethod
    def is_supported(self, k: int) -> bool:
        """Whether m_k may be non-zero."""

    @abstractmethod
    def _compute(self, args: Tuple[Any, ...]) -> Element:
        """Value of m_k on a basis tuple of a supported arity."""

    @property
    def truncation_count(self) -> int:
        return self._truncations

    def _note_truncation(self) -> None:
        with self._lock:
            self._truncations += 1

    def zero(self) -> Element:
        return Element.zero(self.p)

    def op(self, k: int, args: Sequence[Any]) -> Element:
        """m_k on a tuple of basis monomials."""
        args = tuple(args)
        if len(args) != k:
            raise ContractViolation(f"m_{k} needs {k} arguments, got {len(args)}")
        if self.max_arity is not None and k > self.max_arity:
            raise ResourceLimitError(
                f"{self.name} is built up to arity {self.max_arity}", self.max_arity
            )
        for a in args:
            if not self.basis.contains(a):
                raise ContractViolation(f"{a!r} is not a basis monomial of {self.name}")
        if k < 2 or not self.is_supported(k):
            return self.zero()

        key = (k, args)
        cached = self._cache.get(key)
        if cached is not None:
            return cached

        value = self._compute(args)
        expected = sum(a.degree for a in args) + 2 - k
        for monomial in value.monomials():
            if monomial.degree != expected:
                raise VerificationError(
                    f"m_{k} of {self.name} is not homogeneous of degree {2 - k}",
                    {"args": [a.render() for a in args], "value": value.render()},
                )
        self._cache[key] = value
        return value

    def evaluate(self, args: Sequence[Element]) -> Element:
        """m_k on arbitrary elements, expanded multilinearly."""
        k = len(args)
        if any(arg.is_zero() for arg in args):
            return self.zero()
        if k < 2 or not self.is_supported(k):
            return self.zero()

        total: Dict[Any, int] = {}
        for combo in itertools.product(*(arg.items() for arg in args)):
            coeff = 1
            for _, c in combo:
                coeff *= c
            value = self.op(k, tuple(m for m, _ in combo))
            for m, c in value.items():
                total[m] = total.get(m, 0) + coeff * c
        return Element.from_mapping(self.p, total)

    def with_override(self, args: Sequence[Any], value: Element) -> "AInfStructure":
        """Copy of this structure with one table entry replaced."""
        return _OverriddenStructure(self, {(len(args), tuple(args)): value})


class _OverriddenStructure(AInfStructure):
    def __init__(
        self,
        base: AInfStructure,
        overrides: Dict[Tuple[int, Tuple[Any, ...]], Element],
    ):
        super().__init__(f"{base.name} (modified)", base.p, base.basis, base.ycap)
        self._base = base
        self._overrides = overrides

    @property
    def max_arity(self) -> Optional[int]:
        return self._base.max_arity

    @property
    def supported_arities(self) -> Optional[FrozenSet[int]]:
        return self._base.supported_arities

    def is_supported(self, k: int) -> bool:
        return self._base.is_supported(k) or any(
            arity == k for arity, _ in self._overrides
        )

    @property
    def truncation_count(self) -> int:
        return self._base.truncation_count

    def op(self, k: int, args: Sequence[Any]) -> Element:
        override = self._overrides.get((k, tuple(args)))
        if override is not None:
            return override
        return self._base.op(k, args)

    def _compute(self, args: Tuple[Any, ...]) -> Element:
        return self._base.op(len(args), args)


class MadsenAlgebra(AInfStructure):
    """H*(C_n) with the cup product and the single higher operation m_n."""

    def __init__(self, n: int, p: int, ycap: int):
        super().__init__(f"H*(C_{n})", p, CyclicBasis(ycap), ycap)
        self.n = n

    @property
    def max_arity(self) -> Optional[int]:
        return None

    @property
    def supported_arities(self) -> FrozenSet[int]:
        return frozenset({2, self.n})

    def is_supported(self, k: int) -> bool:
        return k in (2, self.n)

    def _compute(self, args: Tuple[Any, ...]) -> Element:
        if len(args) == 2:
            product = args[0].times(args[1])
            if product is None:
                return self.zero()
            return self._capped(product)
        if all(a.eps == 1 for a in args):
            return self._capped(Monomial(0, sum(a.a for a in args) + 1))
        return self.zero()

    def _capped(self, monomial: Monomial) -> Element:
        if monomial.a > self.ycap:
            self._note_truncation()
            return self.zero()
        return Element.basis(monomial, self.p)


def madsen_algebra(
    n: int,
    p: int = 2,
    ycap: int = DEFAULT_YCAP,
    require_divisibility: bool = True,
) -> MadsenAlgebra:
    """Build the A-infinity structure on H*(C_n) over F_p.

    Args:
        n: Order of the cyclic group, at least 3
        p: Prime characteristic
        ycap: Largest y-exponent kept; larger outputs truncate to zero
        require_divisibility: Reject p not dividing n. Switching this off
            gives the formal model with the same operation tables.

    Raises:
        ContractViolation: If n < 3, p is not prime, or p does not divide n
    """
    check_prime(p)
    if n < 3:
        raise ContractViolation("n must be at least 3", "n")
    if require_divisibility and n % p:
        raise ContractViolation(f"p={p} does not divide n={n}", "p")
    if ycap < 0:
        raise ContractViolation("ycap must be non-negative", "ycap")
    if ycap < n // 2 + 1:
        logger.debug(f"ycap={ycap} is small for n={n}; expect truncation")
    return MadsenAlgebra(n, p, ycap)


def evaluate_tree(
    tree: PlanarTree, structure: AInfStructure, args: Sequence[Element]
) -> Element:
    """Compose the operations of ``structure`` along a planar tree.

    A node with j children applies m_j to the values of its children; leaves
    take the arguments in planar order. Any node of unsupported arity makes
    the result zero.

    Raises:
        ContractViolation: If the argument count differs from the leaf count
    """
    if len(args) != tree.leaf_count:
        raise ContractViolation(
            f"tree has {tree.leaf_count} leaves but got {len(args)} arguments"
        )
    if not all(structure.is_supported(a) for a in tree.corolla_arities):
        return structure.zero()

    feed = iter(args)

    def walk(node: PlanarTree) -> Element:
        if node.is_leaf:
            return next(feed)
        values = [walk(child) for child in node.children]
        return structure.evaluate(values)

    return walk(tree)


SignRule = Callable[[PlanarTree, PlanarTree, Tuple[TensorMonomial, ...]], int]


def koszul_interchange_sign(
    left: PlanarTree, right: PlanarTree, args: Tuple[TensorMonomial, ...]
) -> int:
    """Sign of moving every b_i past the later a_j and S past all a_j."""
    exponent = sum(
        args[i].right.degree * args[j].left.degree
        for i in range(len(args))
        for j in range(i + 1, len(args))
    )
    exponent += right.deficiency * sum(a.left.degree for a in args)
    return -1 if exponent % 2 else 1


def live_arity_possible(
    k: int, left_arities: Iterable[int], right_arities: Iterable[int]
) -> bool:
    """Whether some diagonal term of arity k can use only the given corollas.

    A tree with k leaves built from binary nodes and corollas of arities
    a_i > 2 has dimension sum(a_i - 2) and needs 1 + sum(a_i - 1) <= k
    leaves; the two dimensions of a diagonal term add up to k - 2.
    """

    def dimensions(arities: Iterable[int]) -> Set[int]:
        large = sorted({a for a in arities if a > 2})
        reachable = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            used, dim = frontier.pop()
            for a in large:
                state = (used + a - 1, dim + a - 2)
                if state[0] <= k - 1 and state not in reachable:
                    reachable.add(state)
                    frontier.append(state)
        return {dim for _, dim in reachable}

    right_dims = dimensions(right_arities)
    return any(k - 2 - d in right_dims for d in dimensions(left_arities))


class TensorProductStructure(AInfStructure):
    """Tensor product of two structures through the associahedral diagonal."""

    def __init__(
        self,
        left: AInfStructure,
        right: AInfStructure,
        max_arity: int,
        sign_rule: Optional[SignRule] = None,
    ):
        ycap = min(left.ycap, right.ycap)
        name = f"{left.name} ⊗ {right.name}"
        super().__init__(name, left.p, TensorBasis(ycap), ycap)
        self.left = left
        self.right = right
        self._max_arity = max_arity
        self.sign_rule = sign_rule
        self._live: Dict[int, Tuple[DiagonalTermK, ...]] = {}
        self._tree_cache: Dict[Tuple[int, int, str, Tuple[Any, ...]], Element] = {}

    @property
    def max_arity(self) -> Optional[int]:
        return self._max_arity

    @property
    def supported_arities(self) -> FrozenSet[int]:
        return frozenset(
            k for k in range(2, self._max_arity + 1) if self.is_supported(k)
        )

    @property
    def truncation_count(self) -> int:
        return (
            self._truncations + self.left.truncation_count + self.right.truncation_count
        )

    def _possible(self, k: int) -> bool:
        left_set = self.left.supported_arities
        right_set = self.right.supported_arities
        if left_set is None or right_set is None:
            return True
        return live_arity_possible(k, left_set, right_set)

    def _term_live(self, term: DiagonalTermK) -> bool:
        return all(
            self.left.is_supported(a) for a in term.left.corolla_arities
        ) and all(self.right.is_supported(a) for a in term.right.corolla_arities)

    def live_terms(self, k: int) -> Tuple[DiagonalTermK, ...]:
        """Diagonal terms of arity k whose corollas both factors support.

        Filled once per arity under a lock.
        """
        cached = self._live.get(k)
        if cached is not None:
            return cached
        with self._lock:
            if k not in self._live:
                if k < 2 or k > self._max_arity or not self._possible(k):
                    terms: Tuple[DiagonalTermK, ...] = ()
                else:
                    terms = tuple(
                        term
                        for term in delta_K(k, cap=max(k, DEFAULT_DELTA_CAP), p=self.p)
                        if self._term_live(term)
                    )
                self._live[k] = terms
                logger.debug(f"{self.name}: {len(terms)} live terms in arity {k}")
            return self._live[k]

    def is_supported(self, k: int) -> bool:
        return 2 <= k <= self._max_arity and bool(self.live_terms(k))

    def _side(
        self,
        k: int,
        index: int,
        side: str,
        tree: PlanarTree,
        structure: AInfStructure,
        monomials: Tuple[Any, ...],
    ) -> Element:
        key = (k, index, side, monomials)
        cached = self._tree_cache.get(key)
        if cached is None:
            args = [Element.basis(m, self.p) for m in monomials]
            cached = evaluate_tree(tree, structure, args)
            self._tree_cache[key] = cached
        return cached

    def _compute(self, args: Tuple[Any, ...]) -> Element:
        k = len(args)
        lefts = tuple(a.left for a in args)
        rights = tuple(a.right for a in args)
        total: Dict[Any, int] = {}
        for index, term in enumerate(self.live_terms(k)):
            value_left = self._side(k, index, "L", term.left, self.left, lefts)
            if value_left.is_zero():
                continue
            value_right = self._side(k, index, "R", term.right, self.right, rights)
            if value_right.is_zero():
                continue
            coeff = term.coeff.residue
            if self.sign_rule is not None:
                coeff *= self.sign_rule(term.left, term.right, args)
            for m, c in value_left.tensor(value_right).items():
                total[m] = total.get(m, 0) + coeff * c
        return Element.from_mapping(self.p, total)


def tensor_structure(
    left: AInfStructure,
    right: AInfStructure,
    max_arity: int,
    sign_rule: Optional[SignRule] = None,
    experimental_signs: bool = False,
    cap: int = DEFAULT_DELTA_CAP,
) -> TensorProductStructure:
    """A-infinity structure on ``left ⊗ right`` up to ``max_arity``.

    Over F_2 no signs are needed. Odd characteristic requires
    ``experimental_signs=True`` and uses ``sign_rule`` (Koszul interchange
    by default).

    Raises:
        ContractViolation: On a characteristic mismatch, or odd p without
            the experimental flag
        ResourceLimitError: If ``max_arity`` exceeds ``cap``
    """
    if left.p != right.p:
        raise ContractViolation(
            f"factors live over F_{left.p} and F_{right.p}", "right"
        )
    if max_arity > cap:
        raise ResourceLimitError(f"tensor operations capped at arity {cap}", cap)
    if max_arity < 2:
        raise ContractViolation("max_arity must be at least 2", "max_arity")
    if left.p != 2:
        if not experimental_signs:
            raise ContractViolation(
                "sign conventions in odd characteristic are experimental;"
                " pass experimental_signs=True",
                "p",
            )
        sign_rule = sign_rule or koszul_interchange_sign
        logger.warning(f"using experimental signs over F_{left.p}")
    else:
        sign_rule = None
    return TensorProductStructure(left, right, max_arity, sign_rule)


StasheffSign = Callable[[int, int, int, Tuple[Any, ...]], int]


def standard_stasheff_sign(i: int, j: int, t: int, args: Tuple[Any, ...]) -> int:
    """(-1)^(r + s*u) with the Koszul sign of m_j passing the first t inputs.

    Here r = t inputs precede the inner operation, s = j is its arity and u
    inputs follow it.
    """
    after = len(args) - t - j
    exponent = t + j * after + j * sum(a.degree for a in args[:t])
    return -1 if exponent % 2 else 1


@dataclass
class StasheffReport:
    arity: int
    checked: int = 0
    violations: List[Tuple[Tuple[Any, ...], Element]] = field(default_factory=list)
    truncation_count: int = 0
    advisory: bool = False

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> Dict[str, Any]:
        return {
            "arity": self.arity,
            "checked": self.checked,
            "advisory": self.advisory,
            "truncation_count": self.truncation_count,
            "violations": [
                {"args": [a.render() for a in args], "value": value.to_json()}
                for args, value in self.violations
            ],
        }


def stasheff_check(
    structure: AInfStructure,
    arity: int,
    tuples: Iterable[Sequence[Any]],
    sign: Optional[StasheffSign] = None,
) -> StasheffReport:
    """Evaluate the Stasheff identity of one arity on the given tuples.

    Sums m_i(a_1, ..., m_j(a_(t+1), ..., a_(t+j)), ..., a_N) over i + j = N + 1
    and every position t; terms with m_1 vanish. Over F_2 no signs enter.
    In odd characteristic ``sign`` (default :func:`standard_stasheff_sign`)
    is applied and the report is marked advisory.

    Raises:
        ContractViolation: If the structure cannot evaluate arity N - 1
    """
    if arity < 2:
        raise ContractViolation("arity must be at least 2", "arity")
    if structure.max_arity is not None and structure.max_arity < arity - 1:
        raise ContractViolation(
            f"{structure.name} stops at arity {structure.max_arity};"
            f" identity {arity} needs {arity - 1}",
            "arity",
        )
    advisory = structure.p != 2
    if advisory and sign is None:
        sign = standard_stasheff_sign

    report = StasheffReport(arity=arity, advisory=advisory)
    p = structure.p
    pairs = [
        (arity + 1 - j, j)
        for j in range(2, arity)
        if structure.is_supported(j) and structure.is_supported(arity + 1 - j)
    ]
    for raw in tuples:
        args = tuple(raw)
        if len(args) != arity:
            raise ContractViolation(f"tuple {args!r} does not have {arity} entries")
        total = Element.zero(p)
        for i, j in pairs:
            for t in range(0, arity - j + 1):
                inner = structure.op(j, args[t : t + j])
                if inner.is_zero():
                    continue
                outer = (
                    [Element.basis(a, p) for a in args[:t]]
                    + [inner]
                    + [Element.basis(a, p) for a in args[t + j :]]
                )
                value = structure.evaluate(outer)
                if value.is_zero():
                    continue
                if sign is not None:
                    value = value.scale(sign(i, j, t, args))
                total = total + value
        report.checked += 1
        if not total.is_zero():
            report.violations.append((args, total))
    report.truncation_count = structure.truncation_count
    logger.info(
        f"Stasheff identity {arity} on {structure.name}: {report.checked} tuples,"
        f" {len(report.violations)} violations"
    )
    return report
