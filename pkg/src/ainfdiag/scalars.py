"""Prime-field scalars."""

from dataclasses import dataclass
from functools import lru_cache

from sympy import isprime

from .exceptions import ContractViolation


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Return ``p`` if it is prime.

    Raises:
        ContractViolation: If ``p`` is not a prime number
    """
    if not isinstance(p, int) or not isprime(p):
        raise ContractViolation(f"characteristic must be prime, got {p!r}", "p")
    return p


@dataclass(frozen=True)
class Scalar:
    """An element of F_p stored as its least non-negative residue."""

    residue: int
    p: int = 2

    def __post_init__(self) -> None:
        check_prime(self.p)
        if not 0 <= self.residue < self.p:
            object.__setattr__(self, "residue", self.residue % self.p)

    @classmethod
    def one(cls, p: int = 2) -> "Scalar":
        return cls(1, p)

    @classmethod
    def zero(cls, p: int = 2) -> "Scalar":
        return cls(0, p)

    def _same_field(self, other: "Scalar") -> None:
        if other.p != self.p:
            raise ContractViolation(
                f"cannot combine scalars over F_{self.p} and F_{other.p}", "p"
            )

    def __add__(self, other: "Scalar") -> "Scalar":
        self._same_field(other)
        return Scalar(self.residue + other.residue, self.p)

    def __sub__(self, other: "Scalar") -> "Scalar":
        self._same_field(other)
        return Scalar(self.residue - other.residue, self.p)

    def __mul__(self, other: "Scalar") -> "Scalar":
        self._same_field(other)
        return Scalar(self.residue * other.residue, self.p)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.residue, self.p)

    def __bool__(self) -> bool:
        return self.residue != 0

    def __int__(self) -> int:
        return self.residue

    def __str__(self) -> str:
        return str(self.residue)
