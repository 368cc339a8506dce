"""Type definitions for cskit."""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import TypedDict


# === Enums ===


class GroupId(StrEnum):
    """Matrix groups with a fixed algebra basis."""

    SO3 = "SO3"
    SU2 = "SU2"
    SL2 = "SL2"
    SO21 = "SO21"
    SO31 = "SO31"
    H3 = "H3"
    SE3 = "SE3"
    SE21 = "SE21"


class Variant(StrEnum):
    """Payload kind of a right-trivialized bundle element."""

    ADJOINT = "adjoint"  # TG, payload in the algebra
    COADJOINT = "coadjoint"  # T*G, payload in the dual


class Space(StrEnum):
    """Ambient space of a twist."""

    EUCLIDEAN = "euclidean"
    MINKOWSKI = "minkowski"


class CausalType(StrEnum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"


# === Dataclasses (internal structures) ===


@dataclass(frozen=True)
class Signature:
    """Inertia of a symmetric form."""

    neg: int
    pos: int
    zero: int

    def as_dict(self) -> "SignatureDocument":
        return {"neg": self.neg, "pos": self.pos, "zero": self.zero}


@dataclass
class CheckResult:
    """Outcome of one property check."""

    suite: str
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    """All check results of a run, in deterministic order."""

    seed: int
    trials: int
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


@dataclass
class ObstructionReport:
    """Signatures of a metric family over a parameter grid."""

    space: str
    grid: list[tuple[float, ...]]
    signatures: list[Signature]

    @property
    def min_neg(self) -> int:
        return min(s.neg for s in self.signatures)

    @property
    def has_riemannian(self) -> bool:
        """True if some member is positive definite."""
        return self.min_neg == 0

    def to_document(self) -> "ObstructionDocument":
        return {
            "grid": [list(p) for p in self.grid],
            "signatures": [s.as_dict() for s in self.signatures],
            "min_neg": self.min_neg,
        }


# === TypedDicts (JSON/config structures) ===


class BracketEntry(TypedDict):
    """One nonzero bracket [e_i, e_j] with i < j."""

    i: int
    j: int
    coeffs: dict[str, float]


class AlgebraDocument(TypedDict):
    """Lie algebra document (JSON or YAML)."""

    dim: int
    labels: list[str]
    brackets: list[BracketEntry]


class GroupElementDocument(TypedDict):
    """Group element; complex entries serialize as [re, im] pairs."""

    group: str
    matrix: list[list[float]] | list[list[list[float]]]


class SignatureDocument(TypedDict):
    neg: int
    pos: int
    zero: int


class MetricDocument(TypedDict):
    """Metric matrix in a labeled basis."""

    basis: list[str]
    matrix: list[list[float]]


class ObstructionDocument(TypedDict):
    """Signature scan over a parameter grid."""

    grid: list[list[float]]
    signatures: list[SignatureDocument]
    min_neg: int
