import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

from .exceptions import InvalidRangeError, LevelOutOfRangeError

logger = logging.getLogger(__name__)


class HopRelation(ABC):
    """Dependency relation between log indexes.

    Index j depends on ``max_lvl(j)`` earlier indexes, one per level
    1..max_lvl(j). Implementations must satisfy the relation laws checked
    by ``check_hop_laws``: genesis has no hops, every other index has at
    least one, targets are distinct per source, strictly smaller than the
    source, and no two hops properly cross.
    """

    name: str = "abstract"

    @abstractmethod
    def max_lvl(self, j: int) -> int:
        """Number of hops out of index j."""

    @abstractmethod
    def hop_target(self, j: int, level: int) -> int:
        """Target index of the hop from j at the given 1-based level."""

    def check_level(self, j: int, level: int) -> None:
        if level < 1 or level > self.max_lvl(j):
            raise LevelOutOfRangeError(
                f"level {level} out of range for index {j} (max {self.max_lvl(j)})"
            )

    def deps_of(self, j: int) -> list[int]:
        """Hop targets of j in level order 1..max_lvl(j)."""
        return [self.hop_target(j, level) for level in range(1, self.max_lvl(j) + 1)]

    def single_hop_level(self, frm: int, to: int) -> int:
        """Highest level whose hop from ``frm`` does not overshoot ``to``."""
        if to >= frm:
            raise InvalidRangeError(f"cannot hop from {frm} to {to}: target not below source")
        best = 0
        for level in range(1, self.max_lvl(frm) + 1):
            if self.hop_target(frm, level) >= to:
                best = level
        if best == 0:
            raise InvalidRangeError(f"every hop from {frm} overshoots {to}")
        return best


class PowerOfTwoHops(HopRelation):
    """Deterministic skip list: level l from j skips 2^(l-1) entries back."""

    name = "pow2"

    def max_lvl(self, j: int) -> int:
        if j < 0:
            raise InvalidRangeError(f"negative index {j}")
        if j == 0:
            return 0
        level = 1
        while j % 2 == 0:
            level += 1
            j //= 2
        return level

    def hop_target(self, j: int, level: int) -> int:
        self.check_level(j, level)
        return j - (1 << (level - 1))

    def single_hop_level(self, frm: int, to: int) -> int:
        if to >= frm:
            raise InvalidRangeError(f"cannot hop from {frm} to {to}: target not below source")
        # 1 + floor(log2(frm - to)) is the bit length of the distance
        return min((frm - to).bit_length(), self.max_lvl(frm))


POW2 = PowerOfTwoHops()

RELATIONS: dict[str, HopRelation] = {POW2.name: POW2}


def max_lvl(j: int) -> int:
    return POW2.max_lvl(j)


def max_lvl_closed_form(j: int) -> int:
    """max_lvl via the factorization j = 2^l * d with d odd."""
    if j == 0:
        return 0
    return (j & -j).bit_length()


def hop_target(j: int, level: int) -> int:
    return POW2.hop_target(j, level)


def single_hop_level(frm: int, to: int) -> int:
    return POW2.single_hop_level(frm, to)


def deps_of(j: int) -> list[int]:
    return POW2.deps_of(j)


class HopLaw(Enum):
    GENESIS_LEVEL = "genesis-level"
    POSITIVE_LEVEL = "positive-level"
    INJECTIVE = "injective"
    PROGRESS = "progress"
    NO_CROSS = "no-cross"
    LEVEL_MID = "level-mid"
    CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class LawViolation:
    """A single counterexample to a relation law."""

    law: HopLaw
    detail: str


@dataclass
class LawReport:
    """Outcome of an exhaustive law check up to ``bound``."""

    bound: int
    violations: list[LawViolation] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def of(self, law: HopLaw) -> list[LawViolation]:
        return [v for v in self.violations if v.law is law]


def _hops_upto(rel: HopRelation, n: int) -> list[tuple[int, int, int]]:
    return [
        (j, level, rel.hop_target(j, level))
        for j in range(1, n + 1)
        for level in range(1, rel.max_lvl(j) + 1)
    ]


def check_hop_laws(rel: HopRelation, n: int) -> LawReport:
    """
    Exhaustively check the relation laws for all hops with sources <= n.

    Args:
        rel: Relation under test.
        n: Largest hop source to enumerate (>= 1).

    Returns:
        LawReport listing every violation found; empty when the relation is sound.
    """
    if n < 1:
        raise InvalidRangeError(f"law check bound must be at least 1, got {n}")

    report = LawReport(bound=n)
    if rel.max_lvl(0) != 0:
        report.violations.append(
            LawViolation(HopLaw.GENESIS_LEVEL, f"max_lvl(0) = {rel.max_lvl(0)}")
        )

    deps: dict[int, list[int]] = {}
    for j in range(1, n + 1):
        if rel.max_lvl(j) <= 0:
            report.violations.append(
                LawViolation(HopLaw.POSITIVE_LEVEL, f"max_lvl({j}) = {rel.max_lvl(j)}")
            )
        targets = rel.deps_of(j)
        deps[j] = targets
        if len(set(targets)) != len(targets):
            report.violations.append(
                LawViolation(HopLaw.INJECTIVE, f"hops from {j} share a target: {targets}")
            )
        for level, t in enumerate(targets, start=1):
            if not 0 <= t < j:
                report.violations.append(
                    LawViolation(HopLaw.PROGRESS, f"hop {j} -> {t} at level {level}")
                )

    # h2 crosses h1 when t2 < t1 < j2 < j1; only sources inside h1's span matter
    lowest = {j: min(targets) for j, targets in deps.items() if targets}
    for j1, targets in deps.items():
        for t1 in targets:
            for j2 in range(t1 + 1, j1):
                if lowest.get(j2, j2) >= t1:
                    continue
                for t2 in deps[j2]:
                    if t2 < t1:
                        report.violations.append(
                            LawViolation(
                                HopLaw.NO_CROSS,
                                f"hop {j2} -> {t2} crosses hop {j1} -> {t1}",
                            )
                        )

    logger.info(
        "checked %s laws up to %d: %d violation(s)", rel.name, n, len(report.violations)
    )
    return report


def check_level_mid(rel: HopRelation, n: int) -> list[LawViolation]:
    """Every index strictly inside a level-l hop has max_lvl <= l."""
    violations = []
    for j, level, t in _hops_upto(rel, n):
        for k in range(t + 1, j):
            if rel.max_lvl(k) > level:
                violations.append(
                    LawViolation(
                        HopLaw.LEVEL_MID,
                        f"max_lvl({k}) = {rel.max_lvl(k)} inside level-{level} hop {j} -> {t}",
                    )
                )
    return violations


def check_max_lvl_closed_form(n: int) -> list[LawViolation]:
    """Compare the recursive max_lvl with the odd-factorization form for j <= n."""
    return [
        LawViolation(
            HopLaw.CLOSED_FORM,
            f"max_lvl({j}) = {max_lvl(j)} but closed form gives {max_lvl_closed_form(j)}",
        )
        for j in range(n + 1)
        if max_lvl(j) != max_lvl_closed_form(j)
    ]
