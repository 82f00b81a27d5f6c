import logging
from dataclasses import dataclass
from typing import Iterator

from .exceptions import InvalidRangeError
from .hops import POW2, HopRelation
from .proofs import normalized_route

logger = logging.getLogger(__name__)


def ceil_log2(x: int) -> int:
    return (x - 1).bit_length()


def conservative_bound(i: int, j: int) -> tuple[int, int]:
    """(max hops, max digests) for a normalized proof from j down to i."""
    hops = 2 * ceil_log2(1 + j - i)
    return hops, hops * ceil_log2(j)


@dataclass(frozen=True)
class ProofSize:
    """
    Shape of the normalized advancement proof from j down to i.

    ``digests`` counts one datum digest per hop plus each distinct off-path
    dependency once, genesis included; ``references`` is the same count
    without deduplication (every hop lists all of its other dependencies).
    """

    i: int
    j: int
    hops: int
    digests: int
    digests_without_genesis: int
    references: int

    @property
    def visited(self) -> int:
        """Size of the visited set, both endpoints included."""
        return self.hops + 1

    @property
    def visited_without_target(self) -> int:
        """Visited indexes other than the target, one per hop source."""
        return self.hops

    @property
    def savings(self) -> int:
        return self.references - self.digests


def proof_size(
    i: int, j: int, rel: HopRelation = POW2, deps_table: list[list[int]] | None = None
) -> ProofSize:
    route = normalized_route(i, j, rel)
    visited = {src for src, _ in route} | {i}
    off_path = set()
    references = 0
    for src, _ in route:
        deps = deps_table[src] if deps_table is not None else rel.deps_of(src)
        references += len(deps)
        off_path.update(d for d in deps if d not in visited)
    digests = len(route) + len(off_path)
    return ProofSize(
        i=i,
        j=j,
        hops=len(route),
        digests=digests,
        digests_without_genesis=digests - (0 in off_path),
        references=references,
    )


def iter_proof_sizes(n: int, rel: HopRelation = POW2) -> Iterator[ProofSize]:
    """Every normalized proof with 1 <= i < j < n."""
    deps_table = [rel.deps_of(k) for k in range(n)]
    for i in range(1, n):
        for j in range(i + 1, n):
            yield proof_size(i, j, rel, deps_table)


@dataclass(frozen=True)
class CensusReport:
    """Summary over all normalized proofs between indexes below ``bound``."""

    bound: int
    proofs: int
    longest: ProofSize | None
    largest: ProofSize | None
    mean_digests: float
    mean_savings: float

    def rows(self) -> list[tuple[str, str]]:
        """Summary rows; extremes read ``-`` when there is no proof."""

        def field_of(size: ProofSize | None, name: str) -> str:
            return "-" if size is None else str(getattr(size, name))

        return [
            ("bound", str(self.bound)),
            ("proofs", str(self.proofs)),
            ("longest_i", field_of(self.longest, "i")),
            ("longest_j", field_of(self.longest, "j")),
            ("longest_hops", field_of(self.longest, "hops")),
            ("longest_visited", field_of(self.longest, "visited")),
            ("longest_visited_without_target", field_of(self.longest, "visited_without_target")),
            ("largest_i", field_of(self.largest, "i")),
            ("largest_j", field_of(self.largest, "j")),
            ("largest_digests", field_of(self.largest, "digests")),
            (
                "largest_digests_without_genesis",
                field_of(self.largest, "digests_without_genesis"),
            ),
            ("mean_digests", f"{self.mean_digests:.2f}"),
            ("mean_savings", f"{self.mean_savings:.2f}"),
        ]


def run_census(n: int, rel: HopRelation = POW2) -> CensusReport:
    """
    Enumerate the normalized proofs for all 1 <= i < j < n.

    Ties for longest (by hops) and largest (by digests) are broken by the
    other measure, then by the larger j.

    Raises:
        InvalidRangeError: If n < 2.
    """
    if n < 2:
        raise InvalidRangeError(f"census needs n >= 2, got {n}")

    longest = largest = None
    count = total_digests = total_savings = 0
    for size in iter_proof_sizes(n, rel):
        count += 1
        total_digests += size.digests
        total_savings += size.savings
        if longest is None or (size.hops, size.digests, size.j) > (
            longest.hops,
            longest.digests,
            longest.j,
        ):
            longest = size
        if largest is None or (size.digests, size.hops, size.j) > (
            largest.digests,
            largest.hops,
            largest.j,
        ):
            largest = size

    logger.info("census below %d: %d proofs", n, count)
    return CensusReport(
        bound=n,
        proofs=count,
        longest=longest,
        largest=largest,
        mean_digests=total_digests / count if count else 0.0,
        mean_savings=total_savings / count if count else 0.0,
    )
