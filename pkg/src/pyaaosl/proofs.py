from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

from .auth import AuthVariant, Digest
from .exceptions import (
    EndpointMismatchError,
    GenesisMembershipError,
    IndexOutOfRangeError,
    MalformedPathError,
    MalformedReason,
    NotVisitedError,
    PathRangeError,
)
from .hops import POW2, HopRelation
from .log import LogStore

View = dict[int, Digest]


@dataclass(frozen=True)
class Hop:
    """One step of an advancement path: the source's datum digest and hop level."""

    source: int
    level: int
    datum_digest: Digest


@dataclass(frozen=True)
class AdvPath:
    """
    Well-formed advancement path from ``src`` down to ``tgt``.

    Hop sources strictly decrease from ``src``; each hop lands on the next
    hop's source and the last one lands on ``tgt``. An empty hop list is the
    Done path, where ``src == tgt``. Build these with the constructors in
    this module or with ``validate_path``.
    """

    src: int
    tgt: int
    hops: tuple[Hop, ...] = ()

    @classmethod
    def done(cls, k: int) -> "AdvPath":
        return cls(k, k, ())

    @property
    def is_done(self) -> bool:
        return not self.hops

    @property
    def sources(self) -> list[int]:
        return [hop.source for hop in self.hops]

    @property
    def visited(self) -> list[int]:
        """Visited indexes, descending; always includes both endpoints."""
        return [*self.sources, self.tgt]

    def targets(self) -> Iterator[tuple[Hop, int]]:
        """Each hop paired with the index it lands on."""
        landing = self.sources[1:] + [self.tgt]
        return zip(self.hops, landing)

    def to_raw(self) -> "RawPath":
        return RawPath(
            self.src,
            self.tgt,
            [RawHop(h.source, h.level, h.datum_digest) for h in self.hops],
        )


@dataclass(frozen=True)
class MembershipProof:
    """Advancement path to ``tgt`` plus the claimed datum digest at ``tgt``."""

    path: AdvPath
    datum_digest: Digest

    @property
    def tgt(self) -> int:
        return self.path.tgt


class BundleKind(Enum):
    ADVANCEMENT = 0x01
    MEMBERSHIP = 0x02


@dataclass(frozen=True)
class ProofBundle:
    """A path or membership proof with the off-path digests it needs."""

    proof: AdvPath | MembershipProof
    view: View = field(default_factory=dict)
    scheme: AuthVariant = AuthVariant.SIMPLE

    @property
    def kind(self) -> BundleKind:
        if isinstance(self.proof, MembershipProof):
            return BundleKind.MEMBERSHIP
        return BundleKind.ADVANCEMENT

    @property
    def path(self) -> AdvPath:
        if isinstance(self.proof, MembershipProof):
            return self.proof.path
        return self.proof

    @property
    def digest_count(self) -> int:
        """Datum digests carried by the hops plus view entries."""
        count = len(self.path.hops) + len(self.view)
        if isinstance(self.proof, MembershipProof):
            count += 1
        return count


@dataclass(frozen=True)
class RawHop:
    """Untrusted hop as decoded from the wire, with an explicit source."""

    source: int
    level: int
    datum_digest: Digest


@dataclass(frozen=True)
class RawPath:
    """Untrusted path; becomes an AdvPath only through ``validate_path``."""

    src: int
    tgt: int
    hops: Sequence[RawHop] = ()


def validate_path(raw: RawPath, rel: HopRelation = POW2) -> AdvPath:
    """
    Check an untrusted path and return it as an AdvPath.

    Raises:
        MalformedPathError: With reason nonmonotone, level-out-of-range or
            broken-chain, for the first defect found walking down from src.
    """
    if raw.src < raw.tgt or raw.tgt < 0:
        raise MalformedPathError(
            MalformedReason.NONMONOTONE, f"source {raw.src} below target {raw.tgt}"
        )
    expected = raw.src
    previous = None
    for position, hop in enumerate(raw.hops):
        if previous is not None and hop.source >= previous:
            raise MalformedPathError(
                MalformedReason.NONMONOTONE,
                f"hop {position} source {hop.source} not below previous source {previous}",
            )
        if hop.source != expected:
            raise MalformedPathError(
                MalformedReason.BROKEN_CHAIN,
                f"hop {position} starts at {hop.source} but the path is at {expected}",
            )
        if hop.level < 1 or hop.level > rel.max_lvl(hop.source):
            raise MalformedPathError(
                MalformedReason.LEVEL_OUT_OF_RANGE,
                f"level {hop.level} from {hop.source} (max {rel.max_lvl(hop.source)})",
            )
        expected = rel.hop_target(hop.source, hop.level)
        if expected < raw.tgt:
            raise MalformedPathError(
                MalformedReason.BROKEN_CHAIN,
                f"hop from {hop.source} lands at {expected}, below target {raw.tgt}",
            )
        previous = hop.source
    if expected != raw.tgt:
        raise MalformedPathError(
            MalformedReason.BROKEN_CHAIN, f"path ends at {expected}, not at target {raw.tgt}"
        )
    return AdvPath(
        raw.src,
        raw.tgt,
        tuple(Hop(h.source, h.level, h.datum_digest) for h in raw.hops),
    )


def normalized_route(i: int, j: int, rel: HopRelation = POW2) -> list[tuple[int, int]]:
    """(source, level) steps of the shortest path from j down to i."""
    if i > j:
        raise PathRangeError(f"cannot advance from {j} down to {i}")
    route = []
    while j > i:
        level = rel.single_hop_level(j, i)
        route.append((j, level))
        j = rel.hop_target(j, level)
    return route


def _check_span(store: LogStore, i: int, j: int) -> None:
    if not 0 <= i <= j < store.size:
        raise IndexOutOfRangeError(
            f"need 0 <= i <= j < size, got i={i}, j={j}, size={store.size}"
        )


def _path_from_route(store: LogStore, i: int, j: int, route) -> AdvPath:
    return AdvPath(
        j, i, tuple(Hop(src, level, store.datum_digest(src)) for src, level in route)
    )


def off_path_view(store: LogStore, path: AdvPath, rel: HopRelation = POW2) -> View:
    """Digests of all hop sources' dependencies that rebuild will not produce."""
    visited = set(path.visited)
    view = {}
    for hop in path.hops:
        for dep in rel.deps_of(hop.source):
            if dep != 0 and dep not in visited:
                view[dep] = store.lookup_digest(dep)
    return view


def bundle_for_path(store: LogStore, path: AdvPath, rel: HopRelation = POW2) -> ProofBundle:
    """Advancement bundle for an arbitrary well-formed path over this log."""
    return ProofBundle(path, off_path_view(store, path, rel), store.scheme.variant)


def mk_adv(store: LogStore, i: int, j: int, rel: HopRelation = POW2) -> ProofBundle:
    """
    Build the normalized advancement proof from j down to i.

    At every step the highest level that does not overshoot i is taken.
    The view holds each off-path dependency digest once; genesis is left
    out because every verifier knows it.

    Raises:
        IndexOutOfRangeError: Unless 0 <= i <= j < size.
    """
    _check_span(store, i, j)
    path = _path_from_route(store, i, j, normalized_route(i, j, rel))
    return bundle_for_path(store, path, rel)


def degenerate_adv(store: LogStore, i: int, j: int) -> ProofBundle:
    """Advancement proof from j to i through every index, level-1 hops only."""
    _check_span(store, i, j)
    path = _path_from_route(store, i, j, [(src, 1) for src in range(j, i, -1)])
    return bundle_for_path(store, path)


def mk_membership(
    store: LogStore, tgt: int, j: int, rel: HopRelation = POW2
) -> ProofBundle:
    """
    Build a membership proof for the datum at ``tgt`` relative to index j.

    Raises:
        GenesisMembershipError: If tgt is 0.
        IndexOutOfRangeError: Unless tgt <= j < size.
    """
    if tgt == 0:
        raise GenesisMembershipError("genesis has no membership proof")
    _check_span(store, tgt, j)
    path = _path_from_route(store, tgt, j, normalized_route(tgt, j, rel))
    view = off_path_view(store, path, rel)
    for dep in rel.deps_of(tgt):
        if dep != 0:
            view[dep] = store.lookup_digest(dep)
    proof = MembershipProof(path, store.datum_digest(tgt))
    return ProofBundle(proof, view, store.scheme.variant)


def compose(a: AdvPath, b: AdvPath) -> AdvPath:
    """Concatenate a path j -> k with a path k -> i."""
    if a.tgt != b.src:
        raise EndpointMismatchError(f"cannot compose path ending at {a.tgt} with path from {b.src}")
    return AdvPath(a.src, b.tgt, a.hops + b.hops)


def split_at(a: AdvPath, k: int) -> tuple[AdvPath, AdvPath]:
    """Split ``a`` at a visited index k so that compose(x, y) == a."""
    if k == a.src:
        return AdvPath.done(k), a
    for position, (_, landing) in enumerate(a.targets()):
        if landing == k:
            return (
                AdvPath(a.src, k, a.hops[: position + 1]),
                AdvPath(k, a.tgt, a.hops[position + 1 :]),
            )
    raise NotVisitedError(f"path {a.src} -> {a.tgt} does not visit {k}")


def visits(a: AdvPath, k: int) -> bool:
    return k in a.visited


def last_bef(a: AdvPath, k: int) -> int:
    """Greatest index visited by ``a`` that is below k; needs tgt < k <= src."""
    if not a.tgt < k <= a.src:
        raise PathRangeError(f"last_bef needs {a.tgt} < k <= {a.src}, got {k}")
    return max(v for v in a.visited if v < k)


def first_aft(a: AdvPath, k: int) -> int:
    """Least index visited by ``a`` that is above k; needs tgt <= k < src."""
    if not a.tgt <= k < a.src:
        raise PathRangeError(f"first_aft needs {a.tgt} <= k < {a.src}, got {k}")
    return min(v for v in a.visited if v > k)
