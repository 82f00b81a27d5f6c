import logging
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .auth import AuthScheme, Digest, check_digest
from .exceptions import (
    EndpointMismatchError,
    MalformedPathError,
    MissingDependencyError,
    ViewConflictError,
)
from .hops import POW2, HopRelation
from .proofs import AdvPath, BundleKind, MembershipProof, ProofBundle, View, validate_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrustAnchor:
    """An index together with the digest the verifier trusts for it."""

    index: int
    digest: Digest

    def __post_init__(self):
        check_digest(self.digest, "anchor digest")

    @classmethod
    def parse(cls, value: str) -> "TrustAnchor":
        """Parse ``index:hexdigest``."""
        index, sep, hexdigest = value.partition(":")
        if not sep:
            raise ValueError(f"expected index:hexdigest, got {value!r}")
        return cls(int(index), bytes.fromhex(hexdigest))

    def __str__(self) -> str:
        return f"{self.index}:{self.digest.hex()}"


@dataclass(frozen=True)
class RebuildResult:
    """The view after rebuilding: provided entries plus every on-path digest."""

    view: View

    def __getitem__(self, index: int) -> Digest:
        return self.view[index]


class RejectReason(Enum):
    MALFORMED = "malformed"
    MISSING_DEPENDENCY = "missing-dependency"
    DIGEST_MISMATCH = "digest-mismatch"
    ENDPOINT_MISMATCH = "endpoint-mismatch"
    GENESIS_MEMBERSHIP = "genesis-membership"
    SCHEME_MISMATCH = "scheme-mismatch"
    WRONG_KIND = "wrong-kind"
    VIEW_CONFLICT = "view-conflict"


@dataclass(frozen=True)
class Verdict:
    """Acceptance decision for a proof bundle."""

    accepted: bool
    reason: RejectReason | None = None
    detail: str = ""

    @classmethod
    def accept(cls) -> "Verdict":
        return cls(True)

    @classmethod
    def reject(cls, reason: RejectReason, detail: str = "") -> "Verdict":
        logger.debug("rejecting proof: %s %s", reason.value, detail)
        return cls(False, reason, detail)

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "ACCEPT"
        return f"REJECT: {self.reason.value}"


@dataclass(frozen=True)
class Agreement:
    """Digests rebuilt by two bundles at one commonly visited index."""

    index: int
    first: Digest
    second: Digest

    @property
    def agrees(self) -> bool:
        return self.first == self.second


def _auth_at(
    source: int,
    datum_digest: Digest,
    view: Mapping[int, Digest],
    scheme: AuthScheme,
    rel: HopRelation,
) -> Digest:
    deps = []
    for dep in rel.deps_of(source):
        if dep not in view:
            raise MissingDependencyError(dep)
        deps.append(view[dep])
    return scheme.auth(source, datum_digest, deps, rel)


def rebuild(
    path: AdvPath,
    view: Mapping[int, Digest],
    scheme: AuthScheme,
    rel: HopRelation = POW2,
    strict: bool = False,
) -> RebuildResult:
    """
    Recompute the authenticator of every hop source, lowest source first.

    Each computed value is inserted into the evolving view, shadowing any
    binding the prover supplied for that index.

    Args:
        path: Well-formed path j -> i.
        view: Digests for i and for every off-path dependency.
        scheme: Authenticator construction.
        rel: Hop relation the path was built over.
        strict: Reject instead of shadowing when a provided binding for an
            on-path index disagrees with the rebuilt value.

    Raises:
        MissingDependencyError: If a required digest is absent.
        ViewConflictError: In strict mode, on a disagreeing binding.
    """
    rebuilt = dict(view)
    for hop in reversed(path.hops):
        value = _auth_at(hop.source, hop.datum_digest, rebuilt, scheme, rel)
        if strict and hop.source in view and view[hop.source] != value:
            raise ViewConflictError(hop.source)
        rebuilt[hop.source] = value
    # a Done path computes nothing, so its single index must come from the view
    if path.src not in rebuilt:
        raise MissingDependencyError(path.src)
    return RebuildResult(rebuilt)


class Verifier:
    """Verifier side of the protocol for one log's scheme and genesis digest."""

    def __init__(
        self,
        scheme: AuthScheme,
        genesis_digest: Digest,
        rel: HopRelation = POW2,
        strict: bool = False,
    ):
        """
        Initialize the verifier.

        Args:
            scheme: Authenticator construction the log was built with.
            genesis_digest: h_star, agreed out of band; implicitly bound at index 0.
            rel: Hop relation of the log.
            strict: Reject bundles whose view disagrees with rebuilt or trusted values.
        """
        self.scheme = scheme
        self.genesis_digest = check_digest(genesis_digest, "genesis digest")
        self.rel = rel
        self.strict = strict

    def rebuild(self, path: AdvPath, view: Mapping[int, Digest]) -> RebuildResult:
        seeded = {**view, 0: self.genesis_digest}
        return rebuild(path, seeded, self.scheme, self.rel, self.strict)

    def _seed(self, view: Mapping[int, Digest], trusted: Mapping[int, Digest]) -> View:
        if self.strict:
            for index, digest in trusted.items():
                if index in view and view[index] != digest:
                    raise ViewConflictError(index)
        return {**view, **trusted}

    def _precheck(self, bundle: ProofBundle, kind: BundleKind) -> Verdict | None:
        if bundle.kind is not kind:
            return Verdict.reject(
                RejectReason.WRONG_KIND, f"expected {kind.name.lower()} bundle"
            )
        if bundle.scheme is not self.scheme.variant:
            return Verdict.reject(
                RejectReason.SCHEME_MISMATCH,
                f"bundle uses {bundle.scheme.label}, log uses {self.scheme.variant.label}",
            )
        try:
            validate_path(bundle.path.to_raw(), self.rel)
        except MalformedPathError as e:
            return Verdict.reject(RejectReason.MALFORMED, str(e))
        return None

    def _run(self, path: AdvPath, view: View, expected: Digest) -> Verdict:
        try:
            result = rebuild(path, view, self.scheme, self.rel, self.strict)
        except MissingDependencyError as e:
            return Verdict.reject(RejectReason.MISSING_DEPENDENCY, str(e))
        except ViewConflictError as e:
            return Verdict.reject(RejectReason.VIEW_CONFLICT, str(e))
        if result[path.src] != expected:
            return Verdict.reject(
                RejectReason.DIGEST_MISMATCH, f"rebuilt digest at {path.src} differs"
            )
        return Verdict.accept()

    def verify_advancement(
        self, bundle: ProofBundle, anchor: TrustAnchor, expected: TrustAnchor
    ) -> Verdict:
        """
        Check that ``bundle`` advances trust from ``anchor`` to ``expected``.

        Returns:
            Verdict; never raises for adversarial bundles.
        """
        if (rejected := self._precheck(bundle, BundleKind.ADVANCEMENT)) is not None:
            return rejected
        path = bundle.path
        if anchor.index != path.tgt or expected.index != path.src:
            return Verdict.reject(
                RejectReason.ENDPOINT_MISMATCH,
                f"path runs {path.src} -> {path.tgt}, anchors are {expected.index} -> {anchor.index}",
            )
        if anchor.index == 0 and anchor.digest != self.genesis_digest:
            return Verdict.reject(RejectReason.DIGEST_MISMATCH, "anchor at 0 is not genesis")
        try:
            view = self._seed(
                bundle.view, {0: self.genesis_digest, anchor.index: anchor.digest}
            )
        except ViewConflictError as e:
            return Verdict.reject(RejectReason.VIEW_CONFLICT, str(e))
        return self._run(path, view, expected.digest)

    def insert_auth(self, view: Mapping[int, Digest], proof: MembershipProof) -> View:
        """Bind the authenticator computed from the claimed datum at ``proof.tgt``."""
        value = _auth_at(proof.tgt, proof.datum_digest, view, self.scheme, self.rel)
        if self.strict and proof.tgt in view and view[proof.tgt] != value:
            raise ViewConflictError(proof.tgt)
        return {**view, proof.tgt: value}

    def verify_membership(self, bundle: ProofBundle, root: TrustAnchor) -> Verdict:
        """Check the claimed datum digest at the bundle's target against ``root``."""
        if (rejected := self._precheck(bundle, BundleKind.MEMBERSHIP)) is not None:
            return rejected
        proof = bundle.proof
        if proof.tgt == 0:
            return Verdict.reject(RejectReason.GENESIS_MEMBERSHIP, "index 0 has no datum")
        if root.index != proof.path.src:
            return Verdict.reject(
                RejectReason.ENDPOINT_MISMATCH,
                f"path starts at {proof.path.src}, root is at {root.index}",
            )
        try:
            view = self.insert_auth(self._seed(bundle.view, {0: self.genesis_digest}), proof)
        except MissingDependencyError as e:
            return Verdict.reject(RejectReason.MISSING_DEPENDENCY, str(e))
        except ViewConflictError as e:
            return Verdict.reject(RejectReason.VIEW_CONFLICT, str(e))
        return self._run(proof.path, view, root.digest)

    def rebuild_bundle(
        self, bundle: ProofBundle, anchor: TrustAnchor | None = None
    ) -> RebuildResult:
        """Rebuild a bundle's path; advancement bundles need their target anchor."""
        view = {**bundle.view, 0: self.genesis_digest}
        if isinstance(bundle.proof, MembershipProof):
            view = self.insert_auth(view, bundle.proof)
        elif anchor is not None:
            view[anchor.index] = anchor.digest
        return rebuild(bundle.path, view, self.scheme, self.rel, self.strict)

    def agreement_probe(
        self,
        first: ProofBundle,
        second: ProofBundle,
        first_anchor: TrustAnchor | None = None,
        second_anchor: TrustAnchor | None = None,
    ) -> list[Agreement]:
        """
        Rebuild two bundles to the same j and compare them where both visit.

        The row for j is always included so callers can tell whether the
        bundles agree at j at all; agreement elsewhere is only promised when
        they do.

        Raises:
            EndpointMismatchError: If the bundles start at different indexes.
            MissingDependencyError: If either view is incomplete.
        """
        if first.path.src != second.path.src:
            raise EndpointMismatchError(
                f"bundles start at {first.path.src} and {second.path.src}"
            )
        rebuilt_first = self.rebuild_bundle(first, first_anchor)
        rebuilt_second = self.rebuild_bundle(second, second_anchor)
        common = sorted(set(first.path.visited) & set(second.path.visited), reverse=True)
        return [Agreement(k, rebuilt_first[k], rebuilt_second[k]) for k in common]
