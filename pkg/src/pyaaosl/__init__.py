from .hops import (
    HopRelation,
    PowerOfTwoHops,
    POW2,
    RELATIONS,
    HopLaw,
    LawReport,
    LawViolation,
    max_lvl,
    max_lvl_closed_form,
    hop_target,
    single_hop_level,
    deps_of,
    check_hop_laws,
    check_level_mid,
    check_max_lvl_closed_form,
)
from .auth import AuthScheme, AuthVariant, auth_simple, auth_mb, genesis_digest, sha256
from .log import LogStore, LogEntry, AuditReport
from .proofs import (
    AdvPath,
    Hop,
    MembershipProof,
    ProofBundle,
    BundleKind,
    RawPath,
    RawHop,
    validate_path,
    normalized_route,
    mk_adv,
    mk_membership,
    degenerate_adv,
    bundle_for_path,
    compose,
    split_at,
    visits,
    last_bef,
    first_aft,
)
from .verify import TrustAnchor, Verdict, RejectReason, Verifier, Agreement, rebuild
from .wire import encode_bundle, decode_bundle, encode_anchor, decode_anchor
from .census import ProofSize, CensusReport, proof_size, run_census, conservative_bound
from .exceptions import (
    PyAAOSLError,
    MalformedPathError,
    MalformedReason,
    MissingDependencyError,
    ViewConflictError,
    DecodeError,
    DecodeFailure,
)

__all__ = [
    "HopRelation",
    "PowerOfTwoHops",
    "POW2",
    "RELATIONS",
    "HopLaw",
    "LawReport",
    "LawViolation",
    "max_lvl",
    "max_lvl_closed_form",
    "hop_target",
    "single_hop_level",
    "deps_of",
    "check_hop_laws",
    "check_level_mid",
    "check_max_lvl_closed_form",
    "AuthScheme",
    "AuthVariant",
    "auth_simple",
    "auth_mb",
    "genesis_digest",
    "sha256",
    "LogStore",
    "LogEntry",
    "AuditReport",
    "AdvPath",
    "Hop",
    "MembershipProof",
    "ProofBundle",
    "BundleKind",
    "RawPath",
    "RawHop",
    "validate_path",
    "normalized_route",
    "mk_adv",
    "mk_membership",
    "degenerate_adv",
    "bundle_for_path",
    "compose",
    "split_at",
    "visits",
    "last_bef",
    "first_aft",
    "TrustAnchor",
    "Verdict",
    "RejectReason",
    "Verifier",
    "Agreement",
    "rebuild",
    "encode_bundle",
    "decode_bundle",
    "encode_anchor",
    "decode_anchor",
    "ProofSize",
    "CensusReport",
    "proof_size",
    "run_census",
    "conservative_bound",
    "PyAAOSLError",
    "MalformedPathError",
    "MalformedReason",
    "MissingDependencyError",
    "ViewConflictError",
    "DecodeError",
    "DecodeFailure",
]
