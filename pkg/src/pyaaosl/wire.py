"""
Canonical binary encoding of proof bundles and trust anchors.

Every message starts with the envelope ``AOSL | version | kind | scheme``.
Integers are fixed-width big-endian; see FORMAT.md for worked examples.
"""

import struct
from enum import Enum

from .auth import DIGEST_SIZE, AuthVariant, Digest
from .exceptions import DecodeError, DecodeFailure, MalformedPathError
from .hops import POW2, HopRelation
from .proofs import (
    AdvPath,
    BundleKind,
    MembershipProof,
    ProofBundle,
    RawHop,
    RawPath,
    validate_path,
)
from .verify import TrustAnchor

MAGIC = b"AOSL"
VERSION = 0x01
ENVELOPE = struct.Struct(">4sBBB")
U64 = struct.Struct(">Q")
U32 = struct.Struct(">I")
HOP = struct.Struct(f">B{DIGEST_SIZE}s")
VIEW_ENTRY = struct.Struct(f">Q{DIGEST_SIZE}s")
ANCHOR = struct.Struct(f">Q{DIGEST_SIZE}s")
CLAIM = struct.Struct(f">{DIGEST_SIZE}s")


class MessageKind(Enum):
    ADVANCEMENT = BundleKind.ADVANCEMENT.value
    MEMBERSHIP = BundleKind.MEMBERSHIP.value
    ANCHOR = 0x03


def encode_bundle(bundle: ProofBundle) -> bytes:
    path = bundle.path
    parts = [
        ENVELOPE.pack(MAGIC, VERSION, bundle.kind.value, bundle.scheme.value),
        U64.pack(path.src),
        U64.pack(path.tgt),
        U32.pack(len(path.hops)),
    ]
    parts.extend(HOP.pack(hop.level, hop.datum_digest) for hop in path.hops)
    parts.append(U32.pack(len(bundle.view)))
    parts.extend(
        VIEW_ENTRY.pack(index, bundle.view[index]) for index in sorted(bundle.view)
    )
    if isinstance(bundle.proof, MembershipProof):
        parts.append(bundle.proof.datum_digest)
    return b"".join(parts)


def encode_anchor(anchor: TrustAnchor, scheme: AuthVariant) -> bytes:
    return ENVELOPE.pack(MAGIC, VERSION, MessageKind.ANCHOR.value, scheme.value) + ANCHOR.pack(
        anchor.index, anchor.digest
    )


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, layout: struct.Struct) -> tuple:
        end = self.offset + layout.size
        if end > len(self.data):
            raise DecodeError(
                DecodeFailure.TRUNCATED,
                f"need {layout.size} bytes at offset {self.offset}, have {len(self.data) - self.offset}",
            )
        fields = layout.unpack_from(self.data, self.offset)
        self.offset = end
        return fields

    def finish(self) -> None:
        if self.offset != len(self.data):
            raise DecodeError(
                DecodeFailure.TRAILING_BYTES,
                f"{len(self.data) - self.offset} bytes after end of message",
            )


def _envelope(reader: _Reader) -> tuple[MessageKind, AuthVariant]:
    magic, version, kind, scheme = reader.take(ENVELOPE)
    if magic != MAGIC:
        raise DecodeError(DecodeFailure.BAD_MAGIC, f"got {magic!r}")
    if version != VERSION:
        raise DecodeError(DecodeFailure.BAD_VERSION, f"got {version:#04x}")
    try:
        kind = MessageKind(kind)
    except ValueError:
        raise DecodeError(DecodeFailure.BAD_KIND, f"got {kind:#04x}") from None
    try:
        scheme = AuthVariant(scheme)
    except ValueError:
        raise DecodeError(DecodeFailure.BAD_SCHEME, f"got {scheme:#04x}") from None
    return kind, scheme


def decode_bundle(data: bytes, rel: HopRelation = POW2) -> ProofBundle:
    """
    Parse and validate an untrusted bundle.

    Raises:
        DecodeError: With the first failure found; path defects surface as
            ``malformed-path``.
    """
    reader = _Reader(data)
    kind, scheme = _envelope(reader)
    if kind is MessageKind.ANCHOR:
        raise DecodeError(DecodeFailure.BAD_KIND, "expected a bundle, got an anchor")

    (src,) = reader.take(U64)
    (tgt,) = reader.take(U64)
    (hop_count,) = reader.take(U32)
    hops = []
    source = src
    for _ in range(hop_count):
        level, datum_digest = reader.take(HOP)
        hops.append(RawHop(source, level, datum_digest))
        # an out-of-range level stops the walk; validate_path reports it
        if source > 0 and 1 <= level <= rel.max_lvl(source):
            source = rel.hop_target(source, level)

    (view_count,) = reader.take(U32)
    view = {}
    previous = -1
    for _ in range(view_count):
        index, digest = reader.take(VIEW_ENTRY)
        if index == previous:
            raise DecodeError(DecodeFailure.DUPLICATE_VIEW_INDEX, f"index {index} repeated")
        if index < previous:
            raise DecodeError(DecodeFailure.UNSORTED_VIEW, f"index {index} after {previous}")
        view[index] = digest
        previous = index

    claimed: Digest | None = None
    if kind is MessageKind.MEMBERSHIP:
        (claimed,) = reader.take(CLAIM)
    reader.finish()

    try:
        path: AdvPath = validate_path(RawPath(src, tgt, hops), rel)
    except MalformedPathError as e:
        raise DecodeError(DecodeFailure.MALFORMED_PATH, str(e)) from e

    proof = path if claimed is None else MembershipProof(path, claimed)
    return ProofBundle(proof, view, scheme)


def decode_anchor(data: bytes) -> tuple[TrustAnchor, AuthVariant]:
    reader = _Reader(data)
    kind, scheme = _envelope(reader)
    if kind is not MessageKind.ANCHOR:
        raise DecodeError(DecodeFailure.BAD_KIND, f"expected an anchor, got {kind.name.lower()}")
    index, digest = reader.take(ANCHOR)
    reader.finish()
    return TrustAnchor(index, digest), scheme


def to_hex(data: bytes) -> str:
    return data.hex() + "\n"


def from_hex(text: str) -> bytes:
    """Hex text to bytes, ignoring whitespace."""
    try:
        return bytes.fromhex("".join(text.split()))
    except ValueError as e:
        raise DecodeError(DecodeFailure.BAD_HEX, str(e)) from None
