from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from cryptography.hazmat.primitives import hashes

from .exceptions import ArityMismatchError, DigestSizeError, GenesisNotAuthableError
from .hops import POW2, HopRelation

DIGEST_SIZE = 32
INDEX_SIZE = 8

Digest = bytes
HashFunction = Callable[[bytes], Digest]


def sha256(data: bytes) -> Digest:
    """Default hash: SHA-256."""
    h = hashes.Hash(hashes.SHA256())
    h.update(data)
    return h.finalize()


class AuthVariant(Enum):
    """Authenticator construction, valued by its scheme byte."""

    SIMPLE = 0x01
    MANIATIS_BAKER = 0x02

    @property
    def label(self) -> str:
        return "simple" if self is AuthVariant.SIMPLE else "mb"

    @classmethod
    def from_label(cls, label: str) -> "AuthVariant":
        for variant in cls:
            if variant.label == label:
                return variant
        raise ValueError(f"unknown scheme label: {label}")


def check_digest(value: bytes, what: str = "digest") -> Digest:
    if len(value) != DIGEST_SIZE:
        raise DigestSizeError(f"{what} must be {DIGEST_SIZE} bytes, got {len(value)}")
    return value


def encode_index(j: int) -> bytes:
    """Fixed-width 8-byte big-endian encoding of an index or level."""
    return j.to_bytes(INDEX_SIZE, "big")


def _check_inputs(
    j: int, datum_digest: Digest, lvl_digests: Sequence[Digest], rel: HopRelation
) -> None:
    if j == 0:
        raise GenesisNotAuthableError("index 0 has no authenticator; use genesis_digest")
    if len(lvl_digests) != rel.max_lvl(j):
        raise ArityMismatchError(
            f"index {j} needs {rel.max_lvl(j)} dependency digests, got {len(lvl_digests)}"
        )
    check_digest(datum_digest, "datum digest")
    for d in lvl_digests:
        check_digest(d, "dependency digest")


def simple_preimage(j: int, datum_digest: Digest, lvl_digests: Sequence[Digest]) -> bytes:
    return encode_index(j) + datum_digest + b"".join(lvl_digests)


def parse_simple_preimage(preimage: bytes) -> tuple[int, Digest, list[Digest]]:
    """Inverse of ``simple_preimage``."""
    body = preimage[INDEX_SIZE:]
    if len(body) % DIGEST_SIZE or len(body) < DIGEST_SIZE:
        raise DigestSizeError(f"preimage body of {len(body)} bytes is not a digest sequence")
    j = int.from_bytes(preimage[:INDEX_SIZE], "big")
    digests = [body[k : k + DIGEST_SIZE] for k in range(0, len(body), DIGEST_SIZE)]
    return j, digests[0], digests[1:]


def auth_simple(
    j: int,
    datum_digest: Digest,
    lvl_digests: Sequence[Digest],
    hash_fn: HashFunction = sha256,
    rel: HopRelation = POW2,
) -> Digest:
    """hash(enc(j) || datum_digest || lvl_digests[0] || ...)."""
    _check_inputs(j, datum_digest, lvl_digests, rel)
    return hash_fn(simple_preimage(j, datum_digest, lvl_digests))


def auth_mb(
    j: int,
    datum_digest: Digest,
    lvl_digests: Sequence[Digest],
    hash_fn: HashFunction = sha256,
    rel: HopRelation = POW2,
) -> Digest:
    """Per-level partial authenticators, hashed together in level order."""
    _check_inputs(j, datum_digest, lvl_digests, rel)
    partials = [
        hash_fn(encode_index(j) + encode_index(level) + datum_digest + lvl_digest)
        for level, lvl_digest in enumerate(lvl_digests, start=1)
    ]
    return hash_fn(b"".join(partials))


def genesis_digest(genesis_datum: bytes, hash_fn: HashFunction = sha256) -> Digest:
    """h_star, the digest of the genesis datum agreed out of band."""
    return hash_fn(genesis_datum)


@dataclass(frozen=True)
class AuthScheme:
    """An authenticator construction paired with its hash function."""

    variant: AuthVariant = AuthVariant.SIMPLE
    hash_fn: HashFunction = sha256

    def digest(self, data: bytes) -> Digest:
        return check_digest(self.hash_fn(data), "hash output")

    def genesis(self, genesis_datum: bytes) -> Digest:
        return genesis_digest(genesis_datum, self.hash_fn)

    def auth(
        self,
        j: int,
        datum_digest: Digest,
        lvl_digests: Sequence[Digest],
        rel: HopRelation = POW2,
    ) -> Digest:
        if self.variant is AuthVariant.SIMPLE:
            return auth_simple(j, datum_digest, lvl_digests, self.hash_fn, rel)
        return auth_mb(j, datum_digest, lvl_digests, self.hash_fn, rel)
