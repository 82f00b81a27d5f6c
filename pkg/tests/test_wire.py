import random

import pytest

from pyaaosl.auth import AuthVariant
from pyaaosl.exceptions import DecodeError, DecodeFailure
from pyaaosl.oracle import random_composed_adv
from pyaaosl.proofs import BundleKind, bundle_for_path, mk_adv, mk_membership
from pyaaosl.verify import TrustAnchor
from pyaaosl.wire import (
    decode_anchor,
    decode_bundle,
    encode_anchor,
    encode_bundle,
    from_hex,
    to_hex,
)

from .conftest import verifier_for

# envelope (7) + src (8) + tgt (8) + hop count (4)
HOPS_OFFSET = 27


def view_offset(bundle) -> int:
    return HOPS_OFFSET + 33 * len(bundle.path.hops) + 4


class TestEncode:
    def test_done_bundle(self, store13):
        data = encode_bundle(mk_adv(store13, 5, 5))
        scheme = store13.scheme.variant.value
        expected = (
            b"AOSL"
            + bytes([0x01, 0x01, scheme])
            + (5).to_bytes(8, "big") * 2
            + bytes(4)
            + bytes(4)
        )
        assert data == expected
        assert len(data) == 31

    def test_worked_example_layout(self, store13):
        bundle = mk_adv(store13, 7, 12)
        data = encode_bundle(bundle)
        assert len(data) == 27 + 2 * 33 + 4 + 4 * 40
        assert data[HOPS_OFFSET] == 3
        assert data[HOPS_OFFSET + 1 : HOPS_OFFSET + 33] == store13.datum_digest(12)
        view = view_offset(bundle)
        assert int.from_bytes(data[view - 4 : view], "big") == 4
        indexes = [int.from_bytes(data[view + 40 * k : view + 40 * k + 8], "big") for k in range(4)]
        assert indexes == [4, 6, 10, 11]

    def test_membership_appends_claim(self, store13):
        bundle = mk_membership(store13, 7, 12)
        data = encode_bundle(bundle)
        assert data[5] == BundleKind.MEMBERSHIP.value
        assert data[-32:] == store13.datum_digest(7)

    def test_anchor(self):
        anchor = TrustAnchor(12, bytes(range(32)))
        data = encode_anchor(anchor, AuthVariant.MANIATIS_BAKER)
        assert data[:7] == b"AOSL\x01\x03\x02"
        assert len(data) == 7 + 40
        assert decode_anchor(data) == (anchor, AuthVariant.MANIATIS_BAKER)


class TestDecode:
    def test_worked_example(self, store13):
        bundle = mk_adv(store13, 7, 12)
        assert decode_bundle(encode_bundle(bundle)) == bundle

    def test_membership(self, store13):
        bundle = mk_membership(store13, 3, 12)
        assert decode_bundle(encode_bundle(bundle)) == bundle

    @pytest.mark.slow
    def test_decode_inverts_encode(self, log257):
        rng = random.Random(99)
        for _ in range(10_000):
            j = rng.randrange(1, 257)
            if rng.random() < 0.5:
                i = rng.randrange(0, j + 1)
                bundle = bundle_for_path(log257, random_composed_adv(log257, i, j, rng))
            else:
                bundle = mk_membership(log257, rng.randint(1, j), j)
            assert decode_bundle(encode_bundle(bundle)) == bundle

    def test_hex_helpers(self, store13):
        data = encode_bundle(mk_adv(store13, 7, 12))
        text = to_hex(data)
        assert text.endswith("\n")
        spaced = " ".join(text[k : k + 8] for k in range(0, len(text), 8))
        assert from_hex(spaced) == data

    @pytest.mark.parametrize("text", ["zz", "abc", "0g", "\ufffd\ufffd"])
    def test_bad_hex(self, text):
        with pytest.raises(DecodeError) as exc:
            from_hex(text)
        assert exc.value.reason is DecodeFailure.BAD_HEX

    def test_decoded_membership_verifies(self, store13):
        decoded = decode_bundle(encode_bundle(mk_membership(store13, 8, 12)))
        root = TrustAnchor(12, store13.lookup_digest(12))
        assert verifier_for(store13).verify_membership(decoded, root).accepted


def _decode_failure(data: bytes) -> DecodeFailure:
    with pytest.raises(DecodeError) as exc:
        decode_bundle(data)
    return exc.value.reason


class TestDecodeErrors:
    @pytest.fixture
    def example(self, store13):
        bundle = mk_adv(store13, 7, 12)
        return bundle, bytearray(encode_bundle(bundle))

    def test_truncated(self, example):
        _, data = example
        assert _decode_failure(bytes(data[:-1])) is DecodeFailure.TRUNCATED
        assert _decode_failure(b"AOS") is DecodeFailure.TRUNCATED

    @pytest.mark.parametrize("make", [mk_adv, mk_membership])
    def test_every_prefix_is_truncated(self, store13, make):
        data = encode_bundle(make(store13, 5, 12))
        for n in range(len(data)):
            assert _decode_failure(data[:n]) is DecodeFailure.TRUNCATED

    def test_bad_magic(self, example):
        _, data = example
        data[0:4] = b"XOSL"
        assert _decode_failure(bytes(data)) is DecodeFailure.BAD_MAGIC

    def test_bad_version(self, example):
        _, data = example
        data[4] = 0x02
        assert _decode_failure(bytes(data)) is DecodeFailure.BAD_VERSION

    def test_bad_kind(self, example):
        _, data = example
        data[5] = 0x07
        assert _decode_failure(bytes(data)) is DecodeFailure.BAD_KIND

    def test_anchor_is_not_a_bundle(self):
        data = encode_anchor(TrustAnchor(1, bytes(32)), AuthVariant.SIMPLE)
        assert _decode_failure(data) is DecodeFailure.BAD_KIND

    def test_bundle_is_not_an_anchor(self, example):
        _, data = example
        with pytest.raises(DecodeError) as exc:
            decode_anchor(bytes(data))
        assert exc.value.reason is DecodeFailure.BAD_KIND

    def test_bad_scheme(self, example):
        _, data = example
        data[6] = 0x09
        assert _decode_failure(bytes(data)) is DecodeFailure.BAD_SCHEME

    def test_trailing_bytes(self, example):
        _, data = example
        assert _decode_failure(bytes(data) + b"\x00") is DecodeFailure.TRAILING_BYTES

    def test_unsorted_view(self, example):
        bundle, data = example
        at = view_offset(bundle)
        first, second = data[at : at + 40], data[at + 40 : at + 80]
        data[at : at + 80] = second + first
        assert _decode_failure(bytes(data)) is DecodeFailure.UNSORTED_VIEW

    def test_duplicate_view_index(self, example):
        bundle, data = example
        at = view_offset(bundle)
        data[at + 40 : at + 80] = data[at : at + 40]
        assert _decode_failure(bytes(data)) is DecodeFailure.DUPLICATE_VIEW_INDEX

    @pytest.mark.parametrize("level", [0, 2, 9])
    def test_malformed_path(self, example, level):
        _, data = example
        data[HOPS_OFFSET] = level
        assert _decode_failure(bytes(data)) is DecodeFailure.MALFORMED_PATH


def _tamper_set(store, count: int, rng: random.Random):
    bundles = []
    while len(bundles) < count:
        j = rng.randrange(1, store.size)
        if rng.random() < 0.5:
            i = rng.randrange(0, j + 1)
            bundles.append(mk_adv(store, i, j))
        else:
            bundles.append(mk_membership(store, rng.randint(1, j), j))
    return bundles


@pytest.mark.slow
def test_every_single_bit_flip_is_rejected(log65):
    verifier = verifier_for(log65)

    def anchor(k):
        return TrustAnchor(k, log65.lookup_digest(k))

    accepted = []
    for bundle in _tamper_set(log65, 100, random.Random(5)):
        data = encode_bundle(bundle)
        for position in range(len(data)):
            for bit in range(8):
                flipped = bytearray(data)
                flipped[position] ^= 1 << bit
                try:
                    decoded = decode_bundle(bytes(flipped))
                except DecodeError:
                    continue
                if bundle.kind is BundleKind.MEMBERSHIP:
                    verdict = verifier.verify_membership(decoded, anchor(bundle.path.src))
                else:
                    verdict = verifier.verify_advancement(
                        decoded, anchor(bundle.path.tgt), anchor(bundle.path.src)
                    )
                if verdict:
                    accepted.append((bundle.path.src, bundle.path.tgt, position, bit))
    assert accepted == []
