import pytest

from pyaaosl.auth import AuthScheme, AuthVariant, Digest, sha256
from pyaaosl.hops import HopRelation, PowerOfTwoHops
from pyaaosl.log import LogStore
from pyaaosl.verify import Verifier

SCHEMES = [AuthScheme(AuthVariant.SIMPLE), AuthScheme(AuthVariant.MANIATIS_BAKER)]
SCHEME_IDS = [scheme.variant.label for scheme in SCHEMES]

GENESIS = b"genesis"


def datum(k: int) -> bytes:
    return f"entry-{k}".encode()


def make_store(path, size: int, scheme: AuthScheme | None = None) -> LogStore:
    """A log with ``size`` entries, genesis included."""
    store = LogStore.init(path, GENESIS, scheme)
    if size > 1:
        store.append_many(datum(k) for k in range(1, size))
    return store


def verifier_for(store: LogStore, strict: bool = False) -> Verifier:
    return Verifier(store.scheme, store.genesis_digest, strict=strict)


def toy_hash(data: bytes) -> Digest:
    """One significant byte, zero padded: collides after 256 inputs."""
    return sha256(data)[:1] + bytes(31)


class CrossingHops(PowerOfTwoHops):
    """pow2 except that index 6 hops to 2 at level 2, crossing 4 -> 0."""

    name = "crossing"

    def hop_target(self, j: int, level: int) -> int:
        if (j, level) == (6, 2):
            self.check_level(j, level)
            return 2
        return super().hop_target(j, level)


class LinearHops(HopRelation):
    """Plain hash chain: every index depends only on its predecessor."""

    name = "linear"

    def max_lvl(self, j: int) -> int:
        return 0 if j == 0 else 1

    def hop_target(self, j: int, level: int) -> int:
        self.check_level(j, level)
        return j - 1


@pytest.fixture(params=SCHEMES, ids=SCHEME_IDS)
def scheme(request):
    """Run the test once per authenticator construction."""
    return request.param


@pytest.fixture
def store_factory(tmp_path):
    """Build fresh logs under the test's temporary directory."""
    counter = iter(range(1_000_000))

    def factory(size: int, scheme: AuthScheme | None = None) -> LogStore:
        return make_store(tmp_path / f"log-{next(counter)}.aosl", size, scheme)

    return factory


@pytest.fixture
def store13(store_factory, scheme):
    """The 13-entry log of the 7 -> 12 worked example."""
    return store_factory(13, scheme)


@pytest.fixture(scope="session", params=SCHEMES, ids=SCHEME_IDS)
def log65(request, tmp_path_factory):
    path = tmp_path_factory.mktemp("log65") / "log.aosl"
    return make_store(path, 65, request.param)


@pytest.fixture(scope="session", params=SCHEMES, ids=SCHEME_IDS)
def log257(request, tmp_path_factory):
    path = tmp_path_factory.mktemp("log257") / "log.aosl"
    return make_store(path, 257, request.param)
