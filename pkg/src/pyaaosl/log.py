import fcntl
import logging
import os
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

from .auth import DIGEST_SIZE, AuthScheme, AuthVariant, Digest, HashFunction, sha256
from .exceptions import (
    AlreadyInitializedError,
    IndexOutOfRangeError,
    LogClosedError,
    LogFormatError,
    LogNotFoundError,
    StorageError,
)
from .hops import deps_of

logger = logging.getLogger(__name__)

MAGIC = b"AOSL"
VERSION = 0x01
HEADER = struct.Struct(">4sBB32s")
RECORD_SIZE = 2 * DIGEST_SIZE


@dataclass(frozen=True)
class LogEntry:
    """Datum digest and authenticator stored at one index."""

    index: int
    datum_digest: Digest
    authenticator: Digest


@dataclass
class AuditReport:
    """Indexes whose stored authenticator differs from a full recomputation."""

    size: int
    mismatches: list[int] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.mismatches


class LogStore:
    """
    Append-only authenticated log persisted as fixed-size records.

    The file holds a header (magic, version, scheme byte, genesis digest)
    followed by one 64-byte record per index, record 0 being genesis.
    Appends are serialized by an in-process lock and an advisory file lock,
    and are fsynced before they return.
    """

    def __init__(self, path: Path, scheme: AuthScheme, genesis: Digest):
        self.path = Path(path)
        self.scheme = scheme
        self.genesis_digest = genesis
        self._datum: list[Digest] = []
        self._auth: list[Digest] = []
        self._lock = threading.Lock()
        self._closed = False

    @classmethod
    def init(
        cls,
        path: Path,
        genesis_datum: bytes,
        scheme: AuthScheme | None = None,
    ) -> "LogStore":
        """
        Create a new log holding only the genesis entry.

        Args:
            path: File to create. Must be absent or empty.
            genesis_datum: Raw genesis datum; its digest is h_star.
            scheme: Authenticator construction (default: simple with SHA-256).

        Returns:
            The opened LogStore of size 1.

        Raises:
            AlreadyInitializedError: If the file already holds data.
            StorageError: If the file cannot be written.
        """
        scheme = scheme or AuthScheme()
        path = Path(path)
        if path.exists() and path.stat().st_size > 0:
            raise AlreadyInitializedError(f"Log already exists at {path}")

        genesis = scheme.genesis(genesis_datum)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "wb") as f:
                f.write(HEADER.pack(MAGIC, VERSION, scheme.variant.value, genesis))
                f.write(genesis + genesis)
                f.flush()
                os.fsync(f.fileno())
        except OSError as e:
            raise StorageError(f"Failed to initialize log at {path}: {e}") from e

        store = cls(path, scheme, genesis)
        store._datum.append(genesis)
        store._auth.append(genesis)
        logger.info("initialized %s log at %s", scheme.variant.label, path)
        return store

    @classmethod
    def open(cls, path: Path, hash_fn: HashFunction = sha256) -> "LogStore":
        """
        Open an existing log, recovering its scheme from the header.

        Raises:
            LogNotFoundError: If there is no log at ``path``.
            LogFormatError: If the header is not a recognized log header.
        """
        path = Path(path)
        if not path.exists() or path.stat().st_size == 0:
            raise LogNotFoundError(f"No log at {path}")
        try:
            with open(path, "rb") as f:
                header = f.read(HEADER.size)
                if len(header) < HEADER.size:
                    raise LogFormatError(f"Truncated log header in {path}")
                magic, version, scheme_id, genesis = HEADER.unpack(header)
                if magic != MAGIC:
                    raise LogFormatError(f"Bad magic {magic!r} in {path}")
                if version != VERSION:
                    raise LogFormatError(f"Unsupported log version {version} in {path}")
                try:
                    variant = AuthVariant(scheme_id)
                except ValueError:
                    raise LogFormatError(
                        f"Unknown scheme byte {scheme_id:#04x} in {path}"
                    ) from None
                store = cls(path, AuthScheme(variant, hash_fn), genesis)
                store._load(f)
        except OSError as e:
            raise StorageError(f"Failed to read log at {path}: {e}") from e

        logger.info("opened %s log at %s (%d entries)", variant.label, path, store.size)
        return store

    def _load(self, f: BinaryIO) -> None:
        """Read records past the ones already cached; a torn tail is ignored."""
        f.seek(0, os.SEEK_END)
        count = (f.tell() - HEADER.size) // RECORD_SIZE
        if count <= len(self._auth):
            return
        f.seek(HEADER.size + len(self._auth) * RECORD_SIZE)
        data = f.read((count - len(self._auth)) * RECORD_SIZE)
        for offset in range(0, len(data), RECORD_SIZE):
            self._datum.append(data[offset : offset + DIGEST_SIZE])
            self._auth.append(data[offset + DIGEST_SIZE : offset + RECORD_SIZE])

    def refresh(self) -> None:
        """Pick up entries appended by other processes."""
        self._check_open()
        with self._lock:
            try:
                with open(self.path, "rb") as f:
                    self._load(f)
            except OSError as e:
                raise StorageError(f"Failed to read log at {self.path}: {e}") from e

    @property
    def size(self) -> int:
        return len(self._auth)

    def __len__(self) -> int:
        return self.size

    def append(self, datum: bytes) -> tuple[int, Digest]:
        """
        Append a datum and return its index and authenticator.

        The record is durable on disk before this returns.
        """
        return self.append_many([datum])[0]

    def append_many(self, data: Iterable[bytes]) -> list[tuple[int, Digest]]:
        """Append several data under one lock and one fsync."""
        self._check_open()
        digests = [self.scheme.digest(datum) for datum in data]
        appended = []
        with self._lock:
            try:
                with open(self.path, "r+b") as f:
                    fcntl.flock(f, fcntl.LOCK_EX)
                    try:
                        self._load(f)
                        f.seek(HEADER.size + self.size * RECORD_SIZE)
                        datum_cache, auth_cache = list(self._datum), list(self._auth)
                        for datum_digest in digests:
                            j = len(auth_cache)
                            authenticator = self.scheme.auth(
                                j, datum_digest, [auth_cache[d] for d in deps_of(j)]
                            )
                            f.write(datum_digest + authenticator)
                            datum_cache.append(datum_digest)
                            auth_cache.append(authenticator)
                            appended.append((j, authenticator))
                        f.truncate()
                        f.flush()
                        os.fsync(f.fileno())
                        self._datum, self._auth = datum_cache, auth_cache
                    finally:
                        fcntl.flock(f, fcntl.LOCK_UN)
            except OSError as e:
                raise StorageError(f"Failed to append to log at {self.path}: {e}") from e

        for j, authenticator in appended:
            logger.debug("appended index %d: %s", j, authenticator.hex())
        return appended

    def _check_open(self) -> None:
        if self._closed:
            raise LogClosedError(f"Log at {self.path} is closed")

    def _check_index(self, i: int) -> None:
        self._check_open()
        if not 0 <= i < self.size:
            raise IndexOutOfRangeError(f"index {i} outside log of size {self.size}")

    def lookup_digest(self, i: int) -> Digest:
        """Authenticator stored at index i (h_star at 0)."""
        self._check_index(i)
        return self._auth[i]

    def datum_digest(self, i: int) -> Digest:
        self._check_index(i)
        return self._datum[i]

    def entry(self, i: int) -> LogEntry:
        self._check_index(i)
        return LogEntry(i, self._datum[i], self._auth[i])

    def entries(self) -> Iterator[LogEntry]:
        for i in range(self.size):
            yield LogEntry(i, self._datum[i], self._auth[i])

    def audit(self) -> AuditReport:
        """Recompute every authenticator from the datum digests and compare."""
        self._check_open()
        report = AuditReport(size=self.size)
        if self._datum[0] != self.genesis_digest or self._auth[0] != self.genesis_digest:
            report.mismatches.append(0)
        expected = [self.genesis_digest]
        for j in range(1, self.size):
            authenticator = self.scheme.auth(
                j, self._datum[j], [expected[d] for d in deps_of(j)]
            )
            expected.append(authenticator)
            if authenticator != self._auth[j]:
                report.mismatches.append(j)
        if not report.clean:
            logger.warning(
                "audit of %s found %d mismatching entries", self.path, len(report.mismatches)
            )
        return report

    def close(self) -> None:
        """Drop the cached records; the store must be reopened to be used again."""
        with self._lock:
            self._datum, self._auth = [], []
            self._closed = True

    def __enter__(self) -> "LogStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def __repr__(self) -> str:
        return f"LogStore({str(self.path)!r}, {self.scheme.variant.label}, size={self.size})"
