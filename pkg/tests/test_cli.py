import pytest
from click.testing import CliRunner

from pyaaosl.auth import sha256
from pyaaosl.cli import cli
from pyaaosl.hops import RELATIONS
from pyaaosl.log import LogStore
from pyaaosl.wire import decode_anchor

from .conftest import CrossingHops


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def log_path(tmp_path):
    return tmp_path / "log.aosl"


def invoke(runner, log_path, *args, **kwargs):
    return runner.invoke(cli, ["--log", str(log_path), *args], **kwargs)


@pytest.fixture
def populated(runner, log_path):
    """A 13-entry log built through the CLI."""
    assert invoke(runner, log_path, "init").exit_code == 0
    result = invoke(runner, log_path, "append", *[f"entry-{k}" for k in range(1, 13)])
    assert result.exit_code == 0, result.output
    return log_path


def root_of(runner, log_path, j):
    result = invoke(runner, log_path, "root", str(j))
    assert result.exit_code == 0, result.output
    return result.output.strip()


class TestInitAppendRoot:
    def test_init_prints_genesis_digest(self, runner, log_path):
        result = invoke(runner, log_path, "init", "--genesis", "hello")
        assert result.exit_code == 0, result.output
        assert result.output.strip() == sha256(b"hello").hex()
        assert root_of(runner, log_path, 0) == sha256(b"hello").hex()

    def test_init_twice_fails(self, runner, log_path):
        invoke(runner, log_path, "init")
        result = invoke(runner, log_path, "init")
        assert result.exit_code == 1
        assert "already exists" in result.output

    def test_init_with_mb_scheme(self, runner, log_path):
        assert invoke(runner, log_path, "init", "--scheme", "mb").exit_code == 0
        assert LogStore.open(log_path).scheme.variant.label == "mb"

    def test_append_arguments(self, populated, runner):
        store = LogStore.open(populated)
        assert store.size == 13
        assert root_of(runner, populated, 12) == store.lookup_digest(12).hex()

    def test_append_prints_index_and_digest(self, runner, log_path):
        invoke(runner, log_path, "init")
        result = invoke(runner, log_path, "append", "a", "b")
        lines = result.output.splitlines()
        store = LogStore.open(log_path)
        assert lines == [
            f"1 {store.lookup_digest(1).hex()}",
            f"2 {store.lookup_digest(2).hex()}",
        ]

    def test_append_from_stdin(self, runner, log_path):
        invoke(runner, log_path, "init")
        result = invoke(runner, log_path, "append", input="first\nsecond\nthird\n")
        assert result.exit_code == 0, result.output
        assert [line.split()[0] for line in result.output.splitlines()] == ["1", "2", "3"]
        assert LogStore.open(log_path).datum_digest(2) == sha256(b"second")

    def test_root_defaults_to_latest(self, populated, runner):
        result = invoke(runner, populated, "root")
        assert result.output.strip() == root_of(runner, populated, 12)

    def test_root_writes_anchor(self, populated, runner, tmp_path):
        out = tmp_path / "anchor.bin"
        assert invoke(runner, populated, "root", "7", "--out", str(out)).exit_code == 0
        anchor, _ = decode_anchor(out.read_bytes())
        assert anchor.index == 7
        assert anchor.digest.hex() == root_of(runner, populated, 7)

    def test_root_on_uninitialized_log(self, runner, log_path):
        result = invoke(runner, log_path, "root", "0")
        assert result.exit_code == 1
        assert "No log" in result.output

    def test_root_out_of_range(self, populated, runner):
        assert invoke(runner, populated, "root", "13").exit_code == 1

    def test_log_from_environment(self, populated, runner):
        result = runner.invoke(cli, ["root", "12"], env={"PYAAOSL_LOG": str(populated)})
        assert result.exit_code == 0, result.output
        assert result.output.strip() == root_of(runner, populated, 12)

    def test_missing_log_option(self, runner):
        result = runner.invoke(cli, ["root"], env={"PYAAOSL_LOG": None})
        assert result.exit_code == 2


class TestProveAndVerify:
    def test_advancement_round_trip(self, populated, runner, tmp_path):
        proof = tmp_path / "adv.bin"
        assert invoke(runner, populated, "prove-adv", "7", "12", "-o", str(proof)).exit_code == 0
        result = invoke(
            runner,
            populated,
            "verify-adv",
            str(proof),
            "--anchor",
            f"7:{root_of(runner, populated, 7)}",
            "--expected",
            f"12:{root_of(runner, populated, 12)}",
        )
        assert result.exit_code == 0, result.output
        assert result.output.strip() == "ACCEPT"

    def test_flipped_byte_is_rejected(self, populated, runner, tmp_path):
        proof = tmp_path / "adv.bin"
        invoke(runner, populated, "prove-adv", "7", "12", "-o", str(proof))
        data = bytearray(proof.read_bytes())
        data[40] ^= 0xFF
        proof.write_bytes(bytes(data))
        result = invoke(
            runner,
            populated,
            "verify-adv",
            str(proof),
            "--anchor",
            f"7:{root_of(runner, populated, 7)}",
            "--expected",
            f"12:{root_of(runner, populated, 12)}",
        )
        assert result.exit_code == 1
        assert result.output.startswith("REJECT: ")

    def test_undecodable_proof(self, populated, runner, tmp_path):
        proof = tmp_path / "junk.bin"
        proof.write_bytes(b"JUNK")
        result = invoke(
            runner,
            populated,
            "verify-adv",
            str(proof),
            "--anchor",
            f"7:{root_of(runner, populated, 7)}",
            "--expected",
            f"12:{root_of(runner, populated, 12)}",
        )
        assert result.exit_code == 1
        assert result.output.strip() == "REJECT: truncated"

    def test_membership_without_log(self, populated, runner, tmp_path):
        proof = tmp_path / "member.bin"
        assert invoke(runner, populated, "prove-member", "5", "12", "-o", str(proof)).exit_code == 0
        result = runner.invoke(
            cli,
            [
                "verify-member",
                str(proof),
                "--root",
                f"12:{root_of(runner, populated, 12)}",
                "--genesis-digest",
                root_of(runner, populated, 0),
                "--scheme",
                "simple",
            ],
        )
        assert result.exit_code == 0, result.output
        assert result.output.strip() == "ACCEPT"

    def test_membership_against_wrong_root(self, populated, runner, tmp_path):
        proof = tmp_path / "member.bin"
        invoke(runner, populated, "prove-member", "5", "12", "-o", str(proof))
        result = invoke(
            runner,
            populated,
            "verify-member",
            str(proof),
            "--root",
            f"12:{root_of(runner, populated, 11)}",
        )
        assert result.exit_code == 1
        assert result.output.strip() == "REJECT: digest-mismatch"

    def test_genesis_membership_is_an_error(self, populated, runner):
        result = invoke(runner, populated, "prove-member", "0", "12")
        assert result.exit_code == 1
        assert "genesis" in result.output

    def test_hex_mode(self, populated, runner, tmp_path):
        result = runner.invoke(cli, ["--log", str(populated), "--hex", "prove-adv", "7", "12"])
        assert result.exit_code == 0, result.output
        text = result.output.strip()
        assert all(c in "0123456789abcdef" for c in text)

        proof = tmp_path / "adv.hex"
        proof.write_text(text)
        verified = runner.invoke(
            cli,
            [
                "--log",
                str(populated),
                "--hex",
                "verify-adv",
                str(proof),
                "--anchor",
                f"7:{root_of(runner, populated, 7)}",
                "--expected",
                f"12:{root_of(runner, populated, 12)}",
            ],
        )
        assert verified.output.strip() == "ACCEPT"

    def test_corrupt_hex_is_rejected(self, populated, runner, tmp_path):
        result = runner.invoke(cli, ["--log", str(populated), "--hex", "prove-adv", "7", "12"])
        text = result.output.strip()
        proof = tmp_path / "adv.hex"
        proof.write_text("zz" + text[2:])
        verified = runner.invoke(
            cli,
            [
                "--log",
                str(populated),
                "--hex",
                "verify-adv",
                str(proof),
                "--anchor",
                f"7:{root_of(runner, populated, 7)}",
                "--expected",
                f"12:{root_of(runner, populated, 12)}",
            ],
        )
        assert verified.exit_code == 1
        assert verified.output.strip() == "REJECT: bad-hex"

    def test_non_ascii_hex_is_rejected(self, populated, runner, tmp_path):
        proof = tmp_path / "member.hex"
        proof.write_bytes(b"\xff\xfe0102")
        result = runner.invoke(
            cli,
            [
                "--log",
                str(populated),
                "--hex",
                "verify-member",
                str(proof),
                "--root",
                f"12:{root_of(runner, populated, 12)}",
            ],
        )
        assert result.exit_code == 1
        assert result.output.strip() == "REJECT: bad-hex"

    def test_bad_anchor_argument(self, populated, runner, tmp_path):
        proof = tmp_path / "adv.bin"
        invoke(runner, populated, "prove-adv", "7", "12", "-o", str(proof))
        result = invoke(
            runner, populated, "verify-adv", str(proof), "--anchor", "7", "--expected", "12:00"
        )
        assert result.exit_code == 2

    def test_verify_needs_log_or_genesis(self, populated, runner, tmp_path):
        proof = tmp_path / "adv.bin"
        invoke(runner, populated, "prove-adv", "7", "12", "-o", str(proof))
        result = runner.invoke(
            cli,
            [
                "verify-adv",
                str(proof),
                "--anchor",
                f"7:{root_of(runner, populated, 7)}",
                "--expected",
                f"12:{root_of(runner, populated, 12)}",
            ],
        )
        assert result.exit_code == 2


class TestStats:
    def test_smallest_census(self, runner):
        result = runner.invoke(cli, ["stats", "3"])
        assert result.exit_code == 0, result.output
        assert "proofs: 1" in result.output
        assert "longest_hops: 1" in result.output

    def test_csv(self, runner):
        result = runner.invoke(cli, ["stats", "10", "--csv"])
        lines = result.output.splitlines()
        assert lines[0] == "key,value"
        assert "proofs,36" in lines

    def test_no_proofs(self, runner):
        result = runner.invoke(cli, ["stats", "2"])
        assert result.exit_code == 0, result.output
        assert "proofs: 0" in result.output

    def test_too_small(self, runner):
        assert runner.invoke(cli, ["stats", "1"]).exit_code == 1


class TestCheckLaws:
    @pytest.mark.parametrize("n", ["1", "512"])
    def test_pow2_clean(self, runner, n):
        result = runner.invoke(cli, ["check-laws", n])
        assert result.exit_code == 0, result.output
        assert "clean" in result.output

    def test_crossing_relation_fails(self, runner, monkeypatch):
        monkeypatch.setitem(RELATIONS, "crossing", CrossingHops())
        result = runner.invoke(cli, ["check-laws", "8", "--relation", "crossing"])
        assert result.exit_code == 1
        assert "no-cross" in result.output

    def test_unknown_relation(self, runner):
        result = runner.invoke(cli, ["check-laws", "8", "--relation", "nope"])
        assert result.exit_code == 2
