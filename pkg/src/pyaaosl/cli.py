import csv
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .auth import AuthScheme, AuthVariant
from .census import run_census
from .exceptions import DecodeError, PyAAOSLError
from .hops import POW2, RELATIONS, check_hop_laws, check_level_mid, check_max_lvl_closed_form
from .log import LogStore
from .proofs import mk_adv, mk_membership
from .verify import TrustAnchor, Verdict, Verifier
from .wire import decode_bundle, encode_anchor, encode_bundle, from_hex, to_hex

logger = logging.getLogger(__name__)

SCHEMES = [variant.label for variant in AuthVariant]


@dataclass
class CliConfig:
    """Settings shared by every command, from global options or PYAAOSL_* variables."""

    log: Path | None = None
    hex: bool = False
    verbose: int = 0

    def require_log(self) -> Path:
        if self.log is None:
            raise click.UsageError("No log given; pass --log or set PYAAOSL_LOG.")
        return self.log

    def open_store(self) -> LogStore:
        return LogStore.open(self.require_log())

    def write(self, out, data: bytes) -> None:
        out.write(to_hex(data).encode() if self.hex else data)

    def read(self, source) -> bytes:
        data = source.read()
        return from_hex(data.decode("ascii", errors="replace")) if self.hex else data


class AnchorType(click.ParamType):
    """Click parameter type for ``index:hexdigest`` trust anchors."""

    name = "anchor"

    def convert(self, value, param, ctx):
        if isinstance(value, TrustAnchor):
            return value
        try:
            return TrustAnchor.parse(value)
        except (ValueError, PyAAOSLError) as e:
            self.fail(f"Invalid anchor {value!r}: {e}", param, ctx)


ANCHOR = AnchorType()


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


@click.group(context_settings={"auto_envvar_prefix": "PYAAOSL"})
@click.version_option(package_name="pyaaosl")
@click.option(
    "--log",
    "log_path",
    type=click.Path(dir_okay=False, path_type=Path),
    envvar="PYAAOSL_LOG",
    help="Log file to operate on.",
)
@click.option(
    "--hex", "hex_io", is_flag=True, envvar="PYAAOSL_HEX", help="Read and write proofs as hex text."
)
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG.")
@click.pass_context
def cli(ctx: click.Context, log_path: Path | None, hex_io: bool, verbose: int):
    """pyAAOSL - authenticated append-only skip list logs and proofs."""
    _configure_logging(verbose)
    ctx.obj = CliConfig(log=log_path, hex=hex_io, verbose=verbose)


pass_config = click.make_pass_decorator(CliConfig)


@cli.command("init")
@click.option(
    "--scheme",
    type=click.Choice(SCHEMES),
    default="simple",
    show_default=True,
    help="Authenticator construction, fixed for the life of the log.",
)
@click.option("--genesis", default="genesis", show_default=True, help="Genesis datum.")
@pass_config
def init(config: CliConfig, scheme: str, genesis: str):
    """Create a log holding only the genesis entry and print its digest."""
    try:
        store = LogStore.init(
            config.require_log(), genesis.encode(), AuthScheme(AuthVariant.from_label(scheme))
        )
    except PyAAOSLError as e:
        raise click.ClickException(str(e))
    click.echo(store.genesis_digest.hex())


@cli.command("append")
@click.argument("data", nargs=-1)
@pass_config
def append(config: CliConfig, data: tuple[str, ...]):
    """Append DATA entries, one per argument or one per line of standard input."""
    if data:
        items = [item.encode() for item in data]
    else:
        items = [line.rstrip(b"\r\n") for line in click.get_binary_stream("stdin")]
    try:
        appended = config.open_store().append_many(items)
    except PyAAOSLError as e:
        raise click.ClickException(str(e))
    for index, authenticator in appended:
        click.echo(f"{index} {authenticator.hex()}")


@cli.command("root")
@click.argument("j", type=int, required=False)
@click.option(
    "-o",
    "--out",
    type=click.File("wb"),
    help="Also write an anchor message for J to this file.",
)
@pass_config
def root(config: CliConfig, j: int | None, out):
    """Print the authenticator at J (default: the latest entry)."""
    try:
        store = config.open_store()
        j = store.size - 1 if j is None else j
        digest = store.lookup_digest(j)
    except PyAAOSLError as e:
        raise click.ClickException(str(e))
    click.echo(digest.hex())
    if out is not None:
        config.write(out, encode_anchor(TrustAnchor(j, digest), store.scheme.variant))


@cli.command("prove-adv")
@click.argument("i", type=int)
@click.argument("j", type=int)
@click.option("-o", "--out", type=click.File("wb"), default="-", help="Output file.")
@pass_config
def prove_adv(config: CliConfig, i: int, j: int, out):
    """Write the advancement proof from J down to I."""
    try:
        bundle = mk_adv(config.open_store(), i, j)
    except PyAAOSLError as e:
        raise click.ClickException(str(e))
    config.write(out, encode_bundle(bundle))


@cli.command("prove-member")
@click.argument("tgt", type=int)
@click.argument("j", type=int)
@click.option("-o", "--out", type=click.File("wb"), default="-", help="Output file.")
@pass_config
def prove_member(config: CliConfig, tgt: int, j: int, out):
    """Write the membership proof for the datum at TGT relative to J."""
    try:
        bundle = mk_membership(config.open_store(), tgt, j)
    except PyAAOSLError as e:
        raise click.ClickException(str(e))
    config.write(out, encode_bundle(bundle))


def _verifier(
    config: CliConfig, genesis_digest: str | None, scheme: str | None, strict: bool
) -> Verifier:
    if config.log is not None:
        store = config.open_store()
        return Verifier(store.scheme, store.genesis_digest, strict=strict)
    if genesis_digest is None or scheme is None:
        raise click.UsageError("Without --log, pass both --genesis-digest and --scheme.")
    try:
        digest = bytes.fromhex(genesis_digest)
    except ValueError:
        raise click.BadParameter(f"not hex: {genesis_digest}", param_hint="--genesis-digest")
    return Verifier(AuthScheme(AuthVariant.from_label(scheme)), digest, strict=strict)


def _verification_options(f):
    f = click.option(
        "--strict", is_flag=True, help="Reject views that disagree with rebuilt values."
    )(f)
    f = click.option(
        "--scheme", type=click.Choice(SCHEMES), help="Scheme, when no --log is given."
    )(f)
    f = click.option("--genesis-digest", help="Hex genesis digest, when no --log is given.")(f)
    return f


def _report(ctx: click.Context, verdict: Verdict) -> None:
    click.echo(str(verdict))
    if verdict.detail:
        logger.info("%s", verdict.detail)
    if not verdict:
        ctx.exit(1)


@cli.command("verify-adv")
@click.argument("proof", type=click.File("rb"))
@click.option("--anchor", type=ANCHOR, required=True, help="Trusted i:hexdigest.")
@click.option("--expected", type=ANCHOR, required=True, help="Claimed j:hexdigest.")
@_verification_options
@pass_config
@click.pass_context
def verify_adv(
    ctx: click.Context,
    config: CliConfig,
    proof,
    anchor: TrustAnchor,
    expected: TrustAnchor,
    genesis_digest: str | None,
    scheme: str | None,
    strict: bool,
):
    """Check that PROOF advances trust from --anchor to --expected."""
    try:
        verifier = _verifier(config, genesis_digest, scheme, strict)
        bundle = decode_bundle(config.read(proof))
    except DecodeError as e:
        click.echo(f"REJECT: {e.reason.value}")
        ctx.exit(1)
    except (PyAAOSLError, ValueError) as e:
        raise click.ClickException(str(e))
    _report(ctx, verifier.verify_advancement(bundle, anchor, expected))


@cli.command("verify-member")
@click.argument("proof", type=click.File("rb"))
@click.option("--root", "root_anchor", type=ANCHOR, required=True, help="Trusted j:hexdigest.")
@_verification_options
@pass_config
@click.pass_context
def verify_member(
    ctx: click.Context,
    config: CliConfig,
    proof,
    root_anchor: TrustAnchor,
    genesis_digest: str | None,
    scheme: str | None,
    strict: bool,
):
    """Check the datum claimed by membership PROOF against --root."""
    try:
        verifier = _verifier(config, genesis_digest, scheme, strict)
        bundle = decode_bundle(config.read(proof))
    except DecodeError as e:
        click.echo(f"REJECT: {e.reason.value}")
        ctx.exit(1)
    except (PyAAOSLError, ValueError) as e:
        raise click.ClickException(str(e))
    _report(ctx, verifier.verify_membership(bundle, root_anchor))


@cli.command("stats")
@click.argument("n", type=int)
@click.option("--csv", "as_csv", is_flag=True, help="Emit key,value CSV.")
def stats(n: int, as_csv: bool):
    """Census of all normalized proofs between indexes below N."""
    try:
        report = run_census(n)
    except PyAAOSLError as e:
        raise click.ClickException(str(e))
    if as_csv:
        writer = csv.writer(click.get_text_stream("stdout"), lineterminator="\n")
        writer.writerow(["key", "value"])
        writer.writerows(report.rows())
        return
    for key, value in report.rows():
        click.echo(f"{key}: {value}")


@cli.command("check-laws")
@click.argument("n", type=int)
@click.option("--relation", default=POW2.name, show_default=True, help="Registered hop relation.")
@click.pass_context
def check_laws(ctx: click.Context, n: int, relation: str):
    """Exhaustively check the hop-relation laws for sources up to N."""
    rel = RELATIONS.get(relation)
    if rel is None:
        raise click.BadParameter(
            f"unknown relation {relation!r}; known: {', '.join(sorted(RELATIONS))}",
            param_hint="--relation",
        )
    try:
        report = check_hop_laws(rel, n)
    except PyAAOSLError as e:
        raise click.ClickException(str(e))
    report.violations.extend(check_level_mid(rel, n))
    if rel is POW2:
        report.violations.extend(check_max_lvl_closed_form(n))

    for violation in report.violations:
        click.echo(f"{violation.law.value}: {violation.detail}")
    if report.clean:
        click.echo(f"{rel.name}: clean up to {n}")
    else:
        click.echo(f"{rel.name}: {len(report.violations)} violation(s) up to {n}")
        ctx.exit(1)

