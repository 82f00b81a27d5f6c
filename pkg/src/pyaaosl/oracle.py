"""
Test-support oracles.

Nothing here is on the verification path. ``brute_rebuild`` recomputes a
path by plain recursion so the iterative rebuild in ``verify`` can be
cross-checked, and the evo-cr helpers assemble the two-advancement,
two-membership scenario whose conclusion is that agreeing verifiers see
the same datum at an earlier index.
"""

import logging
import random
from dataclasses import dataclass
from typing import Mapping

from .auth import AuthVariant, Digest, auth_mb, auth_simple
from .exceptions import DecodeError, MissingDependencyError, ScenarioError, ViewConflictError
from .hops import POW2, HopRelation
from .log import LogStore
from .proofs import (
    AdvPath,
    Hop,
    ProofBundle,
    bundle_for_path,
    compose,
    first_aft,
    last_bef,
    mk_adv,
    mk_membership,
    split_at,
)
from .verify import TrustAnchor, Verifier
from .wire import decode_bundle

logger = logging.getLogger(__name__)


def brute_rebuild(
    store: LogStore,
    path: AdvPath,
    view: Mapping[int, Digest],
    rel: HopRelation = POW2,
) -> Digest:
    """
    Digest at ``path.src`` computed by recursing down the path.

    ``view`` must bind ``path.tgt`` and every off-path dependency; genesis
    comes from the store.
    """
    auth = auth_simple if store.scheme.variant is AuthVariant.SIMPLE else auth_mb

    def below(hops: tuple[Hop, ...]) -> dict[int, Digest]:
        if not hops:
            anchored = store.genesis_digest if path.tgt == 0 else view[path.tgt]
            return {path.tgt: anchored}
        known = below(hops[1:])
        hop = hops[0]
        deps = []
        for dep in rel.deps_of(hop.source):
            if dep in known:
                deps.append(known[dep])
            elif dep == 0:
                deps.append(store.genesis_digest)
            elif dep in view:
                deps.append(view[dep])
            else:
                raise MissingDependencyError(dep)
        known[hop.source] = auth(
            hop.source, hop.datum_digest, deps, store.scheme.hash_fn, rel
        )
        return known

    return below(path.hops)[path.src]


def _segment(store: LogStore, i: int, j: int, rng: random.Random) -> AdvPath:
    style = rng.randrange(3)
    steps = []
    k = j
    while k > i:
        if style == 0:
            level = POW2.single_hop_level(k, i)
        elif style == 1:
            level = 1
        else:
            level = rng.randint(1, POW2.single_hop_level(k, i))
        steps.append(Hop(k, level, store.datum_digest(k)))
        k = POW2.hop_target(k, level)
    return AdvPath(j, i, tuple(steps))


def random_composed_adv(store: LogStore, i: int, j: int, rng: random.Random) -> AdvPath:
    """
    Random well-formed path from j down to i.

    The span is cut at random waypoints and each piece is walked either
    normalized, degenerate, or with random non-overshooting levels.
    """
    cuts = sorted(rng.sample(range(i + 1, j), min(rng.randint(0, 3), max(j - i - 1, 0))))
    points = [j, *reversed(cuts), i]
    path = AdvPath.done(j)
    for upper, lower in zip(points, points[1:]):
        path = compose(path, _segment(store, lower, upper, rng))
    return path


def _adv_through(
    store: LogStore, j: int, s: int, i: int, rng: random.Random | None
) -> AdvPath:
    if rng is None:
        upper = mk_adv(store, s, j).path
        lower = mk_adv(store, i, s).path
    else:
        upper = random_composed_adv(store, s, j, rng)
        lower = random_composed_adv(store, i, s, rng)
    return compose(upper, lower)


@dataclass(frozen=True)
class EvoCrScenario:
    """
    Two advancement proofs to j and two membership proofs for tgt.

    a1 runs j -> s1 -> i1 and a2 runs j -> s2 -> i2; m1 proves tgt relative
    to s1 and m2 relative to s2. The split segments and the two special
    indexes M and R are kept so tests can inspect the shared visits.
    """

    store: LogStore
    j: int
    s1: int
    s2: int
    tgt: int
    i1: int
    i2: int
    a1: ProofBundle
    a2: ProofBundle
    m1: ProofBundle
    m2: ProofBundle
    a11: AdvPath
    a12: AdvPath
    a21: AdvPath
    a22: AdvPath
    m11: AdvPath
    m12: AdvPath
    m21: AdvPath
    m22: AdvPath
    M: int
    R: int


def _require_visit(index: int, path: AdvPath, name: str) -> None:
    if index not in path.visited:
        raise ScenarioError(f"{name} ({path.src} -> {path.tgt}) does not visit {index}")


def build_evocr_scenario(
    store: LogStore,
    j: int,
    s1: int,
    s2: int,
    tgt: int,
    i1: int | None = None,
    i2: int | None = None,
    rng: random.Random | None = None,
) -> EvoCrScenario:
    """
    Assemble an honest evo-cr scenario over ``store``.

    With ``rng`` the advancement proofs are random compositions; without
    it they are normalized through s1 and s2. M is s2 when a11 visits it
    and otherwise the last index of a11 below s2. R is tgt when a12 visits
    it and otherwise the first index of a12 above tgt.

    Raises:
        ScenarioError: If the indexes violate i1, i2 <= tgt <= s1 <= s2 <= j,
            or if a special index is not shared where it must be.
    """
    i1 = tgt if i1 is None else i1
    i2 = tgt if i2 is None else i2
    if not (0 <= i1 <= tgt and 0 <= i2 <= tgt and 0 < tgt <= s1 <= s2 <= j < store.size):
        raise ScenarioError(
            f"need i1, i2 <= tgt <= s1 <= s2 <= j < {store.size}, "
            f"got i1={i1} i2={i2} tgt={tgt} s1={s1} s2={s2} j={j}"
        )

    path1 = _adv_through(store, j, s1, i1, rng)
    path2 = _adv_through(store, j, s2, i2, rng)
    m1 = mk_membership(store, tgt, s1)
    m2 = mk_membership(store, tgt, s2)

    a11, a12 = split_at(path1, s1)
    a21, a22 = split_at(path2, s2)
    M = s2 if s2 in a11.visited else last_bef(a11, s2)
    R = tgt if tgt in a12.visited else first_aft(a12, tgt)

    for name, path in (("a11", a11), ("a22", a22), ("m2", m2.path)):
        _require_visit(M, path, name)
    for name, path in (("a12", a12), ("m1", m1.path), ("m2", m2.path)):
        _require_visit(R, path, name)

    m11, m12 = split_at(m1.path, R)
    m21, m22 = split_at(m2.path, M)
    return EvoCrScenario(
        store=store,
        j=j,
        s1=s1,
        s2=s2,
        tgt=tgt,
        i1=i1,
        i2=i2,
        a1=bundle_for_path(store, path1),
        a2=bundle_for_path(store, path2),
        m1=m1,
        m2=m2,
        a11=a11,
        a12=a12,
        a21=a21,
        a22=a22,
        m11=m11,
        m12=m12,
        m21=m21,
        m22=m22,
        M=M,
        R=R,
    )


def random_evocr_scenario(store: LogStore, rng: random.Random) -> EvoCrScenario:
    """Scenario with indexes drawn uniformly under the ordering constraints."""
    if store.size < 2:
        raise ScenarioError("need at least one entry after genesis")
    j = rng.randrange(1, store.size)
    s2 = rng.randint(1, j)
    s1 = rng.randint(1, s2)
    tgt = rng.randint(1, s1)
    return build_evocr_scenario(
        store, j, s1, s2, tgt, rng.randint(0, tgt), rng.randint(0, tgt), rng
    )


@dataclass(frozen=True)
class EvoCrOutcome:
    """
    Result of checking a scenario.

    ``failed_hypothesis`` names the first hypothesis that did not hold
    (``root``, ``m1-consistent`` or ``m2-consistent``); ``agrees`` is only
    meaningful when every hypothesis held.
    """

    hypotheses_hold: bool
    failed_hypothesis: str | None = None
    agrees: bool | None = None

    @property
    def silently_accepted_conflict(self) -> bool:
        return self.hypotheses_hold and not self.agrees


def evaluate_evocr(
    scenario: EvoCrScenario,
    verifier: Verifier,
    m2: ProofBundle | bytes | None = None,
) -> EvoCrOutcome:
    """
    Check the scenario's hypotheses and, when they hold, its conclusion.

    ``m2`` replaces the honest second membership proof; raw bytes are
    decoded first and an undecodable message fails ``m2-consistent``.
    """
    if isinstance(m2, bytes):
        try:
            m2 = decode_bundle(m2, verifier.rel)
        except DecodeError:
            return EvoCrOutcome(False, "m2-consistent")
    m2 = scenario.m2 if m2 is None else m2

    store = scenario.store
    try:
        rebuilt1 = verifier.rebuild_bundle(
            scenario.a1, TrustAnchor(scenario.i1, store.lookup_digest(scenario.i1))
        )
        rebuilt2 = verifier.rebuild_bundle(
            scenario.a2, TrustAnchor(scenario.i2, store.lookup_digest(scenario.i2))
        )
    except (MissingDependencyError, ViewConflictError):
        return EvoCrOutcome(False, "root")
    if rebuilt1[scenario.j] != rebuilt2[scenario.j]:
        return EvoCrOutcome(False, "root")

    if not verifier.verify_membership(
        scenario.m1, TrustAnchor(scenario.s1, rebuilt1[scenario.s1])
    ):
        return EvoCrOutcome(False, "m1-consistent")
    if not verifier.verify_membership(m2, TrustAnchor(scenario.s2, rebuilt2[scenario.s2])):
        return EvoCrOutcome(False, "m2-consistent")
    if m2.proof.tgt != scenario.tgt:
        return EvoCrOutcome(False, "m2-consistent")

    agrees = scenario.m1.proof.datum_digest == m2.proof.datum_digest
    if not agrees:
        logger.warning("membership proofs disagree at %d", scenario.tgt)
    return EvoCrOutcome(True, None, agrees)
