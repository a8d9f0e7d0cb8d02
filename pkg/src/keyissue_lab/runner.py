"""Scenario configuration, registry and the deterministic runner."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Optional

from .attacks import (
    AttackVerdict,
    PasswordSystem,
    attack_lee_impersonation,
    attack_lee_insider,
    attack_lee_tamper,
    attack_sui_insider,
    attack_sui_rerandomize,
    attack_sui_stolen_verifier,
)
from .channel import Channel, PartyRng, TranscriptEntry
from .errors import ConfigurationError
from .lee import authority_label, lee_setup, user_blind_request
from .pairing import DEFAULT_Q, G1Element, GroupParams, decode_element, pair
from .sessions import log_chain_checks, run_lee_issuance, run_sui_issuance
from .sui import ROLE_ADVERSARY, ROLE_LRA, PendingDatabase, lra_register, sui_setup

LEE_SCENARIOS = ("honest", "impersonation", "insider-sig", "tamper")
SUI_SCENARIOS = ("honest", "stolen-verifier", "insider-pwd", "rerandomize")
SCENARIOS = {"lee": LEE_SCENARIOS, "sui": SUI_SCENARIOS}

DEFAULT_ID = "alice"
DEFAULT_MESSAGE = b"transfer 100 to mallory".hex()
BYSTANDERS = ("bob", "carol")


@dataclass(frozen=True)
class ScenarioConfig:
    protocol: str
    scenario: str
    n: Optional[int] = None
    q: Optional[int] = None
    seed: int = 0
    i: Optional[int] = None
    r_star: Optional[int] = None
    id: Optional[str] = None
    message: Optional[str] = None  # hex

    def validate(self) -> ScenarioConfig:
        """Check the config and return a copy with defaults filled in."""
        if self.protocol not in SCENARIOS:
            raise ConfigurationError(f"unknown protocol {self.protocol!r}")
        if self.scenario not in SCENARIOS[self.protocol]:
            raise ConfigurationError(
                f"scenario {self.scenario!r} not available for {self.protocol}; "
                f"choose from {', '.join(SCENARIOS[self.protocol])}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        group = self.group()

        lee = self.protocol == "lee"
        n = self.n
        if n is not None and not lee:
            raise ConfigurationError("--n only applies to the lee protocol")
        if lee:
            n = 2 if n is None else n
            if n < 1:
                raise ConfigurationError("n must be at least 1")

        i = self.i
        if self.scenario in ("insider-sig", "tamper"):
            i = 1 if i is None else i
            if not 1 <= i <= n:
                raise ConfigurationError(f"i must be in [1, {n}]")
        elif i is not None:
            raise ConfigurationError(f"--i does not apply to {self.scenario}")

        needs_r = self.scenario in ("tamper", "rerandomize")
        if needs_r and self.r_star is None:
            raise ConfigurationError(f"{self.scenario} requires --r-star")
        if not needs_r and self.r_star is not None:
            raise ConfigurationError(f"--r-star does not apply to {self.scenario}")
        if needs_r and self.r_star % group.q == 0:
            raise ConfigurationError("r* must be nonzero mod q")

        message = self.message
        if self.scenario == "insider-sig":
            message = DEFAULT_MESSAGE if message is None else message
            try:
                bytes.fromhex(message)
            except ValueError:
                raise ConfigurationError("--message must be hex") from None
        elif message is not None:
            raise ConfigurationError(f"--message does not apply to {self.scenario}")

        return ScenarioConfig(
            self.protocol, self.scenario, n, self.q, self.seed, i, self.r_star,
            self.id or DEFAULT_ID, message,
        )

    def group(self) -> GroupParams:
        return GroupParams(self.q if self.q is not None else DEFAULT_Q)

    def run_id(self) -> str:
        text = json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class _Ctx:
    config: ScenarioConfig
    group: GroupParams
    channel: Channel
    rng: PartyRng


Driver = Callable[[_Ctx], Optional[AttackVerdict]]
REGISTRY: dict[tuple[str, str], Driver] = {}


def scenario(protocol: str, name: str):
    def register(fn: Driver) -> Driver:
        REGISTRY[(protocol, name)] = fn
        return fn
    return register


def _lee_system(ctx: _Ctx):
    n = ctx.config.n
    rngs = [ctx.rng.for_party(authority_label(k)) for k in range(n + 1)]
    params, secrets = lee_setup(ctx.group, n, authority_rngs=rngs)
    log_chain_checks(ctx.channel, params)
    return params, secrets


def _password(ctx: _Ctx, id: str) -> str:
    return f"pw-{id}-{ctx.rng.for_party('LRA').getrandbits(32):08x}"


@scenario("lee", "honest")
def _lee_honest(ctx: _Ctx):
    params, secrets = _lee_system(ctx)
    state, _ = user_blind_request(ctx.config.id, params, ctx.rng.for_party("user"))
    run_lee_issuance(ctx.channel, params, secrets, state)
    return None


@scenario("lee", "impersonation")
def _lee_impersonation(ctx: _Ctx):
    params, secrets = _lee_system(ctx)
    return attack_lee_impersonation(
        params, secrets[0], secrets[1:], ctx.config.id, ctx.rng, channel=ctx.channel
    )


@scenario("lee", "insider-sig")
def _lee_insider(ctx: _Ctx):
    params, secrets = _lee_system(ctx)
    m = bytes.fromhex(ctx.config.message)
    return attack_lee_insider(params, secrets, ctx.config.i, m, ctx.rng, channel=ctx.channel)


@scenario("lee", "tamper")
def _lee_tamper(ctx: _Ctx):
    params, secrets = _lee_system(ctx)
    return attack_lee_tamper(
        params, secrets, ctx.config.i, ctx.config.r_star, ctx.rng,
        user_id=ctx.config.id, channel=ctx.channel,
    )


@scenario("sui", "honest")
def _sui_honest(ctx: _Ctx):
    params, s = sui_setup(ctx.group, ctx.rng.for_party("KGC"))
    id = ctx.config.id
    pwd = _password(ctx, id)
    db = lra_register(PendingDatabase(), id, pwd)
    out = run_sui_issuance(ctx.channel, params, s, db, id, pwd, ctx.rng.for_party("user"))
    if out.private_key is not None:
        Hid = ctx.group.hash_to_g1(id.encode())
        ctx.channel.check_pairing(
            "user", "verify_private_key", (out.private_key, params.P), (Hid, params.P_PKG)
        )
    return None


@scenario("sui", "stolen-verifier")
def _sui_stolen(ctx: _Ctx):
    params, s = sui_setup(ctx.group, ctx.rng.for_party("KGC"))
    target = ctx.config.id
    db = PendingDatabase()
    for id in (target, *[b for b in BYSTANDERS if b != target]):
        lra_register(db, id, _password(ctx, id))
    snapshot = db.snapshot(ROLE_ADVERSARY)
    return attack_sui_stolen_verifier(params, s, db, snapshot, target, ctx.rng, channel=ctx.channel)


@scenario("sui", "insider-pwd")
def _sui_insider(ctx: _Ctx):
    id = ctx.config.id
    pwd = _password(ctx, id)
    db = lra_register(PendingDatabase(), id, pwd)
    # the user reuses the same password on a second system
    mail = PasswordSystem({id: pwd}, name="mail")
    return attack_sui_insider(db, mail, id, role=ROLE_LRA, channel=ctx.channel)


@scenario("sui", "rerandomize")
def _sui_rerandomize(ctx: _Ctx):
    params, s = sui_setup(ctx.group, ctx.rng.for_party("KGC"))
    id = ctx.config.id
    return attack_sui_rerandomize(
        params, s, ctx.config.r_star, (id, _password(ctx, id)), ctx.rng, channel=ctx.channel
    )


def run_scenario(config: ScenarioConfig) -> tuple[list[TranscriptEntry], Optional[AttackVerdict]]:
    """Run one scenario; the transcript is a pure function of ``config``."""
    config = config.validate()
    ctx = _Ctx(config, config.group(), Channel(config.run_id()), PartyRng(config.seed))
    verdict = REGISTRY[(config.protocol, config.scenario)](ctx)
    return ctx.channel.entries, verdict


def honest_succeeded(entries: Iterable[TranscriptEntry]) -> bool:
    """True iff the last verify_private_key check in the transcript passed."""
    result = False
    for e in entries:
        if e.kind == "check" and e.detail.get("name") == "verify_private_key":
            result = bool(e.detail["result"])
    return result


@dataclass
class TranscriptReport:
    equations: int = 0
    mismatches: int = 0
    false_equations: int = 0

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def verify_transcript(entries: Iterable[TranscriptEntry]) -> TranscriptReport:
    """Recompute every logged pairing equation and compare with the recorded result."""
    report = TranscriptReport()
    groups: dict[int, GroupParams] = {}
    for e in entries:
        if e.kind != "check" or "lhs" not in e.detail:
            continue
        q = int(e.detail["q"], 16)
        group = groups.setdefault(q, GroupParams(q))
        a, b = (decode_element(group, h) for h in e.detail["lhs"])
        c, d = (decode_element(group, h) for h in e.detail["rhs"])
        if not all(isinstance(x, G1Element) for x in (a, b, c, d)):
            raise ValueError(f"entry {e.seq}: pairing operands must be G1 elements")
        result = pair(a, b) == pair(c, d)
        report.equations += 1
        report.mismatches += result != e.detail["result"]
        report.false_equations += not result
    return report
