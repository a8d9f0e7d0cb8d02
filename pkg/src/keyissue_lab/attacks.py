"""Executable attacks on the Lee and Sui key issuing protocols.

Every attack is a scenario over a :class:`Channel`: the adversary only sees
envelopes on the wire, plus whatever capability its role grants (its own
master key for a malicious authority, read access to the pending database
for a thief or insider).  Outcomes are reported as an :class:`AttackVerdict`
whose ``success`` is the conjunction of the attack's defining predicates.

Some predicates compare against authority secrets (e.g. "the forgery equals
s_i H(m)"). Those are evaluation oracles and use the transparent backend; the
attacker code paths never read them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Mapping, Optional, Sequence

from .channel import Channel, Interceptor, PartyRng
from .errors import ConfigurationError, ScalarDomainError
from .lee import (
    AuthoritySecret,
    BlindedKeyReply,
    LeeKeyRequest,
    LeeSecureRequest,
    LeeSystemParams,
    authority_label,
    compute_qid,
    kgc_issue,
    kpa_secure,
    unblinding_factor,
    user_blind_request,
    user_unblind,
)
from .pairing import Scalar, g1_mul, gt_pow, hash_to_g1, pair, scalar_inv, scalar_random
from .sessions import lee_key_securing, run_lee_issuance, run_sui_issuance
from .sui import (
    ROLE_ADVERSARY,
    ROLE_LRA,
    PendingDatabase,
    SuiRequest,
    SuiSystemParams,
    is_insider_role,
    lra_register,
)


class AttackId(str, Enum):
    IMPERSONATION = "impersonation"
    INSIDER_SIG = "insider-sig"
    TAMPER = "tamper"
    STOLEN_VERIFIER = "stolen-verifier"
    INSIDER_PWD = "insider-pwd"
    RERANDOMIZE = "rerandomize"


@dataclass(frozen=True)
class Check:
    label: str
    expected: Any
    observed: Any

    @property
    def passed(self) -> bool:
        return self.expected == self.observed


@dataclass
class AttackVerdict:
    attack_id: AttackId
    checks: list[Check]
    extracted: dict[str, str] = field(default_factory=dict)
    transcript_ref: str = "adhoc"
    capabilities: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def success(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, label: str) -> Check:
        for c in self.checks:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "attack_id": self.attack_id.value,
            "success": self.success,
            "checks": [{"label": c.label, "passed": c.passed} for c in self.checks],
            "extracted": dict(self.extracted),
            "transcript_ref": self.transcript_ref,
            "capabilities": list(self.capabilities),
            "notes": list(self.notes),
        }


def _finish(channel: Channel, verdict: AttackVerdict) -> AttackVerdict:
    verdict.transcript_ref = channel.run_id
    channel.record_verdict(verdict)
    return verdict


def _nonzero(params_group, r_star) -> Scalar:
    r = r_star if isinstance(r_star, Scalar) else params_group.scalar(r_star)
    if not r:
        raise ScalarDomainError("r* must be in Z_q*")
    return r


def attack_lee_impersonation(
    params: LeeSystemParams,
    kgc: AuthoritySecret,
    kpas: Sequence[AuthoritySecret],
    victim_id: str,
    rng: PartyRng,
    *,
    enabled: bool = True,
    channel: Optional[Channel] = None,
) -> AttackVerdict:
    """Swap the victim's blinding point X for X* = x*P and collect the victim's key.

    Nothing binds ID to X, so the KGC blinds the victim's Q_ID under the
    adversary's x*.  The adversary eavesdrops Q_0*, runs key securing itself
    with (ID, X*) and unblinds with x*.  With ``enabled=False`` the adversary
    uses X* = X, i.e. no tampering.
    """
    channel = channel or Channel()
    authorities = [kgc, *kpas]
    victim, request = user_blind_request(victim_id, params, rng.for_party("user"))
    if enabled:
        x_star = scalar_random(rng.for_party("adversary"), True, params.group)
    else:
        x_star = victim.x
    X_star = g1_mul(x_star, params.P)
    if enabled:
        channel.intercept(
            Interceptor(
                lambda m: replace(m, X=X_star),
                sender="user",
                recipient="KGC",
                payload_type=LeeKeyRequest,
            )
        )

    delivered = channel.send("user", "KGC", request)
    reply0 = channel.send("KGC", "user", kgc_issue(delivered.id, delivered.X, kgc, params))
    # the reply travels in the clear; the adversary takes over key securing
    sec = lee_key_securing(channel, params, authorities, "adversary", victim_id, X_star, reply0)
    checks = [Check("authority checks passed", True, sec.halted_at is None and all(sec.checks))]
    extracted = {}
    if sec.final is not None:
        Q_ID = compute_qid(victim_id, params)
        adv_key = g1_mul(scalar_inv(unblinding_factor(x_star, params)), sec.final.Q_prime)
        adv_ok = channel.check_pairing(
            "adversary", "verify_private_key", (adv_key, params.P), (Q_ID, params.Y)
        )
        victim_key = user_unblind(sec.final, victim.receive(sec.final), params)
        victim_ok = channel.check_pairing(
            "user", "verify_private_key", (victim_key, params.P), (Q_ID, params.Y)
        )
        checks.append(Check("adversary key verifies", True, adv_ok))
        checks.append(Check("victim key fails to verify", True, not victim_ok))
        extracted["adversary_private_key"] = adv_key.hex()
    else:
        checks.append(Check("adversary key verifies", True, False))
        checks.append(Check("victim key fails to verify", True, False))
    verdict = AttackVerdict(
        AttackId.IMPERSONATION, checks, extracted, capabilities=("wire-modify", "eavesdrop")
    )
    return _finish(channel, verdict)


def attack_lee_insider(
    params: LeeSystemParams,
    authorities: Sequence[AuthoritySecret],
    i: int,
    m: bytes,
    rng: PartyRng,
    *,
    r: Optional[int] = None,
    x_star: Optional[int] = None,
    channel: Optional[Channel] = None,
) -> AttackVerdict:
    """Authority i-1 obtains KPA_i's signature s_i H(m) on a message of its choice.

    The insider submits Q* = r H(m) with its own signature r s_{i-1} H(m),
    which passes KPA_i's check, then strips h(e(P_i, P_i)^{x*}) and r from
    the answer.
    """
    if not 1 <= i <= params.n:
        raise ConfigurationError(f"insider target must be KPA_1..KPA_{params.n}, got {i}")
    channel = channel or Channel()
    group = params.group
    insider, target = authorities[i - 1], authorities[i]
    me, them = insider.label, target.label
    adv = rng.for_party(me)

    xs = scalar_random(adv, True, group) if x_star is None else group.scalar(x_star)
    rs = scalar_random(adv, True, group) if r is None else _nonzero(group, r)
    X_star = g1_mul(xs, params.P)
    Hm = hash_to_g1(m, group)
    forged = BlindedKeyReply(i - 1, g1_mul(rs, Hm), g1_mul(rs * insider.s, Hm))

    req = channel.send(me, them, LeeSecureRequest("insider-crafted-id", X_star, forged))
    accepted = channel.check_pairing(
        them, "verify_reply", (req.reply_prev.sig, params.P), (req.reply_prev.Q_prime, params.public_key(i - 1))
    )
    notes = ("insider is the KGC (index 0)",) if i == 1 else ()
    checks = [Check("KPA accepted forged request", True, accepted)]
    if not accepted:
        checks += [Check("forgery verifies under P_i", True, False), Check("forgery equals s_i H(m)", True, False)]
        return _finish(channel, AttackVerdict(AttackId.INSIDER_SIG, checks, notes=notes))

    answer = channel.send(them, me, kpa_secure(i, req.id, req.X, req.reply_prev, target, params))
    P_i = params.public_key(i)
    factor = params.h(gt_pow(pair(P_i, P_i), xs))
    F = g1_mul(scalar_inv(factor * rs), answer.Q_prime)

    verifies = channel.check_pairing(me, "forgery_verifies", (F, params.P), (Hm, P_i))
    checks += [
        Check("forgery verifies under P_i", True, verifies),
        # evaluation oracle: reads KPA_i's secret, never used by the insider
        Check("forgery equals s_i H(m)", g1_mul(target.s, Hm).hex(), F.hex()),
    ]
    verdict = AttackVerdict(
        AttackId.INSIDER_SIG,
        checks,
        {"forged_signature": F.hex(), "message": m.hex()},
        capabilities=(f"own-secret-s_{i - 1}",),
        notes=notes,
    )
    return _finish(channel, verdict)


def attack_lee_tamper(
    params: LeeSystemParams,
    authorities: Sequence[AuthoritySecret],
    i: int,
    r_star,
    rng: PartyRng,
    *,
    user_id: str = "alice",
    channel: Optional[Channel] = None,
) -> AttackVerdict:
    """Scale (Q_{i-1}', Sig_{i-1}) by r* on the way to KPA_i.

    Every KPA check is scale-blind and the user forwards replies unchecked,
    so the damage only shows at key retrieving.
    """
    rs = _nonzero(params.group, r_star)
    if not 1 <= i <= params.n:
        raise ConfigurationError(f"tamper target must be KPA_1..KPA_{params.n}, got {i}")
    channel = channel or Channel()
    channel.intercept(
        Interceptor(
            lambda msg: replace(msg, reply_prev=msg.reply_prev.scaled(rs)),
            sender="user",
            recipient=authority_label(i),
            payload_type=LeeSecureRequest,
        )
    )
    state, _ = user_blind_request(user_id, params, rng.for_party("user"))
    out = run_lee_issuance(channel, params, authorities, state)

    intermediate_ok = out.halted_at is None and all(out.kpa_checks)
    checks = [
        Check("KPA checks pass after tampering", True, intermediate_ok),
        Check("final key verification fails", True, out.valid is False),
        Check("no earlier check reports failure", True, intermediate_ok and out.valid is not None),
    ]
    extracted = {"user_private_key": out.S_ID.hex()} if out.S_ID is not None else {}
    verdict = AttackVerdict(AttackId.TAMPER, checks, extracted, capabilities=("wire-modify",))
    return _finish(channel, verdict)


def attack_sui_stolen_verifier(
    params: SuiSystemParams,
    kgc_secret: Scalar,
    db: PendingDatabase,
    db_snapshot: PendingDatabase,
    target_id: str,
    rng: PartyRng,
    *,
    channel: Optional[Channel] = None,
) -> AttackVerdict:
    """Use a stolen copy of the pending database to request the victim's key.

    ``db`` is the KGC's live database; ``db_snapshot`` is what was stolen.
    """
    if target_id not in db_snapshot:
        raise ConfigurationError(f"{target_id!r} is not in the stolen snapshot")
    channel = channel or Channel()
    pwd = db_snapshot.read(target_id, ROLE_ADVERSARY)
    out = run_sui_issuance(
        channel, params, kgc_secret, db, target_id, pwd, rng.for_party("adversary"), requester="adversary"
    )
    checks = [Check("KGC check passes", True, out.kgc_accepted)]
    extracted = {}
    if out.private_key is not None:
        group = params.group
        Hid = hash_to_g1(target_id.encode(), group)
        verifies = channel.check_pairing(
            "adversary", "verify_private_key", (out.private_key, params.P), (Hid, params.P_PKG)
        )
        checks.append(Check("stolen key verifies", True, verifies))
        # evaluation oracle against the KGC secret
        checks.append(Check("stolen key equals s H(ID)", g1_mul(kgc_secret, Hid).hex(), out.private_key.hex()))
        extracted["victim_private_key"] = out.private_key.hex()
    else:
        checks.append(Check("stolen key verifies", True, False))
    verdict = AttackVerdict(AttackId.STOLEN_VERIFIER, checks, extracted, capabilities=("db-read",))
    return _finish(channel, verdict)


class PasswordSystem:
    """Some other service that authenticates with (id, password)."""

    def __init__(self, credentials: Mapping[str, str], name: str = "external"):
        self.credentials = dict(credentials)
        self.name = name

    def __call__(self, id: str, pwd: str) -> bool:
        return self.credentials.get(id) == pwd


def attack_sui_insider(
    db: PendingDatabase,
    external_check: Callable[[str, str], bool],
    target_id: str,
    *,
    role: str = ROLE_LRA,
    channel: Optional[Channel] = None,
) -> AttackVerdict:
    """An insider reads the plaintext password and tries it on another system."""
    if target_id not in db:
        raise ConfigurationError(f"{target_id!r} is not registered")
    channel = channel or Channel()
    pwd = db.read(target_id, role)
    insider = channel.note(role, "db_access_role", is_insider_role(role), role=role, id=target_id)
    system = getattr(external_check, "name", "external")
    login = channel.note(role, "external_login", external_check(target_id, pwd), system=system)
    checks = [
        Check("db accessed by an insider role", True, insider),
        Check("external system accepts the password", True, login),
    ]
    verdict = AttackVerdict(
        AttackId.INSIDER_PWD,
        checks,
        {"password": pwd.encode().hex()},
        capabilities=("db-read",),
        notes=() if insider else ("not-an-insider",),
    )
    return _finish(channel, verdict)


def attack_sui_rerandomize(
    params: SuiSystemParams,
    kgc_secret: Scalar,
    r_star,
    registered: tuple[str, str],
    rng: PartyRng,
    *,
    channel: Optional[Channel] = None,
) -> AttackVerdict:
    """Replace (Q, T) by (r*Q, r*^-1 T); the KGC cannot tell and signs anyway."""
    group = params.group
    rs = _nonzero(group, r_star)
    rs_inv = scalar_inv(rs)
    channel = channel or Channel()
    db = lra_register(PendingDatabase(), *registered)
    channel.intercept(
        Interceptor(
            lambda m: SuiRequest(g1_mul(rs, m.Q), g1_mul(rs_inv, m.T)),
            sender="user",
            recipient="KGC",
            payload_type=SuiRequest,
        )
    )
    id, pwd = registered
    out = run_sui_issuance(channel, params, kgc_secret, db, id, pwd, rng.for_party("user"))
    checks = [
        Check("KGC check passes", True, out.kgc_accepted),
        Check("user verification fails", True, out.user_verified is False),
    ]
    extracted = {"blinded_key": out.S.hex()} if out.S is not None else {}
    verdict = AttackVerdict(AttackId.RERANDOMIZE, checks, extracted, capabilities=("wire-modify",))
    return _finish(channel, verdict)
