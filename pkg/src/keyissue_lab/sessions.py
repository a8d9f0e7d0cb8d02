"""Protocol runs over a :class:`~keyissue_lab.channel.Channel`.

Each authority acts only on what the channel delivers to it, and every
verification equation an honest party evaluates is logged as a ``check``
entry, so attacks and honest runs leave comparable transcripts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .channel import Channel
from .errors import IdentityRejected, ReplyRejected
from .lee import (
    AuthoritySecret,
    BlindedKeyReply,
    LeeKeyRequest,
    LeeSecureRequest,
    LeeSystemParams,
    UserKeyState,
    accept_all,
    authority_label,
    compute_qid,
    kgc_issue,
    kpa_secure,
    user_unblind,
)
from .pairing import G1Element, Scalar, hash_to_g1
from .sui import (
    PendingDatabase,
    SuiBlindedKey,
    SuiRequest,
    SuiSystemParams,
    find_match,
    issue_for_match,
    kgc_role,
    sui_user_finalize,
    sui_user_request,
)


def log_chain_checks(channel: Channel, params: LeeSystemParams) -> bool:
    """Anyone can re-check the published Y chain link by link."""
    ok = True
    for i in range(1, len(params.chain)):
        ok &= channel.check_pairing(
            "public",
            f"verify_chain_link_{i}",
            (params.chain[i], params.P),
            (params.chain[i - 1], params.public_key(i)),
        )
    return ok


@dataclass
class SecuringResult:
    replies: list[BlindedKeyReply] = field(default_factory=list)
    checks: list[bool] = field(default_factory=list)
    halted_at: Optional[int] = None

    @property
    def final(self) -> Optional[BlindedKeyReply]:
        return self.replies[-1] if self.replies and self.halted_at is None else None


def lee_key_securing(
    channel: Channel,
    params: LeeSystemParams,
    authorities: Sequence[AuthoritySecret],
    requester: str,
    id: str,
    X: G1Element,
    reply: BlindedKeyReply,
) -> SecuringResult:
    """Ask KPA_1..KPA_n in turn; the requester forwards each reply unchecked."""
    out = SecuringResult()
    for i in range(1, params.n + 1):
        kpa = authority_label(i)
        req = channel.send(requester, kpa, LeeSecureRequest(id, X, reply))
        prev = req.reply_prev
        ok = channel.check_pairing(
            kpa,
            "verify_reply",
            (prev.sig, params.P),
            (prev.Q_prime, params.public_key(i - 1)),
        )
        out.checks.append(ok)
        try:
            answer = kpa_secure(i, req.id, req.X, prev, authorities[i], params)
        except ReplyRejected:
            out.halted_at = i
            return out
        reply = channel.send(kpa, requester, answer)
        out.replies.append(reply)
    return out


@dataclass
class LeeOutcome:
    state: UserKeyState
    Q_ID: G1Element
    S_ID: Optional[G1Element]
    valid: Optional[bool]
    kpa_checks: list[bool]
    halted_at: Optional[int] = None


def run_lee_issuance(
    channel: Channel,
    params: LeeSystemParams,
    authorities: Sequence[AuthoritySecret],
    state: UserKeyState,
    *,
    user: str = "user",
    check_identity: Callable[[str, G1Element], bool] = accept_all,
) -> LeeOutcome:
    """Key issuing, key securing and key retrieving for one user."""
    Q_ID = compute_qid(state.id, params)
    req = channel.send(user, "KGC", LeeKeyRequest(state.id, state.X))
    try:
        reply0 = kgc_issue(req.id, req.X, authorities[0], params, check_identity=check_identity)
    except IdentityRejected:
        channel.note("KGC", "check_identity", False, id=req.id)
        return LeeOutcome(state, Q_ID, None, None, [], halted_at=0)
    reply0 = channel.send("KGC", user, reply0)
    state = state.receive(reply0)

    sec = lee_key_securing(channel, params, authorities, user, state.id, state.X, reply0)
    for r in sec.replies:
        state = state.receive(r)
    if sec.halted_at is not None:
        return LeeOutcome(state, Q_ID, None, None, sec.checks, halted_at=sec.halted_at)

    S_ID = user_unblind(state.last_reply(), state, params)
    valid = channel.check_pairing(user, "verify_private_key", (S_ID, params.P), (Q_ID, params.Y))
    return LeeOutcome(state, Q_ID, S_ID, valid, sec.checks)


@dataclass
class SuiOutcome:
    r: Scalar
    request: SuiRequest
    kgc_accepted: bool
    matched_id: Optional[str] = None
    S: Optional[G1Element] = None
    user_verified: Optional[bool] = None
    private_key: Optional[G1Element] = None


def run_sui_issuance(
    channel: Channel,
    params: SuiSystemParams,
    kgc_secret: Scalar,
    db: PendingDatabase,
    id: str,
    pwd: str,
    rng: random.Random,
    *,
    requester: str = "user",
    r: Optional[int] = None,
) -> SuiOutcome:
    """Blinded request, KGC database check and issuance, user verification."""
    rs, req = sui_user_request(id, pwd, params, rng, r=r)
    got = channel.send(requester, "KGC", req)

    match = find_match(got, db, kgc_role(1))
    if match is None:
        channel.note("KGC", "check_request", False, reason="no pending tuple matches")
        return SuiOutcome(rs, req, False)
    mid, mpwd = match
    group = params.group
    channel.check_pairing(
        "KGC",
        "check_request",
        (got.Q, got.T),
        (hash_to_g1(mid.encode(), group), hash_to_g1(mpwd.encode(), group)),
    )
    S = channel.send("KGC", requester, SuiBlindedKey(issue_for_match(got, mid, db, kgc_secret))).S

    # the user can only compare against the Q it sent itself
    verified = channel.check_pairing(requester, "verify_blinded_key", (S, params.P), (req.Q, params.P_PKG))
    key = sui_user_finalize(S, req, rs, params) if verified else None
    return SuiOutcome(rs, req, True, mid, S, verified, key)
