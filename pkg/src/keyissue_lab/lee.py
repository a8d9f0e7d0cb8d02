"""Chained secure key issuing: one KGC and n key privacy authorities (KPAs).

Phases, each a pure function of its inputs:

* setup: master keys s_0 (KGC) and s_1..s_n (KPAs), public keys P_i = s_i P,
  and the sequential system key Y = s_0 s_1 ... s_n P;
* key issuing: the user blinds with X = xP, the KGC returns
  Q_0' = h(e(s_0 X, P_0)) s_0 Q_ID with signature s_0 Q_0';
* key securing: KPA_i checks the previous signature, then returns
  Q_i' = h(e(s_i X, P_i)) s_i Q_{i-1}' with signature s_i Q_i';
* key retrieving: the user divides out every h(e(P_i, P_i)^x).
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .errors import ConfigurationError, IdentityRejected, ReplyRejected
from .pairing import (
    G1Element,
    GroupParams,
    GTElement,
    Scalar,
    g1_mul,
    gt_pow,
    hash_gt_to_scalar,
    hash_to_g1,
    pair,
    scalar_inv,
    scalar_random,
)

GTHash = Callable[[GTElement], Scalar]


def authority_label(index: int) -> str:
    return "KGC" if index == 0 else f"KPA_{index}"


@dataclass(frozen=True)
class AuthoritySecret:
    """Master key of the KGC (index 0) or of KPA_index."""

    index: int
    s: Scalar

    def __post_init__(self):
        if not self.s:
            raise ConfigurationError("master keys must be nonzero")

    @property
    def label(self) -> str:
        return authority_label(self.index)

    def public_key(self) -> G1Element:
        return g1_mul(self.s, self.s.group.generator)


@dataclass(frozen=True)
class LeeSystemParams:
    group: GroupParams
    n: int
    P0: G1Element
    P_list: tuple[G1Element, ...]
    Y: G1Element
    authority_names: tuple[str, ...]
    # Y_0' = P_0, ..., Y_n' = Y, kept so anyone can re-run the link checks
    chain: tuple[G1Element, ...] = ()
    # replaces h: GT -> Z_q* everywhere in the protocol (tests stub it)
    gt_hash: Optional[GTHash] = field(default=None, compare=False, repr=False)

    @property
    def P(self) -> G1Element:
        return self.group.generator

    def h(self, t: GTElement) -> Scalar:
        return (self.gt_hash or hash_gt_to_scalar)(t)

    def public_key(self, index: int) -> G1Element:
        if index == 0:
            return self.P0
        if not 1 <= index <= self.n:
            raise ConfigurationError(f"no authority with index {index} (n={self.n})")
        return self.P_list[index - 1]


@dataclass(frozen=True)
class BlindedKeyReply:
    """(Q_i', Sig_i(Q_i')) as returned by authority ``issuer_index``."""

    issuer_index: int
    Q_prime: G1Element
    sig: G1Element

    def scaled(self, r: Scalar | int) -> BlindedKeyReply:
        return replace(self, Q_prime=g1_mul(r, self.Q_prime), sig=g1_mul(r, self.sig))


@dataclass(frozen=True)
class UserKeyState:
    id: str
    x: Scalar
    X: G1Element
    stage: int = -1  # index of the authority that served last, -1 before the KGC
    current_blinded: Optional[G1Element] = None
    current_sig: Optional[G1Element] = None

    def receive(self, reply: BlindedKeyReply) -> UserKeyState:
        """Store the latest reply. The user does not check it; the protocol has no such step."""
        return replace(
            self,
            stage=reply.issuer_index,
            current_blinded=reply.Q_prime,
            current_sig=reply.sig,
        )

    def last_reply(self) -> BlindedKeyReply:
        if self.current_blinded is None:
            raise ConfigurationError("user has not received any reply yet")
        return BlindedKeyReply(self.stage, self.current_blinded, self.current_sig)


# wire messages

@dataclass(frozen=True)
class LeeKeyRequest:
    id: str
    X: G1Element


@dataclass(frozen=True)
class LeeSecureRequest:
    id: str
    X: G1Element
    reply_prev: BlindedKeyReply


LeeBlindedReply = BlindedKeyReply


def system_pubkey_round(i: int, s_i: Scalar, Y_prev: G1Element) -> G1Element:
    """Y_i' = s_i * Y_{i-1}'."""
    if i < 1:
        raise ConfigurationError("KPA rounds are numbered from 1")
    return g1_mul(s_i, Y_prev)


def verify_chain_link(Y_i: G1Element, Y_prev: G1Element, P_i: G1Element) -> bool:
    """e(Y_i', P) == e(Y_{i-1}', P_i)."""
    return pair(Y_i, Y_i.group.generator) == pair(Y_prev, P_i)


def lee_setup(
    group: GroupParams,
    n: int,
    rng: Optional[random.Random] = None,
    *,
    master_keys: Optional[Sequence[int]] = None,
    authority_rngs: Optional[Sequence[random.Random]] = None,
) -> tuple[LeeSystemParams, list[AuthoritySecret]]:
    """Generate the KGC and n KPA key pairs and run the public key chain.

    Keys come from ``master_keys`` if given, else one draw per authority from
    ``authority_rngs[i]`` (or the shared ``rng``).
    """
    if n < 1:
        raise ConfigurationError("at least one KPA is required")
    if master_keys is not None:
        if len(master_keys) != n + 1:
            raise ConfigurationError(f"need {n + 1} master keys, got {len(master_keys)}")
        keys = [group.scalar(k) for k in master_keys]
    else:
        if authority_rngs is None:
            if rng is None:
                raise ConfigurationError("lee_setup needs an rng or explicit master keys")
            authority_rngs = [rng] * (n + 1)
        keys = [scalar_random(authority_rngs[i], True, group) for i in range(n + 1)]
    secrets = [AuthoritySecret(i, s) for i, s in enumerate(keys)]
    publics = [a.public_key() for a in secrets]

    chain = [publics[0]]
    for i in range(1, n + 1):
        chain.append(system_pubkey_round(i, secrets[i].s, chain[-1]))

    params = LeeSystemParams(
        group=group,
        n=n,
        P0=publics[0],
        P_list=tuple(publics[1:]),
        Y=chain[-1],
        authority_names=tuple(authority_label(i) for i in range(n + 1)),
        chain=tuple(chain),
    )
    return params, secrets


def encode_fields(*fields: str) -> bytes:
    """Length-prefixed UTF-8 concatenation, so ("ab","c") and ("a","bc") differ."""
    out = bytearray()
    for f in fields:
        raw = f.encode("utf-8")
        out += struct.pack(">I", len(raw)) + raw
    return bytes(out)


def compute_qid(id: str, params: LeeSystemParams) -> G1Element:
    """Q_ID = H(ID, KGC, KPA_1, ..., KPA_n)."""
    return hash_to_g1(encode_fields(id, *params.authority_names), params.group)


def user_blind_request(
    id: str, params: LeeSystemParams, rng: random.Random, *, x: Optional[int] = None
) -> tuple[UserKeyState, LeeKeyRequest]:
    if x is None:
        xs = scalar_random(rng, True, params.group)
    else:
        xs = params.group.scalar(x)
        if not xs:
            raise ConfigurationError("the user never blinds with x = 0")
    X = g1_mul(xs, params.P)
    return UserKeyState(id=id, x=xs, X=X), LeeKeyRequest(id, X)


def accept_all(id: str, X: G1Element) -> bool:
    return True


def kgc_issue(
    id: str,
    X: G1Element,
    kgc: AuthoritySecret,
    params: LeeSystemParams,
    *,
    check_identity: Callable[[str, G1Element], bool] = accept_all,
) -> BlindedKeyReply:
    """Q_0' = h(e(s_0 X, P_0)) s_0 Q_ID and Sig_0 = s_0 Q_0'.

    X is used as received; an identity X (x = 0) is not refused.
    """
    if kgc.index != 0:
        raise ConfigurationError("kgc_issue needs the KGC secret (index 0)")
    if not check_identity(id, X):
        raise IdentityRejected(id)
    s0 = kgc.s
    factor = params.h(pair(g1_mul(s0, X), params.P0))
    Q0 = g1_mul(factor * s0, compute_qid(id, params))
    return BlindedKeyReply(0, Q0, g1_mul(s0, Q0))


def verify_reply(reply: BlindedKeyReply, P_issuer: G1Element) -> bool:
    """e(Sig, P) == e(Q', P_issuer). Invariant under scaling both by the same r."""
    return pair(reply.sig, P_issuer.group.generator) == pair(reply.Q_prime, P_issuer)


def kpa_secure(
    i: int,
    id: str,
    X: G1Element,
    reply_prev: BlindedKeyReply,
    kpa: AuthoritySecret,
    params: LeeSystemParams,
) -> BlindedKeyReply:
    """KPA_i's key privacy service. Raises ReplyRejected if the incoming signature fails."""
    if kpa.index != i or not 1 <= i <= params.n:
        raise ConfigurationError(f"KPA secret index {kpa.index} does not serve round {i}")
    if reply_prev.issuer_index != i - 1:
        raise ReplyRejected(reply_prev.issuer_index, i)
    if not verify_reply(reply_prev, params.public_key(i - 1)):
        raise ReplyRejected(reply_prev.issuer_index, i)
    s_i = kpa.s
    factor = params.h(pair(g1_mul(s_i, X), params.public_key(i)))
    Q_i = g1_mul(factor * s_i, reply_prev.Q_prime)
    return BlindedKeyReply(i, Q_i, g1_mul(s_i, Q_i))


def unblinding_factor(x: Scalar, params: LeeSystemParams) -> Scalar:
    """prod_{i=0..n} h(e(P_i, P_i)^x)."""
    acc = params.group.scalar(1)
    for i in range(params.n + 1):
        P_i = params.public_key(i)
        acc = acc * params.h(gt_pow(pair(P_i, P_i), x))
    return acc


def user_unblind(
    final_reply: BlindedKeyReply, state: UserKeyState, params: LeeSystemParams
) -> G1Element:
    """S_ID = Q_n' / prod_i h(e(P_i, P_i)^x)."""
    if final_reply.issuer_index != params.n:
        raise ConfigurationError(
            f"final reply must come from KPA_{params.n}, got issuer {final_reply.issuer_index}"
        )
    return g1_mul(scalar_inv(unblinding_factor(state.x, params)), final_reply.Q_prime)


def verify_private_key(S_ID: G1Element, Q_ID: G1Element, params: LeeSystemParams) -> bool:
    """e(S_ID, P) == e(Q_ID, Y)."""
    return pair(S_ID, params.P) == pair(Q_ID, params.Y)
