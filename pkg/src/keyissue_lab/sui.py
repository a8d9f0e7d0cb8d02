"""Separable, anonymous key issuing with a password-blinded request.

The LRA stores (ID, pwd) in the KGC's pending database after off-line
authentication.  The user sends Q = rH(ID), T = r^-1 H(pwd); the KGC accepts
if e(Q, T) = e(H(ID), H(pwd)) for some pending tuple and returns S = sQ; the
user checks e(S, P) = e(Q, P_PKG) and unblinds to sH(ID).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    AuthenticationFailure,
    BlindReplyInvalid,
    ConfigurationError,
    RegistrationConflict,
    ScalarDomainError,
)
from .pairing import G1Element, GroupParams, Scalar, g1_mul, hash_to_g1, pair, scalar_inv, scalar_random

# roles that can open the pending database; LRA and KGC-k are insiders
ROLE_LRA = "LRA"
ROLE_ADVERSARY = "adversary"
ROLE_USER = "user"


def kgc_role(k: int = 1) -> str:
    return f"KGC-{k}"


def is_insider_role(role: str) -> bool:
    return role == ROLE_LRA or (role.startswith("KGC-") and role[4:].isdigit())


@dataclass(frozen=True)
class SuiSystemParams:
    group: GroupParams
    P_PKG: G1Element

    @property
    def P(self) -> G1Element:
        return self.group.generator


@dataclass(frozen=True)
class SuiRequest:
    Q: G1Element
    T: G1Element


SuiKeyRequest = SuiRequest


@dataclass(frozen=True)
class SuiBlindedKey:
    S: G1Element


@dataclass(frozen=True)
class DbAccess:
    role: str
    action: str
    id: Optional[str]


class PendingDatabase:
    """KGC's database of pending private keys: ordered (id, pwd) tuples in plaintext.

    Every read goes through :meth:`read` / :meth:`snapshot` with an access role,
    and is appended to ``access_log``.
    """

    def __init__(self, entries: Iterable[tuple[str, str]] = ()):
        self._entries: list[tuple[str, str]] = []
        self.access_log: list[DbAccess] = []
        for id, pwd in entries:
            self._add(id, pwd)

    def _add(self, id: str, pwd: str):
        if id in self:
            raise RegistrationConflict(f"{id!r} already has a pending key")
        self._entries.append((id, pwd))

    def __contains__(self, id: str) -> bool:
        return any(e[0] == id for e in self._entries)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(list(self._entries))

    def __eq__(self, other):
        if not isinstance(other, PendingDatabase):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self):
        return f"PendingDatabase({[e[0] for e in self._entries]})"

    def remove(self, id: str) -> None:
        self._entries = [e for e in self._entries if e[0] != id]

    def read(self, id: str, role: str) -> str:
        self.access_log.append(DbAccess(role, "read", id))
        for eid, pwd in self._entries:
            if eid == id:
                return pwd
        raise KeyError(id)

    def snapshot(self, role: str) -> PendingDatabase:
        """Copy of the current tuples, e.g. what a thief walks away with."""
        self.access_log.append(DbAccess(role, "snapshot", None))
        return PendingDatabase(self._entries)

    def to_json(self) -> str:
        return json.dumps([{"id": i, "pwd": p} for i, p in self._entries])

    @classmethod
    def from_json(cls, text: str) -> PendingDatabase:
        return cls((row["id"], row["pwd"]) for row in json.loads(text))


def sui_setup(
    group: GroupParams, rng: Optional[random.Random] = None, *, secret: Optional[int] = None
) -> tuple[SuiSystemParams, Scalar]:
    if secret is None:
        if rng is None:
            raise ConfigurationError("sui_setup needs an rng or an explicit secret")
        s = scalar_random(rng, True, group)
    else:
        s = group.scalar(secret)
        if not s:
            raise ConfigurationError("KGC master key must be nonzero")
    return SuiSystemParams(group, g1_mul(s, group.generator)), s


def lra_register(db: PendingDatabase, id: str, pwd: str) -> PendingDatabase:
    db.access_log.append(DbAccess(ROLE_LRA, "register", id))
    db._add(id, pwd)
    return db


def sui_user_request(
    id: str, pwd: str, params: SuiSystemParams, rng: random.Random, *, r: Optional[int] = None
) -> tuple[Scalar, SuiRequest]:
    """Q = r H(ID), T = r^-1 H(pwd)."""
    group = params.group
    rs = scalar_random(rng, True, group) if r is None else group.scalar(r)
    if not rs:
        raise ScalarDomainError("blinding factor r must be nonzero")
    Q = g1_mul(rs, hash_to_g1(id.encode(), group))
    T = g1_mul(scalar_inv(rs), hash_to_g1(pwd.encode(), group))
    return rs, SuiRequest(Q, T)


def check_request(req: SuiRequest, id: str, pwd: str) -> bool:
    """e(Q, T) == e(H(ID), H(pwd)); blind to (r*Q, r*^-1 T)."""
    group = req.Q.group
    return pair(req.Q, req.T) == pair(hash_to_g1(id.encode(), group), hash_to_g1(pwd.encode(), group))


def find_match(req: SuiRequest, db: PendingDatabase, role: str = "KGC-1") -> Optional[tuple[str, str]]:
    """First pending tuple, in insertion order, for which the request checks out."""
    for id, _ in db:
        pwd = db.read(id, role)
        if check_request(req, id, pwd):
            return id, pwd
    return None


def issue_for_match(req: SuiRequest, id: str, db: PendingDatabase, s: Scalar) -> G1Element:
    """S = sQ for an already-authenticated request; the pending tuple is consumed."""
    db.remove(id)
    return g1_mul(s, req.Q)


def kgc_check_and_issue(
    req: SuiRequest, db: PendingDatabase, s: Scalar, params: SuiSystemParams
) -> tuple[G1Element, str]:
    """Authenticate against the pending db, return S = sQ and remove the tuple."""
    match = find_match(req, db)
    if match is None:
        raise AuthenticationFailure("no pending tuple matches the request")
    return issue_for_match(req, match[0], db, s), match[0]


def verify_blinded_key(S: G1Element, Q: G1Element, params: SuiSystemParams) -> bool:
    """e(S, P) == e(Q, P_PKG)."""
    return pair(S, params.P) == pair(Q, params.P_PKG)


def sui_user_finalize(S: G1Element, req: SuiRequest, r: Scalar, params: SuiSystemParams) -> G1Element:
    """Check S against the user's own Q, then return r^-1 S = s H(ID)."""
    if not r:
        raise ScalarDomainError("blinding factor r must be nonzero")
    if not verify_blinded_key(S, req.Q, params):
        raise BlindReplyInvalid("e(S, P) != e(Q, P_PKG)")
    return g1_mul(scalar_inv(r), S)


def verify_sui_private_key(S_ID: G1Element, id: str, params: SuiSystemParams) -> bool:
    """e(S_ID, P) == e(H(ID), P_PKG)."""
    return pair(S_ID, params.P) == pair(hash_to_g1(id.encode(), params.group), params.P_PKG)
