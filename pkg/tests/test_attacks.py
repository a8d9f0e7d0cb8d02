import random
from dataclasses import replace

import pytest

from keyissue_lab.attacks import (
    AttackId,
    AttackVerdict,
    Check,
    PasswordSystem,
    attack_lee_impersonation,
    attack_lee_insider,
    attack_lee_tamper,
    attack_sui_insider,
    attack_sui_rerandomize,
    attack_sui_stolen_verifier,
)
from keyissue_lab.channel import Channel, PartyRng
from keyissue_lab.errors import ConfigurationError, ScalarDomainError
from keyissue_lab.lee import compute_qid, lee_setup, user_blind_request
from keyissue_lab.pairing import DEFAULT_GROUP, GroupParams, g1_mul, hash_to_g1
from keyissue_lab.sessions import run_lee_issuance, run_sui_issuance
from keyissue_lab.sui import ROLE_ADVERSARY, PendingDatabase, lra_register, sui_setup

G101 = GroupParams(101)


def lee(group=DEFAULT_GROUP, n=2, seed=0, keys=None):
    if keys is not None:
        return lee_setup(group, len(keys) - 1, master_keys=keys)
    return lee_setup(group, n, random.Random(seed))


def product(secrets):
    p = secrets[0].s
    for a in secrets[1:]:
        p = p * a.s
    return p


def all_element_hex(channel):
    """Every hex value appearing anywhere in the transcript."""
    out = set()

    def walk(v):
        if isinstance(v, dict):
            for x in v.values():
                walk(x)
        elif isinstance(v, list):
            for x in v:
                walk(x)
        elif isinstance(v, str):
            out.add(v)

    for e in channel.entries:
        walk(e.detail)
    return out


# verdict structure


def test_verdict_success_is_conjunction():
    v = AttackVerdict(AttackId.TAMPER, [Check("a", True, True), Check("b", 1, 2)])
    assert not v.success
    assert v.to_dict()["checks"] == [{"label": "a", "passed": True}, {"label": "b", "passed": False}]
    assert AttackVerdict(AttackId.TAMPER, [Check("a", True, True)]).success


def test_verdict_json_keys():
    params, secrets = lee()
    v = attack_lee_tamper(params, secrets, 1, 5, PartyRng(0), channel=Channel("run-7"))
    d = v.to_dict()
    assert list(d)[:5] == ["attack_id", "success", "checks", "extracted", "transcript_ref"]
    assert d["transcript_ref"] == "run-7" and d["attack_id"] == "tamper"


# impersonation


def test_impersonation_succeeds_and_extracts_key():
    params, secrets = lee(seed=1)
    v = attack_lee_impersonation(params, secrets[0], secrets[1:], "alice", PartyRng(1))
    assert v.success
    expected = g1_mul(product(secrets), compute_qid("alice", params))
    assert v.extracted["adversary_private_key"] == expected.hex()


def test_impersonation_q101_example():
    params, secrets = lee(G101, keys=[7, 5, 3])
    v = attack_lee_impersonation(params, secrets[0], secrets[1:], "alice", PartyRng(2))
    u = compute_qid("alice", params).handle
    assert v.extracted["adversary_private_key"] == G101.g1(4 * u).hex()
    assert v.check("adversary key verifies").passed


def test_impersonation_disabled_fails():
    params, secrets = lee(seed=3)
    ch = Channel()
    v = attack_lee_impersonation(params, secrets[0], secrets[1:], "alice", PartyRng(3), enabled=False, channel=ch)
    assert not v.success
    assert not v.check("victim key fails to verify").passed
    assert v.check("adversary key verifies").passed
    assert not any(e.tampered for e in ch.envelopes)


def test_impersonation_tampers_only_the_kgc_request():
    params, secrets = lee(seed=4)
    ch = Channel()
    attack_lee_impersonation(params, secrets[0], secrets[1:], "alice", PartyRng(4), channel=ch)
    tampered = [e for e in ch.envelopes if e.tampered]
    assert len(tampered) == 1 and tampered[0].recipient == "KGC"
    assert all(e.sender == "adversary" for e in ch.envelopes if e.recipient.startswith("KPA"))


# insider signature extraction


def test_insider_request_passes_check_q101():
    params, secrets = lee(G101, keys=[9, 5, 3])
    ch = Channel()
    v = attack_lee_insider(params, secrets, 2, b"hello", PartyRng(0), r=2, channel=ch)
    w = hash_to_g1(b"hello", G101).handle
    forged = ch.envelopes[0].payload.reply_prev
    assert (forged.Q_prime, forged.sig) == (G101.g1(2 * w), G101.g1(10 * w))
    assert v.success
    assert v.extracted["forged_signature"] == G101.g1(3 * w).hex()


def test_insider_unit_blinding():
    params, secrets = lee(G101, keys=[9, 5, 3])
    params = replace(params, gt_hash=lambda t: G101.scalar(1))
    ch = Channel()
    v = attack_lee_insider(params, secrets, 2, b"m", PartyRng(0), r=1, x_star=4, channel=ch)
    Hm = hash_to_g1(b"m", G101)
    # no blinding to remove: the KPA's answer already is s_i H(m)
    assert ch.envelopes[1].payload.Q_prime == g1_mul(3, Hm)
    assert v.extracted["forged_signature"] == g1_mul(3, Hm).hex()


@pytest.mark.parametrize("i", [1, 2, 3])
def test_insider_every_position(i):
    params, secrets = lee(n=3, seed=i)
    v = attack_lee_insider(params, secrets, i, b"pay mallory", PartyRng(i))
    assert v.success
    assert v.extracted["forged_signature"] == g1_mul(secrets[i].s, hash_to_g1(b"pay mallory")).hex()
    assert ("insider is the KGC (index 0)" in v.notes) == (i == 1)
    assert v.capabilities == (f"own-secret-s_{i - 1}",)


@pytest.mark.parametrize("i", [0, 4])
def test_insider_out_of_range(i):
    params, secrets = lee(n=3)
    with pytest.raises(ConfigurationError):
        attack_lee_insider(params, secrets, i, b"m", PartyRng(0))


@pytest.mark.parametrize("i", [1, 2, 3])
def test_insider_never_reveals_own_signature(i):
    params, secrets = lee(n=3, seed=10 + i)
    ch = Channel()
    attack_lee_insider(params, secrets, i, b"msg", PartyRng(i), channel=ch)
    own = g1_mul(secrets[i - 1].s, hash_to_g1(b"msg")).hex()
    assert own not in all_element_hex(ch)


# tamper


def test_tamper_identity_scaling_is_no_attack():
    params, secrets = lee(seed=5)
    ch = Channel()
    v = attack_lee_tamper(params, secrets, 1, 1, PartyRng(5), channel=ch)
    assert not v.success
    assert v.check("KPA checks pass after tampering").passed
    assert not v.check("final key verification fails").passed
    assert not any(e.tampered for e in ch.envelopes)


def test_tamper_q101_r2():
    params, secrets = lee(G101, n=2, seed=6)
    v = attack_lee_tamper(params, secrets, 1, 2, PartyRng(6))
    assert v.success
    expected = g1_mul(product(secrets) * 2, compute_qid("alice", params))
    assert v.extracted["user_private_key"] == expected.hex()


@pytest.mark.parametrize("i", [1, 2, 3])
def test_tamper_key_carries_stray_factor(i):
    params, secrets = lee(n=3, seed=7)
    r = 123456789
    v = attack_lee_tamper(params, secrets, i, r, PartyRng(7))
    assert v.success
    Q = compute_qid("alice", params)
    assert v.extracted["user_private_key"] == g1_mul(product(secrets) * r, Q).hex()
    assert v.extracted["user_private_key"] != g1_mul(product(secrets), Q).hex()


def test_tamper_failure_first_visible_at_retrieval():
    params, secrets = lee(n=3, seed=8)
    ch = Channel()
    attack_lee_tamper(params, secrets, 2, 9, PartyRng(8), channel=ch)
    checks = [e for e in ch.entries if e.kind == "check"]
    assert [c.detail["result"] for c in checks] == [True] * (len(checks) - 1) + [False]
    assert checks[-1].detail["name"] == "verify_private_key"


def test_tamper_rejects_zero():
    params, secrets = lee()
    with pytest.raises(ScalarDomainError):
        attack_lee_tamper(params, secrets, 1, 0, PartyRng(0))
    with pytest.raises(ScalarDomainError):
        attack_lee_tamper(*lee(G101), 1, 101, PartyRng(0))


def test_tamper_index_range():
    params, secrets = lee(n=2)
    with pytest.raises(ConfigurationError):
        attack_lee_tamper(params, secrets, 3, 2, PartyRng(0))


# stolen verifier


def _sui_db(n=3, seed=0):
    params, s = sui_setup(DEFAULT_GROUP, random.Random(seed))
    db = PendingDatabase()
    for k in range(n):
        lra_register(db, f"user{k}", f"secret-{k}")
    return params, s, db


def test_stolen_verifier_any_tuple():
    params, s, db = _sui_db()
    snap = db.snapshot(ROLE_ADVERSARY)
    v = attack_sui_stolen_verifier(params, s, db, snap, "user1", PartyRng(0))
    assert v.success
    assert v.extracted["victim_private_key"] == g1_mul(s, hash_to_g1(b"user1")).hex()
    assert "user1" not in db


def test_stolen_verifier_empty_snapshot():
    params, s, db = _sui_db()
    with pytest.raises(ConfigurationError):
        attack_sui_stolen_verifier(params, s, db, PendingDatabase(), "user1", PartyRng(0))


def test_stolen_verifier_after_issuance_fails():
    params, s, db = _sui_db()
    snap = db.snapshot(ROLE_ADVERSARY)
    out = run_sui_issuance(Channel(), params, s, db, "user0", "secret-0", random.Random(1))
    assert out.private_key is not None
    v = attack_sui_stolen_verifier(params, s, db, snap, "user0", PartyRng(0))
    assert not v.success and not v.check("KGC check passes").passed
    # a snapshot taken after removal no longer holds the victim at all
    with pytest.raises(ConfigurationError):
        attack_sui_stolen_verifier(params, s, db, db.snapshot(ROLE_ADVERSARY), "user0", PartyRng(0))


# insider password reuse


def test_insider_pwd_same_password():
    db = PendingDatabase([("alice", "hunter2")])
    v = attack_sui_insider(db, PasswordSystem({"alice": "hunter2"}), "alice")
    assert v.success and v.extracted["password"] == b"hunter2".hex()


def test_insider_pwd_different_password():
    db = PendingDatabase([("alice", "hunter2")])
    v = attack_sui_insider(db, PasswordSystem({"alice": "other"}), "alice")
    assert not v.success


def test_insider_pwd_user_role_is_not_insider():
    db = PendingDatabase([("alice", "hunter2")])
    ch = Channel()
    v = attack_sui_insider(db, PasswordSystem({"alice": "hunter2"}), "alice", role="user", channel=ch)
    assert not v.success and "not-an-insider" in v.notes
    role_entry = next(e for e in ch.entries if e.detail.get("name") == "db_access_role")
    assert role_entry.detail == {"id": "alice", "name": "db_access_role", "result": False, "role": "user"}


def test_insider_pwd_kgc_role():
    db = PendingDatabase([("alice", "hunter2")])
    v = attack_sui_insider(db, PasswordSystem({"alice": "hunter2"}), "alice", role="KGC-2")
    assert v.success
    assert db.access_log[-1].role == "KGC-2"


def test_insider_pwd_unregistered():
    with pytest.raises(ConfigurationError):
        attack_sui_insider(PendingDatabase(), PasswordSystem({}), "alice")


# KGC incompetency


def test_rerandomize_identity():
    params, s = sui_setup(DEFAULT_GROUP, random.Random(0))
    v = attack_sui_rerandomize(params, s, 1, ("alice", "pw"), PartyRng(0))
    assert not v.success and v.check("KGC check passes").passed


def test_rerandomize_q101_r2():
    params, s = sui_setup(G101, secret=7)
    ch = Channel()
    v = attack_sui_rerandomize(params, s, 2, ("alice", "pw1"), PartyRng(0), channel=ch)
    assert v.success
    sent, moved = ch.envelopes[0].original, ch.envelopes[0].payload
    assert moved.Q == g1_mul(2, sent.Q) and moved.T == g1_mul(51, sent.T)
    assert v.extracted["blinded_key"] == g1_mul(s * 2, sent.Q).hex()


def test_rerandomize_rejects_zero():
    params, s = sui_setup(G101, secret=7)
    with pytest.raises(ScalarDomainError):
        attack_sui_rerandomize(params, s, 0, ("alice", "pw1"), PartyRng(0))


# global invariants


def _all_attacks(seed):
    lp, ls = lee(n=3, seed=seed)
    sp, ss, db = _sui_db(seed=seed)
    snap = db.snapshot(ROLE_ADVERSARY)
    rng = PartyRng(seed)
    return [
        attack_lee_impersonation(lp, ls[0], ls[1:], "alice", rng),
        attack_lee_insider(lp, ls, 2, b"m", rng),
        attack_lee_tamper(lp, ls, 2, 3, rng),
        attack_sui_stolen_verifier(sp, ss, db, snap, "user2", rng),
        attack_sui_insider(db, PasswordSystem({"user0": "secret-0"}), "user0"),
        attack_sui_rerandomize(sp, ss, 3, ("zed", "pw"), rng),
    ], (lp, ls, sp, ss)


def test_all_attacks_consistent_and_successful():
    verdicts, _ = _all_attacks(11)
    assert {v.attack_id for v in verdicts} == set(AttackId)
    for v in verdicts:
        assert v.success == all(c.passed for c in v.checks)
        assert v.to_dict()["success"] == v.success
        assert v.success


def test_attacks_do_not_touch_authority_secrets():
    lp, ls = lee(n=3, seed=12)
    sp, ss = sui_setup(DEFAULT_GROUP, random.Random(12))
    before = (list(ls), ss, lp, sp)
    rng = PartyRng(12)
    attack_lee_impersonation(lp, ls[0], ls[1:], "alice", rng)
    attack_lee_insider(lp, ls, 3, b"m", rng)
    attack_lee_tamper(lp, ls, 1, 5, rng)
    attack_sui_rerandomize(sp, ss, 5, ("a", "b"), rng)
    assert (list(ls), ss, lp, sp) == before


def test_honest_sessions_have_no_tampering():
    params, secrets = lee(n=2, seed=13)
    ch = Channel()
    state, _ = user_blind_request("alice", params, random.Random(0))
    out = run_lee_issuance(ch, params, secrets, state)
    assert out.valid and not any(e.tampered for e in ch.envelopes)
