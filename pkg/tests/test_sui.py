import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from keyissue_lab.errors import (
    AuthenticationFailure,
    BlindReplyInvalid,
    ConfigurationError,
    RegistrationConflict,
    ScalarDomainError,
)
from keyissue_lab.pairing import DEFAULT_GROUP, GroupParams, g1_mul, hash_to_g1, pair
from keyissue_lab.sui import (
    ROLE_ADVERSARY,
    PendingDatabase,
    SuiRequest,
    check_request,
    is_insider_role,
    kgc_check_and_issue,
    lra_register,
    sui_setup,
    sui_user_finalize,
    sui_user_request,
    verify_sui_private_key,
)

G101 = GroupParams(101)
U = oracles.h1_exp(b"alice", 101)  # 65
W = oracles.h1_exp(b"pw1", 101)  # 69


def test_setup_examples():
    params, s = sui_setup(G101, secret=1)
    assert params.P_PKG == G101.generator
    params, s = sui_setup(G101, secret=7)
    assert params.P_PKG == G101.g1(7)
    params, s = sui_setup(DEFAULT_GROUP, random.Random(3))
    assert s and pair(params.P_PKG, params.P) == pair(params.P, params.P) ** s


def test_setup_zero_secret():
    with pytest.raises(ConfigurationError):
        sui_setup(G101, secret=0)


def test_register_and_remove():
    db = lra_register(PendingDatabase(), "alice", "pw1")
    assert len(db) == 1 and "alice" in db
    with pytest.raises(RegistrationConflict):
        lra_register(db, "alice", "other")
    db.remove("alice")
    assert len(db) == 0


def test_db_json_round_trip_and_log():
    db = PendingDatabase([("alice", "pw1"), ("bob", "pw2")])
    assert db.to_json() == '[{"id": "alice", "pwd": "pw1"}, {"id": "bob", "pwd": "pw2"}]'
    assert PendingDatabase.from_json(db.to_json()) == db
    snap = db.snapshot(ROLE_ADVERSARY)
    assert snap == db and snap is not db
    assert db.read("bob", "KGC-2") == "pw2"
    assert [(a.role, a.action) for a in db.access_log] == [("adversary", "snapshot"), ("KGC-2", "read")]


@pytest.mark.parametrize("role,insider", [("LRA", True), ("KGC-1", True), ("KGC-12", True),
                                          ("user", False), ("adversary", False), ("KGC-", False)])
def test_insider_roles(role, insider):
    assert is_insider_role(role) is insider


def test_request_examples():
    params, _ = sui_setup(G101, secret=7)
    r, req = sui_user_request("alice", "pw1", params, random.Random(0), r=1)
    assert req.Q == hash_to_g1(b"alice", G101) and req.T == hash_to_g1(b"pw1", G101)
    r, req = sui_user_request("alice", "pw1", params, random.Random(0), r=3)
    assert req.Q == G101.g1(3 * U) and req.T == G101.g1(34 * W)
    assert (req.Q.handle, req.T.handle) == (94, 23)


def test_request_zero_r():
    params, _ = sui_setup(G101, secret=7)
    with pytest.raises(ScalarDomainError):
        sui_user_request("alice", "pw1", params, random.Random(0), r=0)


def test_request_pairing_invariant():
    params, _ = sui_setup(DEFAULT_GROUP, random.Random(0))
    rng = random.Random(1)
    base = pair(hash_to_g1(b"alice"), hash_to_g1(b"pw1"))
    for _ in range(100):
        _, req = sui_user_request("alice", "pw1", params, rng)
        assert pair(req.Q, req.T) == base


def test_issue_examples():
    params, s = sui_setup(G101, secret=7)
    db = PendingDatabase([("bob", "x"), ("alice", "pw1")])
    r, req = sui_user_request("alice", "pw1", params, random.Random(0), r=3)
    S, who = kgc_check_and_issue(req, db, s, params)
    assert who == "alice"
    assert S == g1_mul(s, req.Q) == G101.g1(21 * U)
    assert S.handle == 52
    assert "alice" not in db and "bob" in db


def test_issue_unregistered():
    params, s = sui_setup(G101, secret=7)
    db = PendingDatabase([("bob", "x")])
    _, req = sui_user_request("alice", "pw1", params, random.Random(0))
    with pytest.raises(AuthenticationFailure):
        kgc_check_and_issue(req, db, s, params)
    assert len(db) == 1


def test_issue_is_one_shot():
    params, s = sui_setup(DEFAULT_GROUP, random.Random(0))
    db = PendingDatabase([("alice", "pw1")])
    _, req = sui_user_request("alice", "pw1", params, random.Random(1))
    kgc_check_and_issue(req, db, s, params)
    with pytest.raises(AuthenticationFailure):
        kgc_check_and_issue(req, db, s, params)


def test_finalize_examples():
    params, s = sui_setup(G101, secret=7)
    r, req = sui_user_request("alice", "pw1", params, random.Random(0), r=3)
    S = G101.g1(21 * U)
    key = sui_user_finalize(S, req, r, params)
    assert key == G101.g1(7 * U) and key.handle == 51
    r1, req1 = sui_user_request("alice", "pw1", params, random.Random(0), r=1)
    S1 = g1_mul(s, hash_to_g1(b"alice", G101))
    assert sui_user_finalize(S1, req1, r1, params) == S1
    with pytest.raises(BlindReplyInvalid):
        sui_user_finalize(S + params.P, req, r, params)


def test_finalize_zero_r():
    params, _ = sui_setup(G101, secret=7)
    _, req = sui_user_request("alice", "pw1", params, random.Random(0), r=3)
    with pytest.raises(ScalarDomainError):
        sui_user_finalize(G101.g1(1), req, G101.scalar(0), params)


def test_honest_completeness():
    for seed in range(50):
        rng = random.Random(seed)
        params, s = sui_setup(DEFAULT_GROUP, rng)
        db = lra_register(PendingDatabase(), "alice", f"pw{seed}")
        r, req = sui_user_request("alice", f"pw{seed}", params, rng)
        S, _ = kgc_check_and_issue(req, db, s, params)
        key = sui_user_finalize(S, req, r, params)
        assert key == g1_mul(s, hash_to_g1(b"alice"))
        assert verify_sui_private_key(key, "alice", params)


@given(st.integers(1, 100), st.integers(1, 100))
def test_check_scale_blind(r, r_star):
    params, _ = sui_setup(G101, secret=7)
    _, req = sui_user_request("alice", "pw1", params, random.Random(0), r=r)
    rs = G101.scalar(r_star)
    moved = SuiRequest(g1_mul(rs, req.Q), g1_mul(rs.inverse(), req.T))
    assert check_request(moved, "alice", "pw1") == check_request(req, "alice", "pw1") is True
    wrong = SuiRequest(req.Q, req.T + G101.generator)
    moved_wrong = SuiRequest(g1_mul(rs, wrong.Q), g1_mul(rs.inverse(), wrong.T))
    assert check_request(moved_wrong, "alice", "pw1") == check_request(wrong, "alice", "pw1")


def test_db_soundness_exhaustive_q11():
    # every (Q, T) pair at q=11: the KGC only ever issues for an id present in the db
    g = GroupParams(11)
    params, s = sui_setup(g, secret=3)
    hid = hash_to_g1(b"alice", g).handle
    hpw = hash_to_g1(b"pw1", g).handle
    target = hid * hpw % 11
    for a in range(11):
        for b in range(11):
            db = PendingDatabase([("alice", "pw1")])
            req = SuiRequest(g.g1(a), g.g1(b))
            if a * b % 11 == target:
                assert kgc_check_and_issue(req, db, s, params)[1] == "alice"
            else:
                with pytest.raises(AuthenticationFailure):
                    kgc_check_and_issue(req, db, s, params)
            with pytest.raises(AuthenticationFailure):
                kgc_check_and_issue(req, PendingDatabase(), s, params)


def test_scan_order_first_match():
    params, s = sui_setup(G101, secret=7)
    db = PendingDatabase([("alice", "pw1"), ("alice2", "pw1")])
    _, req = sui_user_request("alice", "pw1", params, random.Random(0))
    assert kgc_check_and_issue(req, db, s, params)[1] == "alice"
