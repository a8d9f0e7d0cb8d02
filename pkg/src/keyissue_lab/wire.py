"""JSON wire format for protocol messages. Group elements travel as lowercase hex."""

from __future__ import annotations

from typing import Any

from .lee import BlindedKeyReply, LeeKeyRequest, LeeSecureRequest
from .pairing import G1Element, GroupParams, decode_element
from .sui import SuiBlindedKey, SuiRequest

Payload = Any


def _g1(group: GroupParams, text: str) -> G1Element:
    el = decode_element(group, text)
    if not isinstance(el, G1Element):
        raise ValueError("expected a G1 element")
    return el


def _reply_to_wire(r: BlindedKeyReply) -> dict:
    return {"issuer_index": r.issuer_index, "Q_prime": r.Q_prime.hex(), "sig": r.sig.hex()}


def _reply_from_wire(d: dict, group: GroupParams) -> BlindedKeyReply:
    return BlindedKeyReply(int(d["issuer_index"]), _g1(group, d["Q_prime"]), _g1(group, d["sig"]))


def to_wire(payload: Payload) -> dict:
    if isinstance(payload, LeeKeyRequest):
        return {"type": "LeeKeyRequest", "id": payload.id, "X": payload.X.hex()}
    if isinstance(payload, BlindedKeyReply):
        return {"type": "LeeBlindedReply", **_reply_to_wire(payload)}
    if isinstance(payload, LeeSecureRequest):
        return {
            "type": "LeeSecureRequest",
            "id": payload.id,
            "X": payload.X.hex(),
            "reply_prev": _reply_to_wire(payload.reply_prev),
        }
    if isinstance(payload, SuiRequest):
        return {"type": "SuiKeyRequest", "Q": payload.Q.hex(), "T": payload.T.hex()}
    if isinstance(payload, SuiBlindedKey):
        return {"type": "SuiBlindedKey", "S": payload.S.hex()}
    raise TypeError(f"no wire format for {type(payload).__name__}")


def from_wire(data: dict, group: GroupParams) -> Payload:
    kind = data.get("type")
    if kind == "LeeKeyRequest":
        return LeeKeyRequest(data["id"], _g1(group, data["X"]))
    if kind == "LeeBlindedReply":
        return _reply_from_wire(data, group)
    if kind == "LeeSecureRequest":
        return LeeSecureRequest(
            data["id"], _g1(group, data["X"]), _reply_from_wire(data["reply_prev"], group)
        )
    if kind == "SuiKeyRequest":
        return SuiRequest(_g1(group, data["Q"]), _g1(group, data["T"]))
    if kind == "SuiBlindedKey":
        return SuiBlindedKey(_g1(group, data["S"]))
    raise ValueError(f"unknown message type {kind!r}")
