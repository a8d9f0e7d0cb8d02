"""In-process message channel with interceptor hooks and a JSONL transcript.

Time is logical: ``t`` is the number of envelopes sent so far.  Nothing here
reads the wall clock, so a run is a pure function of its inputs.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import Any, BinaryIO, Callable, Iterable, Optional, Union

from .pairing import G1Element, pair
from .wire import Payload, to_wire

EVENT_KINDS = ("send", "deliver", "tamper", "check", "verdict")


class PartyRng:
    """One seed, split into an independent generator per party label.

    Child seeds are SHA-256(seed || label), so adding a party (e.g. an
    interceptor's own randomness) never shifts anyone else's draws.
    """

    def __init__(self, seed: int):
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self._children: dict[str, random.Random] = {}

    def for_party(self, label: str) -> random.Random:
        if label not in self._children:
            digest = hashlib.sha256(
                b"keyissue-lab/rng" + self.seed.to_bytes(8, "big") + label.encode()
            ).digest()
            self._children[label] = random.Random(int.from_bytes(digest, "big"))
        return self._children[label]


@dataclass(frozen=True)
class TranscriptEntry:
    seq: int
    t: int
    kind: str
    party: str
    detail: dict

    def to_json(self) -> str:
        # fixed top-level key order; detail keys sorted
        return json.dumps(
            {"seq": self.seq, "t": self.t, "kind": self.kind, "party": self.party, "detail": self.detail},
            separators=(",", ":"),
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> TranscriptEntry:
        d = json.loads(line)
        return cls(d["seq"], d["t"], d["kind"], d["party"], d["detail"])


def _canonical(value):
    if isinstance(value, dict):
        return {k: _canonical(value[k]) for k in sorted(value)}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    return value


def encode_transcript(entries: Iterable[TranscriptEntry]) -> bytes:
    return b"".join(e.to_json().encode("utf-8") + b"\n" for e in entries)


def write_transcript(entries: Iterable[TranscriptEntry], sink: Union[str, BinaryIO]) -> bytes:
    """Write JSONL (one object per line, UTF-8) to a path or binary stream."""
    data = encode_transcript(entries)
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "wb") as fh:
            fh.write(data)
    else:
        sink.write(data)
    return data


def read_transcript(source: Union[str, BinaryIO]) -> list[TranscriptEntry]:
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    return [TranscriptEntry.from_json(line) for line in text.splitlines() if line]


@dataclass(frozen=True)
class Envelope:
    seq: int
    sender: str
    recipient: str
    payload: Payload
    tampered: bool = False
    original: Optional[Payload] = None


@dataclass
class Interceptor:
    """Rewrites matching payloads in transit. ``None`` filters match anything."""

    transform: Callable[[Payload], Payload]
    sender: Optional[str] = None
    recipient: Optional[str] = None
    payload_type: Optional[type] = None
    label: str = "adversary"

    def matches(self, sender: str, recipient: str, payload: Payload) -> bool:
        return (
            (self.sender is None or self.sender == sender)
            and (self.recipient is None or self.recipient == recipient)
            and (self.payload_type is None or isinstance(payload, self.payload_type))
        )


class Channel:
    """Public channel shared by all parties of one run; every party and the
    adversary can read ``envelopes`` (the wire view)."""

    def __init__(self, run_id: str = "adhoc"):
        self.run_id = run_id
        self.entries: list[TranscriptEntry] = []
        self.envelopes: list[Envelope] = []
        self.interceptors: list[Interceptor] = []
        self.clock = 0

    def _log(self, kind: str, party: str, detail: dict) -> TranscriptEntry:
        assert kind in EVENT_KINDS
        entry = TranscriptEntry(len(self.entries), self.clock, kind, party, _canonical(detail))
        self.entries.append(entry)
        return entry

    def intercept(self, interceptor: Interceptor) -> Interceptor:
        self.interceptors.append(interceptor)
        return interceptor

    def send(self, sender: str, recipient: str, payload: Payload) -> Payload:
        """Route one message; returns what the recipient actually receives."""
        self.clock += 1
        seq = len(self.envelopes)
        self._log("send", sender, {"envelope": seq, "to": recipient, "payload": to_wire(payload)})
        delivered = payload
        applied = []
        for icpt in self.interceptors:
            if icpt.matches(sender, recipient, delivered):
                delivered = icpt.transform(delivered)
                applied.append(icpt.label)
        tampered = delivered != payload
        if tampered:
            self._log(
                "tamper",
                applied[-1],
                {"envelope": seq, "interceptors": applied, "payload": to_wire(delivered)},
            )
        self.envelopes.append(
            Envelope(seq, sender, recipient, delivered, tampered, payload if tampered else None)
        )
        self._log("deliver", recipient, {"envelope": seq, "from": sender, "tampered": tampered})
        return delivered

    def delivered_to(self, recipient: str, payload_type: Optional[type] = None) -> list[Payload]:
        return [
            e.payload
            for e in self.envelopes
            if e.recipient == recipient and (payload_type is None or isinstance(e.payload, payload_type))
        ]

    def check_pairing(
        self,
        party: str,
        name: str,
        lhs: tuple[G1Element, G1Element],
        rhs: tuple[G1Element, G1Element],
    ) -> bool:
        """Evaluate e(lhs) == e(rhs) and log both sides so it can be re-verified."""
        result = pair(*lhs) == pair(*rhs)
        self._log(
            "check",
            party,
            {
                "name": name,
                "q": format(lhs[0].group.q, "x"),
                "lhs": [lhs[0].hex(), lhs[1].hex()],
                "rhs": [rhs[0].hex(), rhs[1].hex()],
                "result": result,
            },
        )
        return result

    def note(self, party: str, name: str, result: bool, **detail: Any) -> bool:
        """Log a check that is not a pairing equation (e.g. a database lookup)."""
        self._log("check", party, {"name": name, "result": bool(result), **detail})
        return bool(result)

    def record_verdict(self, verdict) -> None:
        self._log("verdict", "adversary", verdict.to_dict())

    def transcript_bytes(self) -> bytes:
        return encode_transcript(self.entries)

    def digest(self) -> str:
        return hashlib.sha256(self.transcript_bytes()).hexdigest()
