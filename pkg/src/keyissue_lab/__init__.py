"""Deterministic laboratory for ID-based key issuing protocols and attacks on them."""

from .attacks import (
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
from .channel import Channel, Envelope, Interceptor, PartyRng, TranscriptEntry, write_transcript
from .errors import (
    AuthenticationFailure,
    BlindReplyInvalid,
    ConfigurationError,
    LabError,
    ParameterMismatchError,
    RegistrationConflict,
    ReplyRejected,
    ScalarDomainError,
)
from .pairing import DEFAULT_GROUP, G1Element, GroupParams, GTElement, Scalar
from .runner import ScenarioConfig, run_scenario, verify_transcript

__version__ = "0.1.0"

__all__ = [
    "AttackId",
    "AttackVerdict",
    "AuthenticationFailure",
    "BlindReplyInvalid",
    "Channel",
    "Check",
    "ConfigurationError",
    "DEFAULT_GROUP",
    "Envelope",
    "G1Element",
    "GTElement",
    "GroupParams",
    "Interceptor",
    "LabError",
    "ParameterMismatchError",
    "PartyRng",
    "PasswordSystem",
    "RegistrationConflict",
    "ReplyRejected",
    "Scalar",
    "ScalarDomainError",
    "ScenarioConfig",
    "TranscriptEntry",
    "attack_lee_impersonation",
    "attack_lee_insider",
    "attack_lee_tamper",
    "attack_sui_insider",
    "attack_sui_rerandomize",
    "attack_sui_stolen_verifier",
    "run_scenario",
    "verify_transcript",
    "write_transcript",
]
