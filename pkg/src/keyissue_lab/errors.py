"""Exception hierarchy shared by the protocol, attack and harness modules."""


class LabError(Exception):
    """Base class for every error raised by keyissue_lab."""


class ParameterMismatchError(LabError):
    """Elements from different group parameter sets were combined."""


class ScalarDomainError(LabError, ValueError):
    """A scalar is outside the domain an operation accepts (e.g. inverting zero)."""


class ConfigurationError(LabError, ValueError):
    """A scenario, setup or attack was configured with invalid parameters."""


class IdentityRejected(LabError):
    """The KGC's identification predicate refused a key request."""


class ReplyRejected(LabError):
    """An authority refused an incoming blinded reply whose signature check failed."""

    def __init__(self, issuer_index: int, verifier_index: int):
        super().__init__(
            f"authority {verifier_index} rejected reply from authority {issuer_index}"
        )
        self.issuer_index = issuer_index
        self.verifier_index = verifier_index


class RegistrationConflict(LabError):
    """An identity already has a pending (ID, password) tuple."""


class AuthenticationFailure(LabError):
    """No pending tuple satisfies the KGC's pairing check."""


class BlindReplyInvalid(LabError):
    """The user's verification of a blinded private key failed."""
