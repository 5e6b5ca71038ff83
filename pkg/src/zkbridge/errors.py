"""Exception types raised by the bridge components.

Every transition either completes or raises one of these before touching
state, so callers can treat an exception as "nothing happened".
"""


class BridgeError(Exception):
    """Base class for all protocol-level failures."""


# codec
class MalformedVaa(BridgeError, ValueError):
    pass


class PayloadTooShort(BridgeError, ValueError):
    pass


class PayloadTooLarge(BridgeError, ValueError):
    pass


class MalformedReceipt(BridgeError, ValueError):
    pass


class UnsupportedVersion(BridgeError):
    pass


# origin (receipt recording)
class WrongAccountOwner(BridgeError):
    pass


class OriginNotAllowlisted(BridgeError):
    pass


class SequenceKeyMismatch(BridgeError):
    pass


class DuplicateReceipt(BridgeError):
    pass


# portal
class InvalidVaa(BridgeError):
    pass


class WrongOrigin(BridgeError):
    pass


class AlreadyConsumed(BridgeError):
    """Raised both by the Portal replay lock and by the Aztec consumer."""


class LegacyDisabled(BridgeError):
    pass


class UnknownConsumption(BridgeError):
    pass


# aztec
class NoSuchLeaf(BridgeError):
    pass


class NotYetIncluded(BridgeError):
    pass


class ContentMismatch(BridgeError):
    pass


class SenderMismatch(BridgeError):
    pass


class BadSecret(BridgeError):
    pass


class PortalAlreadySet(BridgeError):
    pass


# relayer / sim
class MissingEnqueueEvent(BridgeError):
    pass


class InvalidScenario(BridgeError, ValueError):
    pass
