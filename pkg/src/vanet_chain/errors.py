"""Exception types shared across the package."""


class VanetChainError(Exception):
    """Base class for every error this package raises on purpose."""


class OutOfRange(VanetChainError):
    """A supplied or derived quantity falls outside its valid range."""


class NyquistViolation(VanetChainError):
    """Timestep too coarse for the channel's Doppler bandwidth."""


class DegenerateChain(VanetChainError):
    """Transition probabilities make the requested quantity undefined."""


class BadInterval(VanetChainError):
    """Interval endpoints are inconsistent with each other."""


class BadWindow(VanetChainError):
    """Stability window is not an integer of at least 2."""


class TooLarge(VanetChainError):
    """Requested exhaustive computation exceeds the hard size cap."""


class NonSummable(VanetChainError):
    """Series does not converge (geometric ratio at or above 1)."""


class InsufficientData(VanetChainError):
    """Too few completed episodes to build an estimate."""


class SupportMismatch(VanetChainError):
    """Analytic and empirical distributions are not on the same support."""
