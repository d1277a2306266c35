"""Exception and warning types shared across the package."""


class PelveError(Exception):
    """Base class for all errors raised by this package."""


class LevelOutOfRange(PelveError):
    """Probability level outside its admissible range."""


class OrderOutOfRange(PelveError):
    """Order must be a positive integer."""


class InvalidParameter(PelveError):
    """Distribution or solver parameter violates its constraints."""


class ExcessGPDBelowThreshold(PelveError):
    """Excess-over-threshold model is undefined below its threshold."""


class ExcessGPDLevelBelowBase(PelveError):
    """Quantile of an excess-over-threshold model requested at or below
    the base CDF value at the threshold."""


class NoClosedForm(PelveError):
    """No closed form is available for the requested (family, order) pair."""


class QuadratureNonConvergence(PelveError):
    """Panel budget exhausted before the requested tolerance was met.
    Usually signals a quantile function without a finite first moment."""


class BracketFailure(PelveError):
    """Root bracketing failed although the existence check passed.
    Retry with a tighter expected-shortfall tolerance (rel_tol)."""


class AlphaOutOfRange(PelveError):
    """Tail index must exceed 1."""


class KappaOutOfRange(PelveError):
    """Regular-variation index must exceed -1."""


class NoFiniteEstimates(PelveError):
    """A histogram was requested but every estimate was infinite."""


class MalformedCsv(PelveError):
    """CSV input does not match the expected header/row format."""


class NonPositivePrice(PelveError):
    """Price series must be strictly positive to form returns."""


class NonMonotoneDates(PelveError):
    """Dates in an input series must be strictly increasing."""


class SampleTooSmall(UserWarning):
    """m * epsilon < 1: the empirical VaR sits on the sample maximum and
    the PELVE estimate is degenerate."""
