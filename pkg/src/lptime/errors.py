"""Exception and warning types raised across the package."""


class LPTimeError(Exception):
    """Base class for all package errors."""


class DegenerateDistribution(LPTimeError, ValueError):
    """The sample has no spread (one distinct value, zero variance, or Q1 == Q3)."""


class InvalidProbability(LPTimeError, ValueError):
    """A probability argument fell outside the open interval (0, 1)."""


class InsufficientOverlap(LPTimeError, ValueError):
    """A lag leaves too few overlapping observations."""


class InsufficientData(LPTimeError, ValueError):
    """The series is too short for the requested model order."""


class DegenerateCopula(LPTimeError, ValueError):
    """A clipped copula density (or slice of it) carries zero mass."""


class UnstableModel(LPTimeError, ValueError):
    """An autoregressive model has a root on or inside the unit circle."""


class RankDeficient(LPTimeError, ValueError):
    """A least-squares design matrix is singular."""


class ParseError(LPTimeError, ValueError):
    """Input data could not be parsed."""


class ConfigError(LPTimeError, ValueError):
    """Invalid configuration value."""


class ExtremeLevelUnstable(UserWarning):
    """A requested quantile level is below 1/n_sim."""
