"""Exception types shared across the toolkit."""


class AnisotableError(Exception):
    """Base class for all toolkit errors."""


class AlphaOutOfRange(AnisotableError):
    """alpha outside the open interval (0, 2)."""


class ThetaBoundViolated(AnisotableError):
    """Spherical density leaves the [theta_low, theta_high] sandwich on the grid."""


class AlphaOneAsymmetric(AnisotableError):
    """alpha = 1 with a nonzero spherical mean: the process is not strictly stable."""


class OriginEvaluation(AnisotableError):
    """Levy density requested at x = 0."""


class AlphaEqualsOne(AnisotableError):
    """Closed-form positivity parameter unavailable at alpha = 1; use the MC sign frequency."""


class UnsupportedDimension(AnisotableError):
    """Quadrature grids exist only for d in {1, 2, 3}."""


class UnsupportedFeature(AnisotableError):
    """Combination valid in principle but outside this implementation's support matrix."""


class JumpCapExceeded(AnisotableError):
    """A path hit max_jumps_per_step; eps is too small for the step length."""


class KappaTooLarge(AnisotableError):
    """Requested fatness constant exceeds what the domain supports."""


class DegenerateGrid(AnisotableError):
    """Fewer than three usable points survive for a regression."""


class AllPathsDied(AnisotableError):
    """No survivors at some grid point; shrink the horizon or enlarge the start."""


class TooFewSurvivors(AnisotableError):
    """Fewer surviving paths than the 500-path floor at some start point."""


class ConfigError(AnisotableError):
    """Malformed experiment configuration (unknown field, missing key, bad value)."""


class MismatchDetected(AnisotableError):
    """Replay regenerated different bytes than the manifest records."""
