class HyperbolicGeometryError(Exception):
    """Custom exception for invalid or degenerate hyperbolic-plane computations."""

    pass


class UnboundedRegionError(Exception):
    """Custom exception for regions that leave their integration box."""

    pass


class InconsistentCurveSystemError(Exception):
    """Custom exception for curve systems whose bookkeeping does not close up."""

    pass


class ConstructionError(Exception):
    """Custom exception for group constructions that miss their trace targets."""

    pass


class DiscretenessCheckError(Exception):
    """Custom exception for groups whose area certificate fails."""

    pass


class FrontierOverflowError(Exception):
    """Custom exception for ball enumerations that hit the word-length cap."""

    pass


class DomainNotStabilizedError(Exception):
    """Custom exception for Dirichlet domains that change when the radius grows."""

    pass


class TruncationIncompleteError(Exception):
    """Custom exception for truncated domains that keep infinite area."""

    pass


class RadiusMismatchError(Exception):
    """Custom exception for comparing snapshots taken with different parameters."""

    pass


class RejectionStallError(Exception):
    """Custom exception for rejection samplers with a vanishing acceptance rate."""

    pass


class ExperimentConfigError(Exception):
    """Custom exception for unreadable or invalid experiment configurations."""

    pass
