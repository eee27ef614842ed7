"""Error taxonomy shared by the estimation pipeline.

Each exception carries a stable ``code`` string that is used verbatim in
JSON/CSV outputs, so downstream tooling can count failure modes without
parsing messages.
"""


class ClusterExtremesError(Exception):
    """Base class for all library errors."""

    code = "error"


class InvalidArgumentError(ClusterExtremesError, ValueError):
    """Malformed or out-of-domain argument (bad k, bad bounds, bad params)."""

    code = "invalid-argument"


class ThresholdOutOfRangeError(ClusterExtremesError, ValueError):
    """The requested order-statistic index falls outside the sample."""

    code = "threshold-out-of-range"


class DegenerateCompoundError(ClusterExtremesError, ArithmeticError):
    """The zero-count probability is 0 or 1, so log-based inversion is undefined.

    Happens when no block contains an exceedance, or every block does.
    """

    code = "degenerate-compound"


class EmptyClusterMomentError(ClusterExtremesError, ArithmeticError):
    """A cluster-size moment in a denominator is zero."""

    code = "empty-cluster-moment"


class NoClustersError(ClusterExtremesError, ArithmeticError):
    """A comparator estimator found no exceedances to work with."""

    code = "no-clusters"
