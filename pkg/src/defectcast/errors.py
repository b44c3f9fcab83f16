"""Exception hierarchy for the defectcast package."""


class EstimationError(Exception):
    """Base class for all defectcast errors."""


class UndefinedEffectivenessError(EstimationError):
    """Effectiveness is 0/0 because the release contains no defects."""


class MissingFactorError(EstimationError):
    """A ranking or characterization omits a factor it must cover."""


class MissingQuantificationError(EstimationError):
    """An active factor has no expert triangle for the requested target."""


class MissingLevelError(EstimationError):
    """A release characterization has no level for an active factor."""


class EmptyDistributionError(EstimationError):
    """Quantiles requested from a distribution with no samples."""


class NoUsableHistoryError(EstimationError):
    """Every historical release is excluded; nothing to calibrate on."""


class NoEffectivenessHistoryError(EstimationError):
    """No included release has a defined effectiveness (all have DC = 0)."""


class InsufficientHistoryError(EstimationError):
    """Too few releases for the requested cross-validation or simulation."""


class ZeroActualError(EstimationError):
    """Relative error is undefined because an actual value is zero."""


class AllZeroDifferencesError(EstimationError):
    """Every paired difference is zero; the signed-rank test is undefined."""


class BundleValidationError(EstimationError):
    """A context bundle violates its invariants.

    Carries the full list of structured errors; validation is exhaustive
    and does not stop at the first problem.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"{e.entity}.{e.field}: {e.message}" for e in self.errors)
        super().__init__(f"invalid bundle ({len(self.errors)} errors): {lines}")
