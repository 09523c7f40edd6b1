"""Exception hierarchy. Every error carries a stable machine-readable code for the CLI."""

from __future__ import annotations


class KitaokaError(Exception):
    """Base class; ``code`` is the stable identifier emitted in JSON error reports."""

    code = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class UnknownField(KitaokaError):
    code = "UnknownField"


class NotTotallyReal(KitaokaError):
    code = "NotTotallyReal"


class BasisNotClosed(KitaokaError):
    code = "BasisNotClosed"


class DiscriminantMismatch(KitaokaError):
    code = "DiscriminantMismatch"


class FieldMismatch(KitaokaError):
    code = "FieldMismatch"


class ElemSyntaxError(KitaokaError):
    code = "SyntaxError"


class NotIntegral(KitaokaError):
    code = "NotIntegral"


class NotTotallyPositive(KitaokaError):
    code = "NotTotallyPositive"


class ZeroElement(KitaokaError):
    code = "ZeroElement"


class BudgetExceeded(KitaokaError):
    code = "BudgetExceeded"


class NotQuadratic(KitaokaError):
    code = "NotQuadratic"


class UnitsUnavailable(KitaokaError):
    code = "UnitsUnavailable"


class CatalogIncomplete(KitaokaError):
    code = "CatalogIncomplete"


class RequiresKOne(KitaokaError):
    code = "RequiresKOne"


class HypothesisFailed(KitaokaError):
    code = "HypothesisFailed"


class IterationLimit(KitaokaError):
    code = "IterationLimit"


class NotSymmetric(KitaokaError):
    code = "NotSymmetric"


class NotClassical(KitaokaError):
    code = "NotClassical"


class NotPositiveDefinite(KitaokaError):
    code = "NotPositiveDefinite"


class NotRepresented(KitaokaError):
    code = "NotRepresented"


class NotAUnit(KitaokaError):
    code = "NotAUnit"


class PreconditionFailed(KitaokaError):
    code = "PreconditionFailed"


class NotIntegralHalves(KitaokaError):
    code = "NotIntegralHalves"


class InternalCheckError(KitaokaError):
    """An internal exactness assertion failed; indicates a bug, never bad input."""

    code = "InternalCheckError"
