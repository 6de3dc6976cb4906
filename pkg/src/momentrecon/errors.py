"""Exception hierarchy shared by every module.

Each inversion-stage failure carries a stable ``code`` string; the CLI
prints it and exits with status 3.
"""


class MomentError(Exception):
    code = "moment-error"


class PreconditionError(MomentError, ValueError):
    code = "precondition"


class ValidationError(MomentError, ValueError):
    code = "invalid-model"

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ParseError(MomentError, ValueError):
    code = "parse-error"

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class DomainError(MomentError, ValueError):
    """Evaluation outside the model's domain (branch cut, pole, outside [0,1])."""

    code = "domain"


class SingularMatrixError(MomentError, ArithmeticError):
    code = "singular"

    def __init__(self, message, condition=float("inf")):
        self.condition = condition
        super().__init__(f"{message} (condition estimate {float(condition):.3e})")


class InversionError(MomentError):
    code = "inversion-failure"


class OrderOverestimateError(InversionError):
    code = "order-overestimate"


class InvalidNodeError(InversionError):
    code = "invalid-node"


class NodeCollisionError(InversionError):
    code = "node-collision"


class PoleInIntervalError(InversionError):
    code = "pole-in-interval"


class ModelMismatchError(InversionError):
    code = "model-mismatch"


class NotAPolygonError(InversionError):
    code = "not-a-polygon"


class OrderingError(InversionError):
    code = "vertex-ordering"


class NotAQuadratureDomainError(InversionError):
    code = "not-a-quadrature-domain"


class ReconstructionInconsistentError(InversionError):
    code = "reconstruction-inconsistent"


class UnsupportedMultiplicityError(MomentError, ValueError):
    code = "unsupported-multiplicity"


class IllConditionedWarning(UserWarning):
    pass


class ModelMismatchWarning(UserWarning):
    pass
