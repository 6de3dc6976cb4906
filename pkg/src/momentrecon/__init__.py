"""Signal reconstruction from finitely many moments.

Forward transforms (model to moments) and inverse reconstructions for
polynomials, rational functions, spike trains, polygons and quadrature
domains, plus the composition and sign-change machinery behind moment
vanishing and finite-moment uniqueness.
"""

from .errors import (
    DomainError,
    InversionError,
    MomentError,
    ParseError,
    PreconditionError,
    SingularMatrixError,
    ValidationError,
)
from .forward import moments
from .models import (
    ComplexMomentSequence,
    DefiningPolynomial,
    Disk,
    DiskUnion,
    DoubleMomentTable,
    MomentSequence,
    ParamCurve,
    PiecewisePoly,
    Polygon,
    PolynomialModel,
    RationalModel,
    SpikeTrain,
    evaluate,
    validate,
)
from .textio import deserialize, serialize

__version__ = "0.1.0"
