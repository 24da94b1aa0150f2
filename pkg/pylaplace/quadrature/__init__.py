from pylaplace.quadrature.adaptive import QuadResult, adaptive_quad
from pylaplace.quadrature.substitutions import (
    Affine,
    DoubleExponentialTail,
    LeftHalfLine,
    RealLine,
    RightHalfLine,
    Substitution,
    compactified_grid,
    compactifying_substitution,
)
from pylaplace.quadrature.scaled import (
    ProblemSpec,
    integrate_scaled,
    peak_width,
    quadrature_hints,
    ratio_table,
    scaled_integrand,
    scaled_quad,
)
