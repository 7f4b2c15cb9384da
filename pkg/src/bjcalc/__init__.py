"""Born-Jordan and Weyl quantization calculus.

Exact polynomial symbols and normal-ordered operators with symbolic hbar,
the kernel Theta(z) = sinc(x.p / 2 hbar) with its zero-set geometry,
exponential symbols handled through delta jets, and grid symbols.
"""

from .expsym import (
    DeltaJet,
    ExpPolyTerm,
    JetDivisionError,
    bj_to_weyl_exp,
    kernel_witness,
    solve_heisenberg_bj,
    weyl_to_bj_exp,
)
from .grid import GridSymbol, ThresholdViolation, condition_number, grid_forward, grid_inverse, synthesize
from .quantize import (
    ConsistencyError,
    Scheme,
    bj_to_weyl_poly,
    convert,
    dequantize,
    quantize,
    weyl_to_bj_poly,
)
from .scalars import HBAR, I, ExactScalar, bernoulli, theta_inv_series_coeff, theta_series_coeff
from .symbols import P, PolySymbol, X
from .text import NegativeExponentError, ParseError, parse_operator, parse_symbol, print_operator, print_symbol
from .theta import (
    PhasePoint,
    ThetaContext,
    check_hormander_bounds,
    theta,
    theta_gradient,
    zero_set_distance,
)
from .weyl import PHAT, XHAT, NormalOperator

__version__ = "0.1.0"
