"""Berezin transforms of truncated Toeplitz, Hankel and gallery operators on H^2 of the polydisc."""

from .boxes import TruncationBox
from .fourier_symbols import (FourierSymbol, SignPattern, project_block, random_symbol, symbol_add,
                              symbol_conj, symbol_eval, symbol_mul)
from .polydisc_kernels import (KernelCoeffs, PolydiscPoint, TorusPoint, choose_truncation, poisson_extend,
                               poisson_kernel, szego_coeffs, tail_mass)
from .hardy_operators import (HankelBlock, HardyOperator, adjoint, compose, hankel, identity,
                              project_subspace, semicommutator, semicommutator_via_hankel, toeplitz)
from .berezin import (BoundaryEstimate, RadialProfile, berezin_matrix, extrapolate_boundary,
                      membership_diagnostic, radial_profile, recover_symbol)
from .gallery import get_gallery

__version__ = "0.1.0"
