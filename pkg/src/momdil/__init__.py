"""Moment kernels, dilations and mean-square calculus for random operator tuples."""

from .calculus import (
    MsReport,
    RadialSeries,
    compression_identity_check,
    lipschitz_check,
    ms_norm,
    ms_sot_limit,
    radial_diagnostic,
    vn_check,
)
from .dilation import (
    DilationModel,
    build_dilation,
    cuntz_residual,
    domination_identity_check,
    equality_case_check,
    realization_check,
)
from .ensemble import (
    OperatorEnsemble,
    RandomOperator,
    apply_random,
    gen_coisometry_ensemble,
    gen_row_contraction_ensemble,
    load_ensemble,
    save_ensemble,
    word_moment,
)
from .fock import TruncatedFock, build_fock, eval_on_fock, fock_norm
from .gns import GnsModel, build_shifts, column_contraction_check, kolmogorov_factorize
from .kernel import BlockKernel, assemble_kernel, assemble_sigma, pd_check, pd_order_check
from .linalg import hermitian_eig, operator_norm, psd_margin, psd_sqrt
from .ncpoly import NcPoly, coeff_l2_norm, evaluate_poly, parse_ncpoly, poly_arith, radial_dilate, render
from .words import Word, WordTable, concat, enumerate_words, reverse

__version__ = "0.1.0"
