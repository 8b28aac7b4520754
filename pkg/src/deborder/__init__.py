"""Exact debordering of rank-one symbolic determinants over Q(eps)."""

from .errors import (
    CertificateFailure,
    DeborderError,
    DimensionMismatch,
    DivisionByZero,
    EmptyBaseFamily,
    InstanceTooLarge,
    LimitUndefined,
    NoCommonBase,
    NonSquare,
    NoWitness,
    RankDeficient,
    RankError,
    RankMismatch,
    RankTooHigh,
)
from .extract import ExtractionResult, extract
from .generate import GeneratedInstance, GeneratorSpec, generate
from .matrix import (
    Matrix,
    MinorTable,
    MultilinearPoly,
    RankOneInstance,
    assemble,
    check_grassmann_plucker,
    det,
    expand_cauchy_binet,
    extract_coefficients,
    factor_rank_one,
    inverse,
    minor_table,
    rank,
    rref,
)
from .matroid import (
    ValuatedLinearMatroid,
    check_exchange,
    from_matrix,
    from_minor_table,
    min_weight_base,
    min_weight_base_local,
)
from .pipeline import (
    DeborderOutput,
    build_constant_reduction,
    check_border_limit,
    deborder,
    deborder_general,
    deborder_homogeneous,
)
from .principal import PrincipalMinorInstance, close_principal_minors, principal_minors, rank_factorize
from .scalars import (
    EPS,
    INF,
    EpsPolynomial,
    Rational,
    RationalFunction,
    limit0,
    parse_expression,
    rational,
    scale_eps_power,
    val,
)
from .splitting import NormalizedPair, SplitCertificate, common_base_minimum, mval, normalize_pair, solve_split

__version__ = "0.1.0"
