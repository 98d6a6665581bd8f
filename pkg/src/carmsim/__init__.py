"""Exact desk-scale simulator and classical oracle suite for quantum
Carmichael-number certification and counting."""

from .carmichael import (
    CarmichaelCountResult,
    PerturbationBounds,
    PswReport,
    Verdict,
    VerdictKind,
    allzero_probability,
    certify,
    count_carmichaels_quantum,
    count_fermat_failures,
    flag_probability,
    perturbation_bounds,
    phi_norm,
    psw_report,
)
from .counting import (
    CountEstimate,
    PeakProbability,
    SpectralAmplitude,
    dirichlet_kernel,
    estimate_error_bound,
    exact_count_distribution,
    peak_success_probability,
    run_count,
)
from .errors import CapacityError, DomainError, NormalizationError, ZeroProbabilityError
from .numtheory import (
    Classification,
    Factorization,
    NumberFacts,
    enumerate_carmichaels,
    euler_phi,
    factorize,
    fermat_nonwitness_count,
    is_carmichael,
    mr_witness_count,
    number_facts,
    psw_bounds,
    psw_scale,
    rabin_witness,
)
from .qsim import GroverAngles, RegisterLayout, StateVector, uniform_state

__version__ = "0.1.0"
