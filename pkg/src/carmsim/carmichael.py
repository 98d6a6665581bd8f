"""Certification and counting pipelines for Carmichael numbers.

Certification of a composite k marks the t(k) = phi(k) - F(k) coprime bases
that fail the Fermat condition, runs R counter registers of size P through
controlled search powers on the dimension-k base register, Fourier-transforms
the counters, and measures.  Carmichael k have t = 0, the iteration is the
identity, and the counters read all-zeros with certainty; non-Carmichael k
leak all-zeros with probability exactly alpha^(2R), alpha the Dirichlet
kernel at the peak position f = P arcsin(sqrt(t/k)) / pi.

Flag convention.  The coprimality flag is post-selected on the *prepared*
uniform superposition, where its acceptance probability is exactly phi(k)/k
and independent of the counter spectrum; the counter statistics are then
exactly the dimension-k counting law above.  Conditioning instead on a flag
computed after the iterations couples the two through the non-coprime
amplitudes: the acceptance mass becomes branch-dependent and the conditional
all-zeros probability shifts at order 1/P^2.  That coupled variant is
available as `allzero_probability_flag_conditioned` for comparison; the
decision rule and its error budget use the independent convention.

The counting pipeline runs the same counter construction over the register
k = 1..N with the Carmichael indicator as the mark (restricted to k < N so
the marked count always equals the enumeration ground truth), and budgets
the non-ideal-oracle corrections analytically: per-k leakage factors beta_k
(witness-count angle) and alpha_k (Fermat-failure angle) aggregate to

    (4/N) [ sum_carm (phi/k) beta^2 + sum_noncarm (phi/k)(1-beta^2) alpha^2 ]
        <= 4 pi^2 / (3 P^2),

with beta = 1 exactly for primes.  The nested correction states themselves
are never simulated; only these scalar norms enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from . import counting, numtheory, qsim
from .errors import CapacityError, DomainError

#: clip threshold: measured outcomes never come from floating-point dust
_SAMPLING_CLIP = 1e-13


class VerdictKind(Enum):
    NOT_CARMICHAEL = "NotCarmichael"
    PROBABLY_CARMICHAEL = "ProbablyCarmichael"


@dataclass(frozen=True)
class Verdict:
    """Certification outcome for one run.

    error_bound is 0 for NotCarmichael (a nonzero counter is impossible at
    t = 0, so the accusation is certain).  For ProbablyCarmichael it is the
    probability that a non-Carmichael k would have produced the same
    all-zeros reading: the exact alpha^(2R) in exact mode (0 when t = 0 is
    known), and in sampling mode the worst case over the guaranteed gap
    t >= phi(k)/2, namely (1 / (P sin theta_gap))^(2R) with
    theta_gap = arcsin sqrt(phi/(2k)).

    flag_retries counts flag post-selection rounds including the accepting
    one (sampling mode; expected value k/phi(k)).  grover_applications is
    the total number of search iterations spent, R (P-1) per round.
    """

    kind: VerdictKind
    error_bound: float
    observed_ancillas: tuple[int, ...]
    flag_retries: int
    grover_applications: int
    flag_probability: float
    exact_allzero: float | None = None

    def __post_init__(self) -> None:
        nonzero = any(v != 0 for v in self.observed_ancillas)
        if nonzero != (self.kind is VerdictKind.NOT_CARMICHAEL):
            raise DomainError("verdict kind inconsistent with observed ancillas")
        if not 0.0 <= self.error_bound <= 1.0:
            raise DomainError(f"error bound {self.error_bound} outside [0, 1]")

    def to_json_dict(self) -> dict:
        out = {
            "kind": self.kind.value,
            "error_bound": self.error_bound,
            "observed_ancillas": list(self.observed_ancillas),
            "flag_retries": self.flag_retries,
            "grover_applications": self.grover_applications,
            "flag_probability": self.flag_probability,
        }
        if self.exact_allzero is not None:
            out["exact_allzero"] = self.exact_allzero
        return out


def flag_probability(k: int) -> Fraction:
    """Exact acceptance probability phi(k)/k of the coprimality flag."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    return Fraction(numtheory.euler_phi(numtheory.factorize(k)), k)


def recommended_p(k: int) -> int:
    """Smallest counter size putting the guaranteed-gap peak past 1.

    P >= ceil(pi / theta_gap) with theta_gap = arcsin sqrt(phi/(2k)) makes
    f >= 1 for every non-Carmichael k, so all-zeros leakage decays as P^-2.
    Overridable guidance, not a hard precondition.
    """
    phi = numtheory.euler_phi(numtheory.factorize(k))
    theta_gap = math.asin(math.sqrt(phi / (2.0 * k)))
    return max(4, math.ceil(math.pi / theta_gap))


def fermat_failure_mask(k: int) -> np.ndarray:
    """Boolean mask over a in [0, k): coprime to k and a^(k-1) != 1 mod k."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if k >= 1 << 31:
        raise CapacityError(f"mask construction needs k*k within int64, got {k}")
    a = np.arange(k, dtype=np.int64)
    coprime = np.gcd(a, k) == 1
    fermat_pass = numtheory._vec_mod_pow(a, k - 1, k) == 1
    return coprime & ~fermat_pass


def _require_composite(k: int) -> numtheory.Factorization:
    f = numtheory.factorize(k)
    if f.is_prime:
        raise DomainError(f"{k} is prime; certification presumes a composite input")
    return f


def ancilla_distribution(k: int, p: int, r: int, cap: int = qsim.AMPLITUDE_CAP) -> np.ndarray:
    """Exact joint law of the R counter registers, shape (P,)*R.

    Dense route: controlled powers on the (P,)*R + (k,) layout, Fourier
    transform on each counter, marginal over the base register.
    """
    if p < 4:
        raise DomainError(f"counter size must be >= 4, got {p}")
    if r < 1:
        raise DomainError(f"need >= 1 counter registers, got {r}")
    mask = fermat_failure_mask(k)
    state = qsim.controlled_grover_powers((p,) * r, k, lambda v: mask[v], cap=cap)
    for axis in range(r):
        state = qsim.qft(state, axis)
    return qsim.exact_distribution(state, list(range(r)))


def allzero_probability(k: int, p: int, r: int, cap: int = qsim.AMPLITUDE_CAP) -> float:
    """Exact probability of reading |0...0> on the counters (composite k).

    Equals alpha_k^(2R) with alpha_k = s(f_k), and exactly 1 iff k is
    Carmichael.
    """
    _require_composite(k)
    dist = ancilla_distribution(k, p, r, cap=cap)
    return float(dist[(0,) * r])


@dataclass(frozen=True)
class FlagConditionedAllZeros:
    """Diagnostic: literal flag-after-iterations statistics."""

    joint: float
    conditional: float
    flag_mass: float


def allzero_probability_flag_conditioned(
    k: int, p: int, r: int, cap: int = qsim.AMPLITUDE_CAP
) -> FlagConditionedAllZeros:
    """All-zeros statistics when the flag is measured after the iterations.

    The flag register is written from the base register at the end of the
    controlled powers and post-selected; the returned conditional disagrees
    with alpha^(2R) at order 1/P^2 because the iteration mixes coprime and
    non-coprime amplitudes before the flag is read.
    """
    _require_composite(k)
    mask = fermat_failure_mask(k)
    state = qsim.controlled_grover_powers((p,) * r, k, lambda v: mask[v], cap=cap)
    coprime = (np.gcd(np.arange(k, dtype=np.int64), k) == 1).astype(np.int64)
    grid = state.grid()
    flagged = np.zeros(grid.shape + (2,), dtype=complex)
    base_values = np.arange(k)
    flagged[..., base_values, coprime] = grid
    layout = qsim.RegisterLayout((p,) * r + (k, 2), cap=max(cap, 2 * grid.size))
    flag_state = qsim.StateVector(layout, flagged.reshape(-1))
    flag_state, flag_mass = qsim.postselect(flag_state, r + 1, 1)
    for axis in range(r):
        flag_state = qsim.qft(flag_state, axis)
    table = qsim.exact_distribution(flag_state, list(range(r)))
    conditional = float(table[(0,) * r])
    return FlagConditionedAllZeros(
        joint=conditional * flag_mass, conditional=conditional, flag_mass=float(flag_mass)
    )


def draw_flag_rounds(accept_probability: float, rng: np.random.Generator) -> int:
    """Number of flag post-selection rounds until acceptance (geometric, >= 1)."""
    if not 0.0 < accept_probability <= 1.0:
        raise DomainError(f"acceptance probability {accept_probability} outside (0, 1]")
    rounds = 1
    while rng.random() >= accept_probability:
        rounds += 1
    return rounds


def gap_error_bound(k: int, phi: int, p: int, r: int) -> float:
    """Worst-case all-zeros leakage over the guaranteed gap t >= phi/2.

    sup over t' >= phi/2 of alpha(t')^(2R) is bounded by the kernel envelope
    1/(P sin theta) at theta_gap = arcsin sqrt(phi/(2k)); the kernel's
    numerator oscillates, so the envelope (not the kernel value at the gap)
    is the defensible bound.
    """
    theta_gap = math.asin(math.sqrt(phi / (2.0 * k)))
    envelope = 1.0 / (p * math.sin(theta_gap))
    return min(1.0, envelope) ** (2 * r)


def certify(
    k: int,
    p: int = 16,
    r: int = 2,
    mode: str = "exact",
    seed=0,
    cap: int = qsim.AMPLITUDE_CAP,
) -> Verdict:
    """Certify whether composite k is Carmichael; any nonzero counter disproves it.

    Both modes draw the reported counter reading from the exact joint law
    with the given seed.  Exact mode resolves the flag analytically
    (flag_retries = 0) and attaches the exact all-zeros probability; sample
    mode simulates the geometric flag retries and reports the gap-based
    worst-case error bound, which does not presume knowledge of t(k).
    """
    if mode not in ("exact", "sample"):
        raise DomainError(f"mode must be 'exact' or 'sample', got {mode}")
    factorization = _require_composite(k)
    phi = numtheory.euler_phi(factorization)
    f_count = numtheory.fermat_nonwitness_count(factorization)
    t = phi - f_count
    accept = phi / k

    dist = ancilla_distribution(k, p, r, cap=cap)
    allzero = float(dist[(0,) * r])
    weights = dist.reshape(-1).copy()
    weights[weights < _SAMPLING_CLIP] = 0.0
    weights /= weights.sum()

    rng = np.random.default_rng(seed)
    if mode == "sample":
        rounds = draw_flag_rounds(accept, rng)
    else:
        rounds = 0
    outcome_flat = int(rng.choice(weights.size, p=weights))
    ancillas = tuple(int(v) for v in np.unravel_index(outcome_flat, dist.shape))

    if any(ancillas):
        kind = VerdictKind.NOT_CARMICHAEL
        error_bound = 0.0
    else:
        kind = VerdictKind.PROBABLY_CARMICHAEL
        if mode == "exact":
            error_bound = 0.0 if t == 0 else allzero
        else:
            error_bound = gap_error_bound(k, phi, p, r)

    return Verdict(
        kind=kind,
        error_bound=error_bound,
        observed_ancillas=ancillas,
        flag_retries=rounds,
        grover_applications=r * (p - 1) * max(rounds, 1),
        flag_probability=accept,
        exact_allzero=allzero if mode == "exact" else None,
    )


def count_fermat_failures(
    k: int, p: int, seed: int = 0, reps: int = 100, cap: int = qsim.AMPLITUDE_CAP
) -> list[counting.CountEstimate]:
    """Estimate t(k) by counting the marked Fermat-failure bases of composite k.

    Estimates carry the peak-outcome error bound evaluated at the ground
    truth t(k) = phi(k) - F(k).
    """
    _require_composite(k)
    mask = fermat_failure_mask(k)
    return counting.run_count(k, lambda v: mask[v], p, seed=seed, reps=reps, cap=cap)


@dataclass(frozen=True)
class PerturbationBounds:
    """Per-integer leakage factors and the aggregated correction budget.

    Arrays are indexed by k = 1..n (entry 0 unused).  beta is the kernel at
    the witness-count angle (1 exactly for primes and k = 1), alpha the
    kernel at the Fermat-failure angle, coprime_amplitude = sqrt(phi/k),
    carmichael_phase the Carmichael indicator.  correction_norm_sq is the
    (4/N)-weighted composite sum bounded by 4 pi^2 / (3 P^2); phi_norm is
    mean of phi(k)/k over k = 1..n, which converges to 6/pi^2 = 0.60793
    (not pi^2/6: the harmonic constant sometimes quoted for this mean is
    its reciprocal-series cousin and does not apply).
    """

    n: int
    p: int
    g: np.ndarray
    beta: np.ndarray
    alpha: np.ndarray
    coprime_amplitude: np.ndarray
    carmichael_phase: np.ndarray
    correction_norm_sq: float
    correction_norm_bound: float
    phi_norm: float
    beta_violations: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "correction_norm_sq": self.correction_norm_sq,
            "correction_norm_bound": self.correction_norm_bound,
            "correction_ok": bool(self.correction_norm_sq <= self.correction_norm_bound),
            "phi_norm": self.phi_norm,
            "phi_norm_reference": 6.0 / math.pi**2,
            "beta_violations": list(self.beta_violations),
            "beta_composite_bound": 2.0 / (math.sqrt(3.0) * self.p),
        }


def perturbation_bounds(n: int, p: int) -> PerturbationBounds:
    """Leakage factors and correction budget for every k = 1..n.

    The witness count feeding beta uses the exact strong-liar formula (for
    even composites the square-root chain is empty and the witnesses are
    the Fermat failures over all bases); the census route is equivalent and
    cross-validated in the test suite.  Composite beta is expected under
    2/(sqrt(3) P); integers whose witness ratio falls below 3/4 (only
    k = 6 and k = 9, at ratio 2/3) can exceed it at large P and are
    reported in beta_violations rather than masked.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if p < 4:
        raise DomainError(f"counter size must be >= 4, got {p}")
    if n > numtheory.ENUMERATION_BOUND:
        raise CapacityError(f"bound sweep capped at {numtheory.ENUMERATION_BOUND}")
    spf = numtheory.spf_sieve(n)
    phi = numtheory.totient_sieve(n)
    prime = numtheory.prime_sieve(n)

    ks = np.arange(n + 1, dtype=np.float64)
    witness = np.zeros(n + 1, dtype=np.int64)
    t_gap = np.zeros(n + 1, dtype=np.int64)
    carmichael = np.zeros(n + 1, dtype=bool)
    for k in range(2, n + 1):
        if prime[k]:
            continue
        factors = numtheory.factors_from_spf(k, spf)
        factorization = numtheory.Factorization(k, factors)
        f_count = numtheory.fermat_nonwitness_count(factorization)
        witness[k] = (k - 1) - numtheory.strong_liar_count(factorization)
        t_gap[k] = int(phi[k]) - f_count
        carmichael[k] = t_gap[k] == 0

    with np.errstate(invalid="ignore", divide="ignore"):
        g = p * np.arcsin(np.sqrt(witness / np.maximum(ks, 1.0))) / math.pi
        f_peak = p * np.arcsin(np.sqrt(t_gap / np.maximum(ks, 1.0))) / math.pi
    g[:2] = 0.0
    f_peak[:2] = 0.0
    beta = counting.dirichlet_kernel(g, p)
    alpha = counting.dirichlet_kernel(f_peak, p)
    coprime_amplitude = np.sqrt(phi / np.maximum(ks, 1.0))

    composite = ~prime
    composite[:2] = False
    carm = composite & carmichael
    noncarm = composite & ~carmichael
    ratio = phi / np.maximum(ks, 1.0)
    correction = 4.0 / n * (
        float((ratio[carm] * beta[carm] ** 2).sum())
        + float((ratio[noncarm] * (1.0 - beta[noncarm] ** 2) * alpha[noncarm] ** 2).sum())
    )
    bound = 4.0 * math.pi**2 / (3.0 * p * p)
    beta_limit = 2.0 / (math.sqrt(3.0) * p)
    violating = np.flatnonzero(composite[:n] & (np.abs(beta[:n]) > beta_limit))
    phi_norm_value = float((phi[1:] / ks[1:]).mean())
    return PerturbationBounds(
        n=n,
        p=p,
        g=g,
        beta=beta,
        alpha=alpha,
        coprime_amplitude=coprime_amplitude,
        carmichael_phase=carmichael,
        correction_norm_sq=correction,
        correction_norm_bound=bound,
        phi_norm=phi_norm_value,
        beta_violations=tuple(int(v) for v in violating),
    )


def phi_norm(n: int) -> float:
    """Mean of phi(k)/k over k = 1..n; approaches 6/pi^2 = 0.60793."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    phi = numtheory.totient_sieve(n)
    ks = np.arange(1, n + 1, dtype=np.float64)
    return float((phi[1:] / ks).mean())


@dataclass(frozen=True)
class CarmichaelCountResult:
    """Counting run over k = 1..n with the enumeration ground truth attached."""

    n: int
    q: int
    exact_count: int
    carmichaels: tuple[int, ...]
    estimates: list[counting.CountEstimate]
    error_bound: float
    peak_probability: counting.PeakProbability

    def success_fraction(self) -> float:
        """Fraction of reps whose estimate lands within the peak-outcome bound."""
        hits = sum(1 for e in self.estimates if abs(e.t_tilde - self.exact_count) <= self.error_bound)
        return hits / len(self.estimates)


def count_carmichaels_quantum(
    n: int, q: int = 128, seed: int = 0, reps: int = 100, cap: int = qsim.AMPLITUDE_CAP
) -> CarmichaelCountResult:
    """Count Carmichael numbers below n on the k = 1..n register.

    The mark is the ideal Carmichael indicator restricted to k < n, so the
    marked count equals len(enumerate_carmichaels(n)) by construction; the
    perturbed-oracle corrections are budgeted by perturbation_bounds, not
    simulated.
    """
    carmichaels = numtheory.enumerate_carmichaels(n)
    t_n = len(carmichaels)
    mask = np.zeros(n, dtype=bool)
    if carmichaels:
        mask[np.asarray(carmichaels) - 1] = True  # register value v holds k = v + 1
    estimates = counting.run_count(n, lambda v: mask[v], q, seed=seed, reps=reps, cap=cap)
    return CarmichaelCountResult(
        n=n,
        q=q,
        exact_count=t_n,
        carmichaels=tuple(carmichaels),
        estimates=estimates,
        error_bound=counting.estimate_error_bound(n, q, t_n),
        peak_probability=counting.peak_success_probability(n, t_n, q),
    )


@dataclass(frozen=True)
class PswReport:
    """One comparison row of measured counting accuracy against the
    conjectured density envelopes.

    dt_exp is the peak-outcome estimate bound pi (N/Q)(pi/Q + 2 sqrt(t/N));
    dt_th the accuracy target N * l(N)^-(2+eps+delta); psw_lower/upper the
    conjectured envelopes with unit constants.  At desk scale the
    asymptotics are not expected to hold numerically: the row is
    informational and meets_target only compares the two error columns.
    """

    n: int
    t_n: int
    t_tilde: float
    dt_exp: float
    dt_th: float
    psw_lower: float
    psw_upper: float
    q: int
    epsilon: float
    delta: float
    meets_target: bool

    CSV_HEADER = ("N", "t_N", "t_tilde", "dt_exp", "dt_th", "psw_lower", "psw_upper", "Q", "epsilon", "delta")

    def to_csv_row(self) -> tuple:
        return (
            self.n,
            self.t_n,
            self.t_tilde,
            self.dt_exp,
            self.dt_th,
            self.psw_lower,
            self.psw_upper,
            self.q,
            self.epsilon,
            self.delta,
        )

    def to_json_dict(self) -> dict:
        out = dict(zip(self.CSV_HEADER, self.to_csv_row()))
        out["meets_target"] = self.meets_target
        return out


def choose_q(n: float, epsilon: float, delta: float, margin: float = 0.1) -> int:
    """Counter size policy: ceil(l(N)^beta) with beta = 1 + eps/2 + delta + margin."""
    if margin < 0:
        raise DomainError(f"margin must be >= 0, got {margin}")
    beta = 1.0 + epsilon / 2.0 + delta + margin
    return max(4, math.ceil(numtheory.psw_scale(n) ** beta))


def psw_report(
    n: int,
    epsilon: float,
    delta: float,
    q: int | None = None,
    seed: int = 0,
    reps: int = 100,
    margin: float = 0.1,
    cap: int = qsim.AMPLITUDE_CAP,
) -> PswReport:
    """Run the counting pipeline at the policy Q and tabulate the comparison.

    t_tilde is the median of the per-rep estimates (simple majority-style
    aggregation; heavier boosting belongs to callers).
    """
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    q_used = q if q is not None else choose_q(n, epsilon, delta, margin=margin)
    result = count_carmichaels_quantum(n, q_used, seed=seed, reps=reps, cap=cap)
    t_est = float(np.median([e.t_tilde for e in result.estimates]))
    scale = numtheory.psw_scale(n)
    dt_exp = result.error_bound
    dt_th = n * scale ** (-(2.0 + epsilon + delta))
    lower, upper = numtheory.psw_bounds(n, epsilon)
    return PswReport(
        n=n,
        t_n=result.exact_count,
        t_tilde=t_est,
        dt_exp=dt_exp,
        dt_th=dt_th,
        psw_lower=lower,
        psw_upper=upper,
        q=q_used,
        epsilon=epsilon,
        delta=delta,
        meets_target=bool(dt_exp < dt_th),
    )
