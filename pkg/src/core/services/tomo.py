"""
Protocolo de tomografía por interferencia de dos fotones: estimación de |s_j|,
clasificación de pureza, recuperación de signos (rotaciones + PDL) y QST estándar
como referencia.
"""
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.core.models.errors import DimensionError, ParameterRangeError
from src.core.models.records import (
    Classification,
    CoincidenceSet,
    CountTriple,
    DetectorConfig,
    RotationMeasurement,
    SignDecision,
    StokesRecord,
    TomographyDiagnostics,
)
from src.core.models.sources import SourceModel
from src.core.models.states import DensityMatrix, PauliAxis, StokesVector
from src.core.services import hom, qstate
from src.core.services.backends import CoincidenceBackend, get_backend
from src.infrastructure.logging.logger import logger
from src.shared.rng import SeedLike, make_rng

DEGENERATE_TOLERANCE = 0.02
ESTIMATOR_WARNING_LIMIT = -0.05
CLASSIFY_ABS_THRESHOLD = 1e-9

AbsStokes = Tuple[float, float, float]


def measure_coincidences(backend: Union[str, CoincidenceBackend], source: SourceModel, shots: int = 0,
                         rng: SeedLike = None) -> CoincidenceSet:
    """Coincidences for U = I, sigma1, sigma2, sigma3, in that order.

    Args:
        backend: Backend name or instance.
        source: Source feeding both ports.
        shots: Shots per setting; 0 returns exact probabilities.
        rng: Seed or Generator for the sampled mode.
    """
    if shots < 0:
        raise ParameterRangeError(f"shots must be nonnegative, got {shots}")
    backend = get_backend(backend)
    rng = make_rng(rng)
    values = [backend.measure(source, operation, shots, rng) for operation in (None, *PauliAxis)]
    return CoincidenceSet(*values, shots_per_setting=shots)


def _squared_estimates(c: CoincidenceSet) -> Tuple[float, float, float]:
    return tuple(1.0 - 2.0 * (c.p_axis(axis) + c.p_identity) for axis in PauliAxis)


def has_estimator_warning(c: CoincidenceSet) -> bool:
    """True when some |s_j|^2 estimate falls below the clamping limit."""
    return min(_squared_estimates(c)) < ESTIMATOR_WARNING_LIMIT


def estimate_abs_stokes(c: CoincidenceSet) -> AbsStokes:
    """|s_j| = sqrt(max(0, 1 - 2 (P(sigma_j) + P(I)))), each clamped to [0, 1]."""
    squares = _squared_estimates(c)
    if min(squares) < ESTIMATOR_WARNING_LIMIT:
        logger.warning(f"Stokes estimator went below {ESTIMATOR_WARNING_LIMIT}: {squares}")
    return tuple(float(min(np.sqrt(max(0.0, value)), 1.0)) for value in squares)


def estimate_dop(abs_stokes: Sequence[float]) -> float:
    """Euclidean norm of the Stokes magnitudes, clamped to [0, 1]."""
    return float(min(np.linalg.norm(np.asarray(abs_stokes, dtype=float)), 1.0))


def estimate_dop_from_coincidences(c: CoincidenceSet) -> float:
    """sqrt(max(0, sum_j (1 - 2 (P(sigma_j) + P(I))))), clamping after the sum."""
    return float(min(np.sqrt(max(0.0, sum(_squared_estimates(c)))), 1.0))


def classify(p_identity: float, shots: int = 0) -> Classification:
    """PureInternal when P(I) is compatible with zero, ExternalOrMixture otherwise."""
    threshold = CLASSIFY_ABS_THRESHOLD
    if shots > 0:
        p = min(max(p_identity, 0.0), 1.0)
        threshold = max(threshold, 3.0 * np.sqrt(p * (1.0 - p) / shots))
    if p_identity <= threshold:
        return Classification.PURE_INTERNAL
    return Classification.EXTERNAL_OR_MIXTURE


def rotation_angle(xi: float) -> float:
    """Rotation that keeps the two sign hypotheses apart.

    pi/4 - xi/2 below xi = pi/4, -xi/2 from there on; |theta| always lies in [pi/8, pi/4].

    Raises:
        ParameterRangeError: If xi is outside [0, pi/2].
    """
    if not 0.0 <= xi <= np.pi / 2.0 + 1e-12:
        raise ParameterRangeError(f"xi={xi!r} outside [0, pi/2]")
    if xi < np.pi / 4.0:
        return float(np.pi / 4.0 - xi / 2.0)
    return float(-xi / 2.0)


def sign_product(pre_abs: Tuple[float, float], post_abs: float, theta: float, noise: float = 0.0,
                 tolerance: float = DEGENERATE_TOLERANCE) -> SignDecision:
    """Decide sign(s_a s_b) from |s_a| measured after a rotation by ``theta`` in the (a, b) plane.

    Equal signs predict ||s_a| cos(theta) - |s_b| sin(theta)|, opposite signs
    ||s_a| cos(theta) + |s_b| sin(theta)|; the closer prediction wins (ties give +1).

    Args:
        pre_abs: (|s_a|, |s_b|) before the rotation.
        post_abs: |s_a| measured after the rotation.
        theta: Counterclockwise rotation angle.
        noise: Standard deviation of ``post_abs``; 0 in exact mode.
        tolerance: Magnitude below which a component counts as degenerate.
    """
    a, b = (abs(float(v)) for v in pre_abs)
    same = abs(a * np.cos(theta) - b * np.sin(theta))
    opposite = abs(a * np.cos(theta) + b * np.sin(theta))
    sign = 1 if abs(post_abs - same) <= abs(post_abs - opposite) else -1
    confident = min(a, b) >= tolerance and abs(same - opposite) > 2.0 * noise
    return SignDecision(sign, bool(confident), float(same), float(opposite))


def pdl_transmission(rho: DensityMatrix, det: DetectorConfig) -> float:
    """eta_H rho_HH + eta_V rho_VV."""
    if rho.dim != 2:
        raise DimensionError(f"Expected a polarization qubit, got dimension {rho.dim}")
    entries = rho.entries
    return float(det.eta_h * np.real(entries[0, 0]) + det.eta_v * np.real(entries[1, 1]))


def _click(eta: float) -> float:
    return 1.0 - (1.0 - eta) ** 2


def simulate_counts(p_coinc: float, eta_pdl: float, det: DetectorConfig, seed: SeedLike = None,
                    sampled: bool = False) -> CountTriple:
    """Single counts behind (C0) and away from (C1) the PDL element, plus coincidences.

    C0 = (n/2)[1 - (1 - eta0)^2] eta_PDL, C1 = (n/2)[1 - (1 - eta1)^2],
    C01 = n P eta0 eta1 eta_PDL. Sampled mode draws each count binomially over n pairs.
    """
    for name, value in (("p_coinc", p_coinc), ("eta_pdl", eta_pdl)):
        if not 0.0 <= value <= 1.0:
            raise ParameterRangeError(f"{name}={value!r} outside [0, 1]")
    n = det.pairs_n
    rates = (
        0.5 * _click(det.eta0) * eta_pdl,
        0.5 * _click(det.eta1),
        p_coinc * det.eta0 * det.eta1 * eta_pdl,
    )
    if not sampled:
        return CountTriple(*(n * rate for rate in rates))
    rng = make_rng(seed)
    return CountTriple(*(float(rng.binomial(n, rate)) for rate in rates))


def eta_pdl_from_counts(c0: float, c1: float, det: DetectorConfig) -> float:
    """eta_PDL recovered from the single-count ratio."""
    if c1 <= 0:
        raise ParameterRangeError("C1 must be positive to compare single counts")
    if _click(det.eta0) == 0.0:
        raise ParameterRangeError("eta0 must be positive to compare single counts")
    return float((c0 / c1) * _click(det.eta1) / _click(det.eta0))


def sign_s1(c0: float, c1: float, det: DetectorConfig) -> int:
    """+1 when the recovered eta_PDL reaches (eta_H + eta_V)/2, else -1."""
    estimate = eta_pdl_from_counts(c0, c1, det)
    return 1 if estimate >= (det.eta_h + det.eta_v) / 2.0 else -1


def eta_pdl_standard_error(counts: CountTriple, det: DetectorConfig, sampled: bool = True) -> float:
    """Standard error of the recovered eta_PDL from the binomial spread of C0 and C1; 0 for exact counts."""
    if not sampled:
        return 0.0
    estimate = eta_pdl_from_counts(counts.c0, counts.c1, det)
    n = float(det.pairs_n)
    relative_var = 0.0
    for c in (counts.c0, counts.c1):
        c = max(c, 1.0)
        relative_var += (1.0 - min(c / n, 1.0)) / c
    return float(estimate * np.sqrt(relative_var))


def sign_s1_decision(counts: CountTriple, det: DetectorConfig, sampled: bool = True) -> SignDecision:
    """sign(s1) plus whether eta_PDL lies more than two standard errors from the midpoint."""
    estimate = eta_pdl_from_counts(counts.c0, counts.c1, det)
    midpoint = (det.eta_h + det.eta_v) / 2.0
    stderr = eta_pdl_standard_error(counts, det, sampled)
    sign = sign_s1(counts.c0, counts.c1, det)
    confident = abs(estimate - midpoint) > 2.0 * stderr
    return SignDecision(sign, bool(confident))


def _rotated_measurement(backend: CoincidenceBackend, source: SourceModel, base: CoincidenceSet,
                         abs_stokes: AbsStokes, axis: PauliAxis, xi: float, shots: int,
                         rng: np.random.Generator, tolerance: float) -> RotationMeasurement:
    measured, partner = axis.plane()
    theta = rotation_angle(xi)
    rotated = hom.rotate_source(source, axis, theta)
    p_coinc = backend.measure(rotated, measured, shots, rng)
    post = float(np.sqrt(max(0.0, 1.0 - 2.0 * (p_coinc + base.p_identity))))
    noise = 0.0 if shots == 0 else np.sqrt(2.0 / shots) / (2.0 * max(post, tolerance))
    pre = (abs_stokes[measured.index], abs_stokes[partner.index])
    decision = sign_product(pre, post, theta, noise, tolerance)
    logger.debug(
        f"Rotation about {axis.value} by {theta:.6f}: |s'|={post:.6f} "
        f"candidates=({decision.predicted_same_sign:.6f}, {decision.predicted_opposite_sign:.6f})"
    )
    return RotationMeasurement(axis, float(xi), theta, measured, partner, pre, post, float(p_coinc), decision)


def full_tomography(
    backend: Union[str, CoincidenceBackend],
    source: SourceModel,
    shots: int = 0,
    det: Optional[DetectorConfig] = None,
    seed: SeedLike = None,
    degenerate_tol: float = DEGENERATE_TOLERANCE,
) -> StokesRecord:
    """Run the whole protocol on ``source`` and return the signed Stokes vector.

    Steps: the four base coincidences, magnitudes and classification, two rotated
    settings (sign(s2 s3) and sign(s3 s1)), then sign(s1) from the PDL single-count
    ratio. When only s3 vanishes a single rotation about axis 3 gives sign(s1 s2).

    Args:
        backend: "analytic", "circuit", "boson" or a backend instance.
        source: Source under test.
        shots: Shots per setting, 0 for exact probabilities.
        det: Detector and PDL parameters; defaults to ``DetectorConfig()``.
        seed: Seed or Generator driving every sampled step.
        degenerate_tol: Magnitude below which a Stokes component counts as zero.

    Returns:
        StokesRecord: Signed Stokes vector, DOP, purity, classification and diagnostics.
    """
    backend = get_backend(backend)
    det = det or DetectorConfig()
    rng = make_rng(seed)
    tol = degenerate_tol

    base = measure_coincidences(backend, source, shots, rng)
    warning = has_estimator_warning(base)
    abs_stokes = estimate_abs_stokes(base)
    a1, a2, a3 = abs_stokes
    purity = float(min(max(1.0 - 2.0 * base.p_identity, 0.0), 1.0))
    classification = classify(base.p_identity, shots)

    rotations = []
    fallback = a3 < tol and a1 >= tol and a2 >= tol
    if fallback:
        r12 = _rotated_measurement(backend, source, base, abs_stokes, PauliAxis.AXIS3,
                                   float(np.arctan2(a2, a1)), shots, rng, tol)
        rotations.append(r12)
    else:
        r23 = _rotated_measurement(backend, source, base, abs_stokes, PauliAxis.AXIS1,
                                   float(np.arctan2(a3, a2)), shots, rng, tol)
        r31 = _rotated_measurement(backend, source, base, abs_stokes, PauliAxis.AXIS2,
                                   float(np.arctan2(a3, a1)), shots, rng, tol)
        rotations.extend((r23, r31))

    eta_pdl = pdl_transmission(hom.reduced_density(source), det)
    counts = simulate_counts(base.p_identity, eta_pdl, det, rng, sampled=shots > 0)
    eta_estimate = eta_pdl_from_counts(counts.c0, counts.c1, det)
    s1_decision = sign_s1_decision(counts, det, sampled=shots > 0)
    sign1 = s1_decision.sign
    confident1 = s1_decision.confident

    ambiguous = a1 < tol
    if ambiguous:
        sign1 = 1
    if fallback:
        sign2 = sign1 * r12.decision.sign
        sign3 = 1
        confidence = (confident1, confident1 and r12.decision.confident, False)
    elif ambiguous:
        sign3 = 1
        sign2 = sign3 * r23.decision.sign
        confidence = (False, False, False)
    else:
        sign3 = sign1 * r31.decision.sign
        sign2 = sign3 * r23.decision.sign
        confident3 = confident1 and r31.decision.confident
        confidence = (confident1, confident3 and r23.decision.confident, confident3)

    vector = np.array([sign1 * a1, sign2 * a2, sign3 * a3])
    norm = float(np.linalg.norm(vector))
    if norm > 1.0:
        logger.debug(f"Estimated Stokes norm {norm:.6f} above one, projecting onto the sphere")
        vector = vector / norm
    s = StokesVector.from_array(vector)
    if ambiguous:
        logger.warning("s1 is degenerate; the global sign of (s2, s3) cannot be fixed")
    elif not all(confidence):
        logger.warning(f"Low-confidence sign bits: {confidence}")

    diagnostics = TomographyDiagnostics(
        coincidences=base,
        rotations=tuple(rotations),
        counts=counts,
        eta_pdl_estimate=eta_estimate,
        eta_pdl_stderr=eta_pdl_standard_error(counts, det, sampled=shots > 0),
        estimator_warning=warning,
    )
    return StokesRecord(
        s=s,
        dop=s.norm(),
        global_purity=purity,
        classification=classification,
        sign_confidence=confidence,
        global_sign_ambiguous=ambiguous,
        diagnostics=diagnostics,
    )


def _nearest_physical(entries: np.ndarray) -> Tuple[np.ndarray, bool]:
    eigenvalues, vectors = np.linalg.eigh(entries)
    if eigenvalues.min() >= 0.0:
        return entries, False
    clamped = np.clip(eigenvalues, 0.0, None)
    clamped = clamped / clamped.sum()
    return (vectors * clamped) @ vectors.conj().T, True


def standard_qst(source: SourceModel, shots: int = 0, seed: SeedLike = None) -> Tuple[DensityMatrix, StokesVector]:
    """Reference tomography measuring each Pauli observable directly.

    Every axis gets ``shots`` projective measurements; the linear-inversion estimate
    is projected onto the nearest physical state when it leaves the Bloch ball.
    """
    if shots < 0:
        raise ParameterRangeError(f"shots must be nonnegative, got {shots}")
    truth = source.mean_stokes().as_array()
    if shots == 0:
        estimate = truth.copy()
    else:
        rng = make_rng(seed)
        ups = np.array([rng.binomial(shots, (1.0 + s) / 2.0) for s in np.clip(truth, -1.0, 1.0)])
        estimate = 2.0 * ups / shots - 1.0
    entries = np.eye(2, dtype=complex)
    for axis, value in zip(PauliAxis, estimate):
        entries = entries + value * qstate.pauli_matrix(axis)
    entries, regularized = _nearest_physical(entries / 2.0)
    if regularized:
        logger.debug(f"QST estimate {estimate} left the Bloch ball; regularized")
    rho = DensityMatrix(0.5 * (entries + entries.conj().T))
    return rho, qstate.stokes_of(rho)


def error_epsilon(theory: SourceModel, measured: CoincidenceSet) -> float:
    """Sum over the three axes of ((1 - <s_j>^2)/2 - P(I) - P(sigma_j))^2."""
    mean = theory.mean_stokes()
    return float(sum(
        ((1.0 - mean.component(axis) ** 2) / 2.0 - measured.p_identity - measured.p_axis(axis)) ** 2
        for axis in PauliAxis
    ))
