"""
Modelo analítico cerrado del protocolo HOM: probabilidades de coincidencia
para fuentes puras, con entrelazamiento interno y mezcladas externamente.
"""
from typing import Dict

import numpy as np

from src.core.models.errors import ParameterRangeError, PhysicalityError
from src.core.models.sources import ExternallyMixed, InternalEntangled, SourceModel
from src.core.models.states import DensityMatrix, PauliAxis, StokesVector
from src.core.services import qstate

_SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2.0)


def coincidence_from_fidelity(fidelity: float) -> float:
    """P_coinc = (1 - F) / 2.

    Raises:
        ParameterRangeError: If F is outside [0, 1].
    """
    if not -1e-12 <= fidelity <= 1.0 + 1e-12:
        raise ParameterRangeError(f"Fidelity {fidelity!r} outside [0, 1]")
    return (1.0 - min(max(fidelity, 0.0), 1.0)) / 2.0


def reduced_density(source: SourceModel) -> DensityMatrix:
    """Polarization density operator of one photon."""
    return qstate.density_from_stokes(source.mean_stokes())


def global_purity(source: SourceModel) -> float:
    """tr(rho^2) of the full single-photon state (1 unless the source is externally mixed)."""
    if isinstance(source, ExternallyMixed):
        return qstate.purity_of(reduced_density(source))
    return 1.0


def coincidence_pauli(source: SourceModel, axis: PauliAxis) -> float:
    """Coincidence probability when U = sigma_axis.

    Pure and internally entangled photons give (1 - <s_j>^2)/2; externally mixed
    photons give (1 - s_j^2 (2 lambda - 1)^2)/2 - lambda (1 - lambda).
    """
    axis = PauliAxis.parse(axis)
    if isinstance(source, ExternallyMixed):
        lam = source.lam
        s_j = source.direction.component(axis)
        return (1.0 - s_j ** 2 * (2.0 * lam - 1.0) ** 2) / 2.0 - lam * (1.0 - lam)
    mean = source.mean_stokes().component(axis)
    return (1.0 - mean ** 2) / 2.0


def coincidence_identity(source: SourceModel) -> float:
    """Coincidence probability when U = I: lambda (1 - lambda) for mixed sources, 0 otherwise."""
    if isinstance(source, ExternallyMixed):
        return source.lam * (1.0 - source.lam)
    return 0.0


def fidelity(source: SourceModel, unitary: np.ndarray) -> float:
    """Fidelity between a photon and its image under ``unitary`` (acting on polarization only)."""
    unitary = np.asarray(unitary, dtype=complex)
    if unitary.shape != (2, 2) or not qstate.is_unitary(unitary):
        raise PhysicalityError("Expected a 2x2 unitary acting on polarization")
    if isinstance(source, ExternallyMixed):
        rho = reduced_density(source).entries
        return float(np.real(np.trace(rho @ unitary @ rho @ unitary.conj().T)))

    theta, phi = qstate.angles_of(source.direction)
    basis = qstate.preparation_unitary(theta, phi)
    phi_vec, perp_vec = basis[:, 0], basis[:, 1]
    expect_phi = np.vdot(phi_vec, unitary @ phi_vec)
    if isinstance(source, InternalEntangled):
        expect_perp = np.vdot(perp_vec, unitary @ perp_vec)
        amplitude = source.p * expect_phi + (1.0 - source.p) * expect_perp
    else:
        amplitude = expect_phi
    return float(min(abs(amplitude) ** 2, 1.0))


def coincidence_unitary(source: SourceModel, unitary: np.ndarray) -> float:
    """Coincidence probability for an arbitrary polarization unitary."""
    return coincidence_from_fidelity(fidelity(source, unitary))


def singlet_projection(rho_a: DensityMatrix, rho_b: DensityMatrix) -> float:
    """<psi-| rho_a (x) rho_b |psi->."""
    joint = np.kron(rho_a.entries, rho_b.entries)
    return float(np.real(np.vdot(_SINGLET, joint @ _SINGLET)))


def time_bin_sigma1_coincidence(alpha_sq: float) -> float:
    """Closed form of P_coinc(sigma1) for alpha|H,t0> + beta|V,t1> on both ports."""
    if not 0.0 <= alpha_sq <= 1.0:
        raise ParameterRangeError(f"|alpha|^2={alpha_sq!r} outside [0, 1]")
    beta_sq = 1.0 - alpha_sq
    numerator = 4.0 * alpha_sq * beta_sq
    denominator = 2.0 * alpha_sq ** 2 + 2.0 * beta_sq ** 2 + 4.0 * alpha_sq * beta_sq
    return numerator / denominator


def rca(eta: float, p_ph: float, p_dc: float, delta_t: float) -> float:
    """Coincidence-to-accidental ratio (eta p_ph / (p_dc delta_t))^2.

    Args:
        eta: Detector efficiency in (0, 1].
        p_ph: Probability that a pulse holds a photon, in (0, 1].
        p_dc: Dark-count probability density per nanosecond.
        delta_t: Detection window in nanoseconds.
    """
    if not 0.0 < eta <= 1.0:
        raise ParameterRangeError(f"eta={eta!r} outside (0, 1]")
    if not 0.0 < p_ph <= 1.0:
        raise ParameterRangeError(f"p_ph={p_ph!r} outside (0, 1]")
    if p_dc <= 0.0 or delta_t <= 0.0:
        raise ParameterRangeError("p_dc and delta_t must be strictly positive")
    return (eta * p_ph / (p_dc * delta_t)) ** 2


def measurement_settings(num_degrees_of_freedom: int = 1) -> Dict[str, int]:
    """Measurement settings needed for k two-level degrees of freedom.

    The HOM method always uses the four settings {I, sigma1, sigma2, sigma3} on the
    polarization; standard QST of the joint state needs every Pauli product, 4^k.
    """
    if num_degrees_of_freedom < 1:
        raise ParameterRangeError("At least one degree of freedom is required")
    return {"hom": 4, "standard_qst": 4 ** num_degrees_of_freedom}


def rotate_source(source: SourceModel, axis: PauliAxis, theta: float) -> SourceModel:
    """Source obtained by applying the same polarization rotation to every photon."""
    theta_d, phi_d = qstate.angles_of(source.direction)
    rotated = qstate.rotate_about_axis(qstate.state_from_angles(theta_d, phi_d), axis, theta)
    vector = qstate.stokes_of(rotated).as_array()
    return source.with_direction(StokesVector.from_array(vector / np.linalg.norm(vector)))
