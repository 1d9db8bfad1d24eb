"""Experimentally friendly lower bounds on the QRE non-Gaussianity, built on
photon counting with efficiency eta.

Classes of validity:
  epsilon_A  Fock-diagonal states, inefficient detection
  epsilon_B  thermal-reference states (Tr[rho a] = Tr[rho a^2] = 0), ideal detection
  epsilon_C  thermal-reference states, inefficient detection
  epsilon_D  generic single-mode states with known covariance matrix
  epsilon_E  generic single-mode states, inefficient detection
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import loss_transition_matrix
from .config import tolerances
from .errors import ArgumentError, NumericalValidityError
from .fock import DensityMatrix, FockStateVector, State, as_density, destroy, shannon_entropy
from .gaussian import h, moments

__all__ = [
    "PhotodetectionPOVM", "detection_statistics", "histogram_to_distribution",
    "epsilon_a", "epsilon_b", "epsilon_c", "epsilon_d", "epsilon_e",
]


@dataclass(frozen=True)
class PhotodetectionPOVM:
    """Pi_m = sum_{s >= m} alpha_{m,s}(eta) |s><s|, stored as diagonal weight tables.

    The elements are diagonal by construction, so only the (m, s) weight table
    is kept; completeness sum_m Pi_m = 1 holds exactly on the truncated space.
    """

    eta: float
    cutoff: int

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ArgumentError("detector efficiency eta must lie in [0, 1]")
        if self.cutoff < 1:
            raise ArgumentError("cutoff must be positive")

    def weight_table(self) -> np.ndarray:
        """table[m, s] = alpha_{m,s}(eta); columns sum to one."""
        return loss_transition_matrix(self.eta, self.cutoff)


def detection_statistics(rho: State, povm: PhotodetectionPOVM) -> np.ndarray:
    """q_m = Tr[rho Pi_m]; non-negative and summing to 1 within tail_tol."""
    rho = as_density(rho)
    if rho.modes != 1:
        raise ArgumentError("detection statistics are single-mode")
    if rho.cutoff != povm.cutoff:
        raise ArgumentError(
            f"POVM cutoff {povm.cutoff} does not match the state cutoff {rho.cutoff}")
    q = povm.weight_table() @ np.real(np.diag(rho.matrix))
    q = np.clip(q, 0.0, None)
    if abs(q.sum() - 1.0) > max(tolerances().tail, 1e-9):
        raise NumericalValidityError(f"detection statistics sum to {q.sum()}")
    return q / q.sum()


def histogram_to_distribution(rows) -> np.ndarray:
    """Normalize measured (m, count) rows into a dense q_m vector."""
    rows = [(int(m), float(c)) for m, c in rows]
    if not rows:
        raise ArgumentError("empty histogram")
    if any(m < 0 or c < 0 for m, c in rows):
        raise ArgumentError("histogram entries must be non-negative")
    size = max(m for m, _ in rows) + 1
    q = np.zeros(size)
    for m, c in rows:
        q[m] += c
    total = q.sum()
    if total <= 0:
        raise ArgumentError("histogram has zero total count")
    return q / total


# ---------------------------------------------------------------------------
# the five bounds
# ---------------------------------------------------------------------------

def epsilon_a(q, base=None) -> float:
    """S(nu_M) - H(q) with M the mean of the measured click distribution.

    Valid lower bound for Fock-diagonal states under inefficient detection; at
    eta = 1 it recovers delta_B exactly.
    """
    q = np.asarray(q, dtype=float).ravel()
    if np.any(q < 0) or abs(q.sum() - 1.0) > 1e-8:
        raise ArgumentError("q must be a probability distribution")
    m_mean = float(np.dot(np.arange(q.size), q))
    return h(m_mean + 0.5, base) - shannon_entropy(q, base)


def _check_thermal_reference(rho: DensityMatrix) -> None:
    a = destroy(rho.cutoff)
    t1 = abs(complex(np.trace(rho.matrix @ a)))
    t2 = abs(complex(np.trace(rho.matrix @ a @ a)))
    if t1 > 1e-8 or t2 > 1e-8:
        raise ArgumentError(
            f"state is outside the thermal-reference class: |<a>| = {t1:.2e}, "
            f"|<a^2>| = {t2:.2e} (both must vanish)")


def epsilon_b(rho: State, base=None) -> float:
    """S(nu_N) - H(p_nn) for states whose reference Gaussian is thermal."""
    rho = as_density(rho)
    if rho.modes != 1:
        raise ArgumentError("epsilon_B is single-mode")
    _check_thermal_reference(rho)
    p_diag = np.clip(np.real(np.diag(rho.matrix)), 0.0, None)
    n_mean = float(np.dot(np.arange(rho.cutoff), p_diag))
    return h(n_mean + 0.5, base) - shannon_entropy(p_diag, base)


def epsilon_c(rho: State, eta: float, base=None) -> float:
    """Like epsilon_B but through an inefficient detector: S(nu_M) - H(q)."""
    rho = as_density(rho)
    if rho.modes != 1:
        raise ArgumentError("epsilon_C is single-mode")
    _check_thermal_reference(rho)
    q = detection_statistics(rho, PhotodetectionPOVM(eta, rho.cutoff))
    return epsilon_a(q, base)


def epsilon_d(rho: State, base=None) -> float:
    """S(tau) - H(p_nn): needs the covariance matrix but only ideal counting."""
    rho = as_density(rho)
    if rho.modes != 1:
        raise ArgumentError("epsilon_D is single-mode")
    g = moments(rho)
    s_tau = h(math.sqrt(float(np.linalg.det(g.sigma))), base)
    p_diag = np.clip(np.real(np.diag(rho.matrix)), 0.0, None)
    return s_tau - shannon_entropy(p_diag, base)


def epsilon_e(rho: State, eta: float, base=None) -> float:
    """S(tau_eta) - H(q): generic states, inefficient detection.

    The loss-transformed reference entropy comes from the analytic CM map
    sigma -> eta sigma + (1 - eta)/2 I, exact and synthesis-free.
    """
    rho = as_density(rho)
    if rho.modes != 1:
        raise ArgumentError("epsilon_E is single-mode")
    g = moments(rho)
    sigma_eta = eta * g.sigma + (1.0 - eta) * 0.5 * np.eye(2)
    s_tau_eta = h(math.sqrt(float(np.linalg.det(sigma_eta))), base)
    q = detection_statistics(rho, PhotodetectionPOVM(eta, rho.cutoff))
    return s_tau_eta - shannon_entropy(q, base)
