"""The non-Gaussianity measures: Hilbert-Schmidt (delta_A), relative-entropy
(delta_B), Wehrl (delta_C), their mutual inequality, the bounded-search measure
for maps, and the single-mode upper-bound sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from .channels import ChannelSpec, apply_channel
from .config import tolerances
from .errors import ArgumentError, NumericalValidityError
from .fock import (DensityMatrix, FockStateVector, MeasureReport, State,
                   as_density, _entropy_of_spectrum, purity)
from .gaussian import (GaussianData, fit_single_mode_gaussian, gaussian_entropy,
                       gaussian_fock_block, moments,
                       synthesize_single_mode_gaussian, SingleModeGaussianParams)

__all__ = [
    "delta_a", "delta_b", "delta_c", "QuadratureGrid",
    "check_measure_inequality", "conjecture_a5_sweep", "ng_of_map",
]

_CLAMP = 1e-6  # entropy differences of matched states sit at numerical noise level


def _log_base(base) -> float:
    if base in (None, "nat", "e"):
        return 1.0
    return float(np.log(base))


def delta_a(rho: State) -> MeasureReport:
    """Squared renormalized HS distance to the reference Gaussian,
    (mu[rho] + mu[tau] - 2 kappa) / (2 mu[rho]).

    mu[tau] comes from the exact Gaussian purity 1/(2 sqrt(det sigma)) and
    kappa from the unrenormalized Fock block of tau, so states whose reference
    Gaussian extends far beyond the cutoff are still handled exactly.
    """
    if rho.modes != 1:
        raise ArgumentError("delta_A is restricted to single-mode states "
                            "(two-mode reference synthesis is out of scope)")
    g = moments(rho)
    params = fit_single_mode_gaussian(g)
    block, deficit = gaussian_fock_block(params, rho.cutoff)
    mu_rho = purity(rho)
    mu_tau = 0.5 / math.sqrt(float(np.linalg.det(g.sigma)))  # exact Gaussian purity
    dm = as_density(rho)
    kappa = float(np.real(np.vdot(dm.matrix, block)))
    value = (mu_rho + mu_tau - 2.0 * kappa) / (2.0 * mu_rho)
    if -_CLAMP < value < 0.0:
        value = 0.0
    leak = deficit + (rho.leakage if isinstance(rho, DensityMatrix) else 0.0)
    return MeasureReport(value, {"leakage": leak, "cutoff_used": rho.cutoff,
                                 "clamped_eigenvalue_mass": 0.0})


def delta_b(rho: State, base=None) -> MeasureReport:
    """QRE non-Gaussianity via the entropy-difference identity S(tau) - S(rho).

    Never goes through log(tau): with matched moments the identity is exact and
    needs no reference-state synthesis (which keeps two-mode states in reach).
    """
    if rho.modes > 2:
        raise ArgumentError("delta_B is implemented for 1- and 2-mode states")
    g = moments(rho)
    s_tau = gaussian_entropy(g)
    if isinstance(rho, FockStateVector):
        s_rho, clamped = 0.0, 0.0
    else:
        s_rho, clamped = _entropy_of_spectrum(rho.eigenvalues())
    value = s_tau - s_rho
    if -_CLAMP < value < 0.0:
        value = 0.0
    leak = rho.leakage if isinstance(rho, DensityMatrix) else 0.0
    return MeasureReport(value / _log_base(base),
                         {"leakage": leak, "cutoff_used": rho.cutoff,
                          "clamped_eigenvalue_mass": clamped})


# ---------------------------------------------------------------------------
# Wehrl measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform square phase-space grid for the Husimi quadrature."""

    half_width: float
    spacing: float = 0.05

    def points(self):
        n = int(math.floor(2 * self.half_width / self.spacing)) + 1
        xs = (np.arange(n) - (n - 1) / 2) * self.spacing
        return xs

    @staticmethod
    def for_state(state: State, spacing: float = 0.05) -> "QuadratureGrid":
        energy = _mean_photons(state)
        return QuadratureGrid(math.sqrt(2.0 * (energy + 1.0)) + 5.0, spacing)

    @staticmethod
    def covering(state: State, n_sigmas: float = 5.5,
                 spacing: float = 0.05) -> "QuadratureGrid":
        """Half-width from the largest Husimi covariance eigenvalue; use this
        for strongly squeezed states, whose Q function outgrows the default
        energy-based square."""
        g = moments(state)
        k = g.sigma + 0.5 * np.eye(2)
        spread = math.sqrt(float(np.linalg.eigvalsh(k)[-1]) / 2.0)
        center = float(np.linalg.norm(g.X)) / math.sqrt(2.0)
        return QuadratureGrid(n_sigmas * spread + center + 1.0, spacing)


def _mean_photons(state: State) -> float:
    if isinstance(state, DensityMatrix):
        return state.energy()
    probs = np.abs(state.amplitudes) ** 2
    idx = np.arange(state.dim)
    total = 0.0
    for m in range(state.modes):
        total += float(np.sum(probs * ((idx // state.cutoff ** m) % state.cutoff)))
    return total


def _coherent_rows(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Matrix of coherent amplitudes <n|alpha_i> for a batch of grid points."""
    n = np.arange(dim)
    mag = np.abs(alphas)
    with np.errstate(divide="ignore"):
        logmag = np.where(mag[:, None] > 0,
                          n[None, :] * np.log(np.where(mag > 0, mag, 1.0))[:, None],
                          np.where(n[None, :] == 0, 0.0, -np.inf))
    logmag = logmag - 0.5 * gammaln(n + 1)[None, :] - 0.5 * (mag ** 2)[:, None]
    return np.exp(logmag + 1j * n[None, :] * np.angle(alphas)[:, None])


def _husimi_on_grid(state: State, xs: np.ndarray) -> np.ndarray:
    """Q(alpha) = <alpha|rho|alpha>/pi on the grid xs x xs, row-chunked."""
    d = state.cutoff
    if isinstance(state, DensityMatrix):
        lam, vec = np.linalg.eigh(state.matrix)
        keep = lam > 1e-16
        lam, vec = lam[keep], vec[:, keep]
    else:
        lam, vec = np.array([1.0]), state.amplitudes.reshape(-1, 1)
    q = np.empty((xs.size, xs.size))
    chunk = max(1, int(4e6 // max(d * xs.size, 1)))
    for lo in range(0, xs.size, chunk):
        hi = min(lo + chunk, xs.size)
        alphas = (xs[lo:hi, None] + 1j * xs[None, :]).ravel()
        rows = _coherent_rows(alphas, d)
        b = np.abs(rows.conj() @ vec) ** 2
        q[lo:hi, :] = (b @ lam).reshape(hi - lo, xs.size) / math.pi
    return q


def _wehrl_from_grid(q: np.ndarray, spacing: float) -> tuple[float, float]:
    """(H_W, normalization residual); points with Q = 0 contribute nothing."""
    da = spacing * spacing
    pos = q[q > 0]
    hw = float(-np.sum(pos * np.log(math.pi * pos)) * da)
    resid = abs(float(np.sum(q) * da) - 1.0)
    return hw, resid


def _gaussian_husimi(g: GaussianData, xs: np.ndarray) -> np.ndarray:
    """Closed-form Husimi function of the Gaussian state with moments g."""
    k = g.sigma + 0.5 * np.eye(2)
    kinv = np.linalg.inv(k)
    norm = 1.0 / (math.pi * math.sqrt(float(np.linalg.det(k))))
    # quadrature-space point for alpha = x + iy is (sqrt2 x, sqrt2 y)
    y1 = math.sqrt(2.0) * xs[:, None] - g.X[0]
    y2 = math.sqrt(2.0) * xs[None, :] - g.X[1]
    quad = kinv[0, 0] * y1 ** 2 + 2 * kinv[0, 1] * y1 * y2 + kinv[1, 1] * y2 ** 2
    return norm * np.exp(-0.5 * quad)


def delta_c(rho: State, grid: QuadratureGrid | None = None,
            base=None) -> MeasureReport:
    """Wehrl-entropy non-Gaussianity H_W(tau) - H_W(rho) by grid quadrature.

    The reference term uses the closed-form Gaussian Husimi function on the
    same grid, so both entropies share the quadrature bias.
    """
    if rho.modes != 1:
        raise ArgumentError("delta_C is single-mode only")
    if grid is None:
        grid = QuadratureGrid.for_state(rho)
    xs = grid.points()
    g = moments(rho)
    q_rho = _husimi_on_grid(rho, xs)
    q_tau = _gaussian_husimi(g, xs)
    hw_rho, resid_rho = _wehrl_from_grid(q_rho, grid.spacing)
    hw_tau, resid_tau = _wehrl_from_grid(q_tau, grid.spacing)
    resid = max(resid_rho, resid_tau)
    if resid > 1e-4:
        raise NumericalValidityError(
            f"Husimi quadrature residual {resid:.2e} > 1e-4: enlarge the grid")
    value = (hw_tau - hw_rho) / _log_base(base)
    leak = rho.leakage if isinstance(rho, DensityMatrix) else 0.0
    return MeasureReport(value, {"leakage": leak, "cutoff_used": rho.cutoff,
                                 "quadrature_residual": resid,
                                 "grid_half_width": grid.half_width,
                                 "grid_spacing": grid.spacing})


# ---------------------------------------------------------------------------
# relations and sweeps
# ---------------------------------------------------------------------------

def check_measure_inequality(rho: State) -> tuple[bool, float]:
    """delta_B >= delta_A * mu; returns (holds, margin)."""
    margin = delta_b(rho).value - delta_a(rho).value * purity(rho)
    return margin >= -1e-6, margin


def conjecture_a5_sweep(samples: int, cutoffs, seed=0, bins: int = 40) -> dict:
    """Random-state sweep of delta_A per cutoff; the single-mode bound is 1/2.

    Ranks are drawn uniformly so the sample spans the purity range; |1> is
    forced into every sample (a known high-delta_A point, 5/12).
    """
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    out = {}
    edges = np.linspace(0.0, 0.55, bins + 1)
    for d in cutoffs:
        values = np.empty(samples + 1)
        forced = np.zeros(d, dtype=complex)
        forced[1] = 1.0
        values[0] = delta_a(FockStateVector(1, d, forced)).value
        for i in range(samples):
            rank = int(rng.integers(1, d + 1))
            from .fock import random_density_matrix
            values[i + 1] = delta_a(random_density_matrix(1, d, rank, rng)).value
        hist, _ = np.histogram(values, bins=edges)
        out[int(d)] = {
            "max": float(values.max()),
            "mean": float(values.mean()),
            "histogram": hist.tolist(),
            "bin_edges": edges.tolist(),
            "bound_ok": bool(values.max() <= 0.5 + 1e-6),
        }
    return out


def ng_of_map(channel: ChannelSpec, energy_cap: float = 4.0, cutoff: int = 30,
              budget: int = 500, base=None) -> MeasureReport:
    """Lower bound on the map non-Gaussianity max over Gaussian probes of
    delta_B[E(rho_G)], by coarse grid search plus simplex refinement.

    The reported value is a certified lower bound on the true supremum: every
    probe evaluated is an admissible Gaussian state under the energy cap.
    """
    evals = 0

    def probe_cutoff(params: SingleModeGaussianParams) -> int:
        # size the probe so its own crop deficit sits far below the zero test:
        # occupation decays geometrically with ratio (V - 1/2)/(V + 1/2), where
        # V is the largest CM eigenvalue
        v = (params.n_th + 0.5) * math.exp(2.0 * params.r)
        ratio = (v - 0.5) / (v + 0.5)
        base = 10 if ratio <= 0 else math.log(1e-10) / math.log(ratio)
        amag = abs(params.alpha)
        d = int(math.ceil(base + 4 * amag * amag
                          + 8 * amag * math.sqrt(params.energy() + 1.0))) + 20
        return max(cutoff, d)

    def probe_value(x) -> float:
        nonlocal evals
        n_th, r, phi, amag, aarg = x
        if n_th < 0 or r < 0 or amag < 0:
            return -1.0
        params = SingleModeGaussianParams(amag * np.exp(1j * aarg), r, phi % (2 * math.pi), n_th)
        if params.energy() > energy_cap + 1e-12:
            return -1.0
        probe = synthesize_single_mode_gaussian(params, probe_cutoff(params))
        evals += 1
        out = apply_channel(probe, channel)
        return delta_b(out).value

    rmax = 0.5 * math.acosh(2 * energy_cap + 1.0)
    amax = math.sqrt(energy_cap)
    best_val, best_x = -1.0, None
    for n_th in (0.0, energy_cap / 4, energy_cap / 2):
        for r in (0.0, rmax / 3, 2 * rmax / 3):
            for phi in (0.0, math.pi / 2):
                for amag in (0.0, amax / 2, 0.9 * amax):
                    for aarg in ((0.0,) if amag == 0 else (0.0, math.pi / 2)):
                        if evals >= budget:
                            break
                        x = (n_th, r, phi, amag, aarg)
                        v = probe_value(x)
                        if v > best_val:
                            best_val, best_x = v, x

    if best_x is not None and evals < budget:
        res = minimize(lambda x: -probe_value(x), np.asarray(best_x),
                       method="Nelder-Mead",
                       options={"maxfev": budget - evals, "xatol": 1e-4, "fatol": 1e-9})
        if -res.fun > best_val:
            best_val, best_x = -res.fun, tuple(res.x)

    n_th, r, phi, amag, aarg = best_x
    return MeasureReport(max(best_val, 0.0) / _log_base(base), {
        "evaluations": float(evals),
        "cutoff_used": cutoff,
        "probe_n_th": max(n_th, 0.0),
        "probe_r": max(r, 0.0),
        "probe_phi": phi % (2 * math.pi),
        "probe_alpha_mag": max(amag, 0.0),
        "probe_alpha_arg": aarg % (2 * math.pi),
    })
