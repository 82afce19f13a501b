"""Receiver models and quantum detection computations.

Noise conventions: an eavesdropper heterodyne sample is z = alpha + w with
independent Gaussian quadratures of standard deviation sigma_he = 1 each
(implemented literally; shot-noise-limited heterodyne is often modeled with
variance 1/2 instead, and the Monte Carlo cross-checks quantify the gap).
The keyed receiver measures a single known quadrature and gets the 3 dB
advantage: sigma_keyed = 1/sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import erf, pi, sqrt

import numpy as np
from scipy.special import erf as erf_vec

from .coherent import FockDensityMatrix, codeword_overlap, gram_matrix

SIGMA_HETERODYNE = 1.0
SIGMA_KEYED = 1.0 / np.sqrt(2.0)

NEGATIVE_EIGENVALUE_TOL = 1e-10
POVM_COMPLETENESS_TOL = 1e-10


def photon_count_prob(alpha: complex) -> float:
    """Probability of zero counts on a coherent state: P(0|alpha) = exp(-|alpha|^2)."""
    return float(np.exp(-abs(complex(alpha)) ** 2))


@dataclass(frozen=True)
class HeterodyneSample:
    """Complex amplitude estimate; phase estimate is arg z."""

    z: complex

    @property
    def phase(self) -> float:
        return float(np.angle(self.z))


def heterodyne_sample(alpha: complex, rng, sigma: float = SIGMA_HETERODYNE) -> HeterodyneSample:
    w = rng.standard_normal() + 1j * rng.standard_normal()
    return HeterodyneSample(complex(alpha) + sigma * w)


def heterodyne_samples(alphas, rng, sigma: float = SIGMA_HETERODYNE) -> np.ndarray:
    """Vectorized heterodyne outcomes for an array of amplitudes."""
    alphas = np.asarray(alphas, dtype=complex)
    w = rng.standard_normal(alphas.shape) + 1j * rng.standard_normal(alphas.shape)
    return alphas + sigma * w


# ---------------------------------------------------------------------------
# phase statistics of a heterodyne outcome
# ---------------------------------------------------------------------------

def phase_error_density(theta, kappa: float) -> np.ndarray:
    """Density of arg(z) for z = kappa + CN noise (unit quadrature sigma).

    kappa = |alpha| / sigma is the amplitude signal-to-noise ratio; theta is
    measured from the true phase. Standard closed form; normalized on (-pi, pi].
    """
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    s = np.sin(theta)
    return (np.exp(-kappa ** 2 / 2) / (2 * pi)
            + kappa * c / (2 * sqrt(2 * pi)) * np.exp(-(kappa * s) ** 2 / 2)
            * (1 + erf_vec(kappa * c / sqrt(2))))


_PHASE_GRID = 1 << 14


@lru_cache(maxsize=64)
def phase_error_cdf_table(kappa: float, grid: int = _PHASE_GRID):
    """(theta, cdf) arrays of the phase-error law on [-pi, pi].

    Cached per (kappa, grid); callers must not mutate the returned arrays.
    """
    th = np.linspace(-pi, pi, grid + 1)
    dens = phase_error_density(th, kappa)
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(th))])
    cdf /= cdf[-1]
    return th, cdf


def phase_wedge_prob(lo: float, hi: float, kappa: float) -> float:
    """P(phase error in [lo, hi]) for |hi - lo| <= 2*pi, by quadrature."""
    th, cdf = phase_error_cdf_table(kappa)
    f = np.interp([lo, hi], th, cdf)
    return float(f[1] - f[0])


def phase_bin_probs(kappa: float, bins: int, center_phase: float = 0.0) -> np.ndarray:
    """Probabilities of the uniform phase bins [2*pi*b/bins, 2*pi*(b+1)/bins).

    center_phase is the true signal phase; the returned vector sums to 1.
    """
    if kappa == 0.0:
        return np.full(bins, 1.0 / bins)
    th, cdf = phase_error_cdf_table(kappa)
    edges = 2 * pi * np.arange(bins + 1) / bins - center_phase
    rel = np.mod(edges + pi, 2 * pi) - pi
    vals = np.interp(rel, th, cdf)
    p = np.diff(vals)
    p[p < 0] += 1.0  # edge pair wrapped across +-pi
    p = np.clip(p, 0.0, None)
    return p / p.sum()


# ---------------------------------------------------------------------------
# binary discrimination bounds
# ---------------------------------------------------------------------------

def helstrom_binary_pure(a0: complex, a1: complex, prior0: float = 0.5) -> float:
    """Minimum discrimination error between two pure coherent states."""
    if not 0 < prior0 < 1:
        raise ValueError("prior0 must lie strictly between 0 and 1")
    ov2 = abs(codeword_overlap(np.atleast_1d(np.asarray(a0, complex)),
                               np.atleast_1d(np.asarray(a1, complex)))) ** 2
    return 0.5 * (1.0 - sqrt(max(0.0, 1.0 - 4.0 * prior0 * (1 - prior0) * ov2)))


def helstrom_binary_mixed(rho0: FockDensityMatrix, rho1: FockDensityMatrix,
                          prior0: float = 0.5) -> float:
    """Quantum Bayes error for two density operators.

    error = 1/2 - (1/2)||prior0*rho0 - prior1*rho1||_1. Equal priors realize
    the minimax saddle point for the doubly symmetric mixtures used here.
    """
    if rho0.dim != rho1.dim:
        raise ValueError("dimension mismatch")
    if not 0 < prior0 < 1:
        raise ValueError("prior0 must lie strictly between 0 and 1")
    diff = prior0 * rho0.matrix - (1 - prior0) * rho1.matrix
    w = np.linalg.eigvalsh(diff)
    return float(0.5 - 0.5 * np.sum(np.abs(w)))


# ---------------------------------------------------------------------------
# square-root measurement
# ---------------------------------------------------------------------------

def _sqrt_spectrum(w) -> np.ndarray:
    """Square roots of a Gram spectrum with a shared relative floor.

    Eigenvalues below 1e-12 of the largest are pure rounding noise, but their
    square roots would differ between the eigen and DFT routes by ~1e-8;
    flooring them to zero keeps the two routes consistent to 1e-9 even for
    rank-deficient sets.
    """
    w = np.asarray(w, dtype=float)
    if w.min() < -NEGATIVE_EIGENVALUE_TOL:
        raise ArithmeticError(f"Gram eigenvalue {w.min()} below tolerance")
    floor = 1e-12 * max(float(w.max()), 0.0)
    return np.sqrt(np.where(w > floor, w, 0.0))


def srm_general(states):
    """Square-root measurement over equiprobable pure coherent states.

    Works in the signal-span (Gram) representation: success of state i is
    the squared i-th diagonal entry of G^(1/2); error is 1 - mean success.
    Only the positive square root enters (never an inverse), so the
    computation stays exact down to rank-deficient Gram matrices; a set of
    identical states degrades gracefully to the uniform-guessing error.

    Returns:
        (error, successes) with successes a length-n array.
    """
    states = list(states)
    if len(states) < 2:
        raise ValueError("need at least two states")
    g = gram_matrix(states)
    w, v = np.linalg.eigh(g)
    ghalf = (v * _sqrt_spectrum(w)) @ v.conj().T
    successes = np.diag(ghalf).real ** 2
    return float(1.0 - successes.mean()), successes


def psk_overlap_row(j_phases: int, amp: float) -> np.ndarray:
    """First Gram row <alpha_1|alpha_k> of a symmetric J-ary PSK set."""
    phis = 2 * pi * np.arange(j_phases) / j_phases
    return np.exp(amp ** 2 * (np.exp(1j * phis) - 1.0))


def srm_symmetric_psk(j_phases: int, amp: float):
    """Closed-form SRM error for symmetric J-ary PSK via DFT Gram eigenvalues.

    The eigenvalues are the DFT of the first Gram row; the single-mode error
    is 1 - (1/J^2) (sum of sqrt eigenvalues)^2.

    Returns:
        (error, eigenvalues)
    """
    if j_phases < 2:
        raise ValueError("need J >= 2")
    if amp < 0:
        raise ValueError("amplitude must be >= 0")
    lam = np.fft.fft(psk_overlap_row(j_phases, amp)).real
    success = (np.sum(_sqrt_spectrum(lam)) / j_phases) ** 2
    return float(1.0 - success), np.clip(lam, 0.0, None)


def srm_psk_channel(j_phases: int, amp: float) -> np.ndarray:
    """Full SRM transition matrix P(j|i) = |(G^(1/2))_ij|^2 for J-ary PSK."""
    g = np.empty((j_phases, j_phases), dtype=complex)
    row = psk_overlap_row(j_phases, amp)
    for i in range(j_phases):
        g[i] = np.roll(row, i)
    w, v = np.linalg.eigh(g)
    ghalf = (v * _sqrt_spectrum(w)) @ v.conj().T
    p = np.abs(ghalf) ** 2
    return p / p.sum(axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# heterodyne PSK reception
# ---------------------------------------------------------------------------

def heterodyne_psk_error(j_phases: int, amp: float,
                         convention: str = "literal",
                         sigma: float = SIGMA_HETERODYNE) -> float:
    """Per-mode heterodyne error for J-ary PSK, 1 - erf(Delta / (2*sigma)).

    convention "literal" uses Delta = |alpha| * sqrt(1 - cos(2*pi/J));
    "euclidean" substitutes the geometric chord |alpha| * sqrt(2*(1 - cos)),
    a factor sqrt(2) apart. Both are exposed because the two differ.
    """
    if j_phases < 2:
        raise ValueError("need J >= 2")
    delta = 2 * pi / j_phases
    if convention == "literal":
        gap = amp * sqrt(1.0 - np.cos(delta))
    elif convention == "euclidean":
        gap = amp * sqrt(2.0 * (1.0 - np.cos(delta)))
    else:
        raise ValueError(f"unknown distance convention {convention!r}")
    return float(1.0 - erf(gap / (2.0 * sigma)))


def heterodyne_psk_success_mc(j_phases: int, amp: float, trials: int, rng,
                              sigma: float = SIGMA_HETERODYNE) -> float:
    """Monte Carlo nearest-phase (sector) decision success rate.

    This is the sampling counterpart of the literal erf factor; the two agree
    closely once 2*pi/J is small against the phase noise geometry.
    """
    z = amp + sigma * (rng.standard_normal(trials) + 1j * rng.standard_normal(trials))
    return float(np.mean(np.abs(np.angle(z)) < pi / j_phases))


def psk_sector_success(j_phases: int, amp: float,
                       sigma: float = SIGMA_HETERODYNE) -> float:
    """Exact probability that the phase estimate falls in the correct sector."""
    if amp == 0.0:
        return 1.0 / j_phases
    return phase_wedge_prob(-pi / j_phases, pi / j_phases, amp / sigma)


# ---------------------------------------------------------------------------
# POVMs and the mutual-information optimality residual
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Povm:
    """A finite POVM: Hermitian PSD elements summing to the identity."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        if not elems:
            raise ValueError("POVM needs at least one element")
        d = elems[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in elems:
            if e.shape != (d, d):
                raise ValueError("POVM elements must share one dimension")
            if np.max(np.abs(e - e.conj().T)) > 1e-10:
                raise ValueError("POVM element not Hermitian")
            if np.linalg.eigvalsh(e).min() < -NEGATIVE_EIGENVALUE_TOL:
                raise ValueError("POVM element not positive semidefinite")
            total += e
        if np.max(np.abs(total - np.eye(d))) > POVM_COMPLETENESS_TOL:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", elems)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


def projective_povm(vectors) -> Povm:
    """Rank-one projectors onto an orthonormal set of column vectors."""
    return Povm(tuple(np.outer(v, np.conj(v)) for v in vectors))


class ZeroOutcomeError(ArithmeticError):
    """An outcome has zero probability under every input while its POVM
    element is nonzero, so the optimality-condition logarithm diverges."""


def holevo_optimality_residual(states, priors, povm: Povm) -> float:
    """Residual of the necessary condition for measurement-optimal mutual information.

    Builds P(j|i) = Tr rho_i Pi_j and the operators
    F_j = sum_l xi_l rho_l log(P(j|l) / q_j), q_j = sum_k xi_k P(j|k),
    then returns the largest operator norm of Pi_j (F_j - F_i) Pi_i over all
    output pairs. Zero (within tolerance) is necessary at any stationary
    point of the mutual information over POVMs.

    Terms with P(j|l) = 0 are dropped when the sandwiched matrix
    Pi_j rho_l Pi_i vanishes (which positivity guarantees); a nonvanishing
    matrix there raises ZeroOutcomeError.
    """
    rhos = [np.asarray(getattr(r, "matrix", r), dtype=complex) for r in states]
    priors = np.asarray(priors, dtype=float)
    if len(rhos) != len(priors):
        raise ValueError("one prior per state required")
    if abs(priors.sum() - 1.0) > 1e-10:
        raise ValueError("priors must sum to 1")
    d = rhos[0].shape[0]
    for r in rhos:
        if r.shape != (d, d) or povm.dim != d:
            raise ValueError("states and POVM must share one dimension")

    n_out = len(povm)
    p = np.array([[np.trace(r @ e).real for e in povm.elements] for r in rhos])
    p = np.clip(p, 0.0, None)
    q = priors @ p
    for j in range(n_out):
        if q[j] <= 0 and np.max(np.abs(povm.elements[j])) > 1e-12:
            raise ZeroOutcomeError(f"outcome {j} has zero probability for every input")

    worst = 0.0
    for j in range(n_out):
        for i in range(n_out):
            acc = np.zeros((d, d), dtype=complex)
            for l, (rho, xi) in enumerate(zip(rhos, priors)):
                sandwich = povm.elements[j] @ rho @ povm.elements[i]
                for col, sign in ((j, 1.0), (i, -1.0)):
                    if p[l, col] <= 0.0:
                        if np.max(np.abs(sandwich)) > 1e-9:
                            raise ZeroOutcomeError(
                                f"P({col}|{l}) = 0 with a nonvanishing projected state")
                        continue
                    acc += sign * xi * np.log(p[l, col] / q[col]) * sandwich
            worst = max(worst, float(np.linalg.norm(acc, 2)))
    return worst
