"""Coherent-state algebra on complex amplitudes and truncated Fock space.

Single-mode states are plain complex numbers (the amplitude alpha, with
|alpha|^2 the mean photon number). Multimode states ("coherent vectors",
one amplitude per mode/slot) are 1-D complex numpy arrays. Everything here
is a pure function; density matrices are small dense Hermitian arrays in
the number basis |0>..|n_max>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_TOL = 1e-10
TRACE_DEFICIT_TOL = 1e-9


def overlap(a: complex, b: complex) -> complex:
    """Inner product <a|b> of two single-mode coherent states.

    Returns exp(-(|a|^2 + |b|^2)/2 + conj(a)*b); modulus is always <= 1.
    """
    a = complex(a)
    b = complex(b)
    if not (np.isfinite(a.real) and np.isfinite(a.imag)
            and np.isfinite(b.real) and np.isfinite(b.imag)):
        raise ValueError("coherent amplitudes must be finite")
    return np.exp(-(abs(a) ** 2 + abs(b) ** 2) / 2 + np.conj(a) * b)


def codeword_overlap(a, b) -> complex:
    """Overlap of two multimode coherent vectors (product of per-mode overlaps)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    ea = np.sum(np.abs(a) ** 2)
    eb = np.sum(np.abs(b) ** 2)
    return complex(np.exp(-(ea + eb) / 2 + np.vdot(a, b)))


def gram_matrix(states) -> np.ndarray:
    """Gram matrix G_ij = <state_i|state_j> for a list of coherent vectors.

    Hermitian positive semidefinite with unit diagonal (states are
    normalized by construction).
    """
    states = [np.atleast_1d(np.asarray(s, dtype=complex)) for s in states]
    if len(states) < 1:
        raise ValueError("need at least one state")
    n = len(states)
    g = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            g[i, j] = codeword_overlap(states[i], states[j])
            g[j, i] = np.conj(g[i, j])
    return g


@dataclass(frozen=True)
class PskConstellation:
    """Phase-shift-keyed ring: j_total points at offset + 2*pi*j/j_total.

    amplitude is the common radius |alpha|; adjacent points are spaced
    exactly 2*pi/j_total apart.
    """

    j_total: int
    amplitude: float
    offset: float = 0.0

    def __post_init__(self):
        if self.j_total < 1:
            raise ValueError("j_total must be >= 1")
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")

    @property
    def phases(self) -> np.ndarray:
        return self.offset + 2 * np.pi * np.arange(self.j_total) / self.j_total

    def point(self, j: int) -> complex:
        if not 0 <= j < self.j_total:
            raise ValueError(f"index {j} outside [0, {self.j_total})")
        return self.amplitude * np.exp(1j * (self.offset + 2 * np.pi * j / self.j_total))

    @property
    def points(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phases)


def default_n_max(amp_squared: float) -> int:
    """Fock truncation: n_max = ceil(|a|^2 + 10*sqrt(|a|^2) + 20).

    Keeps the Poisson tail below 1e-12, well under every test tolerance.
    """
    s = max(float(amp_squared), 0.0)
    return int(np.ceil(s + 10.0 * np.sqrt(s) + 20.0))


def coherent_fock_vector(alpha: complex, n_max: int) -> np.ndarray:
    """Number-basis expansion of |alpha> truncated at n_max (not renormalized)."""
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    if alpha == 0:
        v = np.zeros(n_max + 1, dtype=complex)
        v[0] = 1.0
        return v
    # log-domain to stay stable at large |alpha|^2
    logmod = -abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmod) * np.exp(1j * n * np.angle(alpha))


@dataclass(frozen=True)
class FockDensityMatrix:
    """Truncated number-basis density operator.

    Validated at construction: Hermitian to 1e-12, unit trace to 1e-10,
    eigenvalues >= -1e-10.
    """

    matrix: np.ndarray
    n_max: int = field(default=-1)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        object.__setattr__(self, "matrix", m)
        if self.n_max < 0:
            object.__setattr__(self, "n_max", m.shape[0] - 1)
        elif self.n_max != m.shape[0] - 1:
            raise ValueError("n_max inconsistent with matrix dimension")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValueError("density matrix not Hermitian within 1e-12")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond 1e-10")
        w = np.linalg.eigvalsh(m)
        if w.min() < -EIGENVALUE_TOL:
            raise ValueError(f"negative eigenvalue {w.min()} beyond tolerance")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def pure_density(alpha: complex, n_max: int) -> FockDensityMatrix:
    """Truncated |alpha><alpha|, renormalized to unit trace."""
    v = coherent_fock_vector(alpha, n_max)
    deficit = 1.0 - float(np.vdot(v, v).real)
    if deficit > TRACE_DEFICIT_TOL:
        raise ValueError(
            f"Fock truncation too small: trace deficit {deficit:.3g} > 1e-9 "
            f"(n_max={n_max}, |alpha|^2={abs(alpha)**2:.3g})")
    rho = np.outer(v, v.conj())
    return FockDensityMatrix(rho / np.trace(rho).real, n_max)


def psk_mixture_density(constellation: PskConstellation, indices,
                        n_max: int | None = None) -> FockDensityMatrix:
    """Equal-weight mixture of constellation points over the given index subset."""
    indices = list(indices)
    if not indices:
        raise ValueError("index subset must be non-empty")
    if n_max is None:
        n_max = default_n_max(constellation.amplitude ** 2)
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for j in indices:
        v = coherent_fock_vector(constellation.point(j), n_max)
        rho += np.outer(v, v.conj())
    rho /= len(indices)
    tr = np.trace(rho).real
    if 1.0 - tr > TRACE_DEFICIT_TOL:
        raise ValueError(
            f"Fock truncation too small: trace deficit {1.0 - tr:.3g} > 1e-9")
    return FockDensityMatrix(rho / tr, n_max)


def trace_distance(rho: FockDensityMatrix, sigma: FockDensityMatrix) -> float:
    """(1/2)||rho - sigma||_1 via eigenvalues of the Hermitian difference."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(0.5 * np.sum(np.abs(w)))
