"""Keyed amplitude-space transformations for coherent-vector encryption.

A transform is an M x M complex matrix acting on the vector of per-mode
amplitudes. Cipher configurations only admit unitary (energy-conserving,
passive) members: a non-unitary matrix does not map product coherent states
to product coherent states with a physical device of this class. General
matrices remain constructible for analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class AmplitudeTransform:
    """Matrix acting on amplitude vectors; kind is "unitary" or "general"."""

    matrix: np.ndarray
    kind: str = "unitary"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("transform matrix must be square")
        object.__setattr__(self, "matrix", m)
        if self.kind not in ("unitary", "general"):
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if self.kind == "unitary":
            dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
            if dev > UNITARITY_TOL:
                raise ValueError(f"unitarity deviation {dev:.3g} beyond 1e-10")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.matrix))


def apply_transform(transform: AmplitudeTransform, vector) -> np.ndarray:
    """Matrix-vector product; unitary transforms conserve total energy."""
    v = np.asarray(vector, dtype=complex)
    if v.shape != (transform.dim,):
        raise ValueError(f"dimension mismatch: vector {v.shape}, matrix {transform.dim}")
    return transform.matrix @ v


def inverse_transform(transform: AmplitudeTransform) -> AmplitudeTransform:
    """Inverse transform; the conjugate transpose when unitary."""
    if transform.kind == "unitary":
        return AmplitudeTransform(transform.matrix.conj().T, "unitary")
    try:
        inv = np.linalg.inv(transform.matrix)
    except np.linalg.LinAlgError as exc:
        raise ValueError("transform is singular") from exc
    return AmplitudeTransform(inv, "general")


def phase_randomization_transform(phases) -> AmplitudeTransform:
    """Diagonal unitary diag(exp(i*theta_m)) applying per-mode phase offsets.

    The all-unit-modulus *full* matrix sometimes described as "phase
    randomization" is not unitary in general; the diagonal realization is
    the energy-conserving member of that family.
    """
    phases = np.asarray(phases, dtype=float)
    return AmplitudeTransform(np.diag(np.exp(1j * phases)), "unitary")


def dft_transform(dim: int) -> AmplitudeTransform:
    """Unitary discrete-Fourier matrix; spreads one occupied slot over all."""
    k = np.arange(dim)
    m = np.exp(2j * np.pi * np.outer(k, k) / dim) / np.sqrt(dim)
    return AmplitudeTransform(m, "unitary")


def haar_unitary(dim: int, rng) -> AmplitudeTransform:
    """Haar-distributed unitary from QR of a complex Ginibre matrix.

    The R diagonal phases are divided out so the distribution is exactly
    Haar rather than QR-convention dependent.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return AmplitudeTransform(q, "unitary")


class TransformFamily:
    """Keyed, indexable set of unitaries regenerated from (seed, index).

    Members are not persisted; member(i) is bit-reproducible across runs and
    machines with the same numpy generator stream.
    """

    def __init__(self, dim: int, count: int, seed: int = 0, kind: str = "haar",
                 j_phases: int | None = None):
        if count < 1:
            raise ValueError("count must be >= 1")
        if kind not in ("haar", "dft", "phase"):
            raise ValueError(f"unknown family kind {kind!r}")
        if kind == "phase" and not j_phases:
            raise ValueError("phase family needs j_phases")
        self.dim = dim
        self.count = count
        self.seed = seed
        self.kind = kind
        self.j_phases = j_phases

    def member(self, index: int) -> AmplitudeTransform:
        if not 0 <= index < self.count:
            raise KeyError(f"chunk {index} selects no registered transform "
                           f"(family count {self.count})")
        if self.kind == "dft":
            return dft_transform(self.dim)
        rng = np.random.default_rng([self.seed, index])
        if self.kind == "haar":
            return haar_unitary(self.dim, rng)
        offsets = rng.integers(0, self.j_phases, self.dim)
        return phase_randomization_transform(2 * np.pi * offsets / self.j_phases)

    @property
    def selector_bits(self) -> int:
        c = self.count.bit_length() - 1
        if (1 << c) != self.count:
            raise ValueError("family count is not a power of two")
        return c


def family_from_spec(spec: dict, dim: int) -> TransformFamily:
    """Build a family from its config form: {kind: "haar", count, seed},
    {kind: "dft"} or {kind: "phase", j_phases, count, seed}."""
    kind = spec.get("kind", "haar")
    if kind == "dft":
        return TransformFamily(dim, 1, kind="dft")
    count = int(spec.get("count", 16))
    seed = int(spec.get("seed", 0))
    if kind == "phase":
        return TransformFamily(dim, count, seed, kind="phase",
                               j_phases=int(spec.get("j_phases", 4)))
    return TransformFamily(dim, count, seed, kind="haar")
