"""The Y-00 (alpha-eta) quantum stream cipher and its attack models.

Constellation convention (fixed across the package): 2M coherent states on
the ring, index k in [0, 2M) at phase pi*k/M, with data bit = k mod 2, so
adjacent points always carry opposite bits. Basis j pairs one even-index
point with one odd-index point:

    M odd  (M = 1):  {j, j + M}                      exactly antipodal
    M even:          {2j', 2j' + M + 1}-style pairs  antipodal up to one
                                                     constellation step

The even-M pairing is forced: exact antipodality, strict bit alternation
and power-of-two M cannot hold simultaneously, and alternation is what the
security analysis rests on. The decryption rotation for basis j is the
phase of its bit-0 point, so the inverse map stays a pure rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .coherent import PskConstellation, psk_mixture_density, trace_distance
from .keystream import LfsrSpec, RunningKeyStream, SecretKey
from .measurements import (SIGMA_HETERODYNE, SIGMA_KEYED, helstrom_binary_mixed,
                           helstrom_binary_pure, phase_bin_probs, srm_psk_channel)

EVE_MODELS = ("heterodyne", "srm", "helstrom-mixed", "adjacent", "exact")
BOB_MODELS = ("exact", "homodyne")


@dataclass(frozen=True)
class Y00Config:
    """Stream-cipher instance: M bases over a 2M-point constellation."""

    m_bases: int
    amp_squared: float
    osk: bool = False
    lfsr: LfsrSpec | None = None
    bob_loss: float = 0.0

    def __post_init__(self):
        m = self.m_bases
        if m < 1 or (m & (m - 1)) != 0:
            raise ValueError(f"m_bases={m} must be a power of two")
        if self.amp_squared < 0:
            raise ValueError("amp_squared must be >= 0")
        if not 0.0 <= self.bob_loss < 1.0:
            raise ValueError("bob_loss must lie in [0, 1)")

    @property
    def amp(self) -> float:
        return sqrt(self.amp_squared)

    @property
    def n_points(self) -> int:
        return 2 * self.m_bases

    def constellation(self) -> PskConstellation:
        return PskConstellation(self.n_points, self.amp)


@dataclass(frozen=True)
class CipherSlot:
    """One transmitted slot: constellation index and its amplitude."""

    phase_index: int
    amplitude: complex


def basis_indices(chunk: int, m_bases: int):
    """(bit0_index, bit1_index) of basis `chunk` on the 2M-point ring."""
    m = m_bases
    if not 0 <= chunk < m:
        raise ValueError(f"chunk {chunk} outside [0, {m})")
    if m % 2 == 1:
        a, b = chunk, chunk + m
    elif chunk % 2 == 0:
        a, b = chunk, (chunk + m + 1) % (2 * m)
    else:
        a, b = (chunk + m - 1) % (2 * m), chunk
    return (a, b) if a % 2 == 0 else (b, a)


def data_bit_of_index(phase_index: int) -> int:
    """Alternating data assignment: even indices carry 0, odd carry 1."""
    return phase_index & 1


def point_amplitude(phase_index: int, cfg: Y00Config) -> complex:
    return cfg.amp * np.exp(1j * pi * phase_index / cfg.m_bases)


def encrypt_slot(bit: int, chunk: int, osk_bit: int, cfg: Y00Config) -> CipherSlot:
    """Map (data bit, running-key chunk, OSK bit) to a constellation point."""
    if bit not in (0, 1) or osk_bit not in (0, 1):
        raise ValueError("bit and osk_bit must be 0 or 1")
    i0, i1 = basis_indices(chunk, cfg.m_bases)
    index = i1 if (bit ^ osk_bit) else i0
    return CipherSlot(index, point_amplitude(index, cfg))


def decrypt_slot_exact(phase_index: int, chunk: int, osk_bit: int, cfg: Y00Config) -> int:
    """Noise-free inverse map: exact for every slot of the shared-key receiver."""
    i0, i1 = basis_indices(chunk, cfg.m_bases)
    if phase_index == i0:
        return 0 ^ osk_bit
    if phase_index == i1:
        return 1 ^ osk_bit
    # foreign point (wrong key): decide by rotated real part, noiseless
    rotated = np.exp(-1j * pi * i0 / cfg.m_bases) * np.exp(1j * pi * phase_index / cfg.m_bases)
    return (1 if rotated.real < 0 else 0) ^ osk_bit


def decrypt_slot_sample(z: complex, chunk: int, osk_bit: int, cfg: Y00Config) -> int:
    """Keyed decision on a measured amplitude: rotate by the basis phase,
    take the sign of the real part, undo OSK."""
    i0, _ = basis_indices(chunk, cfg.m_bases)
    rotated = complex(z) * np.exp(-1j * pi * i0 / cfg.m_bases)
    return (1 if rotated.real < 0 else 0) ^ osk_bit


def bob_analytic_ber(cfg: Y00Config) -> float:
    """Minimum-error bound for the keyed binary decision (worst basis)."""
    worst = 0.0
    for chunk in (0, 1 if cfg.m_bases > 1 else 0):
        i0, i1 = basis_indices(chunk, cfg.m_bases)
        err = helstrom_binary_pure(point_amplitude(i0, cfg), point_amplitude(i1, cfg))
        worst = max(worst, err)
    return worst


# ---------------------------------------------------------------------------
# attack models
# ---------------------------------------------------------------------------

def eve_adjacent_pair_error(cfg: Y00Config) -> float:
    """Helstrom error between phase neighbors theta and theta + pi/M."""
    a = cfg.amp + 0j
    b = cfg.amp * np.exp(1j * pi / cfg.m_bases)
    return helstrom_binary_pure(a, b)


def data_mixtures(cfg: Y00Config, n_max: int | None = None):
    """Eve's data-conditioned mixtures.

    Without OSK, bit b is carried by the M parity-b constellation points.
    With OSK the keyed inversion spreads each bit over both points of every
    basis, so both conditioned states are the full 2M-point mixture and
    coincide as matrices.
    """
    con = cfg.constellation()
    if cfg.osk:
        rho0 = psk_mixture_density(con, range(cfg.n_points), n_max)
        rho1 = psk_mixture_density(con, range(cfg.n_points), n_max)
    else:
        rho0 = psk_mixture_density(con, range(0, cfg.n_points, 2), n_max)
        rho1 = psk_mixture_density(con, range(1, cfg.n_points, 2), n_max)
    return rho0, rho1


def eve_binary_mixed_error(cfg: Y00Config, n_max: int | None = None) -> float:
    """Optimal binary error on the data-conditioned mixed states.

    With OSK every slot averages both points of its basis, the two mixtures
    coincide as matrices, and the error is exactly 1/2.
    """
    if cfg.osk:
        rho0, rho1 = data_mixtures(cfg, n_max)
        gap = np.max(np.abs(rho0.matrix - rho1.matrix))
        if gap > 1e-12:
            raise AssertionError(f"OSK mixtures differ by {gap:.3g}")
        return 0.5
    rho0, rho1 = data_mixtures(cfg, n_max)
    return helstrom_binary_mixed(rho0, rho1)


def osk_mixture_trace_distance(cfg: Y00Config, n_max: int | None = None) -> float:
    rho0, rho1 = data_mixtures(cfg, n_max)
    return trace_distance(rho0, rho1)


def eve_bit_channel(cfg: Y00Config, bins: int = 64) -> np.ndarray:
    """Per-slot marginal channel data bit -> binned heterodyne phase.

    Marginalizes the basis chunk (uniform over M) and, when enabled, the OSK
    bit; this is the idealized per-slot channel of an eavesdropper without
    the key. With OSK the two rows are identical by construction.
    """
    kappa = cfg.amp / SIGMA_HETERODYNE
    point_rows = np.array([phase_bin_probs(kappa, bins, pi * k / cfg.m_bases)
                           for k in range(cfg.n_points)])
    rows = np.zeros((2, bins))
    for x in (0, 1):
        for chunk in range(cfg.m_bases):
            i0, i1 = basis_indices(chunk, cfg.m_bases)
            if cfg.osk:
                rows[x] += 0.5 * (point_rows[i0] + point_rows[i1])
            else:
                rows[x] += point_rows[i1 if x else i0]
    rows /= cfg.m_bases
    return rows


# ---------------------------------------------------------------------------
# link simulation
# ---------------------------------------------------------------------------

@dataclass
class LinkResult:
    """Outcome of one simulated Y-00 run (a SecurityReport fragment)."""

    n_slots: int
    bob_ber: float
    eve_symbol_error: float | None
    eve_bit_error: float
    eve_model: str
    bob_model: str
    analytic_bob_ber: float
    h_yb_given_kx: float | None = None
    h_ye_given_kx: float | None = None
    bob_records: np.ndarray | None = field(default=None, repr=False)
    eve_records: np.ndarray | None = field(default=None, repr=False)
    slot_table: dict | None = field(default=None, repr=False)


def _encrypt_indices(bits, chunks, osks, cfg: Y00Config) -> np.ndarray:
    m = cfg.m_bases
    table0 = np.empty(m, dtype=np.int64)
    table1 = np.empty(m, dtype=np.int64)
    for j in range(m):
        table0[j], table1[j] = basis_indices(j, m)
    eff = (np.asarray(bits) ^ np.asarray(osks)).astype(bool)
    return np.where(eff, table1[chunks], table0[chunks])


def _nearest_index(z: np.ndarray, cfg: Y00Config) -> np.ndarray:
    ang = np.mod(np.angle(z), 2 * pi)
    return np.rint(ang / (pi / cfg.m_bases)).astype(np.int64) % cfg.n_points


def simulate_y00_link(bits, key: SecretKey, cfg: Y00Config, eve_model: str,
                      rng, bob_model: str = "exact",
                      entropy_repeats: int = 0, bins: int = 64,
                      keep_slots: bool = False,
                      decode_key: SecretKey | None = None) -> LinkResult:
    """Run the full pipeline: keystream -> encrypt -> channel -> Bob / Eve.

    bits may be an array of 0/1 or an integer count (then drawn uniformly
    from rng). Eve taps the channel losslessly; Bob optionally sees line
    loss. With entropy_repeats > 0 the same (key, plaintext) is re-measured
    that many times and per-slot plug-in entropies of both records are
    estimated (Bob's record is his decoded bit, Eve's her binned phase).
    decode_key (default: the encryption key) models a receiver holding the
    wrong secret.
    """
    if eve_model not in EVE_MODELS:
        raise ValueError(f"eve_model must be one of {EVE_MODELS}")
    if bob_model not in BOB_MODELS:
        raise ValueError(f"bob_model must be one of {BOB_MODELS}")
    if isinstance(bits, (int, np.integer)):
        bits = rng.integers(0, 2, int(bits))
    bits = np.asarray(bits, dtype=np.int64)
    n = bits.size

    stream = RunningKeyStream(key, cfg.lfsr)
    chunks, osks = stream.chunk_array(n, cfg.m_bases, cfg.osk)
    indices = _encrypt_indices(bits, chunks, osks, cfg)
    amps = cfg.amp * np.exp(1j * pi * indices / cfg.m_bases)

    key_matches = decode_key is None or decode_key == key
    if key_matches:
        dec_chunks, dec_osks = chunks, osks
    else:
        dec_stream = RunningKeyStream(decode_key, cfg.lfsr)
        dec_chunks, dec_osks = dec_stream.chunk_array(n, cfg.m_bases, cfg.osk)

    def bob_decode(local_rng):
        if bob_model == "exact" and key_matches:
            return bits.copy()
        amp_bob = amps * sqrt(1.0 - cfg.bob_loss)
        if bob_model == "exact":
            z = amp_bob
        else:
            z = amp_bob + SIGMA_KEYED * (local_rng.standard_normal(n)
                                         + 1j * local_rng.standard_normal(n))
        table0 = np.array([basis_indices(j, cfg.m_bases)[0] for j in range(cfg.m_bases)])
        rot = z * np.exp(-1j * pi * table0[dec_chunks] / cfg.m_bases)
        return ((rot.real < 0).astype(np.int64) ^ dec_osks)

    def eve_measure(local_rng):
        """Returns (symbol_guess or None, bit_guess, binned_record)."""
        if eve_model == "exact":
            return indices.copy(), (indices % 2), indices.copy()
        if eve_model == "heterodyne":
            z = amps + SIGMA_HETERODYNE * (local_rng.standard_normal(n)
                                           + 1j * local_rng.standard_normal(n))
            near = _nearest_index(z, cfg)
            binned = (np.mod(np.angle(z), 2 * pi) / (2 * pi) * bins).astype(np.int64) % bins
            return near, near % 2, binned
        if eve_model == "srm":
            chan = srm_psk_channel(cfg.n_points, cfg.amp)
            cdf = np.cumsum(chan, axis=1)
            u = local_rng.random(n)
            out = np.empty(n, dtype=np.int64)
            for k in range(cfg.n_points):
                sel = indices == k
                if np.any(sel):
                    out[sel] = np.searchsorted(cdf[k], u[sel])
            out = np.clip(out, 0, cfg.n_points - 1)
            return out, out % 2, out
        return None, None, None  # analytic-only models

    bob_bits = bob_decode(rng)
    bob_ber = float(np.mean(bob_bits != bits))

    if eve_model == "helstrom-mixed":
        eve_bit_error = eve_binary_mixed_error(cfg)
        eve_symbol_error = None
        eve_records = None
    elif eve_model == "adjacent":
        eve_bit_error = eve_adjacent_pair_error(cfg)
        eve_symbol_error = None
        eve_records = None
    else:
        symbols, eve_bits, eve_records = eve_measure(rng)
        eve_symbol_error = float(np.mean(symbols != indices))
        eve_bit_error = float(np.mean(eve_bits != bits))

    result = LinkResult(
        n_slots=n, bob_ber=bob_ber, eve_symbol_error=eve_symbol_error,
        eve_bit_error=eve_bit_error, eve_model=eve_model, bob_model=bob_model,
        analytic_bob_ber=bob_analytic_ber(cfg),
    )

    if keep_slots:
        result.slot_table = {
            "bit": bits, "chunk": chunks, "osk_bit": osks,
            "phase_index": indices, "bob_bit": bob_bits,
            "eve_record": eve_records if eve_records is not None else np.full(n, -1),
        }

    if entropy_repeats > 0:
        bob_rec = np.empty((entropy_repeats, n), dtype=np.int64)
        eve_rec = np.empty((entropy_repeats, n), dtype=np.int64)
        for r in range(entropy_repeats):
            bob_rec[r] = bob_decode(rng)
            if eve_model in ("helstrom-mixed", "adjacent"):
                # sampling record requires a sampling model; use heterodyne bins
                z = amps + SIGMA_HETERODYNE * (rng.standard_normal(n)
                                               + 1j * rng.standard_normal(n))
                eve_rec[r] = (np.mod(np.angle(z), 2 * pi) / (2 * pi) * bins).astype(np.int64)
            else:
                eve_rec[r] = eve_measure(rng)[2]
        result.bob_records = bob_rec
        result.eve_records = eve_rec
        result.h_yb_given_kx = _mean_record_entropy(bob_rec)
        result.h_ye_given_kx = _mean_record_entropy(eve_rec)
    return result


def _mean_record_entropy(records: np.ndarray) -> float:
    """Per-slot plug-in entropy of repeated records at fixed (key, plaintext),
    averaged over slots; 0 exactly when every repeat agrees."""
    reps, n = records.shape
    total = 0.0
    for t in range(n):
        _, counts = np.unique(records[:, t], return_counts=True)
        p = counts / reps
        total += float(-(p * np.log2(p)).sum())
    return total / n


# ---------------------------------------------------------------------------
# brute-force key recovery
# ---------------------------------------------------------------------------

OBSERVATION_MODELS = ("exact-index", "phase-bins", "bit-decision")


def _parity_guess_probs(cfg: Y00Config) -> np.ndarray:
    """q[s, g] = P(nearest-index parity = g | sent point of parity s).

    Rotating by two constellation steps maps even points to even points and
    preserves the noise law, so the table only depends on the sent parity.
    """
    from .measurements import phase_error_cdf_table
    if cfg.amp == 0.0:
        return np.full((2, 2), 0.5)
    kappa = cfg.amp / SIGMA_HETERODYNE
    th, cdf = phase_error_cdf_table(kappa)
    n_pts = cfg.n_points
    step = pi / cfg.m_bases
    edges = (np.arange(n_pts + 1) - 0.5) * step  # sector edges, wrapped below
    rel = np.mod(edges + pi, 2 * pi) - pi
    vals = np.interp(rel, th, cdf)
    sector = np.diff(vals)
    sector[sector < 0] += 1.0
    q = np.zeros((2, 2))
    for k in range(n_pts):
        q[0, k % 2] += sector[k]
    q[0] /= q[0].sum()
    q[1] = q[0][::-1]  # odd sender: guess parities swap
    return q


def y00_eve_record(bits, key: SecretKey, cfg: Y00Config, rng,
                   observation_model: str = "phase-bins", bins: int = 64) -> np.ndarray:
    """Eve's per-slot observation sequence for the key-recovery oracle."""
    if observation_model not in OBSERVATION_MODELS:
        raise ValueError(f"observation_model must be one of {OBSERVATION_MODELS}")
    bits = np.asarray(bits, dtype=np.int64)
    stream = RunningKeyStream(key, cfg.lfsr)
    chunks, osks = stream.chunk_array(bits.size, cfg.m_bases, cfg.osk)
    indices = _encrypt_indices(bits, chunks, osks, cfg)
    if observation_model == "exact-index":
        return indices
    z = cfg.amp * np.exp(1j * pi * indices / cfg.m_bases)
    z = z + SIGMA_HETERODYNE * (rng.standard_normal(bits.size)
                                + 1j * rng.standard_normal(bits.size))
    if observation_model == "phase-bins":
        return (np.mod(np.angle(z), 2 * pi) / (2 * pi) * bins).astype(np.int64) % bins
    return _nearest_index(z, cfg) % 2


def y00_key_posterior(cfg: Y00Config, key_bits: int, observations,
                      plaintext=None, observation_model: str = "phase-bins",
                      bins: int = 64):
    """Exact Bayesian posterior over every 2^key_bits key, slot by slot.

    Known-plaintext attack when plaintext is given, ciphertext-only otherwise
    (uniform per-slot data). Returns the posterior entropy curve in bits;
    feed it to infotheory.unicity_from_curve for the threshold crossing.
    """
    from .infotheory import MAX_KEYSPACE_BITS, posterior_entropy_curve
    from .measurements import phase_bin_probs

    if key_bits > MAX_KEYSPACE_BITS:
        raise ValueError(f"key space 2^{key_bits} too large (limit 2^{MAX_KEYSPACE_BITS})")
    if observation_model not in OBSERVATION_MODELS:
        raise ValueError(f"observation_model must be one of {OBSERVATION_MODELS}")
    obs = np.asarray(observations, dtype=np.int64)
    n = obs.size
    if plaintext is not None:
        plaintext = np.asarray(plaintext, dtype=np.int64)
        if plaintext.size != n:
            raise ValueError("plaintext length must match observations")

    # per-point observation likelihood table
    if observation_model == "phase-bins":
        kappa = cfg.amp / SIGMA_HETERODYNE
        tab = np.array([phase_bin_probs(kappa, bins, pi * k / cfg.m_bases)
                        for k in range(cfg.n_points)])
    elif observation_model == "bit-decision":
        q = _parity_guess_probs(cfg)
        tab = np.array([q[k % 2] for k in range(cfg.n_points)])
    else:
        tab = np.eye(cfg.n_points)

    n_keys = 1 << key_bits
    loglik = np.empty((n_keys, n))
    with np.errstate(divide="ignore"):
        for k in range(n_keys):
            stream = RunningKeyStream(SecretKey(key_bits, k), cfg.lfsr)
            chunks, osks = stream.chunk_array(n, cfg.m_bases, cfg.osk)
            if plaintext is not None:
                idx = _encrypt_indices(plaintext, chunks, osks, cfg)
                lk = tab[idx, obs]
            else:
                i0 = _encrypt_indices(np.zeros(n, np.int64), chunks, osks, cfg)
                i1 = _encrypt_indices(np.ones(n, np.int64), chunks, osks, cfg)
                lk = 0.5 * (tab[i0, obs] + tab[i1, obs])
            loglik[k] = np.log(lk)
    return posterior_entropy_curve(loglik)
