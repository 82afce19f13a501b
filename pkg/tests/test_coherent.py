"""Coherent-state algebra: overlaps, Gram matrices, Fock mixtures, trace distance."""

import numpy as np
import pytest
from math import exp, pi, sqrt

from kcqsim.coherent import (FockDensityMatrix, PskConstellation, codeword_overlap,
                             coherent_fock_vector, default_n_max, gram_matrix,
                             overlap, psk_mixture_density, pure_density,
                             trace_distance)


def fock_overlap_oracle(a, b, n_max=40):
    """Independent oracle: sum the truncated number-basis expansions."""
    va = coherent_fock_vector(a, n_max)
    vb = coherent_fock_vector(b, n_max)
    return np.vdot(va, vb)


class TestOverlap:
    def test_identity_case(self):
        for a in (0.3 + 0.4j, 1.0, -2.0j):
            assert overlap(a, a) == pytest.approx(1.0, abs=1e-12)

    def test_vacuum_against_unit_photon_state(self):
        assert overlap(0, 1.0) == pytest.approx(exp(-0.5), abs=1e-12)

    def test_antipodal_pair_against_fock_expansion(self):
        a = 1.0
        got = abs(overlap(a, -a))
        assert got == pytest.approx(exp(-2.0), abs=1e-12)
        oracle = abs(fock_overlap_oracle(a, -a, n_max=40))
        assert got == pytest.approx(oracle, abs=1e-12)

    def test_conjugate_symmetry_on_random_pairs(self):
        rng = np.random.default_rng(3)
        pts = rng.standard_normal((10, 2)) @ np.array([1, 1j])
        for a in pts:
            for b in pts:
                assert overlap(a, b) == pytest.approx(np.conj(overlap(b, a)), abs=1e-12)

    def test_modulus_bounded_by_one(self):
        rng = np.random.default_rng(4)
        pts = 2 * rng.standard_normal((20, 2)) @ np.array([1, 1j])
        assert max(abs(overlap(a, b)) for a in pts for b in pts) <= 1 + 1e-12

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            overlap(float("nan"), 1.0)


class TestCodewordOverlap:
    def test_equal_vectors(self):
        v = np.array([0.5, -1.0j, 0.2])
        assert codeword_overlap(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_single_differing_mode(self):
        a = np.array([0.0, 1.0])
        b = np.array([sqrt(2.0), 1.0])
        assert codeword_overlap(a, b) == pytest.approx(exp(-1.0), abs=1e-12)

    def test_ppm_codeword_pair_product_oracle(self):
        # two position codewords with |alpha|^2 = 1 differ in two slots
        s1 = np.array([1.0, 0.0, 0.0, 0.0])
        s2 = np.array([0.0, 1.0, 0.0, 0.0])
        per_mode = np.prod([overlap(x, y) for x, y in zip(s1, s2)])
        assert codeword_overlap(s1, s2) == pytest.approx(per_mode, abs=1e-12)
        assert codeword_overlap(s1, s2) == pytest.approx(exp(-1.0), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            codeword_overlap(np.array([1.0]), np.array([1.0, 2.0]))


class TestGramMatrix:
    def test_single_state(self):
        g = gram_matrix([np.array([0.7j])])
        assert g.shape == (1, 1)
        assert g[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_pair_gives_identity(self):
        a = np.array([sqrt(60.0), 0.0])
        b = np.array([0.0, sqrt(60.0)])
        g = gram_matrix([a, b])
        assert np.max(np.abs(g - np.eye(2))) < 1e-12

    def test_psk_eigenvalues_match_dft_oracle(self):
        j, amp = 4, 1.0
        states = [np.array([amp * np.exp(2j * pi * k / j)]) for k in range(j)]
        g = gram_matrix(states)
        eig = np.sort(np.linalg.eigvalsh(g))
        row = np.array([overlap(states[0][0], states[k][0]) for k in range(j)])
        dft = np.sort(np.fft.fft(row).real)
        assert np.max(np.abs(eig - dft)) < 1e-12

    def test_psd_over_random_sets(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            pts = [rng.standard_normal(2) @ np.array([1, 1j]) for _ in range(6)]
            w = np.linalg.eigvalsh(gram_matrix([np.array([p]) for p in pts]))
            assert w.min() >= -1e-10


class TestPskMixtureDensity:
    def test_single_index_is_pure(self):
        con = PskConstellation(8, 1.0)
        rho = psk_mixture_density(con, [3])
        assert rho.purity() == pytest.approx(1.0, abs=1e-10)

    def test_identical_subsets_have_zero_distance(self):
        con = PskConstellation(8, 1.0)
        rho = psk_mixture_density(con, range(8))
        sig = psk_mixture_density(con, range(8))
        assert trace_distance(rho, sig) <= 1e-10

    def test_parity_mixture_distance_decreases_with_m(self):
        prev = None
        for m in (4, 8, 16):
            con = PskConstellation(2 * m, 1.0)
            rho = psk_mixture_density(con, range(0, 2 * m, 2), n_max=40)
            sig = psk_mixture_density(con, range(1, 2 * m, 2), n_max=40)
            td = trace_distance(rho, sig)
            if prev is not None:
                assert td < prev
            prev = td

    def test_truncation_too_small_raises(self):
        con = PskConstellation(4, 3.0)  # |alpha|^2 = 9 needs n_max ~ 59
        with pytest.raises(ValueError, match="truncation"):
            psk_mixture_density(con, [0], n_max=10)

    def test_empty_subset_rejected(self):
        with pytest.raises(ValueError):
            psk_mixture_density(PskConstellation(4, 1.0), [])


class TestTraceDistance:
    def test_equal_states(self):
        rho = pure_density(0.5, 30)
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        m0 = np.zeros((5, 5), complex)
        m0[0, 0] = 1.0
        m1 = np.zeros((5, 5), complex)
        m1[1, 1] = 1.0
        td = trace_distance(FockDensityMatrix(m0), FockDensityMatrix(m1))
        assert td == pytest.approx(1.0, abs=1e-10)

    def test_vacuum_vs_coherent_pure_state_identity(self):
        n_max = default_n_max(1.0)
        td = trace_distance(pure_density(0.0, n_max), pure_density(1.0, n_max))
        assert td == pytest.approx(sqrt(1 - exp(-1.0)), abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            trace_distance(pure_density(0.0, 10), pure_density(0.0, 12))

    def test_truncation_consistency(self):
        # raising n_max by 10 moves the reported distance by < 1e-8 at canvas amps
        for amp2 in (1.0, 4.0):
            base = default_n_max(amp2)
            con = PskConstellation(8, sqrt(amp2))
            t1 = trace_distance(psk_mixture_density(con, [0, 2], base),
                                psk_mixture_density(con, [1, 3], base))
            t2 = trace_distance(psk_mixture_density(con, [0, 2], base + 10),
                                psk_mixture_density(con, [1, 3], base + 10))
            assert abs(t1 - t2) < 1e-8


class TestFockDensityMatrixValidation:
    def test_rejects_non_hermitian(self):
        m = np.eye(4, dtype=complex)
        m[0, 1] = 0.5
        with pytest.raises(ValueError, match="Hermitian"):
            FockDensityMatrix(m)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            FockDensityMatrix(np.eye(4, dtype=complex))

    def test_rejects_negative_eigenvalue(self):
        m = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError, match="eigenvalue"):
            FockDensityMatrix(m)


def test_constellation_invariants():
    con = PskConstellation(16, 2.0, offset=0.1)
    phases = con.phases
    assert np.all(np.diff(phases) > 0)
    assert phases[0] >= 0.1 and phases[-1] < 0.1 + 2 * pi
    assert np.allclose(np.diff(phases), 2 * pi / 16)
    with pytest.raises(ValueError):
        con.point(16)
