"""Keyed amplitude transforms: unitarity, inversion, Haar sampling."""

import numpy as np
import pytest

from kcqsim.coherent import codeword_overlap
from kcqsim.ppm import ppm_encode
from kcqsim.transforms import (AmplitudeTransform, TransformFamily, apply_transform,
                               dft_transform, haar_unitary, inverse_transform,
                               phase_randomization_transform)


class TestApplyTransform:
    def test_identity(self):
        t = AmplitudeTransform(np.eye(4))
        v = np.array([1.0, 2.0j, -0.5, 0.1])
        assert np.array_equal(apply_transform(t, v), v)

    def test_dft_spreads_ppm_codeword_uniformly(self):
        cw = ppm_encode(1, 4, 2.0)
        out = apply_transform(dft_transform(4), cw.vector)
        assert np.allclose(np.abs(out) ** 2, 4.0 / 4, atol=1e-12)

    def test_unitary_roundtrip(self):
        rng = np.random.default_rng(5)
        u = haar_unitary(8, rng)
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        back = apply_transform(inverse_transform(u), apply_transform(u, v))
        assert np.max(np.abs(back - v)) <= 1e-12

    def test_energy_conserved(self):
        rng = np.random.default_rng(6)
        u = haar_unitary(5, rng)
        v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        e_in = np.sum(np.abs(v) ** 2)
        e_out = np.sum(np.abs(apply_transform(u, v)) ** 2)
        assert abs(e_out - e_in) / e_in <= 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_transform(dft_transform(4), np.ones(3, dtype=complex))


class TestInverse:
    def test_unitary_inverse_is_dagger(self):
        u = haar_unitary(6, np.random.default_rng(7))
        inv = inverse_transform(u)
        assert np.max(np.abs(inv.matrix - u.matrix.conj().T)) <= 1e-12

    def test_identity_inverse(self):
        t = AmplitudeTransform(np.eye(3))
        assert np.array_equal(inverse_transform(t).matrix, np.eye(3))

    def test_inverse_residual(self):
        u = haar_unitary(8, np.random.default_rng(8))
        res = np.max(np.abs(inverse_transform(u).matrix @ u.matrix - np.eye(8)))
        assert res <= 1e-11

    def test_singular_general_matrix_rejected(self):
        t = AmplitudeTransform(np.zeros((3, 3)), kind="general")
        with pytest.raises(ValueError, match="singular"):
            inverse_transform(t)


class TestPhaseRandomization:
    def test_zero_phases_give_identity(self):
        t = phase_randomization_transform(np.zeros(5))
        assert np.allclose(t.matrix, np.eye(5))

    def test_per_mode_energy_preserved_individually(self):
        rng = np.random.default_rng(9)
        phases = rng.uniform(0, 2 * np.pi, 6)
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        out = apply_transform(phase_randomization_transform(phases), v)
        assert np.allclose(np.abs(out), np.abs(v), atol=1e-12)

    def test_quantized_offsets_match_fppm_convention(self):
        # J = 4 keystream offsets reproduce per-mode multipliers exp(2*pi*i*c/4)
        chunks = np.array([0, 1, 2, 3])
        t = phase_randomization_transform(2 * np.pi * chunks / 4)
        v = np.ones(4, dtype=complex)
        out = apply_transform(t, v)
        assert np.allclose(out, np.exp(2j * np.pi * chunks / 4), atol=1e-12)


class TestHaarFamily:
    def test_scalar_member_is_unit_modulus(self):
        fam = TransformFamily(1, 1, seed=3)
        assert abs(abs(fam.member(0).matrix[0, 0]) - 1.0) <= 1e-12

    def test_every_member_unitary(self):
        fam = TransformFamily(5, 8, seed=4)
        for i in range(8):
            m = fam.member(i).matrix
            assert np.max(np.abs(m.conj().T @ m - np.eye(5))) <= 1e-10

    def test_products_and_inverses_stay_unitary(self):
        fam = TransformFamily(4, 4, seed=5)
        prod = fam.member(0).matrix @ fam.member(1).matrix
        AmplitudeTransform(prod, "unitary")  # validates closure
        AmplitudeTransform(np.linalg.inv(fam.member(2).matrix), "unitary")

    def test_column_isotropy_statistic(self):
        # mean |U_00|^2 over 10^4 draws at M = 4 is 1/4 within 3 sigma
        rng = np.random.default_rng(10)
        vals = np.array([abs(haar_unitary(4, rng).matrix[0, 0]) ** 2
                         for _ in range(10 ** 4)])
        var = 3.0 / (16 * 5)  # Beta(1, 3) variance of a Haar column weight
        assert abs(vals.mean() - 0.25) <= 3 * np.sqrt(var / 10 ** 4)

    def test_bit_reproducible_across_instances(self):
        a = TransformFamily(6, 4, seed=11).member(3).matrix
        b = TransformFamily(6, 4, seed=11).member(3).matrix
        assert np.array_equal(a, b)

    def test_unregistered_chunk_rejected(self):
        with pytest.raises(KeyError):
            TransformFamily(4, 2, seed=1).member(2)


class TestValidation:
    def test_non_unitary_rejected_for_unitary_kind(self):
        with pytest.raises(ValueError, match="unitarity"):
            AmplitudeTransform(np.ones((2, 2)), kind="unitary")

    def test_general_kind_accepts_any_invertible(self):
        t = AmplitudeTransform(np.array([[2.0, 0], [0, 1.0]]), kind="general")
        assert t.condition_number() == pytest.approx(2.0, rel=1e-12)

    def test_overlap_invariant_under_unitary(self):
        rng = np.random.default_rng(12)
        u = haar_unitary(5, rng)
        for _ in range(5):
            a = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            b = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            before = codeword_overlap(a, b)
            after = codeword_overlap(apply_transform(u, a), apply_transform(u, b))
            assert abs(before - after) <= 1e-10
