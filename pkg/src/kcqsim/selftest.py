"""Numerical-invariant battery behind the `selftest` CLI subcommand.

Each check returns (name, ok, detail). The battery is a condensed version
of the module invariants; the pytest suite carries the full set.
"""

from __future__ import annotations

from math import pi, sqrt

import numpy as np

from . import coherent, infotheory, keystream, measurements, ppm, transforms, y00


def _check(name, ok, detail=""):
    return {"name": name, "ok": bool(ok), "detail": str(detail)}


def run_selftest(seed: int = 20230) -> list:
    rng = np.random.default_rng(seed)
    checks = []

    # overlap symmetry and Gram positivity on random amplitude sets
    pts = rng.standard_normal((24, 2)) @ np.array([1, 1j])
    sym = max(abs(coherent.overlap(a, b) - np.conj(coherent.overlap(b, a)))
              for a in pts[:6] for b in pts[:6])
    checks.append(_check("overlap-symmetry", sym <= 1e-12, f"max dev {sym:.2e}"))
    sets = [pts[i:i + 6] for i in range(0, 18, 6)]
    gmin = min(np.linalg.eigvalsh(coherent.gram_matrix(list(s))).min() for s in sets)
    checks.append(_check("gram-psd", gmin >= -1e-10, f"min eig {gmin:.2e}"))

    # Fock truncation stability and the pure-state trace-distance identity
    con = coherent.PskConstellation(8, 2.0)
    base = coherent.default_n_max(4.0)
    td1 = coherent.trace_distance(coherent.psk_mixture_density(con, [0, 2], base),
                                  coherent.psk_mixture_density(con, [1, 3], base))
    td2 = coherent.trace_distance(coherent.psk_mixture_density(con, [0, 2], base + 10),
                                  coherent.psk_mixture_density(con, [1, 3], base + 10))
    checks.append(_check("fock-truncation-stability", abs(td1 - td2) < 1e-8,
                         f"delta {abs(td1 - td2):.2e}"))
    a, b = 0.6 + 0.3j, -0.8 + 0.1j
    nmax = coherent.default_n_max(1.0)
    td = coherent.trace_distance(coherent.pure_density(a, nmax),
                                 coherent.pure_density(b, nmax))
    ident = sqrt(1 - abs(coherent.overlap(a, b)) ** 2)
    checks.append(_check("pure-trace-distance-identity", abs(td - ident) <= 1e-9,
                         f"dev {abs(td - ident):.2e}"))

    # LFSR periods and stream accounting
    ok_periods = all(
        keystream.LfsrSpec(L, keystream.MAXIMAL_TAPS[L]).period() == (1 << L) - 1
        for L in (4, 8, 9, 16))
    checks.append(_check("lfsr-maximal-periods", ok_periods))
    key = keystream.SecretKey(8, 0x5A)
    s1 = keystream.RunningKeyStream(key)
    s2 = keystream.RunningKeyStream(key)
    c1, o1 = s1.chunk_array(200, 8, True)
    c2, o2 = s2.chunk_array(200, 8, True)
    checks.append(_check("keystream-determinism",
                         np.array_equal(c1, c2) and np.array_equal(o1, o2)))
    checks.append(_check("chunk-range", c1.max() < 8 and c1.min() >= 0))
    checks.append(_check("stream-accounting", s1.bits_consumed == 200 * (3 + 1),
                         f"consumed {s1.bits_consumed}"))

    # SRM identities
    dev = max(abs(measurements.srm_symmetric_psk(2, sqrt(a2))[0]
                  - measurements.helstrom_binary_pure(sqrt(a2), -sqrt(a2)))
              for a2 in (0.25, 1.0, 4.0))
    checks.append(_check("srm-binary-helstrom", dev <= 1e-12, f"max dev {dev:.2e}"))
    worst = 0.0
    for j in (2, 4, 8):
        for a2 in (0.5, 2.0):
            states = [np.array([sqrt(a2) * np.exp(2j * pi * k / j)]) for k in range(j)]
            e_gen, _ = measurements.srm_general(states)
            e_psk, _ = measurements.srm_symmetric_psk(j, sqrt(a2))
            worst = max(worst, abs(e_gen - e_psk))
    checks.append(_check("srm-gram-vs-dft", worst <= 1e-9, f"max dev {worst:.2e}"))
    errs_j = [measurements.srm_symmetric_psk(j, 1.0)[0] for j in (2, 4, 8, 16)]
    errs_a = [measurements.srm_symmetric_psk(8, sqrt(a2))[0] for a2 in (0.5, 1, 2, 4)]
    checks.append(_check("srm-monotonicity",
                         all(np.diff(errs_j) >= -1e-12) and all(np.diff(errs_a) <= 1e-12)))

    # Holevo residual on a known-optimal configuration
    eye = np.eye(3)
    povm = measurements.projective_povm([eye[:, i] for i in range(3)])
    rhos = [np.outer(eye[:, i], eye[:, i]) for i in range(3)]
    res = measurements.holevo_optimality_residual(rhos, np.full(3, 1 / 3), povm)
    checks.append(_check("holevo-residual-optimal", res <= 1e-10, f"residual {res:.2e}"))

    # Y-00 mapping invariants
    ok_alt = True
    ok_rt = True
    for m in (1, 2, 8, 64, 256):
        cfg = y00.Y00Config(m, 1.0)
        seen = {}
        for j in range(m):
            i0, i1 = y00.basis_indices(j, m)
            ok_alt &= (i0 % 2 == 0) and (i1 % 2 == 1)
            seen[i0] = seen[i1] = j
        ok_alt &= len(seen) == 2 * m
        for j in (0, m - 1):
            for bit in (0, 1):
                for osk in (0, 1):
                    slot = y00.encrypt_slot(bit, j, osk, cfg)
                    ok_rt &= y00.decrypt_slot_exact(slot.phase_index, j, osk, cfg) == bit
                    ok_alt &= y00.data_bit_of_index(slot.phase_index) == (bit ^ osk)
    checks.append(_check("y00-alternation-partition", ok_alt))
    checks.append(_check("y00-roundtrip-exact", ok_rt))

    # OSK equalization (matrix identity) and masking monotonicity
    cfg8 = y00.Y00Config(8, 1.0, osk=True)
    rho0, rho1 = y00.data_mixtures(cfg8)
    gap = np.max(np.abs(rho0.matrix - rho1.matrix))
    checks.append(_check("osk-equalization", gap <= 1e-12, f"entrywise gap {gap:.2e}"))
    errs = [y00.eve_binary_mixed_error(y00.Y00Config(m, 1.0)) for m in (2, 4, 8, 16)]
    checks.append(_check("masking-monotone", all(np.diff(errs) >= -1e-12), errs))

    # advantage creation on the tested grid
    ok_adv = True
    for m in (8, 16, 32):
        for a2 in (1.0, 2.0, 4.0):
            c = y00.Y00Config(m, a2)
            ok_adv &= y00.eve_binary_mixed_error(c) >= 10 * y00.bob_analytic_ber(c)
    checks.append(_check("advantage-creation", ok_adv))

    # keyed transforms: energy conservation, inversion, reproducibility
    fam = transforms.TransformFamily(6, 4, seed=7)
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    u = fam.member(2)
    out = transforms.apply_transform(u, v)
    e_dev = abs(np.sum(np.abs(out) ** 2) - np.sum(np.abs(v) ** 2)) / np.sum(np.abs(v) ** 2)
    back = transforms.apply_transform(transforms.inverse_transform(u), out)
    checks.append(_check("transform-energy", e_dev <= 1e-10, f"rel dev {e_dev:.2e}"))
    checks.append(_check("transform-roundtrip", np.max(np.abs(back - v)) <= 1e-12))
    again = transforms.TransformFamily(6, 4, seed=7).member(2)
    checks.append(_check("transform-reproducible",
                         np.array_equal(u.matrix, again.matrix)))

    # block ciphers
    fcfg = ppm.FppmConfig(4, 8, 4.0)
    comp = abs(ppm.eve_fppm_srm_error(fcfg)
               - (1 - (1 - measurements.srm_symmetric_psk(8, 2.0)[0]) ** 4))
    checks.append(_check("fppm-compositional", comp <= 1e-12, f"dev {comp:.2e}"))
    bounds = [ppm.eve_cppm_bound(1 << k, 4.0) for k in (4, 8, 16, 24)]
    checks.append(_check("cppm-bound-range",
                         all(0 <= b <= 1 for b in bounds) and all(np.diff(bounds) >= 0),
                         bounds))
    trip = ppm.simulate_fppm(keystream.SecretKey(8, 0x3C), fcfg, 64,
                             np.random.default_rng(seed + 1), exact=True)
    checks.append(_check("fppm-roundtrip-exact", trip["symbol_error"] == 0.0))

    # information identities
    chan = rng.random((4, 5))
    chan /= chan.sum(axis=1, keepdims=True)
    px = rng.random(4)
    px /= px.sum()
    lhs = infotheory.mutual_information(chan, px)  # raises if asymmetric
    checks.append(_check("mi-chain-identity", lhs >= -1e-12))
    rows = y00.eve_bit_channel(y00.Y00Config(4, 1.0, osk=True), bins=32)
    h = infotheory.conditional_entropy(rows, np.array([0.5, 0.5]))
    checks.append(_check("osk-channel-equivocation", abs(h - 1.0) <= 1e-12,
                         f"H(X|Y) = {h}"))
    checks.append(_check("eta-consistency",
                         infotheory.locking_eta(5.0, 5.0) == 1.0))

    # reproducibility of a small Monte Carlo link
    cfg = y00.Y00Config(16, 4.0)
    key16 = keystream.SecretKey(16, 0xBEEF)
    r1 = y00.simulate_y00_link(512, key16, cfg, "heterodyne",
                               np.random.default_rng(99), bob_model="homodyne")
    r2 = y00.simulate_y00_link(512, key16, cfg, "heterodyne",
                               np.random.default_rng(99), bob_model="homodyne")
    checks.append(_check("mc-reproducibility",
                         (r1.bob_ber, r1.eve_bit_error) == (r2.bob_ber, r2.eve_bit_error)))

    return checks
