"""kcqsim: a desk-scale laboratory for quantum-noise ciphers.

Implements the Y-00 (alpha-eta) stream cipher, the CPPM and frequency-phase
PPM block ciphers, the detection-theoretic computations behind their keyed
vs keyless receiver separation, and the information-theoretic security
metrics (conditional entropies, unicity distances, data-locking ratios).
"""

from .coherent import (FockDensityMatrix, PskConstellation, codeword_overlap,
                       default_n_max, gram_matrix, overlap, psk_mixture_density,
                       pure_density, trace_distance)
from .infotheory import (binary_entropy, conditional_entropy, entropy,
                         lifting_conditions_check, locking_calculator, locking_eta,
                         locking_scaling_curve, mutual_information,
                         posterior_entropy_curve, shannon_bound_check,
                         unicity_from_curve, unicity_lower_bound,
                         variational_distance)
from .keystream import (Lfsr, LfsrSpec, RunningKeyStream, SecretKey,
                        default_lfsr_spec, true_random_key)
from .measurements import (HeterodyneSample, Povm, helstrom_binary_mixed,
                           helstrom_binary_pure, heterodyne_psk_error,
                           heterodyne_sample, heterodyne_samples,
                           holevo_optimality_residual, photon_count_prob,
                           projective_povm, srm_general, srm_symmetric_psk)
from .ppm import (FppmConfig, PpmCodeword, bob_cppm_error, bob_cppm_error_mc,
                  cppm_bandwidth, cppm_randomize, eve_cppm_bound,
                  eve_fppm_heterodyne_error, eve_fppm_srm_error, fppm_bob_decode,
                  fppm_encode, fppm_masking_report, fppm_randomize, ppm_encode,
                  simulate_fppm)
from .report import ARTIFACT_VERSION, SecurityReport
from .transforms import (AmplitudeTransform, TransformFamily, apply_transform,
                         dft_transform, haar_unitary, inverse_transform,
                         phase_randomization_transform)
from .y00 import (CipherSlot, Y00Config, basis_indices, decrypt_slot_exact,
                  decrypt_slot_sample, encrypt_slot, eve_adjacent_pair_error,
                  eve_binary_mixed_error, eve_bit_channel, simulate_y00_link,
                  y00_eve_record, y00_key_posterior)

__version__ = ARTIFACT_VERSION
