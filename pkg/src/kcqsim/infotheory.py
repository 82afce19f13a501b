"""Information-theoretic security evaluation: entropies, channels,
Shannon-bound checks, brute-force key posteriors, and the data-locking
calculator. Logs are base 2 throughout; entropies are in bits.
"""

from __future__ import annotations

from math import log2

import numpy as np

MAX_KEYSPACE_BITS = 20
UNICITY_ENTROPY_THRESHOLD = 1e-6  # "zero ambiguity" cut for float posteriors


def entropy(probs) -> float:
    """Shannon entropy in bits with the 0*log(0) = 0 convention."""
    p = np.asarray(probs, dtype=float)
    if np.any(p < -1e-12):
        raise ValueError("negative probability")
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"distribution sums to {p.sum()}, not 1")
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability outside [0, 1]")
    total = 0.0
    for q in (p, 1.0 - p):
        if q > 0:
            total -= q * log2(q)
    return total


def _validate_channel(channel) -> np.ndarray:
    c = np.asarray(channel, dtype=float)
    if c.ndim != 2:
        raise ValueError("channel must be a 2-D row-stochastic matrix")
    if np.any(c < -1e-12):
        raise ValueError("negative channel entry")
    if np.max(np.abs(c.sum(axis=1) - 1.0)) > 1e-9:
        raise ValueError("channel rows must each sum to 1")
    return np.clip(c, 0.0, None)


def conditional_entropy(channel, input_dist) -> float:
    """H(X|Y) for inputs X through a row-stochastic channel to outputs Y.

    Inverts the channel with Bayes' rule; zero-probability output columns
    are excluded.
    """
    c = _validate_channel(channel)
    px = np.asarray(input_dist, dtype=float)
    if px.shape[0] != c.shape[0]:
        raise ValueError("input distribution does not match channel rows")
    joint = px[:, None] * c
    py = joint.sum(axis=0)
    h = 0.0
    for y in range(c.shape[1]):
        if py[y] <= 0:
            continue
        post = joint[:, y] / py[y]
        nz = post[post > 0]
        h += py[y] * float(-(nz * np.log2(nz)).sum())
    return h


def mutual_information(channel, input_dist) -> float:
    """I(X;Y) = H(X) - H(X|Y); the H(Y) - H(Y|X) form is checked internally."""
    c = _validate_channel(channel)
    px = np.asarray(input_dist, dtype=float)
    forward = entropy(px) - conditional_entropy(c, px)
    joint = px[:, None] * c
    py = joint.sum(axis=0)
    h_y_given_x = 0.0
    for x in range(c.shape[0]):
        row = c[x][c[x] > 0]
        h_y_given_x += px[x] * float(-(row * np.log2(row)).sum())
    backward = entropy(py / py.sum()) - h_y_given_x
    if abs(forward - backward) > 1e-10:
        raise AssertionError(f"I(X;Y) symmetry violated: {forward} vs {backward}")
    return forward


def shannon_bound_check(h_x_given_y: float, h_k: float) -> str:
    """"lifted" when the plaintext equivocation exceeds the key entropy."""
    if h_x_given_y < 0 or h_k < 0:
        raise ValueError("entropies must be nonnegative")
    return "lifted" if h_x_given_y > h_k + 1e-9 else "bounded"


def lifting_conditions_check(bob_records: np.ndarray, eve_records: np.ndarray,
                             threshold: float = 1e-9):
    """Empirical check of the two random-cipher conditions on repeated runs
    at fixed (key, plaintext).

    Returns (eq_bob_deterministic, eq_eve_random): the keyed record must be a
    deterministic function of (K, X) (plug-in entropy 0) while the tapped
    record must vary.
    """
    bob = np.asarray(bob_records)
    eve = np.asarray(eve_records)
    if bob.ndim != 2 or eve.ndim != 2 or bob.shape[0] < 2:
        raise ValueError("need at least two repeated records of one (key, plaintext)")
    h_bob = _records_entropy(bob)
    h_eve = _records_entropy(eve)
    return h_bob <= threshold, h_eve > threshold


def _records_entropy(records: np.ndarray) -> float:
    reps, n = records.shape
    total = 0.0
    for t in range(n):
        _, counts = np.unique(records[:, t], return_counts=True)
        p = counts / reps
        total += float(-(p * np.log2(p)).sum())
    return total / n


# ---------------------------------------------------------------------------
# brute-force key posterior
# ---------------------------------------------------------------------------

def posterior_entropy_curve(log_likelihoods: np.ndarray,
                            prior=None) -> np.ndarray:
    """Slot-by-slot Bayesian key-posterior entropies.

    log_likelihoods[k, t] is log p(observation_t | key k); the returned
    curve[t] is H(K | first t+1 observations) in bits under the exact
    posterior over the enumerated keys.
    """
    ll = np.asarray(log_likelihoods, dtype=float)
    n_keys, n_slots = ll.shape
    if n_keys > (1 << MAX_KEYSPACE_BITS):
        raise ValueError(f"key space larger than 2^{MAX_KEYSPACE_BITS} rejected")
    logpost = np.zeros(n_keys) if prior is None else np.log(np.asarray(prior, float))
    curve = np.empty(n_slots)
    for t in range(n_slots):
        logpost = logpost + ll[:, t]
        finite = logpost[np.isfinite(logpost)]
        if finite.size == 0:
            raise ArithmeticError("all keys have zero likelihood")
        shifted = logpost - finite.max()
        p = np.exp(shifted)
        p[~np.isfinite(shifted)] = 0.0
        p /= p.sum()
        nz = p[p > 0]
        curve[t] = float(-(nz * np.log2(nz)).sum())
    return curve


def unicity_from_curve(curve, threshold: float = UNICITY_ENTROPY_THRESHOLD):
    """First observation count with posterior entropy at or below threshold,
    or None when never reached."""
    idx = np.nonzero(np.asarray(curve) <= threshold)[0]
    return int(idx[0]) + 1 if idx.size else None


def unicity_lower_bound(h_k: float, c1: float) -> float:
    """Minimum known-plaintext observations: H(K) / C1 ("unbounded" = inf at C1 = 0)."""
    if c1 < 0:
        raise ValueError("C1 must be >= 0")
    if c1 == 0:
        return float("inf")
    return h_k / c1


def locking_eta(h_k: float, h_x_given_y: float) -> float:
    """Key-to-equivocation ratio; below 1 flags a lifted regime."""
    if h_x_given_y <= 0:
        raise ZeroDivisionError("H(X|Y) must be positive")
    return h_k / h_x_given_y


def locking_calculator(epsilon: float, n_bits: int, log_base: float = 2.0) -> dict:
    """Data-locking budget for leakage below epsilon * n over an n-bit block.

    Key requirement H(K) = 4 * log(1/epsilon); the equivocation satisfies
    H(X|Y) >= (1 - epsilon) * n, so eta <= H(K) / ((1 - eps) n).
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    scale = 1.0 if log_base == 2.0 else 1.0 / log2(log_base)
    h_k = 4.0 * log2(1.0 / epsilon) / scale
    h_x_given_y_lower = (1.0 - epsilon) * n_bits
    return {
        "epsilon": epsilon,
        "n_bits": n_bits,
        "h_k_bits": h_k,
        "i_acc_leak_bound_bits": epsilon * n_bits,
        "h_x_given_y_lower_bits": h_x_given_y_lower,
        "eta_upper": h_k / h_x_given_y_lower,
        "verdict": shannon_bound_check(h_x_given_y_lower, h_k),
    }


def locking_scaling_curve(n_values) -> np.ndarray:
    """eta(n) with epsilon coupled to the block as 1/n: decays like log(n)/n."""
    out = []
    for n in n_values:
        out.append(locking_calculator(1.0 / n, int(n))["eta_upper"])
    return np.asarray(out)


def variational_distance(p, p_cond) -> float:
    """Unhalved L1 distance sum |p(x) - p(x|y)| between two distributions."""
    a = np.asarray(p, dtype=float)
    b = np.asarray(p_cond, dtype=float)
    if a.shape != b.shape:
        raise ValueError("distributions must share support size")
    return float(np.sum(np.abs(a - b)))
