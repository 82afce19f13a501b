"""Experiment configuration: JSON schema, validation, CLI overrides.

A config file is a single JSON object; command-line flags override its
keys. Validation failures raise ConfigError with the offending key and,
when it comes from a file, its line number.
"""

from __future__ import annotations

import json
from pathlib import Path

from .keystream import MAXIMAL_TAPS, LfsrSpec

SCHEMES = ("y00", "cppm", "fppm", "locking-calc")
EVE_MODELS = ("heterodyne", "srm", "helstrom-mixed", "adjacent", "exact")
BOB_MODELS = ("exact", "homodyne")

DEFAULTS = {
    "seed": None,
    "key_hex": None,
    "key_bits": None,
    "lfsr": None,
    "slots": 10000,
    "trials": 10000,
    "amp_squared": 1.0,
    "m_bases": 64,
    "osk": False,
    "eve_model": "heterodyne",
    "bob_model": "exact",
    "bob_loss": 0.0,
    "m_slots": 4,
    "j_phases": 8,
    "symbol_rate_hz": 1e9,
    "bandwidth_budget_hz": 10e12,
    "epsilon": 0.1,
    "n_bits": 10 ** 6,
    "entropy_repeats": 0,
    "bins": 64,
    "csv_slots": False,
    "render_figures": True,
    "distance_convention": "literal",
    "unitary_family": None,
    "key_posterior_slots": 0,
    "posterior_observation": "phase-bins",
    "posterior_known_plaintext": True,
    "sweep": None,
    "output_dir": "out",
}

_KNOWN_KEYS = set(DEFAULTS) | {"scheme"}


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending key."""


def _line_of_key(raw_text: str | None, key: str):
    if not raw_text:
        return None
    needle = f'"{key}"'
    for ln, line in enumerate(raw_text.splitlines(), start=1):
        if needle in line:
            return ln
    return None


def _fail(key: str, message: str, raw_text: str | None):
    line = _line_of_key(raw_text, key)
    where = f" (line {line})" if line else ""
    raise ConfigError(f"config key '{key}'{where}: {message}")


def _power_of_two(n) -> bool:
    return isinstance(n, int) and n >= 1 and (n & (n - 1)) == 0


def validate_config(cfg: dict, raw_text: str | None = None) -> dict:
    """Merge defaults and check every cross-field rule. Returns a new dict."""
    merged = dict(DEFAULTS)
    merged.update(cfg)
    for key in cfg:
        if key not in _KNOWN_KEYS:
            _fail(key, "unknown key", raw_text)

    scheme = merged.get("scheme")
    if scheme not in SCHEMES:
        _fail("scheme", f"must be one of {SCHEMES}, got {scheme!r}", raw_text)

    if merged["seed"] is not None and not isinstance(merged["seed"], int):
        _fail("seed", "must be an integer", raw_text)
    if scheme != "locking-calc" and merged["seed"] is None:
        _fail("seed", "a seed is mandatory for any Monte Carlo run", raw_text)

    if merged["key_hex"] is not None:
        try:
            int(str(merged["key_hex"]), 16)
        except ValueError:
            _fail("key_hex", f"{merged['key_hex']!r} is not lowercase hex", raw_text)

    if not _power_of_two(merged["m_bases"]):
        _fail("m_bases", f"{merged['m_bases']} violates the power-of-two rule "
                         "(basis count must be 2^k for clean bit chunking)", raw_text)
    if scheme == "fppm" and not _power_of_two(merged["j_phases"]):
        _fail("j_phases", f"{merged['j_phases']} violates the power-of-two rule",
              raw_text)
    if scheme in ("cppm", "fppm") and (not isinstance(merged["m_slots"], int)
                                       or merged["m_slots"] < 1):
        _fail("m_slots", "must be a positive integer", raw_text)
    if scheme == "cppm" and not _power_of_two(merged["m_slots"]):
        _fail("m_slots", f"{merged['m_slots']} violates the power-of-two rule",
              raw_text)

    if not isinstance(merged["amp_squared"], (int, float)) or merged["amp_squared"] < 0:
        _fail("amp_squared", "must be a number >= 0", raw_text)
    if merged["eve_model"] not in EVE_MODELS:
        _fail("eve_model", f"must be one of {EVE_MODELS}", raw_text)
    if merged["bob_model"] not in BOB_MODELS:
        _fail("bob_model", f"must be one of {BOB_MODELS}", raw_text)
    if not 0.0 <= float(merged["bob_loss"]) < 1.0:
        _fail("bob_loss", "must lie in [0, 1)", raw_text)
    if not 0.0 < float(merged["epsilon"]) < 1.0:
        _fail("epsilon", "must lie strictly between 0 and 1", raw_text)
    if not isinstance(merged["n_bits"], int) or merged["n_bits"] < 1:
        _fail("n_bits", "must be a positive integer", raw_text)
    for key in ("slots", "trials", "bins"):
        if not isinstance(merged[key], int) or merged[key] < 1:
            _fail(key, "must be a positive integer", raw_text)
    if merged["distance_convention"] not in ("literal", "euclidean"):
        _fail("distance_convention", "must be 'literal' or 'euclidean'", raw_text)
    if not isinstance(merged["key_posterior_slots"], int) or merged["key_posterior_slots"] < 0:
        _fail("key_posterior_slots", "must be a nonnegative integer", raw_text)
    if merged["posterior_observation"] not in ("phase-bins", "bit-decision",
                                               "exact-index"):
        _fail("posterior_observation", "must be phase-bins, bit-decision or "
                                       "exact-index", raw_text)

    if merged["lfsr"] is not None:
        spec = merged["lfsr"]
        if not isinstance(spec, dict) or "register_length" not in spec:
            _fail("lfsr", "must be an object with register_length (and taps)", raw_text)
        length = spec["register_length"]
        taps = spec.get("taps") or MAXIMAL_TAPS.get(length)
        if taps is None:
            _fail("lfsr", f"no registered taps for length {length}; give taps "
                          "explicitly", raw_text)
        try:
            LfsrSpec(length, tuple(taps))
        except ValueError as exc:
            _fail("lfsr", str(exc), raw_text)

    fam = merged["unitary_family"]
    if fam is not None:
        if not isinstance(fam, dict):
            _fail("unitary_family", "must be an object like {kind, count, seed}",
                  raw_text)
        kind = fam.get("kind", "haar")
        if kind not in ("haar", "dft", "phase"):
            _fail("unitary_family", f"unknown kind {kind!r}", raw_text)
        count = fam.get("count", 16)
        if kind != "dft" and not _power_of_two(count):
            _fail("unitary_family", f"count {count} violates the power-of-two rule",
                  raw_text)

    sweep = merged["sweep"]
    if sweep is not None:
        if not isinstance(sweep, dict) or "parameter" not in sweep:
            _fail("sweep", "must be an object with parameter and values", raw_text)
        values = sweep.get("values")
        if not isinstance(values, list) or not values:
            _fail("sweep", "values must be a non-empty list", raw_text)
        if sweep["parameter"] not in _KNOWN_KEYS:
            _fail("sweep", f"unknown sweep parameter {sweep['parameter']!r}", raw_text)
    return merged


def load_config(path, overrides: dict | None = None) -> dict:
    raw_text = Path(path).read_text()
    try:
        cfg = json.loads(raw_text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if overrides:
        cfg.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(cfg, raw_text)


def lfsr_from_config(cfg: dict) -> LfsrSpec | None:
    if cfg.get("lfsr") is None:
        return None
    spec = cfg["lfsr"]
    taps = spec.get("taps") or MAXIMAL_TAPS[spec["register_length"]]
    return LfsrSpec(spec["register_length"], tuple(taps))
