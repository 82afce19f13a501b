"""Report objects and deterministic serialization.

Report JSON and CSV payloads are byte-reproducible for a fixed
(config, seed, version): keys are sorted, floats are written with repr
precision, and timestamps live only in the manifest.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

ARTIFACT_VERSION = "0.1.0"

CSV_COLUMNS = ("scheme", "parameter", "value", "metric", "result", "seed")


@dataclass
class SecurityReport:
    """Security evaluation of one experiment: error rates, entropies,
    unicity and locking figures, with the config echoed for reproducibility."""

    scheme: str
    seed: int | None = None
    config: dict = field(default_factory=dict)
    bob_ber: float | None = None
    eve_symbol_error: float | None = None
    eve_bit_error: float | None = None
    h_x_given_y_bits: float | None = None
    h_k_bits: float | None = None
    h_k_given_y_bits_curve: list | None = None
    c1_bits_per_use: float | None = None
    c1_label: str | None = None
    entropy_bins: int | None = None
    unicity_lower_bound_uses: float | None = None
    locking_eta: float | None = None
    shannon_verdict: str | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"artifact_version": ARTIFACT_VERSION}
        for name in ("scheme", "seed", "config", "bob_ber", "eve_symbol_error",
                     "eve_bit_error", "h_x_given_y_bits", "h_k_bits",
                     "h_k_given_y_bits_curve", "c1_bits_per_use", "c1_label",
                     "entropy_bins", "unicity_lower_bound_uses", "locking_eta",
                     "shannon_verdict"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        out.update(self.extras)
        return out

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True, indent=2) + "\n"


def _jsonable(obj):
    import numpy as np
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and obj == float("inf"):
        return "unbounded"
    return obj


def format_number(x) -> str:
    """Fixed CSV number format: 12 significant digits, locale-free."""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if x is None:
        return ""
    xf = float(x)
    if xf == float("inf"):
        return "unbounded"
    return f"{xf:.12g}"


def rows_to_csv(rows, columns=CSV_COLUMNS) -> str:
    """Long-form CSV text with a fixed column order and header."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] if isinstance(row[c], str) else format_number(row[c])
                         for c in columns])
    return buf.getvalue()


def sha256_digest(path: Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def write_manifest(directory: Path, config: dict, outputs) -> Path:
    """Manifest referencing every output file with a content digest.

    The manifest carries the only timestamp of the run, so payload files
    stay byte-identical across reruns.
    """
    directory = Path(directory)
    manifest = {
        "artifact_version": ARTIFACT_VERSION,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": _jsonable(config),
        "outputs": [{"path": str(Path(p).name), "sha256": sha256_digest(p)}
                    for p in outputs],
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return path
