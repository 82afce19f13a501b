"""Experiment driver.

Subcommands:
    run       execute one experiment config, write report + manifest
    sweep     grid over one parameter, long-form CSV + figure alongside
    plot      render a figure from a sweep CSV
    bounds    closed-form security numbers, no simulation
    selftest  numerical-invariant battery

Exit codes: 0 success, 2 config/validation failure, 3 numerical-invariant
violation. KCQSIM_THREADS (integer) is the only environment control; it
caps sweep concurrency and parallel results are identical to serial ones.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import infotheory, ppm, y00
from .config import ConfigError, load_config, lfsr_from_config, validate_config
from .keystream import SecretKey, true_random_key
from .report import CSV_COLUMNS, SecurityReport, rows_to_csv, write_manifest

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("KCQSIM_THREADS", "1")))
    except ValueError:
        return 1


def derived_seed(master: int, *coords) -> int:
    """Stable per-grid-point seed: master XOR a hash of the coordinates."""
    text = "|".join(repr(c) for c in coords)
    h = int.from_bytes(hashlib.sha256(text.encode()).digest()[:4], "big")
    return (int(master) ^ h) & 0x7FFFFFFF


def _key_from_config(cfg: dict) -> SecretKey:
    if cfg.get("key_hex"):
        return SecretKey.from_hex(cfg["key_hex"], cfg.get("key_bits"))
    bits = cfg.get("key_bits") or 16
    return true_random_key(bits, seed=derived_seed(cfg["seed"], "key"))


# ---------------------------------------------------------------------------
# scheme runners
# ---------------------------------------------------------------------------

def _run_y00(cfg: dict) -> SecurityReport:
    ycfg = y00.Y00Config(cfg["m_bases"], cfg["amp_squared"], cfg["osk"],
                         lfsr_from_config(cfg), cfg["bob_loss"])
    key = _key_from_config(cfg)
    rng = np.random.default_rng(cfg["seed"])
    link = y00.simulate_y00_link(
        cfg["slots"], key, ycfg, cfg["eve_model"], rng,
        bob_model=cfg["bob_model"], entropy_repeats=cfg["entropy_repeats"],
        bins=cfg["bins"], keep_slots=cfg["csv_slots"])

    rows = y00.eve_bit_channel(ycfg, cfg["bins"])
    h_slot = infotheory.conditional_entropy(rows, np.array([0.5, 0.5]))
    h_x_given_y = h_slot * cfg["slots"]
    h_k = float(key.n_bits)

    report = SecurityReport(
        scheme="y00", seed=cfg["seed"], config=cfg,
        bob_ber=link.bob_ber, eve_symbol_error=link.eve_symbol_error,
        eve_bit_error=link.eve_bit_error,
        h_x_given_y_bits=h_x_given_y, h_k_bits=h_k, entropy_bins=cfg["bins"],
        shannon_verdict=infotheory.shannon_bound_check(h_x_given_y, h_k),
    )
    report.extras["analytic_bob_ber"] = link.analytic_bob_ber
    report.extras["eve_adjacent_error"] = y00.eve_adjacent_pair_error(ycfg)
    if ycfg.m_bases <= 128 and ycfg.amp_squared <= 16:
        report.extras["eve_mixed_error"] = y00.eve_binary_mixed_error(ycfg)
    if link.h_yb_given_kx is not None:
        keyed_det, tapped_rand = infotheory.lifting_conditions_check(link.bob_records,
                                                       link.eve_records)
        report.extras["h_yb_given_kx_bits"] = link.h_yb_given_kx
        report.extras["h_ye_given_kx_bits"] = link.h_ye_given_kx
        report.extras["lifting_keyed_record_deterministic"] = bool(keyed_det)
        report.extras["lifting_tapped_record_random"] = bool(tapped_rand)

    n_post = cfg["key_posterior_slots"]
    if n_post:
        if key.n_bits > 16:
            raise ConfigError("config key 'key_posterior_slots': brute-force "
                              f"posterior needs a key of <= 16 bits, got {key.n_bits}")
        post_rng = np.random.default_rng(derived_seed(cfg["seed"], "posterior"))
        post_bits = post_rng.integers(0, 2, n_post)
        model = cfg["posterior_observation"]
        obs = y00.y00_eve_record(post_bits, key, ycfg, post_rng, model, cfg["bins"])
        curve = y00.y00_key_posterior(
            ycfg, key.n_bits, obs,
            plaintext=post_bits if cfg["posterior_known_plaintext"] else None,
            observation_model=model, bins=cfg["bins"])
        report.h_k_given_y_bits_curve = [float(v) for v in curve]
        reached = infotheory.unicity_from_curve(curve)
        report.extras["unicity_slots_observed"] = (
            reached if reached is not None else "not reached")

    report.extras["slot_table"] = link.slot_table  # consumed by the writer
    return report


def _run_cppm(cfg: dict) -> SecurityReport:
    from .transforms import family_from_spec
    m = cfg["m_slots"]
    s = cfg["amp_squared"]
    rng = np.random.default_rng(cfg["seed"])
    analytic = ppm.bob_cppm_error(m, s)
    mc = ppm.bob_cppm_error_mc(m, s, cfg["trials"], rng)
    report = SecurityReport(scheme="cppm", seed=cfg["seed"], config=cfg,
                            bob_ber=analytic)
    report.extras["bob_block_error_mc"] = mc
    report.extras["eve_error_lower_bound"] = ppm.eve_cppm_bound(m, s)
    report.extras["eve_bound_regime"] = ppm.eve_cppm_regime(m, s)
    report.extras["bandwidth"] = ppm.bandwidth_report(
        m, cfg["symbol_rate_hz"], cfg["bandwidth_budget_hz"])
    family_spec = cfg["unitary_family"] or {"kind": "haar", "count": 16,
                                            "seed": derived_seed(cfg["seed"], "fam")}
    family = family_from_spec(family_spec, m)
    trip = ppm.simulate_cppm(_key_from_config(cfg), m, s, family,
                             min(cfg["trials"], 2048), rng)
    report.extras["roundtrip_exact_symbol_error"] = trip["symbol_error"]
    report.extras["max_energy_deviation"] = trip["max_energy_deviation"]
    return report


def _run_fppm(cfg: dict) -> SecurityReport:
    fam = cfg["unitary_family"] or {}
    fcfg = ppm.FppmConfig(cfg["m_slots"], cfg["j_phases"], cfg["amp_squared"],
                          lfsr_from_config(cfg),
                          mode_unitary_count=int(fam.get("count", 0)),
                          mode_unitary_seed=int(fam.get("seed", 0)))
    key = _key_from_config(cfg)
    rng = np.random.default_rng(cfg["seed"])
    exact = ppm.simulate_fppm(key, fcfg, min(cfg["trials"], 4096), rng, exact=True)
    noisy = ppm.simulate_fppm(key, fcfg, cfg["trials"], rng, exact=False)
    wrong = ppm.simulate_fppm(key, fcfg, min(cfg["trials"], 4096), rng, exact=False,
                              wrong_key=true_random_key(key.n_bits,
                                                        seed=derived_seed(cfg["seed"], "wrong")))
    masking = ppm.fppm_masking_report(fcfg, h_k_bits=float(key.n_bits))
    report = SecurityReport(
        scheme="fppm", seed=cfg["seed"], config=cfg,
        bob_ber=noisy["symbol_error"], h_k_bits=float(key.n_bits),
        c1_bits_per_use=masking["c1_bits_per_mode"], c1_label=masking["c1_label"],
        unicity_lower_bound_uses=masking["unicity_lower_bound_uses"],
    )
    report.extras["roundtrip_exact_symbol_error"] = exact["symbol_error"]
    report.extras["wrong_key_symbol_error"] = wrong["symbol_error"]
    report.extras["eve_srm_block_error"] = ppm.eve_fppm_srm_error(fcfg)
    report.extras["eve_heterodyne_block_error"] = ppm.eve_fppm_heterodyne_error(
        fcfg, cfg["distance_convention"])
    return report


def _run_locking(cfg: dict) -> SecurityReport:
    calc = infotheory.locking_calculator(cfg["epsilon"], cfg["n_bits"])
    report = SecurityReport(
        scheme="locking-calc", seed=cfg.get("seed"), config=cfg,
        h_k_bits=calc["h_k_bits"], h_x_given_y_bits=calc["h_x_given_y_lower_bits"],
        locking_eta=calc["eta_upper"], shannon_verdict=calc["verdict"],
    )
    report.extras["i_acc_leak_bound_bits"] = calc["i_acc_leak_bound_bits"]
    return report


_RUNNERS = {"y00": _run_y00, "cppm": _run_cppm, "fppm": _run_fppm,
            "locking-calc": _run_locking}


def run_experiment(cfg: dict) -> SecurityReport:
    return _RUNNERS[cfg["scheme"]](cfg)


# ---------------------------------------------------------------------------
# sweep metrics (analytic, deterministic)
# ---------------------------------------------------------------------------

def sweep_point_metrics(cfg: dict) -> dict:
    """Closed-form metric set for one grid point of a sweep."""
    scheme = cfg["scheme"]
    if scheme == "y00":
        ycfg = y00.Y00Config(cfg["m_bases"], cfg["amp_squared"], cfg["osk"])
        out = {
            "eve_adjacent_error": y00.eve_adjacent_pair_error(ycfg),
            "bob_analytic_ber": y00.bob_analytic_ber(ycfg),
        }
        if ycfg.m_bases <= 256 and ycfg.amp_squared <= 16:
            out["eve_mixed_error"] = y00.eve_binary_mixed_error(ycfg)
        return out
    if scheme == "cppm":
        m, s = cfg["m_slots"], cfg["amp_squared"]
        return {
            "bob_block_error": ppm.bob_cppm_error(m, s) if m >= 2 else 0.0,
            "eve_error_lower_bound": ppm.eve_cppm_bound(m, s) if m >= 2 else 0.0,
            "bandwidth_hz": ppm.cppm_bandwidth(m, cfg["symbol_rate_hz"]),
        }
    if scheme == "fppm":
        fcfg = ppm.FppmConfig(cfg["m_slots"], cfg["j_phases"], cfg["amp_squared"])
        masking = ppm.fppm_masking_report(fcfg)
        return {
            "eve_srm_block_error": ppm.eve_fppm_srm_error(fcfg),
            "eve_heterodyne_block_error": ppm.eve_fppm_heterodyne_error(
                fcfg, cfg["distance_convention"]),
            "bob_symbol_error_bound": ppm.fppm_bob_symbol_error(fcfg),
            "c1_bits_per_mode": masking["c1_bits_per_mode"],
        }
    calc = infotheory.locking_calculator(cfg["epsilon"], cfg["n_bits"])
    out = {"eta_upper": calc["eta_upper"], "h_k_bits": calc["h_k_bits"]}
    # coupled scaling eta(n) with epsilon = 1/n, the decay-rate demonstration
    out["eta_coupled"] = infotheory.locking_calculator(
        1.0 / cfg["n_bits"], cfg["n_bits"])["eta_upper"]
    return out


def run_sweep(cfg: dict):
    sweep = cfg["sweep"]
    if not sweep:
        raise ConfigError("config key 'sweep': sweep axis required (empty axis)")
    param = sweep["parameter"]
    values = sweep["values"]
    master = cfg.get("seed") or 0

    def one(index_value):
        idx, value = index_value
        point = dict(cfg)
        point[param] = value
        point = validate_config({k: v for k, v in point.items() if k != "sweep"})
        seed = derived_seed(master, param, value)
        metrics = sweep_point_metrics(point)
        return idx, value, seed, metrics

    items = list(enumerate(values))
    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, items))
    else:
        results = [one(it) for it in items]
    results.sort(key=lambda r: r[0])

    rows = []
    for _, value, seed, metrics in results:
        for metric in sorted(metrics):
            rows.append({"scheme": cfg["scheme"], "parameter": param,
                         "value": value, "metric": metric,
                         "result": metrics[metric], "seed": seed})
    return rows


# ---------------------------------------------------------------------------
# bounds (pure analytic evaluation)
# ---------------------------------------------------------------------------

def evaluate_bounds(args) -> dict:
    from .measurements import heterodyne_psk_error, srm_symmetric_psk
    out = {}
    if args.scheme == "cppm":
        out["bob_block_error"] = ppm.bob_cppm_error(args.m, args.amp_squared)
        out["eve_error_lower_bound"] = ppm.eve_cppm_bound(args.m, args.amp_squared)
        out["eve_error_lower_bound_natural_log"] = ppm.eve_cppm_bound(
            args.m, args.amp_squared, log_base=np.e)
        out["eve_bound_regime"] = ppm.eve_cppm_regime(args.m, args.amp_squared)
        out["bandwidth"] = ppm.bandwidth_report(args.m, args.symbol_rate_hz,
                                                args.bandwidth_budget_hz)
    elif args.scheme == "fppm":
        fcfg = ppm.FppmConfig(args.m, args.j, args.amp_squared)
        err, _ = srm_symmetric_psk(args.j, fcfg.amp)
        out["per_mode_srm_error"] = err
        out["per_mode_heterodyne_error"] = heterodyne_psk_error(
            args.j, fcfg.amp, args.distance_convention)
        out["eve_srm_block_error"] = ppm.eve_fppm_srm_error(fcfg)
        out["eve_heterodyne_block_error"] = ppm.eve_fppm_heterodyne_error(
            fcfg, args.distance_convention)
        masking = ppm.fppm_masking_report(fcfg, h_k_bits=args.h_k)
        out["c1_bits_per_mode"] = masking["c1_bits_per_mode"]
        out["unicity_lower_bound_uses"] = masking["unicity_lower_bound_uses"]
    elif args.scheme == "unicity":
        out["unicity_lower_bound_uses"] = infotheory.unicity_lower_bound(
            args.h_k, args.c1)
    elif args.scheme == "locking":
        out.update(infotheory.locking_calculator(args.epsilon, args.n_bits))
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown bounds scheme {args.scheme}")
    return out


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------

def _write_report(report: SecurityReport, outdir: Path, render: bool) -> list:
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = []
    slot_table = report.extras.pop("slot_table", None)
    report_path = outdir / "report.json"
    report_path.write_text(report.to_json())
    outputs.append(report_path)
    if slot_table is not None:
        columns = ("slot", "bit", "chunk", "osk_bit", "phase_index", "bob_bit",
                   "eve_record")
        rows = []
        n = len(slot_table["bit"])
        for t in range(n):
            rows.append({"slot": t, **{k: int(slot_table[k][t])
                                       for k in columns if k != "slot"}})
        csv_path = outdir / "slots.csv"
        csv_path.write_text(rows_to_csv(rows, columns))
        outputs.append(csv_path)
    if render and report.h_k_given_y_bits_curve:
        from .plotting import render_curve
        curve = report.h_k_given_y_bits_curve
        fig = render_curve(list(range(1, len(curve) + 1)),
                           {"H(K|Y) bits": curve}, outdir / "key_entropy.svg",
                           xlabel="observed slots", ylabel="bits")
        outputs.append(fig)
    if render:
        errors = {
            "keyed receiver": report.bob_ber,
            "keyless symbol": report.eve_symbol_error,
            "keyless bit": report.eve_bit_error,
            "keyless bound": report.extras.get("eve_error_lower_bound"),
            "keyless SRM block": report.extras.get("eve_srm_block_error"),
        }
        if any(v is not None for v in errors.values()):
            from .plotting import render_error_summary
            fig = render_error_summary(errors, outdir / "errors.svg",
                                       title=f"{report.scheme} run")
            outputs.append(fig)
    return outputs


def _write_sweep(rows, cfg: dict, outdir: Path, render: bool) -> list:
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "sweep.csv"
    csv_path.write_text(rows_to_csv(rows, CSV_COLUMNS))
    outputs = [csv_path]
    if render:
        from .plotting import render_metric_plot
        results = [float(r["result"]) for r in rows
                   if not isinstance(r["result"], str)]
        logy = bool(results) and min(results) > 0 and max(results) / min(results) > 1e3
        fig = render_metric_plot(csv_path, outdir / "sweep.svg", logy=logy,
                                 title=f"{cfg['scheme']} sweep over "
                                       f"{cfg['sweep']['parameter']}")
        outputs.append(fig)
    return outputs


# ---------------------------------------------------------------------------
# argument parsing / entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcqsim",
                                     description="quantum-noise cipher laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment config")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--slots", type=int, default=None)
    p_run.add_argument("--trials", type=int, default=None)
    p_run.add_argument("--no-figures", action="store_true")

    p_sweep = sub.add_parser("sweep", help="parameter sweep to long-form CSV")
    p_sweep.add_argument("config", type=Path)
    p_sweep.add_argument("--out", type=Path, default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--no-figures", action="store_true")

    p_plot = sub.add_parser("plot", help="render a figure from a sweep CSV")
    p_plot.add_argument("csv", type=Path)
    p_plot.add_argument("--out", type=Path, required=True)
    p_plot.add_argument("--metric", action="append", default=None)
    p_plot.add_argument("--logx", action="store_true")
    p_plot.add_argument("--logy", action="store_true")

    p_bounds = sub.add_parser("bounds", help="closed-form security numbers")
    p_bounds.add_argument("--scheme", required=True,
                          choices=("cppm", "fppm", "unicity", "locking"))
    p_bounds.add_argument("--m", type=int, default=4)
    p_bounds.add_argument("--j", type=int, default=8)
    p_bounds.add_argument("--amp-squared", dest="amp_squared", type=float, default=1.0)
    p_bounds.add_argument("--symbol-rate-hz", dest="symbol_rate_hz", type=float,
                          default=1e9)
    p_bounds.add_argument("--bandwidth-budget-hz", dest="bandwidth_budget_hz",
                          type=float, default=10e12)
    p_bounds.add_argument("--distance-convention", dest="distance_convention",
                          choices=("literal", "euclidean"), default="literal")
    p_bounds.add_argument("--h-k", dest="h_k", type=float, default=16.0)
    p_bounds.add_argument("--c1", type=float, default=1.0)
    p_bounds.add_argument("--epsilon", type=float, default=0.1)
    p_bounds.add_argument("--n-bits", dest="n_bits", type=int, default=10 ** 6)
    p_bounds.add_argument("--out", type=Path, default=None)

    p_self = sub.add_parser("selftest", help="numerical-invariant battery")
    p_self.add_argument("--seed", type=int, default=20230)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            overrides = {"seed": args.seed, "slots": args.slots,
                         "trials": args.trials}
            cfg = load_config(args.config, overrides)
            outdir = args.out or Path(cfg["output_dir"])
            render = cfg["render_figures"] and not args.no_figures
            if cfg.get("sweep"):
                rows = run_sweep(cfg)
                outputs = _write_sweep(rows, cfg, outdir, render)
            else:
                report = run_experiment(cfg)
                outputs = _write_report(report, outdir, render)
            write_manifest(outdir, cfg, outputs)
            for p in outputs:
                print(p)
            return EXIT_OK

        if args.command == "sweep":
            cfg = load_config(args.config, {"seed": args.seed})
            if not cfg.get("sweep"):
                raise ConfigError("config key 'sweep': sweep axis required")
            outdir = args.out or Path(cfg["output_dir"])
            render = cfg["render_figures"] and not args.no_figures
            rows = run_sweep(cfg)
            outputs = _write_sweep(rows, cfg, outdir, render)
            write_manifest(outdir, cfg, outputs)
            for p in outputs:
                print(p)
            return EXIT_OK

        if args.command == "plot":
            from .plotting import render_metric_plot
            out = render_metric_plot(args.csv, args.out, metrics=args.metric,
                                     logx=args.logx, logy=args.logy)
            print(out)
            return EXIT_OK

        if args.command == "bounds":
            out = evaluate_bounds(args)
            text = json.dumps(_bounds_jsonable(out), sort_keys=True, indent=2)
            print(text)
            if args.out:
                args.out.write_text(text + "\n")
            return EXIT_OK

        if args.command == "selftest":
            from .selftest import run_selftest
            checks = run_selftest(args.seed)
            failed = [c for c in checks if not c["ok"]]
            for c in checks:
                status = "pass" if c["ok"] else "FAIL"
                detail = f"  [{c['detail']}]" if c["detail"] else ""
                print(f"{status}  {c['name']}{detail}")
            print(f"{len(checks) - len(failed)}/{len(checks)} invariants hold")
            return EXIT_OK if not failed else EXIT_INVARIANT

    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, AssertionError) as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG  # pragma: no cover


def _bounds_jsonable(obj):
    if isinstance(obj, dict):
        return {k: _bounds_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, float) and obj == float("inf"):
        return "unbounded"
    return obj


if __name__ == "__main__":
    sys.exit(main())
