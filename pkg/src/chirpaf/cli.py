"""Command-line front end.

Subcommands ``verify``, ``af``, ``papr``, ``acquire`` and ``track`` read an
optional YAML file with one section per subcommand plus a shared
``waveform`` section::

    waveform: {N: 127, two_alpha: 4, two_beta: 2, gamma: 0.0}
    af:
      waveform: ccdt
      sequence: {family: zc, root: 4}
      deltas: {start: 0, stop: 127, step: 0.1}

Unknown keys are rejected.  Every CSV starts with a ``#`` line holding the
resolved configuration (JSON) and the master seed.

Exit codes: 0 success, 2 configuration error, 3 runtime or property
failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from .ambiguity import af_surface, verify_shape_properties
from .detection import (
    AcquisitionConfig,
    ExperimentStats,
    TrackingConfig,
    run_acquisition,
    run_tracking,
)
from .papr import papr_sweep, verify_papr_properties, write_papr_csv
from .sequences import LfsrSpec, dft_sequence, m_sequence, random_mpsk, zadoff_chu
from .waveform import Waveform, WaveformKind, WaveformParams

__all__ = ["main", "ConfigError", "load_config", "resolve"]

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_IO = 0, 2, 3, 4


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


# Defaults per section; ``None`` means "derived" or "not set".
DEFAULTS = {
    "waveform": {"N": 127, "two_alpha": 4, "two_beta": 2, "gamma": 0.0, "n_cp": 0},
    "verify": {"seed": 0, "zc_root": 3, "dft_index": 5, "tol": None},
    "af": {
        "seed": 0,
        "waveform": "ccdt",
        "sequence": {"family": "zc", "root": 3},
        "Q": None,
        "deltas": None,
        "taus": None,
    },
    "papr": {"seed": 0, "waveforms": ["ofdm", "dfts-ofdm", "ccdt"], "family": "zc", "Q": None},
    "acquire": {
        "seed": 2024,
        "runs": [
            {"waveform": "ofdm", "sequence": "mseq", "hypotheses": 3},
            {"waveform": "dfts-ofdm", "sequence": "mseq", "hypotheses": 3},
            {"waveform": "ccdt", "sequence": "mseq", "hypotheses": 3},
            {"waveform": "ccdt", "sequence": "zc", "hypotheses": 1},
        ],
        "two_alpha": -4,
        "two_beta": -4,
        "n_cp": 12,
        "zc_root": None,
        "mseq_taps": None,
        "velocities_kmh": [0.0, 100.0, 250.0, 350.0, 500.0],
        "snrs_db": [-4.0, -2.0, 0.0],
        "trials": 20000,
        "f_scs": 15e3,
        "f_c": 6e9,
        "num_paths": 5,
        "max_offset": 1.0,
        "te_hits_only": False,
    },
    "track": {
        "seed": 2024,
        "waveforms": ["ofdm", "dfts-ofdm", "ccdt"],
        "sequences": ["mseq", "qpsk"],
        "two_alpha": -4,
        "two_beta": -4,
        "n_cp": 12,
        "mseq_taps": None,
        "powers": [1.0, 0.75, 0.5, 0.25],
        "p_fa": 0.01,
        "noise_trials": None,
        "snrs_db": [-12.0, -6.0, 0.0],
        "trials": 10000,
        "f_scs": 15e3,
        "f_c": 6e9,
    },
}

SECTIONS = tuple(DEFAULTS)


def load_config(path: str | None) -> dict:
    """Parse a YAML configuration file; ``None`` gives an empty mapping."""
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse config {path}: {e}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of sections")
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return data


def resolve(cfg: dict, section: str, overrides: dict | None = None) -> dict:
    """Merge a config section over its defaults and apply CLI overrides."""
    base = dict(DEFAULTS[section])
    given = cfg.get(section) or {}
    if not isinstance(given, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    unknown = set(given) - set(base)
    if unknown:
        raise ConfigError(f"unknown keys in {section!r}: {sorted(unknown)}")
    base.update(given)
    for k, v in (overrides or {}).items():
        if v is not None:
            base[k] = v
    return base


def _waveform_params(cfg: dict) -> WaveformParams:
    w = resolve(cfg, "waveform")
    try:
        return WaveformParams(int(w["N"]), w["two_alpha"], w["two_beta"], float(w["gamma"]),
                              int(w["n_cp"]))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid waveform parameters: {e}") from None


def _grid(spec, name: str):
    """A list of values or a ``{start, stop, step}`` range (stop exclusive)."""
    if spec is None:
        return None
    if isinstance(spec, dict):
        unknown = set(spec) - {"start", "stop", "step"}
        if unknown or "stop" not in spec:
            raise ConfigError(f"{name} range needs start/stop/step, got {sorted(spec)}")
        start, stop, step = float(spec.get("start", 0)), float(spec["stop"]), float(spec.get("step", 1))
        if step <= 0:
            raise ConfigError(f"{name} step must be positive")
        n = max(0, math.ceil((stop - start) / step - 1e-9))
        vals = start + step * np.arange(n)
    elif isinstance(spec, (list, tuple)):
        vals = np.asarray(spec, dtype=float)
    else:
        raise ConfigError(f"{name} must be a list or a range mapping")
    if vals.size == 0:
        raise ConfigError(f"empty {name} grid")
    return vals


def _sequence(spec, N: int, seed: int) -> np.ndarray:
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("sequence must be a mapping with a 'family' key")
    fam = str(spec["family"]).lower()
    allowed = {"zc": {"root"}, "dft": {"index"}, "mseq": {"taps"}, "qpsk": set()}
    if fam not in allowed:
        raise ConfigError(f"unknown sequence family {fam!r}")
    unknown = set(spec) - {"family"} - allowed[fam]
    if unknown:
        raise ConfigError(f"unknown keys for {fam}: {sorted(unknown)}")
    try:
        if fam == "zc":
            return zadoff_chu(N, int(spec.get("root", 1)))
        if fam == "dft":
            return dft_sequence(N, int(spec.get("index", 0)))
        if fam == "mseq":
            p = int(round(math.log2(N + 1)))
            if 2**p - 1 != N:
                raise ValueError(f"m-sequence needs N = 2^p - 1, got {N}")
            taps = spec.get("taps")
            return m_sequence(LfsrSpec(p, None if taps is None else tuple(taps)))
        return random_mpsk(N, 4, np.random.default_rng(seed))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid sequence: {e}") from None


def _header(section: str, resolved: dict, seed) -> str:
    return json.dumps({"command": section, "seed": seed, "config": resolved},
                      sort_keys=True, default=str)


def _write(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"cannot write {out}: {e.strerror or e}") from None


def _stats_csv(rows: list[ExperimentStats], comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    buf.write(",".join(ExperimentStats.CSV_COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(str(v) for v in r.row()) + "\n")
    return buf.getvalue()


def _build(factory, **kw):
    try:
        return factory(**kw)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


# ---------------------------------------------------------------- commands


def cmd_verify(cfg: dict, args) -> int:
    sec = resolve(cfg, "verify", {"seed": args.seed, "tol": args.tol})
    params = _waveform_params(cfg)
    tol = sec["tol"]
    res = verify_shape_properties(params, 1e-10 if tol is None else float(tol), int(sec["seed"]),
                                  int(sec["zc_root"]), int(sec["dft_index"]))
    res += verify_papr_properties(params, 1e-9 if tol is None else float(tol))
    res.sort(key=lambda r: r.number)
    lines = [f"# {_header('verify', {**resolve(cfg, 'waveform'), **sec}, sec['seed'])}",
             "property,name,max_dev,tol,status"]
    for r in res:
        status = "skipped" if r.skipped else ("pass" if r.passed else "FAIL")
        lines.append(f'{r.number},"{r.name}",{r.max_dev:.3e},{r.tol:.1e},{status}')
    passed = sum(r.passed and not r.skipped for r in res)
    failed = sum(not r.passed for r in res)
    text = "\n".join(lines) + "\n"
    _write(args.out, text)
    if args.out is not None:
        sys.stdout.write(text)
    print(f"{passed} properties passed, {failed} failed, {len(res) - passed - failed} skipped",
          file=sys.stderr)
    return EXIT_OK if failed == 0 else EXIT_RUNTIME


def cmd_af(cfg: dict, args) -> int:
    sec = resolve(cfg, "af", {"seed": args.seed})
    params = _waveform_params(cfg)
    try:
        kind = WaveformKind.parse(sec["waveform"])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    Q = params.N if sec["Q"] is None else int(sec["Q"])
    if Q < params.N or Q % params.N:
        raise ConfigError(f"Q={Q} must be a positive multiple of N={params.N}")
    x = _sequence(sec["sequence"], params.N, int(sec["seed"]))
    deltas = _grid(sec["deltas"], "deltas")
    taus = _grid(sec["taus"], "taus")
    if taus is not None and np.any(taus != np.round(taus)):
        raise ConfigError("taus must be integers")
    if taus is not None:
        taus = taus.astype(np.int64)
    surf = af_surface(Waveform(kind, params).upsample(x, Q), deltas, taus)
    buf = io.StringIO()
    surf.to_csv(buf, _header("af", {**resolve(cfg, "waveform"), **sec}, sec["seed"]))
    _write(args.out, buf.getvalue())
    return EXIT_OK


def cmd_papr(cfg: dict, args) -> int:
    sec = resolve(cfg, "papr", {"seed": args.seed})
    params = _waveform_params(cfg)
    Q = 4 * params.N if sec["Q"] is None else int(sec["Q"])
    if Q < params.N or Q % params.N:
        raise ConfigError(f"Q={Q} must be a positive multiple of N={params.N}")
    if sec["family"] not in ("zc", "dft"):
        raise ConfigError(f"unknown PAPR family {sec['family']!r}")
    try:
        kinds = [WaveformKind.parse(w) for w in sec["waveforms"]]
    except ValueError as e:
        raise ConfigError(str(e)) from None
    entries = []
    for k in kinds:
        entries += papr_sweep(Waveform(k, params), sec["family"], Q)
    buf = io.StringIO()
    write_papr_csv(buf, entries, _header("papr", {**resolve(cfg, "waveform"), **sec, "Q": Q}, sec["seed"]))
    _write(args.out, buf.getvalue())
    return EXIT_OK


def cmd_acquire(cfg: dict, args) -> int:
    sec = resolve(cfg, "acquire", {"seed": args.seed, "trials": args.trials})
    N = int(resolve(cfg, "waveform")["N"])
    common = {k: v for k, v in sec.items() if k != "runs"}
    common["velocities_kmh"] = tuple(float(v) for v in common["velocities_kmh"])
    common["snrs_db"] = tuple(float(v) for v in common["snrs_db"])
    if common["mseq_taps"] is not None:
        common["mseq_taps"] = tuple(common["mseq_taps"])
    runs = sec["runs"]
    if not isinstance(runs, list) or not runs:
        raise ConfigError("acquire.runs must be a non-empty list")
    configs = []
    for i, run in enumerate(runs):
        if not isinstance(run, dict) or set(run) - {"waveform", "sequence", "hypotheses", "exp_id"}:
            raise ConfigError(f"acquire.runs[{i}] needs waveform/sequence/hypotheses")
        configs.append(_build(AcquisitionConfig, N=N, **common, **run))
    rows = []
    for c in configs:
        rows += run_acquisition(c, workers=args.workers)
    _write(args.out, _stats_csv(rows, _header("acquire", {"N": N, **sec}, sec["seed"])))
    return EXIT_OK


def cmd_track(cfg: dict, args) -> int:
    sec = resolve(cfg, "track", {"seed": args.seed, "trials": args.trials})
    N = int(resolve(cfg, "waveform")["N"])
    common = {k: v for k, v in sec.items() if k not in ("waveforms", "sequences")}
    common["snrs_db"] = tuple(float(v) for v in common["snrs_db"])
    common["powers"] = tuple(float(p) for p in common["powers"])
    if common["mseq_taps"] is not None:
        common["mseq_taps"] = tuple(common["mseq_taps"])
    configs = [_build(TrackingConfig, N=N, waveform=w, sequence=s, **common)
               for w in sec["waveforms"] for s in sec["sequences"]]
    if not configs:
        raise ConfigError("track needs at least one waveform and one sequence")
    rows = []
    for c in configs:
        rows += run_tracking(c, workers=args.workers)
    _write(args.out, _stats_csv(rows, _header("track", {"N": N, **sec}, sec["seed"])))
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "af": cmd_af,
    "papr": cmd_papr,
    "acquire": cmd_acquire,
    "track": cmd_track,
}


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chirpaf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="YAML configuration file")
        s.add_argument("--seed", type=_u64, help="master seed (overrides the config)")
        s.add_argument("--out", help="output path (default: stdout)")
        s.add_argument("--tol", type=float, help="property tolerance (verify)")
        s.add_argument("--trials", type=_positive, help="Monte-Carlo trials per point")
        s.add_argument("--workers", type=_positive, default=1, help="worker processes")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    if args.out is not None and not Path(args.out).parent.is_dir():
        print(f"chirpaf: output directory {Path(args.out).parent} does not exist", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        print(f"chirpaf: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"chirpaf: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except Exception as e:  # noqa: BLE001 - report any runtime failure with context
        print(f"chirpaf {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
