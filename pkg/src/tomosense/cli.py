"""Command-line front end: reproducible batch runs over the library.

Every run resolves its configuration from flags, an optional flat key=value
config file (flags win), and per-command frozen defaults (r = 1/sqrt(2),
phi = 0, alpha = 1.8).  Outputs are written atomically (temp file + rename)
next to a ``<out>.meta`` sidecar holding the fully resolved configuration;
rerunning a subcommand with ``--config <out>.meta`` regenerates the output
byte for byte.

Exit codes: 0 success, 2 validation/usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import __version__
from .errors import NumericalError, ValidationError
from .homodyne import (
    empirical_crossover,
    record_bytes,
    record_csv,
    sample_quadrature,
    state_pair,
)
from .states import (
    CatParams,
    SqueezeParams,
    StateSpec,
    build_state,
    mean_photon_number,
    quadrature_variance,
)
from .tomography import (
    QuadratureGrid,
    auto_grid,
    pdf_slice,
    tomogram,
    tomogram_csv,
    tomogram_pgm,
)
from .transport import (
    SweepTable,
    crossover_json,
    equal_mean_alpha,
    equal_mean_parameter,
    find_crossover,
    sweep_csv,
    sweep_w1,
    w1_curve,
    w1_states,
)

R_DEFAULT = 1.0 / math.sqrt(2.0)

_PI_FRACTION = re.compile(
    r"^\s*([+-]?)(\d+(?:\.\d*)?)?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$", re.IGNORECASE
)


def parse_theta(text: str) -> float:
    """Angle in radians from a decimal or a pi fraction like ``pi/20`` or ``3pi/4``."""
    m = _PI_FRACTION.match(str(text))
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * coef * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"cannot parse angle {text!r}") from None


_STATE_OPTIONS = [
    ("family", str, "svs"),
    ("r", float, R_DEFAULT),
    ("phi", parse_theta, 0.0),
    ("alpha-re", float, 1.8),
    ("alpha-im", float, 0.0),
    ("m", int, 0),
    ("tail-tol", float, 1e-12),
]
_B_STATE_OPTIONS = [(f"b-{name}", typ, dflt) for name, typ, dflt in _STATE_OPTIONS]
_GRID_OPTIONS = [("grid-halfwidth", float, None), ("grid-points", int, 2048)]

OPTIONS = {
    "state": _STATE_OPTIONS + [("out", str, None)],
    "observables": _STATE_OPTIONS + [("theta", parse_theta, 0.0), ("out", str, None)],
    "slice": _STATE_OPTIONS + _GRID_OPTIONS
    + [("theta", parse_theta, 0.0), ("out", str, None)],
    "tomogram": _STATE_OPTIONS + _GRID_OPTIONS
    + [("theta-count", int, 128), ("format", str, "pgm"), ("out", str, None)],
    "w1": _STATE_OPTIONS + _B_STATE_OPTIONS
    + [("theta", parse_theta, 0.0), ("grid-points", int, 2048), ("out", str, None)],
    "sweep": _STATE_OPTIONS
    + [("compare", str, "1,2,3"), ("lo", float, 0.3), ("hi", float, 0.8),
       ("steps", int, 51), ("theta", parse_theta, 0.0), ("grid-points", int, 2048),
       ("out", str, None)],
    "crossover": _STATE_OPTIONS
    + [("pair", str, "add1:add2"), ("lo", float, 0.3), ("hi", float, 0.6),
       ("theta", parse_theta, 0.0), ("scan-points", int, 64),
       ("grid-points", int, 2048), ("out", str, None)],
    "sample": _STATE_OPTIONS
    + [("theta", parse_theta, 0.0), ("shots", int, 100_000), ("seed", int, 12345),
       ("format", str, "csv"), ("out", str, None)],
    "empirical-crossover": _STATE_OPTIONS
    + [("pair", str, "add1:add2"), ("lo", float, 0.3), ("hi", float, 0.6),
       ("theta", parse_theta, 0.0), ("scan-points", int, 64),
       ("shots", int, 1_000_000), ("seed", int, 12345), ("out", str, None)],
    "reproduce": [("outdir", str, None), ("steps", int, 51), ("theta-count", int, 128),
                  ("grid-points", int, 2048), ("shots", int, 1_000_000),
                  ("seed", int, 20240601), ("empirical", int, 1),
                  ("tail-tol", float, 1e-12)],
}


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def read_config(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"bad config line (expected key=value): {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def resolve_config(subcommand: str, flags: dict, config_path: str | None) -> dict:
    """Merge flag values over config-file values over defaults."""
    file_values = read_config(config_path) if config_path else {}
    resolved = {}
    for name, typ, default in OPTIONS[subcommand]:
        dest = name.replace("-", "_")
        value = flags.get(dest)
        if value is None and name in file_values:
            value = typ(file_values[name])
        if value is None:
            value = default
        resolved[name] = value
    for target in ("out", "outdir"):
        if any(name == target for name, _, _ in OPTIONS[subcommand]) and resolved[target] is None:
            raise ValidationError(f"--{target} is required (flag or config file)")
    return resolved


def _meta_text(subcommand: str, cfg: dict) -> str:
    lines = [
        f"# tomosense {__version__} run metadata",
        f"# rerun: tomosense {subcommand} --config <this file>",
        f"subcommand={subcommand}",
    ]
    lines.extend(f"{k}={_format_value(v)}" for k, v in cfg.items() if v is not None)
    return "\n".join(lines) + "\n"


def atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tomosense-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _state_spec(cfg: dict, prefix: str = "") -> StateSpec:
    family = cfg[f"{prefix}family"]
    m = cfg[f"{prefix}m"]
    tail = cfg.get(f"{prefix}tail-tol", cfg.get("tail-tol", 1e-12))
    if family == "svs":
        params = SqueezeParams(cfg[f"{prefix}r"], cfg[f"{prefix}phi"])
    else:
        params = CatParams(complex(cfg[f"{prefix}alpha-re"], cfg[f"{prefix}alpha-im"]))
    return StateSpec(family, params, m, tail)


def _grid_for(cfg: dict, vectors) -> QuadratureGrid:
    if cfg.get("grid-halfwidth") is not None:
        return QuadratureGrid(-cfg["grid-halfwidth"], cfg["grid-halfwidth"],
                              cfg["grid-points"])
    grid = auto_grid(vectors[0], n_points=cfg["grid-points"])
    for v in vectors[1:]:
        grid = grid.union(auto_grid(v, n_points=cfg["grid-points"]))
    return grid


def _parse_delta(token: str) -> int:
    token = token.strip().lower()
    if token.startswith("add"):
        return int(token[3:])
    if token.startswith("sub"):
        return -int(token[3:])
    return int(token)


# ---------------------------------------------------------------------------
# subcommand handlers: cfg -> bytes payload for cfg["out"]
# ---------------------------------------------------------------------------

def _handle_state(cfg: dict) -> bytes:
    v = build_state(_state_spec(cfg))
    lines = ["n,re,im,prob"]
    lines.extend(
        f"{n},{c.real:.17g},{c.imag:.17g},{p:.17g}"
        for n, (c, p) in enumerate(zip(v.amplitudes, v.probabilities))
    )
    return ("\n".join(lines) + "\n").encode()


def _handle_observables(cfg: dict) -> bytes:
    v = build_state(_state_spec(cfg))
    payload = {
        "mean_photon_number": mean_photon_number(v),
        "quadrature_variance": quadrature_variance(v, cfg["theta"]),
        "theta": cfg["theta"],
        "cutoff": v.cutoff,
        "discarded_mass": v.discarded_mass,
    }
    return (json.dumps(payload, indent=2) + "\n").encode()


def _handle_slice(cfg: dict) -> bytes:
    v = build_state(_state_spec(cfg))
    sl = pdf_slice(v, cfg["theta"], _grid_for(cfg, [v]))
    lines = ["x,pdf,cdf"]
    lines.extend(
        f"{x:.17g},{p:.17g},{c:.17g}"
        for x, p, c in zip(sl.grid.points(), sl.pdf, sl.cdf)
    )
    return ("\n".join(lines) + "\n").encode()


def _handle_tomogram(cfg: dict) -> bytes:
    v = build_state(_state_spec(cfg))
    tg = tomogram(v, cfg["theta-count"], _grid_for(cfg, [v]))
    if cfg["format"] == "pgm":
        return tomogram_pgm(tg)
    if cfg["format"] == "csv":
        return tomogram_csv(tg).encode()
    raise ValidationError(f"tomogram format must be csv or pgm, got {cfg['format']!r}")


def _handle_w1(cfg: dict) -> bytes:
    value = w1_states(_state_spec(cfg), _state_spec(cfg, "b-"), cfg["theta"],
                      n_points=cfg["grid-points"])
    return (json.dumps({"w1": value, "theta": cfg["theta"]}, indent=2) + "\n").encode()


def _handle_sweep(cfg: dict) -> bytes:
    reference = _state_spec(cfg)
    deltas = [_parse_delta(tok) for tok in cfg["compare"].split(",") if tok.strip()]
    if not deltas:
        raise ValidationError("--compare needs at least one photon delta")
    comparisons = [
        StateSpec(reference.family, reference.params, d, reference.tail_tol) for d in deltas
    ]
    table = sweep_w1(reference, comparisons, (cfg["lo"], cfg["hi"], cfg["steps"]),
                     cfg["theta"], n_points=cfg["grid-points"])
    return sweep_csv(table).encode()


def _crossover_curves(cfg: dict):
    reference = _state_spec(cfg)
    tok_a, _, tok_b = cfg["pair"].partition(":")
    if not tok_b:
        raise ValidationError("--pair must look like add1:add2")
    specs = [
        StateSpec(reference.family, reference.params, _parse_delta(tok), reference.tail_tol)
        for tok in (tok_a, tok_b)
    ]
    return reference, specs


def _handle_crossover(cfg: dict) -> bytes:
    reference, (spec_a, spec_b) = _crossover_curves(cfg)
    result = find_crossover(
        w1_curve(reference, spec_a, n_points=cfg["grid-points"]),
        w1_curve(reference, spec_b, n_points=cfg["grid-points"]),
        (cfg["lo"], cfg["hi"]), cfg["theta"], scan_points=cfg["scan-points"],
    )
    return crossover_json(result).encode()


def _handle_sample(cfg: dict) -> bytes:
    v = build_state(_state_spec(cfg))
    record = sample_quadrature(v, cfg["theta"], cfg["shots"], cfg["seed"])
    if cfg["format"] == "bin":
        return record_bytes(record)
    if cfg["format"] == "csv":
        return record_csv(record).encode()
    raise ValidationError(f"sample format must be csv or bin, got {cfg['format']!r}")


def _handle_empirical_crossover(cfg: dict) -> bytes:
    reference, (spec_a, spec_b) = _crossover_curves(cfg)
    result = empirical_crossover(
        (state_pair(reference, spec_a), state_pair(reference, spec_b)),
        cfg["theta"], (cfg["lo"], cfg["hi"]), cfg["shots"], cfg["seed"],
        scan_points=cfg["scan-points"],
    )
    return crossover_json(result, extra={"low_confidence": result.low_confidence}).encode()


HANDLERS = {
    "state": _handle_state,
    "observables": _handle_observables,
    "slice": _handle_slice,
    "tomogram": _handle_tomogram,
    "w1": _handle_w1,
    "sweep": _handle_sweep,
    "crossover": _handle_crossover,
    "sample": _handle_sample,
    "empirical-crossover": _handle_empirical_crossover,
}


# ---------------------------------------------------------------------------
# reproduce: the full standard sweep set
# ---------------------------------------------------------------------------

ADDED_THETAS = [("0", "0"), ("pi100", "pi/100"), ("pi50", "pi/50"), ("pi35", "pi/35"),
                ("pi20", "pi/20"), ("pi10", "pi/10"), ("pi4", "pi/4"), ("pi2", "pi/2")]
SUBTRACTED_THETAS = [("0", "0"), ("pi100", "pi/100"), ("pi75", "pi/75"), ("pi50", "pi/50"),
                     ("pi35", "pi/35"), ("pi20", "pi/20"), ("pi4", "pi/4"), ("pi2", "pi/2")]


def _reproduce_jobs(cfg: dict) -> list[tuple[str, str, dict]]:
    """(filename, subcommand, sub-config) triples covering the standard set."""
    steps, points, tail = cfg["steps"], cfg["grid-points"], cfg["tail-tol"]

    def svs_sweep(theta, compare):
        return {"family": "svs", "r": R_DEFAULT, "phi": 0.0, "alpha-re": 1.8,
                "alpha-im": 0.0, "m": 0, "tail-tol": tail, "compare": compare,
                "lo": 0.3, "hi": 0.8, "steps": steps, "theta": parse_theta(theta),
                "grid-points": points}

    jobs = []
    for tag, theta in ADDED_THETAS:
        jobs.append((f"w1_added_theta_{tag}.csv", "sweep", svs_sweep(theta, "1,2,3")))
    for tag, theta in SUBTRACTED_THETAS:
        jobs.append((f"w1_subtracted_theta_{tag}.csv", "sweep",
                     svs_sweep(theta, "-1,-2,-3")))
    ecs_sweep = svs_sweep("pi/2", "1,2")
    ecs_sweep.update({"family": "cat-even", "lo": 1.5, "hi": 2.5})
    jobs.append(("w1_ecs_added.csv", "sweep", ecs_sweep))

    def crossover_job(pair, lo, hi, theta, family="svs"):
        job = svs_sweep(theta, "")
        job.pop("compare")
        job.pop("steps")
        job.update({"family": family, "pair": pair, "lo": lo, "hi": hi,
                    "scan-points": 64})
        return job

    jobs.append(("crossover_added_1v2.json", "crossover",
                 crossover_job("add1:add2", 0.30, 0.60, "0")))
    jobs.append(("crossover_added_1v3.json", "crossover",
                 crossover_job("add1:add3", 0.45, 0.75, "0")))
    jobs.append(("crossover_ecs_1v2.json", "crossover",
                 crossover_job("add1:add2", 1.5, 2.5, "pi/2", family="cat-even")))

    for label, family, m in [("svs", "svs", 0), ("svs_add1", "svs", 1),
                             ("svs_add2", "svs", 2), ("svs_add3", "svs", 3),
                             ("svs_sub2", "svs", -2), ("svs_sub3", "svs", -3),
                             ("ecs", "cat-even", 0), ("ecs_add1", "cat-even", 1),
                             ("ecs_add2", "cat-even", 2)]:
        jobs.append((f"tomogram_{label}.pgm", "tomogram",
                     {"family": family, "r": R_DEFAULT, "phi": 0.0, "alpha-re": 1.8,
                      "alpha-im": 0.0, "m": m, "tail-tol": tail,
                      "grid-halfwidth": None, "grid-points": points,
                      "theta-count": cfg["theta-count"], "format": "pgm"}))

    if cfg["empirical"]:
        job = crossover_job("add1:add2", 0.30, 0.60, "0")
        job.update({"shots": cfg["shots"], "seed": cfg["seed"]})
        jobs.append(("empirical_crossover_added_1v2.json", "empirical-crossover", job))
    return jobs


def _reproduce_tables(cfg: dict) -> list[tuple[str, bytes]]:
    """Summary tables that are not single-subcommand products."""
    steps, points, tail = cfg["steps"], cfg["grid-points"], cfg["tail-tol"]
    rs = np.linspace(0.3, 0.8, steps)
    svs = lambda m: StateSpec("svs", SqueezeParams(R_DEFAULT), m, tail)  # noqa: E731

    outputs = []
    nbar = {m: np.array([mean_photon_number(build_state(svs(m).with_parameter(r)))
                         for r in rs]) for m in range(4)}
    outputs.append(("mean_photon_vs_r.csv", sweep_csv(SweepTable(
        "r", rs, [(f"nbar_m{m}", nbar[m]) for m in range(4)])).encode()))

    w1_cols = []
    for m in (1, 2, 3):
        w1s = np.array([w1_states(svs(0).with_parameter(r), svs(m).with_parameter(r),
                                  0.0, n_points=points) for r in rs])
        w1_cols += [(f"nbar_add{m}", nbar[m]), (f"w1_add{m}", w1s)]
    outputs.append(("w1_vs_mean_photon.csv", sweep_csv(SweepTable("r", rs, w1_cols)).encode()))

    var_cols, kappas = [], {}
    for m in (0, 1, 2):
        var = np.array([quadrature_variance(build_state(svs(m).with_parameter(r)), 0.0)
                        for r in rs])
        var_cols.append((f"var_m{m}", var))
        kappas[f"m{m}"] = float(-np.polyfit(rs, np.log(var), 1)[0])
    outputs.append(("variance_vs_r.csv", sweep_csv(SweepTable("r", rs, var_cols)).encode()))
    outputs.append(("kappa_fits.json", (json.dumps(kappas, indent=2) + "\n").encode()))

    ecs = StateSpec("cat-even", CatParams(1.0), 0, tail)
    rs_cat = np.linspace(0.1, 0.8, steps)
    alphas = np.array([equal_mean_alpha(r) for r in rs_cat])
    w1_ecs = np.array([
        w1_states(svs(0).with_parameter(r), ecs.with_parameter(a), 0.0, n_points=points)
        for r, a in zip(rs_cat, alphas)
    ])
    outputs.append(("w1_svs_ecs_equal_mean.csv", sweep_csv(SweepTable(
        "r", rs_cat, [("alpha", alphas), ("w1_svs_vs_ecs", w1_ecs)])).encode()))

    ocs = StateSpec("cat-odd", CatParams(1.0), 0, tail)
    ecs1 = StateSpec("cat-even", CatParams(1.0), 1, tail)
    cols = {"w1_add1_vs_ocs": [], "w1_add1_vs_ecs_add1": []}
    for r in rs_cat:
        target = mean_photon_number(build_state(svs(1).with_parameter(r)))
        for label, template in (("w1_add1_vs_ocs", ocs), ("w1_add1_vs_ecs_add1", ecs1)):
            a = equal_mean_parameter(template, target)
            cols[label].append(w1_states(svs(1).with_parameter(r),
                                         template.with_parameter(a), 0.0, n_points=points))
    outputs.append(("w1_add1_vs_cats_equal_mean.csv", sweep_csv(SweepTable(
        "r", rs_cat, [(k, np.array(v)) for k, v in cols.items()])).encode()))
    return outputs


def _handle_reproduce(cfg: dict) -> int:
    outdir = cfg["outdir"]
    for filename, subcommand, sub_cfg in _reproduce_jobs(cfg):
        path = os.path.join(outdir, filename)
        sub_cfg = dict(sub_cfg, **{"out": path})
        payload = HANDLERS[subcommand](sub_cfg)
        atomic_write(path, payload)
        atomic_write(path + ".meta", _meta_text(subcommand, sub_cfg).encode())
    for filename, payload in _reproduce_tables(cfg):
        path = os.path.join(outdir, filename)
        atomic_write(path, payload)
        atomic_write(path + ".meta",
                     _meta_text("reproduce", dict(cfg, outdir=outdir)).encode())
    return 0


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def run(subcommand: str, flags: dict, config_path: str | None = None) -> int:
    """Resolve configuration, dispatch, and write output plus metadata."""
    cfg = resolve_config(subcommand, flags, config_path)
    if subcommand == "reproduce":
        return _handle_reproduce(cfg)
    payload = HANDLERS[subcommand](cfg)
    out = cfg["out"]
    atomic_write(out, payload)
    atomic_write(out + ".meta", _meta_text(subcommand, cfg).encode())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomosense",
        description="Tomogram synthesis and Wasserstein sensing of photon-number changes",
    )
    parser.add_argument("--version", action="version", version=f"tomosense {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, options in OPTIONS.items():
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", default=None, help="flat key=value config file")
        for opt, typ, default in options:
            sub.add_argument(f"--{opt}", type=typ, default=None,
                             help=f"(default {default})" if default is not None else None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    subcommand = args.pop("subcommand")
    config_path = args.pop("config")
    try:
        return run(subcommand, args, config_path)
    except ValidationError as exc:
        print(f"tomosense: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"tomosense: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
