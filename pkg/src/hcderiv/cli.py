"""Command-line surface.

Subcommands: ``coeffs`` projects a registry function onto the basis,
``diff`` runs the truncation differentiator on a coefficient file,
``cross`` dumps a hyperbolic-cross index set, ``experiment`` drives a
convergence study (CSV/JSON/SVG emitters), ``radius`` runs the witness
lower-bound study.

Exit codes: 0 success, 2 input error, 3 admissibility violation,
4 config validation failure, 5 witness infeasibility.

Every emitted file references a manifest hash computed over the tool
version, command, argument echo, and RNG algorithm id, so results can
be traced back to the invocation that produced them; the hash excludes
timestamps, keeping repeated runs byte-identical.  File writes go
through a temp-file rename, so interrupted runs never leave half
files.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone

from . import __version__
from .cross import build_cross, cardinality, dump_cross
from .harness import (
    REGISTRY,
    DecayProfile,
    ExperimentConfig,
    ExperimentResult,
    run_convergence_study,
    run_radius_study,
    synthesize_class_function,
)
from .lowerbound import WitnessInfeasibleError, witness_for_cross
from .noise import RNG_ALGORITHM, NoiseSpec, lp_norm, perturb
from .quadrature import compute_coeff_grid
from .spectral import (
    ClassParams,
    dump_grid,
    load_grid,
    parseval_l2_norm,
    sup_norm_on_grid,
)
from .truncation import (
    AdmissibilityError,
    MethodParams,
    SelectionInput,
    apply_method,
    select_parameters,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ADMISSIBILITY = 3
EXIT_CONFIG = 4
EXIT_INFEASIBLE = 5

CSV_HEADER = "delta,n,gamma,cross_card,error_l2,error_c,noise_norm,wall_ms"


class ConfigError(Exception):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _parse_p(text: str) -> float:
    return math.inf if text.strip().lower() == "inf" else float(text)


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _manifest_hash(command: str, echo: dict) -> str:
    payload = json.dumps(
        {
            "version": __version__,
            "command": command,
            "args": echo,
            "rng_algorithm": RNG_ALGORITHM,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("ascii")).hexdigest()[:16]


def _write_manifest(primary_out: str, command: str, echo: dict, outputs: list[str]) -> str:
    digest = _manifest_hash(command, echo)
    manifest = {
        "version": __version__,
        "command": command,
        "args": echo,
        "rng_algorithm": RNG_ALGORITHM,
        "hash": digest,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    }
    _atomic_write(primary_out + ".manifest.json", json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return digest


# ---------------------------------------------------------------------------
# coeffs

def _cmd_coeffs(args) -> int:
    entry = REGISTRY.get(args.function)
    if entry is None:
        print(f"error: unknown function id {args.function!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.k < 0:
        print(f"error: K must be >= 0, got {args.k}", file=sys.stderr)
        return EXIT_INPUT
    if entry.synthetic:
        cls = ClassParams(s=args.s, mu=args.mu)
        grid = synthesize_class_function(
            cls, DecayProfile(epsilon=args.epsilon, kmax=args.k), args.seed
        )
    else:
        grid = compute_coeff_grid(entry.callable(), args.k, args.m)
    echo = {"function": args.function, "k": args.k, "m": args.m, "seed": args.seed}
    digest = _write_manifest(args.out, "coeffs", echo, [args.out])
    _atomic_write(args.out, f"# manifest sha256={digest}\n" + dump_grid(grid))
    return EXIT_OK


# ---------------------------------------------------------------------------
# diff

def _cmd_diff(args) -> int:
    grid = load_grid(args.coeffs)
    cls = ClassParams(s=args.s, mu=args.mu)
    metric = "c" if args.metric == "c" else "l2"
    si = SelectionInput(
        delta=args.delta, p=args.p, cls=cls, r1=args.r1, r2=args.r2, metric=metric
    )
    sel = select_parameters(si, forced_gamma=args.gamma)
    cross = build_cross(sel.n, sel.gamma, args.r1, args.r2)
    support = max(cross.k_extent(), cross.j_extent()) + 2
    noise_meta: dict = {"mode": args.noise}
    if args.noise == "off":
        c_delta = grid
    else:
        mode = {"sphere": "random-sphere", "single": "single-coefficient",
                "witness": "adversarial-witness"}[args.noise]
        spec = NoiseSpec(p=args.p, delta=args.delta, mode=mode, seed=args.seed, support=support)
        witness = None
        if args.noise == "witness":
            witness = witness_for_cross(cross, args.delta, args.p, cls)
        c_delta, xi = perturb(grid, spec, witness=witness)
        noise_meta = {
            "mode": mode,
            "p": "inf" if math.isinf(args.p) else args.p,
            "delta": args.delta,
            "seed": args.seed,
            "support": support,
            "norm": lp_norm(xi, args.p),
            "algorithm": RNG_ALGORITHM,
        }
    deriv = apply_method(c_delta, MethodParams(n=sel.n, gamma=sel.gamma, r1=args.r1, r2=args.r2))
    echo = {
        "coeffs": os.path.basename(args.coeffs),
        "r1": args.r1, "r2": args.r2, "delta": args.delta,
        "p": "inf" if math.isinf(args.p) else args.p,
        "s": args.s, "mu": args.mu, "metric": args.metric,
        "noise": args.noise, "seed": args.seed, "gamma": args.gamma,
    }
    digest = _write_manifest(args.out, "diff", echo, [args.out, args.out + ".json"])
    _atomic_write(args.out, f"# manifest sha256={digest}\n" + dump_grid(deriv))
    sidecar = {
        "manifest": digest,
        "n": sel.n,
        "gamma": sel.gamma,
        "case_label": sel.case_label,
        "cross_cardinality": cardinality(cross),
        "noise": noise_meta,
    }
    if args.reference:
        ref = load_grid(args.reference)
        diff = deriv - ref
        sidecar["error_l2"] = parseval_l2_norm(diff)
        sidecar["error_c"] = sup_norm_on_grid(diff, args.resolution)
    _atomic_write(args.out + ".json", json.dumps(sidecar, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# cross

def _cmd_cross(args) -> int:
    cross = build_cross(args.n, args.gamma, args.r1, args.r2)
    echo = {"n": args.n, "gamma": args.gamma, "r1": args.r1, "r2": args.r2}
    digest = _write_manifest(args.out, "cross", echo, [args.out])
    _atomic_write(args.out, f"# manifest sha256={digest}\n" + dump_cross(cross))
    print(f"cross cardinality: {cardinality(cross)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment

_CONFIG_SCHEMA = {
    "class": {"s": float, "mu": float},
    "orders": {"r1": int, "r2": int},
    "noise": {"mode": str, "p": _parse_p, "seed": int, "num_seeds": int},
    "sweep": {"delta_start": float, "delta_stop": float, "count": int},
    "function": {"id": str, "epsilon": float, "k_ref": int},
    "method": {"metric": str, "sup_resolution": int, "gamma": float},
    "output": {"timing": str},
}

_CONFIG_FIELD_MAP = {
    ("class", "s"): "s",
    ("class", "mu"): "mu",
    ("orders", "r1"): "r1",
    ("orders", "r2"): "r2",
    ("noise", "mode"): "noise_mode",
    ("noise", "p"): "p",
    ("noise", "seed"): "seed",
    ("noise", "num_seeds"): "num_seeds",
    ("sweep", "delta_start"): "delta_start",
    ("sweep", "delta_stop"): "delta_stop",
    ("sweep", "count"): "delta_count",
    ("function", "id"): "function_id",
    ("function", "epsilon"): "epsilon",
    ("function", "k_ref"): "k_ref",
    ("method", "metric"): "metric",
    ("method", "sup_resolution"): "sup_resolution",
    ("method", "gamma"): "gamma_override",
}


def load_experiment_config(path: str) -> ExperimentConfig:
    """Parse the bracketed key=value config file into an ExperimentConfig.

    Collects every problem (unknown section/key, unparsable value,
    invalid field) instead of stopping at the first.
    """
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError([f"config parse failure: {exc}"])
    if not read:
        raise ConfigError([f"config file not found: {path}"])
    problems: list[str] = []
    fields: dict = {}
    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            problems.append(f"unknown section [{section}]")
            continue
        for key, raw in parser.items(section):
            conv = _CONFIG_SCHEMA[section].get(key)
            if conv is None:
                problems.append(f"unknown key {key!r} in section [{section}]")
                continue
            if (section, key) == ("output", "timing"):
                if raw.strip().lower() not in ("on", "off"):
                    problems.append(f"timing: must be on/off, got {raw!r}")
                else:
                    fields["timing"] = raw.strip().lower() == "on"
                continue
            try:
                fields[_CONFIG_FIELD_MAP[(section, key)]] = conv(raw)
            except ValueError:
                problems.append(f"{key}: cannot parse value {raw!r}")
    if problems:
        raise ConfigError(problems)
    config = ExperimentConfig(**fields)
    problems = config.validate()
    if problems:
        raise ConfigError(problems)
    return config


def _result_to_json(result: ExperimentResult, config: ExperimentConfig, digest: str) -> str:
    payload = {
        "schema": "experiment-result v1",
        "manifest": digest,
        "config": {
            key: ("inf" if isinstance(value, float) and math.isinf(value) else value)
            for key, value in dataclasses.asdict(config).items()
        },
        "rng_algorithm": result.rng_algorithm,
        "case_label": result.case_label,
        "noise_support": result.noise_support,
        "records": [dataclasses.asdict(r) for r in result.records],
        "fitted_exponent_l2": result.fitted_exponent_l2,
        "fitted_exponent_c": result.fitted_exponent_c,
        "theoretical_exponent_l2": result.theoretical_exponent_l2,
        "theoretical_exponent_c": result.theoretical_exponent_c,
        "fit_l2": dataclasses.asdict(result.fit_l2) if result.fit_l2 else None,
        "fit_c": dataclasses.asdict(result.fit_c) if result.fit_c else None,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _result_to_csv(result: ExperimentResult, digest: str) -> str:
    lines = [f"# manifest sha256={digest}", CSV_HEADER]
    for r in result.records:
        lines.append(
            f"{r.delta!r},{r.n!r},{r.gamma!r},{r.cross_card},"
            f"{r.error_l2!r},{r.error_c!r},{r.noise_norm!r},{r.wall_ms!r}"
        )
    return "\n".join(lines) + "\n"


def _svg_rate_plot(result: ExperimentResult, config: ExperimentConfig, digest: str) -> str:
    """Log-log error-against-delta plot, 600x400 user units.

    Draws the measured errors for the metric under study as one
    polyline and the theoretical slope as a reference line through the
    last measured point.
    """
    metric = "c" if config.metric == "c" else "l2"
    errors = [r.error_c if metric == "c" else r.error_l2 for r in result.records]
    deltas = [r.delta for r in result.records]
    theo = (
        result.theoretical_exponent_c if metric == "c" else result.theoretical_exponent_l2
    )
    width, height, margin = 600.0, 400.0, 50.0
    pts = [(d, e) for d, e in zip(deltas, errors) if e > 0]
    xs = [math.log10(d) for d, _ in pts]
    ys = [math.log10(e) for _, e in pts]
    ref_ys = []
    if theo is not None and pts:
        # anchor the reference slope at the smallest-delta point
        x0, y0 = xs[-1], ys[-1]
        ref_ys = [y0 + theo * (x - x0) for x in xs]
    lo_x, hi_x = min(xs), max(xs)
    lo_y = min(ys + (ref_ys or ys))
    hi_y = max(ys + (ref_ys or ys))
    span_x = hi_x - lo_x or 1.0
    span_y = hi_y - lo_y or 1.0

    def to_px(x: float, y: float) -> tuple[float, float]:
        px = margin + (x - lo_x) / span_x * (width - 2 * margin)
        py = height - margin - (y - lo_y) / span_y * (height - 2 * margin)
        return px, py

    def polyline(points, color, dash=""):
        coords = " ".join(f"{px:.2f},{py:.2f}" for px, py in points)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{extra} points="{coords}"/>'

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- manifest sha256={digest} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 10:.0f}" text-anchor="middle" '
        f'font-size="12">log10 delta</text>',
        f'<text x="15" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {height / 2:.0f})">log10 error ({metric})</text>',
        polyline([to_px(x, y) for x, y in zip(xs, ys)], "#1f6fb2"),
    ]
    if ref_ys:
        parts.append(polyline([to_px(x, y) for x, y in zip(xs, ref_ys)], "#b23f1f", dash="6,4"))
        parts.append(
            f'<text x="{width - margin:.0f}" y="{margin - 10:.0f}" text-anchor="end" '
            f'font-size="12">reference slope {theo:.4f}'
            + (
                f", fitted {result.fitted_exponent_c:.4f}"
                if metric == "c" and result.fitted_exponent_c is not None
                else (
                    f", fitted {result.fitted_exponent_l2:.4f}"
                    if metric != "c" and result.fitted_exponent_l2 is not None
                    else ""
                )
            )
            + "</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cmd_experiment(args) -> int:
    config = load_experiment_config(args.config)
    result = run_convergence_study(config)
    echo = {"config": os.path.basename(args.config)}
    echo.update(
        {
            key: ("inf" if isinstance(value, float) and math.isinf(value) else value)
            for key, value in dataclasses.asdict(config).items()
        }
    )
    outputs = [p for p in (args.out_csv, args.out_json, args.out_svg) if p]
    digest = _write_manifest(outputs[0], "experiment", echo, outputs)
    if args.out_csv:
        _atomic_write(args.out_csv, _result_to_csv(result, digest))
    if args.out_json:
        _atomic_write(args.out_json, _result_to_json(result, config, digest))
    if args.out_svg:
        _atomic_write(args.out_svg, _svg_rate_plot(result, config, digest))
    return EXIT_OK


# ---------------------------------------------------------------------------
# radius

def _cmd_radius(args) -> int:
    try:
        n_values = [int(x) for x in args.n_values.split(",") if x.strip()]
    except ValueError:
        print(f"error: cannot parse band sizes {args.n_values!r}", file=sys.stderr)
        return EXIT_INPUT
    if len(n_values) < 4 or any(n < 4 for n in n_values):
        print(
            "error: need at least 4 band sizes, each >= 4; "
            "smaller sweeps are too small for rate fitting",
            file=sys.stderr,
        )
        return EXIT_INPUT
    cls = ClassParams(s=args.s, mu=args.mu)
    study = run_radius_study(n_values, cls, args.r1, args.r2, args.p,
                             sup_resolution=args.resolution)
    echo = {
        "n_values": n_values, "r1": args.r1, "r2": args.r2,
        "s": args.s, "mu": args.mu,
        "p": "inf" if math.isinf(args.p) else args.p,
    }
    digest = _write_manifest(args.out_json, "radius", echo, [args.out_json])

    def report(rep):
        return {
            "metric": rep.metric, "N": rep.N, "measured": rep.measured,
            "bound": rep.bound, "passed": rep.passed, "ratio": rep.ratio,
        }

    payload = {
        "schema": "radius-study v1",
        "manifest": digest,
        "params": echo,
        "c_tilde": study.c_tilde,
        "c_bar": study.c_bar,
        "c_dbar": study.c_dbar,
        "records": [
            {
                "N": r.N,
                "delta": r.delta,
                "n": r.n,
                "gamma": r.gamma,
                "verify_c": report(r.verify_c),
                "verify_l2": report(r.verify_l2),
                "skew": {
                    skew: {"c": report(pair[0]), "l2": report(pair[1])}
                    for skew, pair in r.skew_reports.items()
                },
                "method_error_c": r.method_error_c,
                "method_error_l2": r.method_error_l2,
                "radius_bound_c": r.radius_bound_c,
                "radius_bound_l2": r.radius_bound_l2,
            }
            for r in study.records
        ],
        "fitted_method_l2": study.fitted_method_l2,
        "fitted_bound_l2": study.fitted_bound_l2,
        "fitted_method_c": study.fitted_method_c,
        "fitted_bound_c": study.fitted_bound_c,
        "exponent_gap_l2": study.exponent_gap_l2(),
        "exponent_gap_c": study.exponent_gap_c(),
    }
    _atomic_write(args.out_json, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcderiv",
        description="Mixed-derivative recovery from noisy Fourier-Legendre "
        "coefficients by hyperbolic-cross truncation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="project a registry function onto the basis")
    c.add_argument("function", help="registry function id")
    c.add_argument("--k", type=int, required=True, help="largest index per axis")
    c.add_argument("--m", type=int, default=None, help="quadrature order (default K + 10)")
    c.add_argument("--s", type=float, default=2.0)
    c.add_argument("--mu", type=float, default=4.0)
    c.add_argument("--epsilon", type=float, default=0.01)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True)
    c.set_defaults(func=_cmd_coeffs)

    d = sub.add_parser("diff", help="run the truncation differentiator on a coefficient file")
    d.add_argument("coeffs", help="input coefficient grid file")
    d.add_argument("--r1", type=int, required=True)
    d.add_argument("--r2", type=int, required=True)
    d.add_argument("--delta", type=float, required=True)
    d.add_argument("--p", type=_parse_p, default=2.0, help="noise norm index, or 'inf'")
    d.add_argument("--s", type=float, default=2.0)
    d.add_argument("--mu", type=float, required=True)
    d.add_argument("--metric", choices=["l2", "c", "both"], default="l2")
    d.add_argument("--gamma", type=float, default=None, help="optional gamma override")
    d.add_argument("--noise", choices=["sphere", "single", "witness", "off"], default="off")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--reference", default=None, help="exact derivative grid for error reporting")
    d.add_argument("--resolution", type=int, default=257)
    d.add_argument("--out", required=True)
    d.set_defaults(func=_cmd_diff)

    x = sub.add_parser("cross", help="dump a hyperbolic-cross index set")
    x.add_argument("--n", type=float, required=True)
    x.add_argument("--gamma", type=float, default=1.0)
    x.add_argument("--r1", type=int, default=1)
    x.add_argument("--r2", type=int, default=1)
    x.add_argument("--out", required=True)
    x.set_defaults(func=_cmd_cross)

    e = sub.add_parser("experiment", help="run a convergence study from a config file")
    e.add_argument("--config", required=True)
    e.add_argument("--out-csv", default=None)
    e.add_argument("--out-json", default=None)
    e.add_argument("--out-svg", default=None)
    e.set_defaults(func=_cmd_experiment)

    r = sub.add_parser("radius", help="witness lower-bound study over band sizes")
    r.add_argument("--n-values", required=True, help="comma-separated band sizes, e.g. 8,16,32,64")
    r.add_argument("--r1", type=int, default=1)
    r.add_argument("--r2", type=int, default=1)
    r.add_argument("--s", type=float, default=2.0)
    r.add_argument("--mu", type=float, default=3.0)
    r.add_argument("--p", type=_parse_p, default=2.0)
    r.add_argument("--resolution", type=int, default=257)
    r.add_argument("--out-json", required=True)
    r.set_defaults(func=_cmd_radius)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "experiment" and not (args.out_csv or args.out_json or args.out_svg):
        print("error: experiment needs at least one of --out-csv/--out-json/--out-svg",
              file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except AdmissibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except ConfigError as exc:
        print("error: invalid config:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except WitnessInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
