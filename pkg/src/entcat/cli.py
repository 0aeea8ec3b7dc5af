"""Command-line front end.

Subcommands: ``monotones``, ``prob``, ``catalyst``, ``sweep``, ``simulate``
and ``validate-z``.  Exit codes: 0 on success, 1 for invalid input or domain
errors, 2 for numeric failures.  ``--out -`` writes to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

import numpy as np

from . import catalysis, network, simulate, spectra
from .errors import InvalidInputError, NumericFailureError, ResourceLimitError


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _parse_spectrum(text: str) -> spectra.SchmidtVector:
    try:
        weights = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise InvalidInputError(f"could not parse spectrum {text!r}: {exc}") from exc
    return spectra.make_schmidt(weights)


@contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as handle:
            yield handle


# ---------------------------------------------------------------------------
# Config files: one `key = value` per line, `#` comments, auxiliary paths as
# numbered groups (aux.1.alpha, aux.1.P, aux.1.T_s).  Unknown keys reject.
# ---------------------------------------------------------------------------

_SCALAR_KEYS = {
    "mode": str,
    "n_edges": int,
    "trials": int,
    "seed": int,
    "max_slots": int,
    "initial_stock": int,
    "stock_capacity": str,  # integer or the word "unlimited"
    "L0_km": float,
    "cf_km_s": float,
    "P0": float,
    "n": int,
    "alpha": float,
    "catalyst_dim": int,
    "aux_mode": str,
    "p_cat": float,
    "t_cycle_s": float,
}

_AUX_FIELD_KEYS = {"alpha": float, "P": float, "T_s": float}


def parse_config(text: str) -> dict:
    """Parse the plain key = value format into a typed dictionary."""
    values: dict = {}
    aux_groups: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key.startswith("aux."):
            parts = key.split(".")
            if len(parts) != 3 or not parts[1].isdigit() or parts[2] not in _AUX_FIELD_KEYS:
                raise InvalidInputError(f"config line {lineno}: unknown key {key!r}")
            index = int(parts[1])
            cast = _AUX_FIELD_KEYS[parts[2]]
            aux_groups.setdefault(index, {})[parts[2]] = cast(value)
            continue
        if key not in _SCALAR_KEYS:
            raise InvalidInputError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = _SCALAR_KEYS[key](value)
        except ValueError as exc:
            raise InvalidInputError(f"config line {lineno}: bad value for {key}: {exc}") from exc
    if aux_groups:
        paths = []
        for index in sorted(aux_groups):
            group = aux_groups[index]
            missing = set(_AUX_FIELD_KEYS) - set(group)
            if missing:
                raise InvalidInputError(f"aux path {index} is missing keys {sorted(missing)}")
            paths.append(network.AuxPath(group["alpha"], group["P"], group["T_s"]))
        values["aux_paths"] = paths
    return values


def _sim_config_from(values: dict, args) -> simulate.SimConfig:
    merged = dict(values)
    for key in ("trials", "seed"):
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag

    capacity = merged.get("stock_capacity")
    if isinstance(capacity, str):
        capacity = None if capacity == "unlimited" else int(capacity)

    edge = None
    if "alpha" in merged:
        edge = network.EdgeParams(
            alpha=merged["alpha"],
            copies=merged.get("n", 2),
            length_km=merged.get("L0_km", 25.0),
            fiber_speed_km_s=merged.get("cf_km_s", 2.0e5),
            herald_probability=merged.get("P0", 0.5),
            catalyst_dim=merged.get("catalyst_dim", 2),
        )
    aux = network.AuxConfig(merged.get("aux_mode", network.AUX_RICH), merged.get("aux_paths", ()))
    return simulate.SimConfig(
        n_edges=merged.get("n_edges", 1),
        mode=merged.get("mode", simulate.ABSTRACT_MODE),
        edge=edge,
        aux=aux,
        initial_stock=merged.get("initial_stock", 0),
        stock_capacity=capacity,
        max_slots=merged.get("max_slots", 100_000),
        trials=merged.get("trials", 1),
        seed=merged.get("seed", 0),
        p_cat_override=merged.get("p_cat"),
        cycle_time_override_s=merged.get("t_cycle_s"),
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_monotones(args) -> int:
    vec = spectra.monotones(_parse_spectrum(args.spectrum))
    print(",".join(_fmt(v) for v in vec.values))
    return 0


def _cmd_prob(args) -> int:
    initial = _parse_spectrum(args.initial)
    final = _parse_spectrum(args.final)
    if args.catalyst is not None:
        catalyst = _parse_spectrum(args.catalyst)
        initial = spectra.tensor_product(initial, catalyst)
        final = spectra.tensor_product(final, catalyst)
    print(_fmt(spectra.conversion_probability(initial, final)))
    return 0


def _cmd_catalyst(args) -> int:
    problem = catalysis.ConcentrationProblem(args.n, args.alpha)
    if args.dim == 2:
        spec = catalysis.optimal_two_qubit_catalyst(problem)
    else:
        spec = catalysis.search_catalyst(problem, args.dim)
    coeffs = ",".join(_fmt(c) for c in spec.spectrum.coefficients)
    print(f"{coeffs}  p={_fmt(spec.success_probability)}")
    return 0


def _cmd_sweep(args) -> int:
    alpha_grid = np.linspace(args.alpha_min, args.alpha_max, args.steps)
    modes = [m.strip() for m in args.mode.split(",")]
    dims = [int(d) for d in args.dim.split(",")]
    for mode in modes:
        if mode == network.FINITE_AUX:
            raise InvalidInputError(
                "finite aux mode needs explicit paths; use the library API for that"
            )
    rows = network.sweep_rates(
        args.n,
        args.edges,
        [float(a) for a in alpha_grid],
        modes,
        dims,
        length_km=args.l0_km,
        fiber_speed_km_s=args.cf_km_s,
        herald_probability=args.p0,
    )
    with _open_out(args.out) as handle:
        network.write_sweep_csv(rows, handle)
    return 0


def _cmd_simulate(args) -> int:
    values: dict = {}
    if args.config is not None:
        with open(args.config) as handle:
            values = parse_config(handle.read())
    cfg = _sim_config_from(values, args)
    result = simulate.run_simulation(cfg)
    record = simulate.result_record(cfg, result)
    with _open_out(args.out) as handle:
        handle.write(json.dumps(record) + "\n")
    return 0


def _cmd_validate_z(args) -> int:
    check = simulate.validate_waiting_factor(args.edges, args.p, args.trials, args.seed)
    print(
        json.dumps(
            {
                "n_edges": check.n_edges,
                "p": check.p,
                "trials": check.trials,
                "empirical_mean": check.empirical_mean,
                "analytic": check.analytic,
                "std_error": check.std_error,
                "deviation_sigmas": check.deviation_sigmas,
                "passed": check.passed,
            }
        )
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entcat",
        description="Catalysis-assisted entanglement distribution: probabilities, "
        "catalysts, rates and chain simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monotones", help="print the entanglement monotones of a spectrum")
    p.add_argument("spectrum", help="comma-separated coefficients, e.g. 0.64,0.16,0.16,0.04")
    p.set_defaults(func=_cmd_monotones)

    p = sub.add_parser("prob", help="optimal conversion probability between two spectra")
    p.add_argument("--initial", required=True)
    p.add_argument("--final", required=True)
    p.add_argument("--catalyst", default=None, help="attach this spectrum to both sides")
    p.set_defaults(func=_cmd_prob)

    p = sub.add_parser("catalyst", help="optimal catalyst for a concentration problem")
    p.add_argument("--n", type=int, required=True, help="copies of the primary state")
    p.add_argument("--alpha", type=float, required=True, help="larger Schmidt coefficient")
    p.add_argument("--dim", type=int, default=2, help="catalyst dimension (default 2)")
    p.set_defaults(func=_cmd_catalyst)

    p = sub.add_parser("sweep", help="rate-ratio sweep over alpha, written as CSV")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--edges", type=int, default=32)
    p.add_argument("--alpha-min", type=float, default=0.55)
    p.add_argument("--alpha-max", type=float, default=1.0 - 1e-6)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--mode", default=network.AUX_RICH, help="aux_rich or none (comma list ok)")
    p.add_argument("--dim", default="2", help="catalyst dimension, comma list ok")
    p.add_argument("--l0-km", type=float, default=25.0)
    p.add_argument("--cf-km-s", type=float, default=2.0e5)
    p.add_argument("--p0", type=float, default=0.5)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="run a chain simulation from a config file")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--trials", type=int, default=None, help="override trials")
    p.add_argument("--seed", type=int, default=None, help="override seed")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("validate-z", help="Monte Carlo check of the waiting factor")
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_validate_z)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; that code is reserved for numeric
        # failures here, so fold parse problems into the invalid-input code.
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (InvalidInputError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
