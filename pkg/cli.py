"""
PhaseMCP command line

Builds states, runs transforms, POVM channels and Lindblad evolutions on CSV
files, and runs the built-in figure scenarios.

Exit codes: 0 success, 2 validation error, 1 runtime failure.
"""

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError

from phasespace.analysis import compare_fields, density_moments, phase_space_stats
from phasespace.errors import ConfigError, GridError, ParameterError, PipelineError, StateError
from phasespace.fieldio import (
    read_field,
    read_state,
    read_wigner,
    write_density,
    write_field,
    write_outcomes,
    write_wavefunction,
)
from phasespace.grid import make_grid
from phasespace.lindblad import EvolutionSpec, evolve_composed, evolve_master_oracle
from phasespace.povm import povm_channel, povm_smooth_wigner, sample_povm_outcomes
from phasespace.render import render_heatmap
from phasespace.scenarios import list_scenarios, load_scenario, run_scenario
from phasespace.settings import CONFIG_ENV, LOG_FORMAT, WORKERS_ENV, get_settings, log_handlers
from phasespace.states import DensityMatrix, StateSpec, build_state, density_from_pure
from phasespace.transforms import (
    CharacteristicFunction,
    WignerFunction,
    characteristic_from_wigner,
    density_from_wigner,
    husimi_from_density,
    wigner_from_characteristic,
    wigner_from_density,
)

logger = logging.getLogger("phasemcp.cli")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2

VALIDATION_ERRORS = (ConfigError, ValidationError, GridError, StateError, ParameterError)

MODES = {"position": "position_decoherence", "phasespace": "phase_space_decoherence"}


def _maybe_png(field, out: Path, enabled: bool) -> None:
    if enabled:
        render_heatmap(field, out.with_suffix(".png"))


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _load(path: str) -> Union[DensityMatrix, WignerFunction]:
    """Wave-function and complex CSVs load as density matrices, real fields as Wigner functions"""
    if _header_size(path) == 3:
        return read_state(path)
    field = read_field(path)
    if not field.is_complex:
        return WignerFunction(grid=field.grid, values=field.values)
    if not field.grid.gx.matches(field.grid.gp):
        raise GridError(f"{path}: complex field is not a density matrix")
    return DensityMatrix(grid=field.grid.gx, rho=field.values)


def _as_wigner(state) -> WignerFunction:
    return state if isinstance(state, WignerFunction) else wigner_from_density(state)


def _as_density(state) -> DensityMatrix:
    return state if isinstance(state, DensityMatrix) else density_from_wigner(state)


def _header_size(path: str) -> int:
    with open(path, "r", encoding="utf-8") as fh:
        return len(fh.readline().lstrip("#").split(","))


def cmd_state(args: argparse.Namespace) -> int:
    cfg = get_settings().grid
    grid = make_grid(args.n or cfg.n, args.half_width or cfg.half_width)
    spec = StateSpec(
        kind=args.kind, x0=args.x0, p0=args.p0, separation=args.separation,
        rel_phase=args.rel_phase, sigma=args.sigma, index=args.index,
    )
    psi = build_state(spec, grid)
    out = Path(args.output)
    if args.density:
        write_density(density_from_pure(psi), out)
    else:
        write_wavefunction(psi, out)
    logger.info(f"✅ {spec.kind} state written to {out} (norm {psi.norm():.12f})")
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    out = Path(args.output)
    if args.target == "wigner":
        if args.inverse:
            write_density(density_from_wigner(read_wigner(args.input)), out)
        else:
            w = wigner_from_density(read_state(args.input))
            write_field(w, out)
            _maybe_png(w, out, args.png)
    elif args.target == "husimi":
        q = husimi_from_density(read_state(args.input), args.sigma)
        write_field(q, out)
        _maybe_png(q, out, args.png)
    else:
        if args.inverse:
            field = read_field(args.input)
            w = wigner_from_characteristic(CharacteristicFunction(grid=field.grid, values=field.values))
            write_field(w, out)
            _maybe_png(w, out, args.png)
        else:
            write_field(characteristic_from_wigner(read_wigner(args.input)), out)
    logger.info(f"✅ transform {args.target}{' (inverse)' if args.inverse else ''} written to {out}")
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace) -> int:
    spec = EvolutionSpec(
        gamma=args.gamma, omega=args.omega, mass=args.mass, mode=MODES[args.mode], t=args.t, n_steps=args.steps,
    )
    out = Path(args.output)
    started = time.perf_counter()
    if args.oracle:
        rho0 = _as_density(_load(args.input))
        rho = evolve_master_oracle(rho0, spec, args.dt)
        write_density(rho, out)
        before, after = density_moments(rho0), density_moments(rho)
        purity_after = rho.purity()
    else:
        w0 = _as_wigner(_load(args.input))
        w = evolve_composed(w0, spec, check_steps=args.check_steps)
        write_field(w, out)
        _maybe_png(w, out, args.png)
        before, after = phase_space_stats(w0), phase_space_stats(w)
        purity_after = after.purity
    sidecar = {
        "spec": spec.model_dump(),
        "oracle": bool(args.oracle),
        "trace_drift": after.trace - before.trace,
        "mean_x_drift": after.mean_x - before.mean_x,
        "mean_p_drift": after.mean_p - before.mean_p,
        "var_x_change": after.var_x - before.var_x,
        "var_p_change": after.var_p - before.var_p,
        "purity": purity_after,
        "runtime_seconds": round(time.perf_counter() - started, 3),
    }
    metrics_path = out.with_suffix(".metrics.json")
    metrics_path.write_text(json.dumps(sidecar, indent=2), encoding="utf-8")
    logger.info(f"✅ evolved state written to {out}, metrics to {metrics_path}")
    return EXIT_OK


def cmd_povm(args: argparse.Namespace) -> int:
    out = Path(args.output)
    if args.action == "apply":
        if args.m is None or args.m != int(args.m):
            raise ConfigError("povm apply takes an integer --m", field="m")
        write_density(povm_channel(_as_density(_load(args.input)), int(args.m), args.sigma), out)
    elif args.action == "smooth":
        w = povm_smooth_wigner(_as_wigner(_load(args.input)), 1.0 if args.m is None else args.m, args.sigma)
        write_field(w, out)
        _maybe_png(w, out, args.png)
    else:
        outcomes = sample_povm_outcomes(_as_density(_load(args.input)), args.n, args.seed, args.sigma)
        write_outcomes(outcomes, out)
        logger.info(f"🎯 {len(outcomes)} outcomes, sample mean ({np.mean(outcomes[:, 0]):.4f}, {np.mean(outcomes[:, 1]):.4f})")
    logger.info(f"✅ povm {args.action} written to {out}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    _print_json(phase_space_stats(read_wigner(args.field)).model_dump())
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    _print_json(compare_fields(read_field(args.a), read_field(args.b)))
    return EXIT_OK


def cmd_scenario(args: argparse.Namespace) -> int:
    if args.action == "list":
        for name in list_scenarios():
            print(name)
        return EXIT_OK
    if not args.target:
        raise ConfigError("scenario run needs a built-in name or a config path", field="scenario")
    manifest = run_scenario(load_scenario(args.target), args.output_dir)
    print(manifest)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasemcp", description="Phase-space decoherence toolkit")
    parser.add_argument("--config", help="alternative config.json")
    parser.add_argument("--workers", type=int, help=f"FFT thread cap (overrides {WORKERS_ENV})")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="build a standard state")
    p.add_argument("--kind", choices=["coherent", "cat_position", "cat_momentum", "fock"], default="coherent")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--rel-phase", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--index", type=int, default=0, help="Fock level")
    p.add_argument("--n", type=int, help="grid points")
    p.add_argument("--half-width", type=float)
    p.add_argument("--density", action="store_true", help="write the density matrix instead of the wave function")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("transform", help="wigner | husimi | char")
    p.add_argument("target", choices=["wigner", "husimi", "char"])
    p.add_argument("input")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--png", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("evolve", help="Lindblad evolution")
    p.add_argument("input")
    p.add_argument("--mode", choices=sorted(MODES), required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument(
        "--check-steps", action=argparse.BooleanOptionalAction, default=True,
        help="fail when halving the splitting step changes W by more than 1e-4",
    )
    p.add_argument("--oracle", action="store_true", help="RK4 master-equation integration")
    p.add_argument("--dt", type=float)
    p.add_argument("--png", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("povm", help="coherent-state POVM")
    p.add_argument("action", choices=["apply", "smooth", "sample"])
    p.add_argument("input")
    p.add_argument("--m", type=float)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1000, help="samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--png", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_povm)

    p = sub.add_parser("analyze", help="metrics of a Wigner CSV")
    p.add_argument("field")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="L2 / Linf distance of two fields")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scenario", help="built-in figure scenarios")
    p.add_argument("action", choices=["run", "list"])
    p.add_argument("target", nargs="?")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.config:
        os.environ[CONFIG_ENV] = args.config
    if args.workers:
        os.environ[WORKERS_ENV] = str(args.workers)
    get_settings.cache_clear()

    try:
        settings = get_settings()
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    logging.basicConfig(
        level=args.log_level or settings.logging.level,
        format=LOG_FORMAT,
        handlers=log_handlers(settings),
        force=True,
    )

    started = time.perf_counter()
    logger.info(f"⚡ {args.command} starting")
    try:
        code = args.func(args)
    except PipelineError as e:
        logger.error(f"❌ {e}")
        return EXIT_VALIDATION if isinstance(e.cause, VALIDATION_ERRORS) else EXIT_RUNTIME
    except VALIDATION_ERRORS as e:
        logger.error(f"❌ validation error: {e}")
        return EXIT_VALIDATION
    except Exception as e:
        logger.error(f"❌ {args.command} failed: {type(e).__name__}: {e}")
        return EXIT_RUNTIME
    logger.info(f"✅ {args.command} finished in {time.perf_counter() - started:.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
