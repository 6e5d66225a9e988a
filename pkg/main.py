"""
Kirchhoff Normalized Solutions - command-line front end

Runs one solver mode per invocation and writes its artifacts, a run
manifest and, on failure, error.json into the output directory.

Subcommands:
- solve-min: global minimizer l_c (subcritical, h >= 0)
- solve-mp: mountain-pass solution m_{h,c} (supercritical, h >= 0)
- linking: linking level bracket and candidate (supercritical, h <= 0)
- limit: limit ground state of the autonomous problem
- gn: Gagliardo-Nirenberg constant and the landscape profile
- verify: check groups through the verification workflow
- export: convert a stored scan to CSV or JSON
"""

import argparse
import json
import logging
import sys
import time
from importlib import metadata
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from functionals.params import KirchhoffParams
from graph.graph import create_workflow
from landscape.profile import phi_profile, phi_scan
from loaders.field_io import export_scan, write_json, write_scan, write_solution
from potentials.families import PotentialSpec
from solvers.limit import solve_limit_ground_state
from solvers.linking import linking_level, refine_linking_candidate
from solvers.minimize import minimize_global
from solvers.mountain_pass import mountain_pass
from solvers.solution import Solution
from utils.config import RunConfig, load_config
from utils.errors import CertificationError, ConvergenceError, KirchhoffError
from utils.run_context import get_run_context

logger = logging.getLogger("kirchhoff")

MODE_BY_COMMAND = {
    "solve-min": "min",
    "solve-mp": "mp",
    "linking": "link",
    "limit": "limit",
    "gn": "gn",
    "verify": "verify",
}

PACKAGES = ("kirchhoff-normalized", "numpy", "scipy", "langgraph", "pydantic")

# Exit code of a verify run with failed checks
VERIFY_FAILED = 3

# Lattice scans always carry three y columns, zero beyond the dimension
LATTICE_COLUMNS = ("y1", "y2", "y3", "s", "energy")


def status(message: str) -> None:
    print(message, flush=True)


# =============================================================================
# Artifacts
# =============================================================================


def package_versions() -> Dict[str, Optional[str]]:
    versions = {}
    for name in PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    return versions


def write_manifest(
    out: Path,
    config: Optional[RunConfig],
    command: str,
    results: Dict[str, Any],
    wall_time: float,
    exit_code: int,
) -> Path:
    """manifest.json: config echo, versions, seed, threads, wall time and exit code."""
    return write_json(
        out / "manifest.json",
        {
            "command": command,
            "config": config.model_dump(mode="json") if config else None,
            "versions": package_versions(),
            "seed": config.solver.seed if config else None,
            "threads": config.solver.threads if config else None,
            "wall_time": wall_time,
            "exit_code": exit_code,
            "results": results,
        },
    )


def write_error(out: Optional[Path], error: KirchhoffError) -> None:
    """error.json in the run directory (when there is one) and on stderr."""
    payload = error.to_dict()
    if out is not None:
        try:
            write_json(out / "error.json", payload)
        except OSError as e:
            logger.warning("could not write error.json: %s", e)
    print(json.dumps(payload, default=str), file=sys.stderr)


def save_solution(
    out: Path, solution: Solution, params: KirchhoffParams, spec: PotentialSpec, seed: int
) -> Dict[str, Any]:
    write_solution(out, solution.field, solution.sidecar(params, spec, seed))
    status(
        f"{'✅' if solution.converged else '⚠️'} {solution.level_tag}: "
        f"level={solution.level:.12g} lambda={solution.lam:.12g} "
        f"residual={solution.el_residual:.3e}"
    )
    return {
        "level_tag": solution.level_tag,
        "level": solution.level,
        "lambda": solution.lam,
        "el_residual": solution.el_residual,
        "pohozaev_residual": solution.pohozaev_residual,
        "converged": solution.converged,
    }


def save_scan(
    config: RunConfig,
    out: Path,
    name: str,
    kind: str,
    columns: Sequence[str],
    rows: Sequence[Sequence[float]],
) -> Path:
    """Write the scan artifact name.json plus one export per output.formats entry."""
    path = write_scan(out / f"{name}.json", kind, columns, rows)
    for fmt in config.output.formats:
        export_scan(path, fmt)
    return path


def lattice_rows(lattice: Sequence[Sequence[float]], dim: int) -> List[List[float]]:
    """Pad (y_1..y_N, s, energy) rows with zero y components up to three."""
    padding = [0.0] * (3 - dim)
    return [[*row[:dim], *padding, *row[dim:]] for row in lattice]


def require_converged(solution: Solution) -> None:
    if not solution.converged:
        raise ConvergenceError(
            f"{solution.level_tag} did not converge: {solution.failure}",
            {"level": solution.level, "el_residual": solution.el_residual},
        )


# =============================================================================
# Modes
# =============================================================================


def run_limit(config: RunConfig, out: Path) -> Dict[str, Any]:
    params, grid = config.kirchhoff_params(), config.grid.to_grid()
    solution = solve_limit_ground_state(
        params, grid, tol=config.solver.residual_tol, max_iterations=config.solver.max_iterations
    )
    results = save_solution(out, solution, params, config.potential, config.solver.seed)
    results["regime"] = params.regime
    require_converged(solution)
    return results


def run_min(config: RunConfig, out: Path) -> Dict[str, Any]:
    params, grid, solver = config.kirchhoff_params(), config.grid.to_grid(), config.solver
    solution = minimize_global(
        params,
        config.potential,
        grid,
        solver.starts,
        seed=solver.seed,
        threads=solver.threads,
        tol=solver.residual_tol,
        max_iterations=solver.max_iterations,
    )
    results = save_solution(out, solution, params, config.potential, solver.seed)
    results["limit_level"] = solution.extras["limit_level"]
    require_converged(solution)
    return results


def run_mp(config: RunConfig, out: Path) -> Dict[str, Any]:
    params, grid, solver = config.kirchhoff_params(), config.grid.to_grid(), config.solver
    solution = mountain_pass(
        params,
        config.potential,
        grid,
        nodes=solver.path_nodes,
        max_sweeps=solver.max_path_sweeps,
        tol=solver.residual_tol,
        max_iterations=solver.max_iterations,
    )
    write_json(out / "profile.json", solution.extras["profile"])
    path = solution.extras["path"]
    save_scan(
        config, out, "fiber_scan", "fiber_scan", ["t", "energy"], list(zip(path["t"], path["energy"]))
    )
    results = save_solution(out, solution, params, config.potential, solver.seed)
    results["m_c"] = solution.extras["m_c"]
    require_converged(solution)
    return results


def run_link(config: RunConfig, out: Path) -> Dict[str, Any]:
    params, grid, solver = config.kirchhoff_params(), config.grid.to_grid(), config.solver
    kwargs = {"tol": solver.residual_tol, "max_iterations": solver.max_iterations}
    limit = solve_limit_ground_state(params, grid, **kwargs)
    bracket = linking_level(
        params,
        config.potential,
        grid,
        solver.R,
        solver.s1,
        solver.s2,
        solver.grid_Q,
        solver.epsilon,
        limit.field,
        **kwargs,
    )
    write_json(out / "bracket.json", bracket.to_dict())
    save_scan(
        config, out, "lattice", "lattice", LATTICE_COLUMNS, lattice_rows(bracket.lattice, params.dim)
    )
    status(
        f"{'✅' if bracket.certified else '❌'} linking: m_c={bracket.m_c:.12g} "
        f"interior_max={bracket.interior_max:.12g} boundary_max={bracket.boundary_max:.12g}"
    )
    results: Dict[str, Any] = {"bracket": bracket.to_dict()}
    if solver.refine_linking:
        solution = refine_linking_candidate(
            params, config.potential, grid, bracket, limit.field, **kwargs
        )
        results.update(save_solution(out, solution, params, config.potential, solver.seed))
        require_converged(solution)
    if not bracket.certified:
        raise CertificationError(
            "linking bracket not certified", {"violations": bracket.violations}
        )
    return results


def run_gn(config: RunConfig, out: Path, scan: bool = False) -> Dict[str, Any]:
    params, grid = config.kirchhoff_params(), config.grid.to_grid()
    optimizer = get_run_context().gn_optimizer(params.dim, params.p, grid)
    payload: Dict[str, Any] = {
        "dim": params.dim,
        "p": params.p,
        "gamma_p": params.gamma_p,
        "c_np": optimizer.constant,
        "omega": optimizer.omega,
        "iterations": optimizer.iterations,
        "regime": params.regime,
    }
    if params.regime == "supercritical":
        profile = phi_profile(params, config.potential, grid, c_np=optimizer.constant)
        payload["landscape"] = profile.to_dict()
        if scan:
            ts = np.geomspace(1e-3 * profile.r2, 1.5 * profile.r2, config.solver.scan_points)
            save_scan(config, out, "phi_scan", "phi_scan", ["t", "phi", "psi"], phi_scan(profile, ts))
    elif scan:
        logger.warning("the phi scan needs the supercritical regime; skipped for p=%s", params.p)
    write_json(out / "profile.json", payload)
    print(json.dumps(payload, indent=2, default=str))
    return {"gamma_p": params.gamma_p, "c_np": optimizer.constant}


def run_verify(config: RunConfig, out: Path) -> Dict[str, Any]:
    report = create_workflow().run(config, on_status=status)
    write_json(out / "report.json", report.to_dict())
    return {"pass": report.passed, "failed": [c.name for c in report.failures()]}


RUNNERS: Dict[str, Callable[..., Dict[str, Any]]] = {
    "limit": run_limit,
    "min": run_min,
    "mp": run_mp,
    "link": run_link,
    "gn": run_gn,
    "verify": run_verify,
}


# =============================================================================
# Command Line
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kirchhoff", description="Normalized solutions of the nonautonomous Kirchhoff equation"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--out", help="Output directory (overrides output.directory)")
    common.add_argument("--seed", type=int, help="Seed for random starts and fields")
    common.add_argument("--threads", type=int, help="Worker threads for multi-start")
    common.add_argument("--log-level", default="WARNING", help="Logging level (default WARNING)")

    sub = parser.add_subparsers(dest="command", required=True)
    for command in MODE_BY_COMMAND:
        command_parser = sub.add_parser(command, parents=[common])
        if command == "gn":
            command_parser.add_argument("--scan", action="store_true", help="Write phi_scan.json/.csv")
        if command == "verify":
            command_parser.add_argument(
                "--group", action="append", dest="groups", help="Check group (repeatable)"
            )

    export = sub.add_parser("export", parents=[common])
    export.add_argument("artifact", help="Scan artifact written by a run")
    export.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def run(args: argparse.Namespace) -> int:
    """Execute one subcommand and return the process exit code."""
    start = time.perf_counter()

    if args.command == "export":
        out = Path(args.out) if args.out else None
        try:
            artifact = Path(args.artifact)
            target = None
            if out is not None:
                suffix = ".csv" if args.format == "csv" else "_table.json"
                target = out / (artifact.stem + suffix)
            path = export_scan(artifact, args.format, target)
        except KirchhoffError as e:
            write_error(out, e)
            status(f"❌ {e.message}")
            return e.exit_code
        status(f"✅ exported {path}")
        return 0

    config: Optional[RunConfig] = None
    out = Path(args.out) if args.out else None
    results: Dict[str, Any] = {}
    exit_code = 0
    try:
        config = load_config(args.config, mode=MODE_BY_COMMAND[args.command])
        config = config.with_overrides(seed=args.seed, threads=args.threads, out=args.out)
        if getattr(args, "groups", None):
            solver = config.solver.model_copy(update={"groups": args.groups})
            config = config.model_copy(update={"solver": solver})
        out = Path(config.output.directory)
        out.mkdir(parents=True, exist_ok=True)
        status(f"🚀 {args.command}: dim={config.grid.dim} p={config.params.p} q={config.params.q}")

        runner = RUNNERS[config.solver.mode]
        if config.solver.mode == "gn":
            results = runner(config, out, scan=args.scan)
        else:
            results = runner(config, out)
        if config.solver.mode == "verify" and not results["pass"]:
            exit_code = VERIFY_FAILED
            status(f"❌ verification failed: {', '.join(results['failed'])}")
    except KirchhoffError as e:
        exit_code = e.exit_code
        write_error(out, e)
        status(f"❌ {e.message}")

    if out is not None and out.exists():
        write_manifest(out, config, args.command, results, time.perf_counter() - start, exit_code)
    if exit_code == 0:
        status(f"✅ done in {time.perf_counter() - start:.2f}s")
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
