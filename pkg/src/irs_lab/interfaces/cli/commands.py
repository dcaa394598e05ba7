"""One function per subcommand: config in, exit code out (0 pass, 1 scientific failure).

Usage errors surface as exceptions and are mapped to exit code 2 by main.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List

from irs_lab.core.schedules import FUNNEL_GRID
from irs_lab.interfaces.cli.config import ExperimentConfig, looks_like_path
from irs_lab.modules.chabauty.convergence import check_convergence
from irs_lab.modules.chabauty.escape import escape_dichotomy
from irs_lab.modules.chabauty.snapshot import quiet_margin, snapshot
from irs_lab.modules.domains.dirichlet import certified_domain, dirichlet_domain
from irs_lab.modules.domains.export import write_polygon
from irs_lab.modules.domains.polygon import polygon_area
from irs_lab.modules.fuchsian.constructions import named_group
from irs_lab.modules.fuchsian.families import algebraic_family, algebraic_schedule, degeneration_family
from irs_lab.modules.fuchsian.group import FuchsianGroup, parse_group, validate_group
from irs_lab.modules.hyperbolic.area import AreaCheck, check_cusp_area, check_funnel_area
from irs_lab.modules.hyperbolic.isometry import frobenius_distance
from irs_lab.modules.irs.estimator import estimate_functionals
from irs_lab.modules.irs.experiments import (
    PASS,
    EstimateRow,
    collision_experiment,
    degeneration_experiment,
)
from irs_lab.modules.irs.export import write_json, write_rows, write_table
from irs_lab.modules.irs.functionals import TestFunctional, parse_functional
from irs_lab.modules.surfaces.bounds import component_fiber_bound, fiber_bound
from irs_lab.modules.surfaces.curve_system import collision_witness
from irs_lab.modules.surfaces.signature import SurfaceSig

logger = logging.getLogger(__name__)

CONTROL_TOL = 1e-6
DEFAULT_GROUP = "punctured_torus"
CONVERGENCE_FAMILIES = ("algebraic", "constant")


def resolve_group(spec: str) -> FuchsianGroup:
    """A fixture file, or 'name' / 'name:key=value,key=value' for a named fixture."""
    if looks_like_path(spec):
        group = parse_group(Path(spec).read_text(encoding="utf-8"))
        return validate_group(group)
    name, _, rest = spec.partition(":")
    params: Dict[str, float] = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"Expected key=value in group parameters, got {item!r}")
        params[key.strip()] = float(value)
    return named_group(name.strip(), params or None)


def _groups(config: ExperimentConfig) -> List[FuchsianGroup]:
    return [resolve_group(spec) for spec in (config.groups or [DEFAULT_GROUP])]


def _functionals(config: ExperimentConfig) -> List[TestFunctional]:
    return [parse_functional(text) for text in config.functionals]


def _check_row(check: AreaCheck) -> Dict[str, object]:
    return {
        "name": check.name,
        "params": check.params,
        "numeric": check.numeric,
        "closed_form": check.closed_form,
        "bound": check.bound,
        "relative_error": check.relative_error,
        "tolerance": check.tolerance,
        "passed": check.passed,
    }


def cmd_area_check(config: ExperimentConfig) -> int:
    cusp_options = {"resolution": config.resolution} if config.resolution else {}
    checks = [check_cusp_area(delta, tolerance=config.tolerance, **cusp_options) for delta in config.deltas]
    checks += [
        check_funnel_area(delta_0, delta, config.resolution, tolerance=config.tolerance) for delta_0, delta in FUNNEL_GRID
    ]
    for check in checks:
        status = "ok" if check.passed else "FAIL"
        print(f"{check.name} {check.params}: {check.numeric:.10g} vs {check.closed_form:.10g} ({check.relative_error:.2e}) {status}")
    write_json({"checks": [_check_row(c) for c in checks]}, config.output("json"))
    failed = [c for c in checks if not c.passed]
    if failed:
        logger.error(f"{len(failed)} of {len(checks)} area checks exceed tolerance {config.tolerance:g}")
        return 1
    return 0


def cmd_dirichlet(config: ExperimentConfig) -> int:
    group = _groups(config)[0]
    if group.is_elementary:
        print(f"{group.name} is not a lattice: the domain has infinite area")
        polygon = dirichlet_domain(group, stabilize=False)
    else:
        polygon = certified_domain(group)
    area = polygon_area(polygon)
    target = group.target_area
    write_polygon(
        polygon,
        config.output("svg"),
        config.output("svg").with_suffix(".txt"),
        x_range=tuple(config.x_range) if config.x_range else None,
        y_range=tuple(config.y_range) if config.y_range else None,
        stroke_width=config.stroke_width,
        title=group.name,
    )
    if target is None:
        print(f"{group.name}: area {area}")
    else:
        print(f"{group.name}: area {area:.12g}, 2π|χ| = {target:.12g}, certified")
    return 0


def cmd_degenerate(config: ExperimentConfig) -> int:
    family = degeneration_family(config.family or "punctured_torus_pinch")
    result = degeneration_experiment(
        family,
        _functionals(config),
        config.schedule,
        config.radius,
        config.delta,
        config.n,
        config.seed,
        config.worker_count,
    )
    write_rows(result.rows, config.output("csv"))
    write_json(result.summary(), config.output("json"))
    for name, verdict in sorted(result.verdicts.items()):
        print(f"{name}: {verdict}")
    return 0 if result.passed else 1


def cmd_chabauty_dist(config: ExperimentConfig) -> int:
    family = config.family or "algebraic"
    if family not in CONVERGENCE_FAMILIES:
        raise ValueError(f"chabauty-dist needs one of {CONVERGENCE_FAMILIES}, got {family!r}")
    schedule = list(config.schedule or algebraic_schedule())
    limit_group = algebraic_family(0.0)
    groups = [limit_group if family == "constant" else algebraic_family(t) for t in schedule]

    limit = snapshot(limit_group, radius=config.radius)
    sequence = [snapshot(g, radius=config.radius) for g in groups]
    margin = quiet_margin(limit) if config.margin is None else config.margin
    epsilon = config.epsilon
    if epsilon is None:
        tail = groups[len(groups) // 2]
        perturbation = max(frobenius_distance(g, h) for g, h in zip(tail.generators, limit_group.generators))
        epsilon = max(10.0 * perturbation, 1e-9)
    report = check_convergence(sequence, limit, epsilon, margin=margin)

    write_table(("t", "distance"), zip(schedule, report.distances), config.output("csv"))
    write_json({"family": family, "schedule": schedule, "margin": margin, **report.to_dict()}, config.output("json"))
    for t, d in zip(schedule, report.distances):
        print(f"t = {t:g}: distance {d:.6g}")
    print(f"C1 {'ok' if report.c1_ok else 'violated'}, C2 {'ok' if report.c2_ok else 'violated'} at ε = {epsilon:.3g}")
    return 0 if report.passed else 1


def cmd_escape(config: ExperimentConfig) -> int:
    group = _groups(config)[0]
    report = escape_dichotomy(group, steps=config.steps, radius=config.escape_radius)
    write_json(report.to_dict(), config.output("json"))
    print(f"{group.name}: {report.verdict}, non-commuting pairs per step {report.counts}")
    control_ok = report.control_distance is None or report.control_distance <= CONTROL_TOL
    control = "skipped" if report.control_distance is None else f"{report.control_distance:.3g}"
    print(f"terminal defect {report.terminal_defect:.3g}, control distance {control}")
    return 0 if report.abelian and control_ok else 1


def cmd_irs_estimate(config: ExperimentConfig) -> int:
    functionals = _functionals(config)
    rows, summary = [], {}
    for group in _groups(config):
        estimates = estimate_functionals(
            group, functionals, config.radius, config.delta, config.n, config.seed, config.worker_count
        )
        rows.extend(EstimateRow.from_estimate(0.0, e) for e in estimates)
        summary[group.name] = [e.to_dict() for e in estimates]
        for e in estimates:
            print(f"{group.name} {e.functional}: {e.mean:.6g} ± {e.std_error:.2g} (bias ≤ {e.bias_bound:.2g})")
    write_rows(rows, config.output("csv"))
    write_json(summary, config.output("json"))
    return 0


def cmd_fiber_bound(config: ExperimentConfig) -> int:
    surface = SurfaceSig.parse(config.surface)
    bound = fiber_bound(surface)
    data: Dict[str, object] = {"surface": [surface.genus, surface.punctures], "fiber_bound": bound}
    witness = collision_witness(surface)
    if witness is not None:
        data["component_bounds"] = [component_fiber_bound(cs) for cs in witness]
    write_json(data, config.output("json"))
    print(f"B({surface.genus},{surface.punctures}) = {bound}")
    return 0


def cmd_collision(config: ExperimentConfig) -> int:
    result = collision_experiment(
        _functionals(config), config.radius, config.delta, config.n, config.seed, config.worker_count
    )
    write_json(result.summary(), config.output("json"))
    for name, verdict in sorted(result.verdicts.items()):
        print(f"{name}: {verdict}")
    return 0 if all(v == PASS for v in result.verdicts.values()) else 1


COMMAND_HANDLERS: Dict[str, Callable[[ExperimentConfig], int]] = {
    "area-check": cmd_area_check,
    "dirichlet": cmd_dirichlet,
    "degenerate": cmd_degenerate,
    "chabauty-dist": cmd_chabauty_dist,
    "escape": cmd_escape,
    "irs-estimate": cmd_irs_estimate,
    "fiber-bound": cmd_fiber_bound,
    "collision": cmd_collision,
}

