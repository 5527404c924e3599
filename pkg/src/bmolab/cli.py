"""Command-line interface.

Subcommands map one-to-one onto module operations: ``norms`` (space and
oscillation norms of a built-in symbol), ``certify`` (pointwise
lower-bound certificate on one cube), ``oscillation`` (kernel oscillation
sweep), ``probe`` (empirical operator-norm lower bound), ``scenario``
(full config-driven run), ``report`` (summarize an emitted CSV).

Exit codes: 0 success, 1 configuration error, 2 numerical-stage error.
"""

from __future__ import annotations

import math
import sys

import click

from .certificates import find_shift, operator_norm_probe, pointwise_certificate
from .commutators import CommutatorTask
from .geometry import Cube, GridFunction, dyadic_family, enriched_dyadic_family
from .operators import KernelAdmissibilityError, kernel_oscillation
from .spaces import MuFunctional, SpaceSpec, bmo_mu_norm, norm
from . import harness
from ._kernels import backend_name

_CONFIG_ERRORS = (harness.ConfigError, click.UsageError)


def _space_from_options(kind: str, p: float, q: float | None, lam: float | None) -> SpaceSpec:
    if kind == "lebesgue":
        return SpaceSpec.lebesgue(p)
    if kind == "weak":
        return SpaceSpec.weak(p)
    if kind == "lorentz":
        if q is None:
            raise harness.ConfigError("lorentz needs --q")
        return SpaceSpec.lorentz(p, q)
    if kind == "morrey":
        if lam is None:
            raise harness.ConfigError("morrey needs --lam")
        return SpaceSpec.morrey(p, lam)
    raise harness.ConfigError(f"unknown space kind {kind!r}")


def _build_symbol(symbol: str, dim: int, resolution: int, seed: int):
    core = Cube.interval(-1.0, 1.0) if dim == 1 else Cube.square((0.0, 0.0), 2.0)
    fn = harness.build_symbol_function({"kind": symbol, "seed": seed}, core, seed)
    return GridFunction.sample(core, resolution, fn), core


@click.group()
@click.version_option(package_name="bmolab")
def main():
    """Numerical workbench for commutator lower bounds and oscillation norms."""


@main.command()
@click.option("--symbol", default="log_abs", show_default=True)
@click.option("--dim", default=1, show_default=True)
@click.option("--resolution", default=4096, show_default=True)
@click.option("--space", "space_kind", default="lebesgue", show_default=True)
@click.option("--p", default=2.0, show_default=True)
@click.option("--q", default=None, type=float)
@click.option("--lam", default=None, type=float)
@click.option("--depth", default=6, show_default=True, help="dyadic depth for sups over cubes")
@click.option("--seed", default=7, show_default=True)
def norms(symbol, dim, resolution, space_kind, p, q, lam, depth, seed):
    """Space norm and BMO-type oscillation norm of a built-in symbol."""
    b, core = _build_symbol(symbol, dim, resolution, seed)
    spec = _space_from_options(space_kind, p, q, lam)
    family = enriched_dyadic_family(core, depth)
    value = norm(b, spec, family if spec.kind == "morrey" else None)
    osc = bmo_mu_norm(b, MuFunctional.lebesgue(), family)
    click.echo(f"norm[{spec.describe()}] = {value:.10g}")
    click.echo(f"bmo_mu[lebesgue, depth {depth}] = {osc:.10g}")


@main.command()
@click.option("--omega", default="sgn", show_default=True)
@click.option("--alpha", default=0.0, show_default=True)
@click.option("--dim", default=1, show_default=True)
@click.option("--symbol", default="log_abs", show_default=True)
@click.option("--q1", default="0,0.5", show_default=True, help="base cube as lo,hi (axis 0)")
@click.option("--resolution", default=2048, show_default=True)
@click.option("--eps-xi", default=0.125, show_default=True)
@click.option("--h-max", default=128.0, show_default=True)
@click.option("--seed", default=7, show_default=True)
def certify(omega, alpha, dim, symbol, q1, resolution, eps_xi, h_max, seed):
    """Pointwise lower-bound certificate on one cube."""
    kernel = harness.build_kernel(harness.ScenarioConfig(
        scenario="kernel_admit", dim=dim, kernel={"omega": omega, "alpha": alpha}))
    lo, hi = (float(t) for t in q1.split(","))
    cube = Cube.interval(lo, hi) if dim == 1 else Cube.square(((lo + hi) / 2,) * 2, hi - lo)
    cert = find_shift(kernel, eps_xi, h_max)
    core = Cube.interval(-1.0, 1.0) if dim == 1 else Cube.square((0.0, 0.0), 2.0)
    fn = harness.build_symbol_function({"kind": symbol, "seed": seed}, core, seed)
    cell = core.side / resolution
    pad = (cert.h_mag + 1.0) * max(cube.side, 1.0)
    n_dom = resolution + 2 * (int(math.ceil(pad / cell)) + 2)
    domain = Cube(dim, core.center, n_dom * cell)
    b = GridFunction.sample(domain, n_dom, fn)
    pair, violations = pointwise_certificate(b, cube, kernel, cert)
    click.echo(f"shift |h| = {cert.h_mag:g}, xi bound = {cert.xi_bound:.6g}, "
               f"C~ = {cert.c_tilde:.6g}")
    click.echo(f"violations: {len(violations)}")
    if violations:
        sys.exit(2)


@main.command()
@click.option("--omega", default="sgn", show_default=True)
@click.option("--dim", default=1, show_default=True)
@click.option("--mode", default="Linf", type=click.Choice(["Linf", "L1"]), show_default=True)
@click.option("--h-max", default=64.0, show_default=True)
@click.option("--n0", default=64, show_default=True)
def oscillation(omega, dim, mode, h_max, n0):
    """Kernel translation-oscillation sweep along the cone direction."""
    symbol = harness.build_sphere_symbol({"omega": omega}, dim)
    from .operators import lower_upper_cone

    cone = lower_upper_cone(symbol)
    if cone is None:
        click.echo("no admissible cone detected")
        sys.exit(2)
    e = cone.central_direction
    h = 2.0
    while h <= h_max:
        if h > math.sqrt(dim):
            val = kernel_oscillation(symbol, h * e, mode, n0)
            click.echo(f"|h| = {h:6g}   oscillation[{mode}] = {val:.10g}")
        h *= 2.0


@main.command()
@click.option("--symbol", default="log_abs", show_default=True)
@click.option("--omega", default="sgn", show_default=True)
@click.option("--alpha", default=0.0, show_default=True)
@click.option("--dim", default=1, show_default=True)
@click.option("--p", default=2.0, show_default=True)
@click.option("--resolution", default=2048, show_default=True)
@click.option("--depth", default=2, show_default=True)
@click.option("--seed", default=7, show_default=True)
def probe(symbol, omega, alpha, dim, p, resolution, depth, seed):
    """Empirical operator-norm lower bound with indicator and sign probes."""
    kernel = harness.build_kernel(harness.ScenarioConfig(
        scenario="kernel_admit", dim=dim, kernel={"omega": omega, "alpha": alpha}))
    b, core = _build_symbol(symbol, dim, resolution, seed)
    task = CommutatorTask(b, kernel)
    probes = []
    for cube in dyadic_family(core, depth):
        probes.append(GridFunction.indicator(core, resolution, cube))
    space = SpaceSpec.lebesgue(p)
    value = operator_norm_probe(task, space, space, probes,
                                eval_resolution=4096 if dim == 1 else 64)
    click.echo(f"operator norm probe [{space.describe()} -> {space.describe()}] "
               f"over {len(probes)} probes: {value:.10g}")


@main.command()
@click.option("--id", "scenario_id", required=True, type=click.Choice(harness.SCENARIO_IDS))
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
def scenario(scenario_id, config_path, out_path):
    """Run a scenario from a JSON config and emit its CSV report."""
    if config_path:
        cfg = harness.ScenarioConfig.from_json(config_path)
        if cfg.scenario != scenario_id:
            raise harness.ConfigError(
                f"config names scenario {cfg.scenario!r}, command asked for {scenario_id!r}")
    else:
        cfg = harness.ScenarioConfig.default_for(scenario_id)
    rows = harness.run_scenario(cfg)
    target = out_path or cfg.out
    if target:
        harness.emit_report(rows, target)
        click.echo(f"wrote {len(rows)} rows to {target} (backend: {backend_name()})")
    else:
        for r in rows:
            click.echo(f"{r.item:>24}  {r.quantity:<28} {r.value:.10g}  {r.notes}")
    if any(r.quantity == "error" for r in rows):
        sys.exit(2)


@main.command()
@click.option("--path", required=True, type=click.Path(exists=True))
def report(path):
    """Parse and summarize an emitted CSV report."""
    rows = harness.read_report(path)
    click.echo(f"{len(rows)} rows, scenario(s): {sorted({r.scenario for r in rows})}")
    for r in rows:
        if r.item == "pipeline" or r.quantity in ("admissible", "violations"):
            click.echo(f"{r.quantity:<30} {r.value:.10g}  {r.notes}")
    errors = [r for r in rows if r.quantity == "error"]
    if errors:
        click.echo(f"{len(errors)} error rows present")
        sys.exit(2)


def entrypoint():
    try:
        main(standalone_mode=False)
    except _CONFIG_ERRORS as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except SystemExit:
        raise
    except (ValueError, RuntimeError, KernelAdmissibilityError, OSError) as exc:
        click.echo(f"numerical-stage error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    entrypoint()
