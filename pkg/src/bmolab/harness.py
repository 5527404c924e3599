"""Scenario harness: JSON configs in, CSV reports out.

Each scenario wires symbols, kernels, spaces, and weights into one of the
pipeline shapes (norm-equivalence, weak L log L sweep, kernel
admissibility sweep, product embeddings) and emits flat rows.  Every row
carries resolution and seed so reruns are reproducible; identical configs
produce byte-identical CSV files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Callable

import numpy as np

from .certificates import (
    bilinear_pointwise_certificate,
    bmo_lower_bound,
    find_bilinear_shift,
    find_shift,
    operator_norm_probe,
    pointwise_certificate,
)
from .commutators import CommutatorTask, bilinear_commutator_apply, commutator_apply
from .embeddings import indicator_norm_check, lorentz_product_check, morrey_product_check
from .geometry import Cube, GridFunction, dyadic_family, enriched_dyadic_family
from .operators import (
    BilinearFractionalSpec,
    KernelSpec,
    SphereSymbol,
    check_first_moments,
    check_mean_zero,
    kernel_oscillation,
    lower_upper_cone,
)
from .spaces import MuFunctional, SpaceSpec, bmo_mu_norm, orlicz_weak_ratio
from .weights import Weight, ap_constant, bloom_inequality_check, product_weight

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "ReportRow",
    "run_scenario",
    "emit_report",
    "read_report",
    "build_symbol_function",
    "build_sphere_symbol",
    "build_weight",
    "SCENARIO_IDS",
]

SCENARIO_IDS = (
    "cor4_2", "cor4_7", "cor4_8", "cor4_12", "cor4_15",
    "cor4_17", "cor4_19", "cor4_21", "kernel_admit", "embeddings",
)

CSV_HEADER = "scenario,item,quantity,value,resolution,seed,notes"


class ConfigError(ValueError):
    """Invalid scenario configuration (parameter relation violated, etc.)."""


@dataclass
class ScenarioConfig:
    """Declarative description of one scenario run.

    ``kernel``: {"omega": selector, "alpha": float}; omega selectors are
    "sgn", "one" (dim 1) and "cos", "cos2", "one" (dim 2), or an explicit
    {"table": [...], "interpolation": "linear"|"nearest"}.
    ``symbol``: {"kind": "log_abs" | "power" | "step" | "random",
    "beta": float, "seed": int, "pieces": int}.
    ``space``: exponents {"p", "q", "lam", "beta"} as the scenario needs.
    ``weights``: {"omega": wsel, "lam": wsel} with wsel
    {"form": "one"} or {"form": "power", "exponent": a}.
    """

    scenario: str
    dim: int = 1
    resolution: int = 2048
    depth: int = 3
    kernel: dict = field(default_factory=lambda: {"omega": "sgn", "alpha": 0.0})
    symbol: dict = field(default_factory=lambda: {"kind": "log_abs"})
    space: dict = field(default_factory=lambda: {"p": 2.0})
    weights: dict = field(default_factory=dict)
    eps_xi: float = 0.125
    h_max: float = 128.0
    seed: int = 7
    out: str | None = None

    @classmethod
    def default_for(cls, scenario: str) -> "ScenarioConfig":
        """Known-good parameters for running a scenario without a config."""
        overrides = {
            "cor4_7": dict(weights={"omega": {"form": "power", "exponent": -0.5}}),
            "cor4_8": dict(weights={"omega": {"form": "power", "exponent": -0.5},
                                    "lam": {"form": "one"}}),
            "cor4_12": dict(resolution=1024),
            "cor4_15": dict(dim=2, resolution=64, depth=2, eps_xi=0.2,
                            kernel={"omega": "cos2", "alpha": -1.0}),
            "cor4_17": dict(space={"p": 2.0, "beta": 0.25}),
            "cor4_19": dict(space={"p": 2.0, "beta": 0.25, "lam": -0.375}),
            "cor4_21": dict(kernel={"omega": "sgn", "alpha": -0.5},
                            space={"p": 2.0, "beta": 0.5, "lam": -0.25}),
        }
        return cls(scenario=scenario, **overrides.get(scenario, {}))

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "scenario" not in data:
            raise ConfigError("config must name a scenario")
        return cls(**data)

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2), encoding="utf-8")

    # -- validation -----------------------------------------------------

    def validate(self) -> None:
        if self.scenario not in SCENARIO_IDS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.dim not in (1, 2):
            raise ConfigError("dim must be 1 or 2")
        if self.resolution < 4 or self.depth < 0:
            raise ConfigError("resolution must be >= 4 and depth >= 0")
        if self.resolution // (2 ** self.depth) < 2:
            raise ConfigError("depth too deep: smallest cubes resolve to < 2 cells")
        if not self.eps_xi > 0:
            raise ConfigError("eps_xi must be positive")
        getattr(self, f"_validate_{self.scenario}", lambda: None)()

    def _p(self, default: float = 2.0) -> float:
        return float(self.space.get("p", default))

    def _alpha(self) -> float:
        return float(self.kernel.get("alpha", 0.0))

    def _beta(self, default: float) -> float:
        return float(self.space.get("beta", default))

    def _validate_cor4_2(self):
        p, a, n = self._p(), self._alpha(), self.dim
        if not p > 1:
            raise ConfigError("cor4_2 needs p > 1")
        if not 0 <= a < n:
            raise ConfigError("cor4_2 needs 0 <= alpha < n")
        if a > 0 and not p < n / a:
            raise ConfigError("cor4_2 needs p < n/alpha")

    def _validate_cor4_7(self):
        if self._alpha() != 0.0:
            raise ConfigError("cor4_7 is an alpha = 0 scenario")

    def _validate_cor4_8(self):
        if self._alpha() != 0.0:
            raise ConfigError("cor4_8 is an alpha = 0 scenario")
        if not self._p() > 1:
            raise ConfigError("cor4_8 needs p > 1")

    def _validate_cor4_12(self):
        a, n = self._alpha(), self.dim
        if not 0 <= a < 2 * n:
            raise ConfigError("cor4_12 needs 0 <= alpha < 2n")

    def _validate_cor4_15(self):
        if self.dim != 2:
            raise ConfigError("cor4_15 needs dim = 2 (first angular moments must vanish)")
        if self._alpha() != -1.0:
            raise ConfigError("cor4_15 is the alpha = -1 scenario")

    def _validate_cor4_17(self):
        p, a, n = self._p(), self._alpha(), self.dim
        beta = self._beta(0.25)
        if not (0 < beta < 1 and 0 <= a < n and 0 < a + beta < n):
            raise ConfigError("cor4_17 needs 0 < beta < 1, 0 <= alpha, 0 < alpha + beta < n")
        if not p > 1 or not 1.0 / p - (a + beta) / n > 0:
            raise ConfigError("cor4_17 exponent relation 1/q = 1/p - (alpha+beta)/n needs q < inf")

    def _validate_cor4_19(self):
        p, a, n = self._p(), self._alpha(), self.dim
        beta = self._beta(0.25)
        lam = float(self.space.get("lam", -0.375))
        if not (0 < beta < 1 and 0 <= a < n and a + beta < n):
            raise ConfigError("cor4_19 needs 0 < beta < 1 and alpha + beta < n")
        if not (-n / p <= lam < 0):
            raise ConfigError("cor4_19 needs -n/p <= lam < 0")
        if not a + beta + lam < 0:
            raise ConfigError("cor4_19 needs alpha + beta + lam < 0")
        if not 1.0 / p - (a + beta) / n > 0:
            raise ConfigError("cor4_19 exponent relation needs q < inf")

    def _validate_cor4_21(self):
        p, n = self._p(), self.dim
        beta = self._beta(0.5)
        lam = float(self.space.get("lam", -0.25))
        if not 0 < beta <= 1:
            raise ConfigError("cor4_21 needs 0 < beta <= 1")
        if self._alpha() != -beta:
            raise ConfigError("cor4_21 needs alpha = -beta")
        if not (-n / p <= lam < 0):
            raise ConfigError("cor4_21 needs -n/p <= lam < 0")


@dataclass(frozen=True)
class ReportRow:
    scenario: str
    item: str
    quantity: str
    value: float
    resolution: int
    seed: int
    notes: str = ""


def emit_report(rows, path) -> None:
    """Write rows as UTF-8 CSV with the fixed header, deterministic order."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for r in rows:
            writer.writerow(
                [r.scenario, r.item, r.quantity, f"{r.value:.12g}",
                 str(r.resolution), str(r.seed), r.notes]
            )


def read_report(path) -> list[ReportRow]:
    rows = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER.split(","):
            raise ValueError(f"unexpected header {header}")
        for rec in reader:
            rows.append(ReportRow(rec[0], rec[1], rec[2], float(rec[3]),
                                  int(rec[4]), int(rec[5]), rec[6]))
    return rows


# -- builders ------------------------------------------------------------


def build_sphere_symbol(kernel_cfg: dict, dim: int) -> SphereSymbol:
    omega = kernel_cfg.get("omega", "sgn")
    if isinstance(omega, dict):
        return SphereSymbol(2, np.asarray(omega["table"], dtype=float),
                            omega.get("interpolation", "linear"))
    if dim == 1:
        if omega == "sgn":
            return SphereSymbol.sign()
        if omega == "one":
            return SphereSymbol.constant(1.0, dim=1)
        raise ConfigError(f"unknown dim-1 omega selector {omega!r}")
    table_m = int(kernel_cfg.get("table_size", 64))
    if omega == "cos":
        return SphereSymbol.from_angle_fn(np.cos, m=table_m)
    if omega == "cos2":
        return SphereSymbol.from_angle_fn(lambda t: np.cos(2 * t), m=table_m)
    if omega == "one":
        return SphereSymbol.constant(1.0, dim=2, m=table_m)
    raise ConfigError(f"unknown dim-2 omega selector {omega!r}")


def build_kernel(cfg: ScenarioConfig) -> KernelSpec:
    return KernelSpec(build_sphere_symbol(cfg.kernel, cfg.dim), cfg._alpha())


def build_weight(selector: dict | None, dim: int) -> Weight:
    if not selector or selector.get("form", "one") == "one":
        return Weight.one(dim)
    if selector["form"] == "power":
        return Weight.power(float(selector["exponent"]), (0.0,) * dim)
    raise ConfigError(f"unknown weight selector {selector!r}")


def build_symbol_function(symbol_cfg: dict, core: Cube, seed: int) -> Callable:
    """Vectorized symbol callable for GridFunction.sample on any domain.

    Random piecewise symbols split the core along the first axis and
    extend constantly beyond it, so shifted windows see well-defined
    values.
    """
    kind = symbol_cfg.get("kind", "log_abs")
    dim = core.dim
    if kind == "log_abs":
        if dim == 1:
            return lambda x: np.log(np.abs(x))
        return lambda x, y: 0.5 * np.log(x * x + y * y)
    if kind == "power":
        beta = float(symbol_cfg.get("beta", 0.5))
        if dim == 1:
            return lambda x: np.abs(x) ** beta
        return lambda x, y: (x * x + y * y) ** (beta / 2.0)
    if kind == "step":
        if dim == 1:
            return lambda x: np.where(x >= 0, 0.5, -0.5)
        return lambda x, y: np.where(x >= 0, 0.5, -0.5)
    if kind == "random":
        pieces = int(symbol_cfg.get("pieces", 8))
        rng = np.random.default_rng(int(symbol_cfg.get("seed", seed)))
        levels = rng.uniform(-1.0, 1.0, pieces)
        lo, width = core.lo[0], core.side

        def piecewise(x, y=None):
            idx = np.clip(((x - lo) / width * pieces).astype(int), 0, pieces - 1)
            return levels[idx]

        return piecewise
    raise ConfigError(f"unknown symbol kind {kind!r}")


def _embed_core(
    core: Cube, resolution: int, extra: float, direction=None
) -> tuple[Cube, int]:
    """Square domain covering the core plus ``extra`` length, cell-aligned.

    Without a direction the padding is symmetric.  With a unit direction
    (the shift-cone axis) the extra length is added only where shifted
    windows can actually reach, which matters in dimension 2 where the
    grid is square and padding is quadratic in cost.
    """
    cell = core.side / resolution
    if direction is None:
        pad = int(math.ceil(extra / cell)) + 2
        n = resolution + 2 * pad
        return Cube(core.dim, core.center, n * cell), n
    e = np.asarray(direction, dtype=float)
    lo_pad = np.ceil(np.maximum(0.0, -e) * extra / cell).astype(int) + 2
    hi_pad = np.ceil(np.maximum(0.0, e) * extra / cell).astype(int) + 2
    n = int(resolution + np.max(lo_pad + hi_pad))
    # square domain: give each axis its needed lo padding, put the slack high
    lo = np.asarray(core.lo) - lo_pad * cell
    center = tuple(float(lo[a]) + n * cell / 2 for a in range(core.dim))
    return Cube(core.dim, center, n * cell), n


def _core_cube(cfg: ScenarioConfig) -> Cube:
    return Cube.interval(-1.0, 1.0) if cfg.dim == 1 else Cube.square((0.0, 0.0), 2.0)


def _core_probes(b: GridFunction, core: Cube, depths) -> list[GridFunction]:
    """Indicator and two-level sign probes on dyadic cubes of the core."""
    core_grid = b.restrict(core)
    probes = []
    for k in depths:
        side_k = core.side / 2 ** k
        for cube in dyadic_family(core, k):
            if abs(cube.side - side_k) > 1e-12 * core.side:
                continue
            ind = GridFunction.indicator(core_grid.domain, core_grid.n, cube)
            probes.append(ind)
            sub = Cube(core.dim, tuple(
                c - cube.side / 4 if a == 0 else c for a, c in enumerate(cube.center)
            ), cube.side / 2)
            left = GridFunction.indicator(core_grid.domain, core_grid.n, sub)
            probes.append(ind.with_values(2.0 * left.values - ind.values))
    return probes


def _headline(cfg, item, quantity, value, notes="") -> ReportRow:
    return ReportRow(cfg.scenario, item, quantity, float(value),
                     cfg.resolution, cfg.seed, notes)


# -- norm-equivalence pipeline shared by several scenarios ---------------


def _norm_equivalence_rows(
    cfg: ScenarioConfig,
    kernel: KernelSpec,
    x_space: SpaceSpec,
    y_space: SpaceSpec,
    mu: MuFunctional,
    extra_headline: list[ReportRow] | None = None,
    forward_note: str = "",
    extra_probe_targets: list[tuple[str, SpaceSpec, SpaceSpec]] | None = None,
) -> list[ReportRow]:
    core = _core_cube(cfg)
    cert = find_shift(kernel, cfg.eps_xi, cfg.h_max)
    domain, n_dom = _embed_core(core, cfg.resolution,
                                (cert.h_mag + 1.0) * core.side,
                                direction=cert.shift_vector() / cert.h_mag)
    fn = build_symbol_function(cfg.symbol, core, cfg.seed)
    b = GridFunction.sample(domain, n_dom, fn)
    family = dyadic_family(core, cfg.depth)
    task = CommutatorTask(b, kernel)
    eval_cap = 2048 if cfg.dim == 1 else 48
    report = bmo_lower_bound(b, task, x_space, y_space, mu, family,
                             eval_resolution=eval_cap, cert=cert)
    probe_depths = [d for d in (1, 2) if d <= cfg.depth]
    probes = _core_probes(b, core, probe_depths)
    probe_cap = 4096 if cfg.dim == 1 else 64
    probe_val = operator_norm_probe(task, x_space, y_space, probes,
                                    eval_resolution=probe_cap)
    direct = bmo_mu_norm(b.restrict(core), mu, enriched_dyadic_family(core, cfg.depth))
    note = f"|h|={cert.h_mag:g};c_tilde={cert.c_tilde:.6g};eval_cap={eval_cap}"
    rows = [
        _headline(cfg, "pipeline", "aggregate_lower_bound", report.aggregate, note),
        _headline(cfg, "pipeline", "bmo_mu_direct", direct),
        _headline(cfg, "pipeline", "operator_norm_probe", probe_val,
                  forward_note or f"probes={len(probes)}"),
        _headline(cfg, "pipeline", "operator_norm_proxy", report.operator_norm_proxy),
        _headline(cfg, "pipeline", "chain_constant", report.chain_constant),
        _headline(cfg, "pipeline", "certified_fraction",
                  np.mean([r.certified for r in report.records])),
        _headline(cfg, "pipeline", "ratio_aggregate_over_probe",
                  report.aggregate / probe_val if probe_val > 0 else math.nan),
    ]
    for label, xs, ys in extra_probe_targets or []:
        val = operator_norm_probe(task, xs, ys, probes, eval_resolution=probe_cap)
        rows.append(_headline(cfg, "pipeline", label, val))
    if extra_headline:
        rows.extend(extra_headline)
    if len(report.records) <= 64:
        for i, rec in enumerate(report.records):
            rows.append(_headline(cfg, f"Q{i}", "cube_oscillation", rec.oscillation))
            rows.append(_headline(cfg, f"Q{i}", "cube_certified_bound", rec.certified_bound))
    return rows


# -- scenarios ------------------------------------------------------------


def _run_cor4_2(cfg: ScenarioConfig) -> list[ReportRow]:
    p, a, n = cfg._p(), cfg._alpha(), cfg.dim
    q = 1.0 / (1.0 / p - a / n)
    kernel = build_kernel(cfg)
    # the weak-target statement is the novelty; the strong-target probe row
    # is what weighted degenerations compare against
    return _norm_equivalence_rows(
        cfg, kernel,
        SpaceSpec.lebesgue(p), SpaceSpec.weak(q), MuFunctional.lebesgue(),
        extra_headline=[_headline(cfg, "pipeline", "target_q", q)],
        extra_probe_targets=[("operator_norm_probe_strong",
                              SpaceSpec.lebesgue(p), SpaceSpec.lebesgue(q))],
    )


def _run_cor4_8(cfg: ScenarioConfig) -> list[ReportRow]:
    p = cfg._p()
    omega = build_weight(cfg.weights.get("omega"), cfg.dim)
    lam = build_weight(cfg.weights.get("lam"), cfg.dim)
    mu_weight = product_weight([omega, lam], [1.0 / p, -1.0 / p])
    kernel = build_kernel(cfg)
    core = _core_cube(cfg)
    wfam = dyadic_family(core, min(cfg.depth, 6))
    extra = [
        _headline(cfg, "weights", "ap_omega", ap_constant(omega, p, wfam)),
        _headline(cfg, "weights", "ap_lambda", ap_constant(lam, p, wfam)),
    ]
    ratios = []
    for cube in wfam:
        lhs, rhs = bloom_inequality_check(omega, lam, p, cube)
        ratios.append(lhs / rhs)
    extra.append(_headline(cfg, "weights", "bloom_ratio_max", max(ratios)))
    return _norm_equivalence_rows(
        cfg, kernel,
        SpaceSpec.weighted(p, omega), SpaceSpec.weighted(p, lam),
        MuFunctional.weighted_lip(0.0, mu_weight),
        extra_headline=extra,
    )


def _run_cor4_17(cfg: ScenarioConfig) -> list[ReportRow]:
    p, a, n = cfg._p(), cfg._alpha(), cfg.dim
    beta = cfg._beta(0.25)
    q = 1.0 / (1.0 / p - (a + beta) / n)
    omega = build_weight(cfg.weights.get("omega", {"form": "power", "exponent": -0.25}), cfg.dim)
    y_weight = omega.pow(1.0 - (1.0 - a / n) * q)
    cfg.symbol.setdefault("kind", "power")
    cfg.symbol.setdefault("beta", beta)
    return _norm_equivalence_rows(
        cfg, build_kernel(cfg),
        SpaceSpec.weighted(p, omega), SpaceSpec.weighted(q, y_weight),
        MuFunctional.weighted_lip(beta, omega),
        extra_headline=[_headline(cfg, "pipeline", "target_q", q)],
        forward_note="forward direction probed, not certified",
    )


def _run_cor4_19(cfg: ScenarioConfig) -> list[ReportRow]:
    p, a, n = cfg._p(), cfg._alpha(), cfg.dim
    beta = cfg._beta(0.25)
    lam = float(cfg.space.get("lam", -0.375))
    q = 1.0 / (1.0 / p - (a + beta) / n)
    nu = a + beta + lam
    cfg.symbol.setdefault("kind", "power")
    cfg.symbol.setdefault("beta", beta)
    return _norm_equivalence_rows(
        cfg, build_kernel(cfg),
        SpaceSpec.morrey(p, lam, dim=n), SpaceSpec.morrey(q, nu, dim=n),
        MuFunctional.lip(beta),
        extra_headline=[_headline(cfg, "pipeline", "target_q", q),
                        _headline(cfg, "pipeline", "target_nu", nu)],
    )


def _run_cor4_21(cfg: ScenarioConfig) -> list[ReportRow]:
    p, n = cfg._p(), cfg.dim
    beta = cfg._beta(0.5)
    lam = float(cfg.space.get("lam", -0.25))
    cfg.symbol.setdefault("kind", "power")
    cfg.symbol.setdefault("beta", beta)
    return _norm_equivalence_rows(
        cfg, build_kernel(cfg),
        SpaceSpec.morrey(p, lam, dim=n), SpaceSpec.morrey(p, lam, dim=n),
        MuFunctional.lip(beta),
    )


def _run_cor4_15(cfg: ScenarioConfig) -> list[ReportRow]:
    p = cfg._p()
    cfg.symbol.setdefault("kind", "power")
    cfg.symbol.setdefault("beta", 1.0)
    return _norm_equivalence_rows(
        cfg, build_kernel(cfg),
        SpaceSpec.lebesgue(p), SpaceSpec.weak(p),
        MuFunctional.lip(1.0),
    )


def _run_cor4_7(cfg: ScenarioConfig) -> list[ReportRow]:
    kernel = build_kernel(cfg)
    omega = build_weight(cfg.weights.get("omega", {"form": "power", "exponent": -0.5}), cfg.dim)
    core = _core_cube(cfg)
    cert = find_shift(kernel, cfg.eps_xi, cfg.h_max)
    domain, n_dom = _embed_core(core, cfg.resolution, (cert.h_mag + 1.0) * core.side,
                                direction=cert.shift_vector() / cert.h_mag)
    b = GridFunction.sample(domain, n_dom, build_symbol_function(cfg.symbol, core, cfg.seed))
    q1 = Cube.interval(0.0, 0.5) if cfg.dim == 1 else Cube.square((0.25, 0.25), 0.5)
    pair, violations = pointwise_certificate(b, q1, kernel, cert)
    rows = [_headline(cfg, "certificate", "violations", len(violations),
                      f"|h|={cert.h_mag:g};c_tilde={cert.c_tilde:.6g}")]
    task = CommutatorTask(b, kernel)
    core_grid = b.restrict(core)
    eval_n = min(core_grid.n, 4096)
    out_template = GridFunction(core_grid.domain, eval_n, np.zeros((eval_n,) * cfg.dim))
    max_ratio = 0.0
    for name, probe in (("phi", pair.phi), ("psi", pair.psi)):
        g_vals = commutator_apply(task, probe, out_template.centers())
        g = out_template.with_values(g_vals.reshape(out_template.values.shape))
        med = float(np.median(np.abs(g_vals)))
        if med == 0.0:
            med = float(np.max(np.abs(g_vals))) or 1.0
        for k in range(-6, 7):
            lam_level = (2.0 ** k) * med
            lhs, rhs = orlicz_weak_ratio(g, probe, lam_level, omega)
            ratio = lhs / rhs if rhs > 0 else 0.0
            max_ratio = max(max_ratio, ratio)
            rows.append(_headline(cfg, f"{name}:lam=2^{k}", "weak_type_ratio", ratio,
                                  f"lhs={lhs:.6g};rhs={rhs:.6g}"))
    rows.append(_headline(cfg, "pipeline", "weak_type_constant", max_ratio,
                          "level sets restricted to the core window"))
    return rows


def _run_cor4_12(cfg: ScenarioConfig) -> list[ReportRow]:
    spec = BilinearFractionalSpec(cfg.dim, cfg._alpha())
    cert = find_bilinear_shift(spec, cfg.eps_xi, cfg.h_max)
    core = _core_cube(cfg)
    shift_extent = float(np.max(np.abs(np.asarray(cert.h))))
    domain, n_dom = _embed_core(core, cfg.resolution, (shift_extent + 1.0) * core.side)
    b = GridFunction.sample(domain, n_dom, build_symbol_function(cfg.symbol, core, cfg.seed))
    q1 = Cube.interval(0.0, 0.5) if cfg.dim == 1 else Cube.square((0.25, 0.25), 0.5)
    w1 = build_weight(cfg.weights.get("omega"), cfg.dim)
    w2 = build_weight(cfg.weights.get("lam"), cfg.dim)
    rows = []
    for slot in (1, 2):
        phi1, phi2, psi1, psi2, violations = bilinear_pointwise_certificate(
            b, q1, spec, cert, slot=slot)
        rows.append(_headline(cfg, f"slot{slot}", "violations", len(violations),
                              f"|h|={cert.h_mag:g};c_tilde={cert.c_tilde:.6g}"))
        if slot != 1:
            continue
        window = cert.shifted_cube(q1, slot)
        task = CommutatorTask(b, spec, slot=slot)
        wgrid = b.restrict(window)
        g_vals = bilinear_commutator_apply(task, phi1, phi2, wgrid.centers())
        g = wgrid.with_values(g_vals.reshape(wgrid.values.shape))
        med = float(np.median(np.abs(g_vals))) or 1.0
        max_ratio = 0.0
        for k in range(-6, 7):
            level = (2.0 ** k) * med
            lam_level = math.sqrt(level)
            lhs1, rhs1 = orlicz_weak_ratio(g, phi1, lam_level, w1)
            _, rhs2 = orlicz_weak_ratio(g, phi2, lam_level, w2)
            nu_mass = _nu_level_mass(g, level, w1, w2)
            rhs = math.sqrt(rhs1 * rhs2)
            ratio = nu_mass / rhs if rhs > 0 else 0.0
            max_ratio = max(max_ratio, ratio)
            rows.append(_headline(cfg, f"slot1:lam=2^{k}", "weak_type_ratio", ratio,
                                  f"lhs={nu_mass:.6g};rhs={rhs:.6g}"))
        rows.append(_headline(cfg, "pipeline", "weak_type_constant", max_ratio,
                              "level sets on the shifted window"))
    return rows


def _nu_level_mass(g: GridFunction, level: float, w1: Weight, w2: Weight) -> float:
    pts = g.centers()
    nu = np.sqrt(w1(pts) * w2(pts))
    mask = np.abs(g.values.ravel()) > level
    return float(np.sum(nu[mask]) * g.cell_volume)


def _run_kernel_admit(cfg: ScenarioConfig) -> list[ReportRow]:
    kernel = build_kernel(cfg)
    symbol = kernel.symbol
    rows = [
        _headline(cfg, "kernel", "mean_value", check_mean_zero(symbol)),
    ]
    for j, m in enumerate(check_first_moments(symbol)):
        rows.append(_headline(cfg, "kernel", f"first_moment_{j}", m))
    cone = lower_upper_cone(symbol)
    if cone is None:
        rows.append(_headline(cfg, "cone", "detected", 0.0, "no one-signed direction set"))
        return rows
    rows.append(_headline(cfg, "cone", "detected", 1.0,
                          f"sign={cone.sign};floor={cone.floor:.6g}"))
    rows.append(_headline(cfg, "cone", "lower_bound", cone.c))
    rows.append(_headline(cfg, "cone", "upper_bound", cone.C))
    e = cone.central_direction
    h = 2.0
    while h <= cfg.h_max:
        if h > math.sqrt(cfg.dim):
            for mode in ("Linf", "L1"):
                osc = kernel_oscillation(symbol, h * e, mode, n0=48)
                rows.append(_headline(cfg, f"h={h:g}", f"oscillation_{mode}", osc))
        h *= 2.0
    try:
        cert = find_shift(kernel, cfg.eps_xi, cfg.h_max)
        rows.append(_headline(cfg, "verdict", "admissible", 1.0,
                              f"|h|={cert.h_mag:g};xi={cert.xi_bound:.6g};z={cert.z_mode}"))
    except Exception as exc:  # admissibility failure is a result, not an error
        rows.append(_headline(cfg, "verdict", "admissible", 0.0, str(exc)))
    return rows


def _run_embeddings(cfg: ScenarioConfig) -> list[ReportRow]:
    rng = np.random.default_rng(cfg.seed)
    core = Cube.interval(0.0, 1.0)
    n = min(cfg.resolution, 2048)
    p = cfg._p()
    q = float(cfg.space.get("q", math.inf))
    lam = float(cfg.space.get("lam", -0.5))
    family = dyadic_family(core, 3)
    lorentz_max = 0.0
    morrey_max = 0.0
    pairs = 50
    for _ in range(pairs):
        f = _random_step(core, n, rng)
        g = _random_step(core, n, rng)
        lhs, rhs = lorentz_product_check(f, g, p, q)
        if rhs > 0:
            lorentz_max = max(lorentz_max, lhs / rhs)
        lhs, rhs = morrey_product_check(f, g, p, lam, family)
        if rhs > 0:
            morrey_max = max(morrey_max, lhs / rhs)
    rows = [
        _headline(cfg, "lorentz", "product_ratio_max", lorentz_max, f"pairs={pairs}"),
        _headline(cfg, "morrey", "product_ratio_max", morrey_max, f"pairs={pairs}"),
    ]
    cube = Cube.interval(0.0, 1.0)
    for name, spec in (
        ("lebesgue", SpaceSpec.lebesgue(2.0)),
        ("weak", SpaceSpec.weak(2.0)),
        ("lorentz", SpaceSpec.lorentz(2.0, 1.0)),
        ("morrey", SpaceSpec.morrey(2.0, -0.5)),
    ):
        computed, closed = indicator_norm_check(spec, cube, n=1024)
        rows.append(_headline(cfg, f"indicator:{name}", "computed_over_closed",
                              computed / closed))
    return rows


def _random_step(core: Cube, n: int, rng) -> GridFunction:
    pieces = 8
    levels = rng.uniform(0.0, 2.0, pieces)
    lo, width = core.lo[0], core.side

    def fn(x):
        idx = np.clip(((x - lo) / width * pieces).astype(int), 0, pieces - 1)
        return levels[idx]

    return GridFunction.sample(core, n, fn)


_SCENARIOS = {
    "cor4_2": _run_cor4_2,
    "cor4_7": _run_cor4_7,
    "cor4_8": _run_cor4_8,
    "cor4_12": _run_cor4_12,
    "cor4_15": _run_cor4_15,
    "cor4_17": _run_cor4_17,
    "cor4_19": _run_cor4_19,
    "cor4_21": _run_cor4_21,
    "kernel_admit": _run_kernel_admit,
    "embeddings": _run_embeddings,
}


def run_scenario(cfg: ScenarioConfig) -> list[ReportRow]:
    """Validate, run, and capture failures as error rows.

    Config errors raise :class:`ConfigError`; numerical-stage failures are
    converted into a row with quantity ``error`` so partial reports stay
    inspectable offline.
    """
    cfg.validate()
    try:
        return _SCENARIOS[cfg.scenario](cfg)
    except ConfigError:
        raise
    except Exception as exc:
        return [ReportRow(cfg.scenario, "pipeline", "error", math.nan,
                          cfg.resolution, cfg.seed, f"{type(exc).__name__}: {exc}")]
