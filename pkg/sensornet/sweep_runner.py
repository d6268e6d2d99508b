"""
Parameter sweeps that produce the data series behind each analysis.

Each sweep writes one table (CSV or JSON) into the run's output directory
together with a provenance sidecar. Summary statistics that are reported
rather than asserted (parity alternation, peak sizes, fitted exponents) go
into the sidecar.
"""
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from .config import CouplingScaling, SpinSystemParams, get_settings
from .errors import ConfigurationError, InsufficientDataError, SizeCapExceeded
from .genetic_topology_optimizer import CrossoverMode, FitnessKind, GaConfig, GaRunRecord, evolve
from .graph_topology import Graph, GraphKind, read_graph, standard_graph
from .ground_state_metrology import (
    Parity,
    ScalingFit,
    generator_qfi_ground,
    peak_size,
    polynomial_fit,
    power_law_fit,
    spin_squeezing,
)
from .ising_hamiltonian import build_tfim, collective_mx
from .phase_space_analysis import (
    DEFAULT_PHI_SAMPLES,
    DEFAULT_THETA_SAMPLES,
    equatorial_overlap_profile,
    husimi_grid,
    sx_from_husimi,
)
from .record_export import export_records, read_series, write_table
from .spectral_analysis import eigensystem, energy_gap, ground_state
from .thermal_metrology import ground_state_field_qfi, magnetization_variance, susceptibility_chi_x, thermal_qfi_sld

logger = logging.getLogger(__name__)


class SweepKind(str, Enum):
    DN_QFI_VS_N = "dn-qfi-vs-n"
    VARMX_VS_N = "varmx-vs-n"
    RESCALED_QFI = "rescaled-qfi"
    GAP_VS_N = "gap-vs-n"
    HUSIMI = "husimi"
    T0_SCALING = "t0-scaling"
    FITS = "fits"
    H_SWEEP = "h-sweep"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class RunConfig(BaseModel):
    """Everything a command or sweep needs; validated before dispatch"""
    physics: SpinSystemParams = SpinSystemParams()
    n: int = Field(default=2, ge=1)
    n_min: int = Field(default=1, ge=1)
    n_max: int = Field(default=8, ge=1)
    population: int = Field(default=100, ge=2)
    generations: int = Field(default=15, ge=1)
    mutation_prob: float = Field(default=0.3, ge=0.0, le=1.0)
    crossover_mode: CrossoverMode = CrossoverMode.INTERSECTION
    fitness: FitnessKind = FitnessKind.DN
    seed: Optional[int] = Field(default=None, ge=0, lt=2 ** 64)
    graph_kind: GraphKind = GraphKind.COMPLETE
    graph_file: Optional[Path] = None
    temperatures: List[float] = Field(default_factory=lambda: [0.08, 2.0])
    h_values: List[float] = Field(default_factory=lambda: [0.05, 0.1, 0.5, 1.0])
    series_file: Optional[Path] = None
    fit_degree: int = Field(default=1, ge=0, le=4)
    theta_samples: int = Field(default=DEFAULT_THETA_SAMPLES, ge=2)
    phi_samples: int = Field(default=DEFAULT_PHI_SAMPLES, ge=2)
    out: Path = Field(default_factory=lambda: get_settings().output_dir)
    fmt: OutputFormat = OutputFormat.CSV

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.n_max < self.n_min:
            raise ValueError(f"n_max={self.n_max} is below n_min={self.n_min}")
        if any(T < 0 for T in self.temperatures):
            raise ValueError("temperatures must be non-negative")
        return self

    def check_size_cap(self) -> None:
        """Fail before a size sweep starts rather than at its first oversized matrix"""
        cap = self.physics.size_cap()
        if self.n_max > cap:
            raise SizeCapExceeded(self.n_max, cap)

    def require_seed(self, purpose: str) -> int:
        if self.seed is None:
            raise ConfigurationError(f"{purpose} are stochastic and need an explicit --seed")
        return self.seed

    @property
    def sizes(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def ga_config(self, n: int, physics: Optional[SpinSystemParams] = None) -> GaConfig:
        return GaConfig(
            n=n,
            population=self.population,
            generations=self.generations,
            mutation_prob=self.mutation_prob,
            crossover_mode=self.crossover_mode,
            fitness=self.fitness,
            physics=physics or self.physics,
            seed=self.require_seed("GA runs"),
        )

    def target(self, stem: str) -> Path:
        return self.out / f"{stem}.{self.fmt.value}"


def _edges_text(g: Graph) -> str:
    return " ".join(f"{u}-{v}" for u, v in g.edges)


def _alternation(values: List[float]) -> Dict:
    """Signs of first differences and whether they alternate"""
    signs = [int(np.sign(b - a)) for a, b in zip(values, values[1:])]
    alternates = len(signs) > 1 and all(s * t < 0 for s, t in zip(signs, signs[1:]))
    return {"first_difference_signs": signs, "alternates": alternates}


def _field_qfi(g: Graph, physics: SpinSystemParams) -> float:
    """Thermal SLD QFI, or the pure ground-state value at T = 0"""
    if physics.T > 0:
        return thermal_qfi_sld(g, physics).value
    spectrum = eigensystem(build_tfim(g, physics))
    return ground_state_field_qfi(spectrum, collective_mx(g.n, physics.size_cap()))


def sweep_dn_qfi_vs_n(cfg: RunConfig) -> List[Path]:
    """GA winner per size at each temperature, with its D_n and thermal QFI"""
    rows, summary = [], {}
    for T in cfg.temperatures:
        physics = cfg.physics.with_temperature(T)
        qfis, records = [], []
        for n in cfg.sizes:
            record: GaRunRecord = evolve(cfg.ga_config(n, physics))
            records.append(record)
            best = record.graph()
            qfi = _field_qfi(best, physics)
            qfis.append(qfi)
            rows.append({
                "T": T,
                "N": n,
                "best_dn": record.best_dn,
                "qfi": qfi,
                "first_hit_generation": record.first_hit_generation,
                "edge_count": best.edge_count,
                "edges": _edges_text(best),
            })
            logger.info(f"T={T} N={n}: D_n={record.best_dn:.8g}, QFI={qfi:.8g}")
        export_records(records, cfg.out / f"ga_records_T{T:g}", "sweep dn-qfi-vs-n", cfg)
        summary[f"T={T}"] = {
            "qfi_peak": peak_size(list(cfg.sizes), qfis).model_dump(),
            "qfi_parity": _alternation(qfis),
        }

    frame = pd.DataFrame(rows)
    return [write_table(frame, cfg.target("dn_qfi_vs_n"), "sweep dn-qfi-vs-n", cfg, cfg.seed, cfg.fmt.value, summary)]


def sweep_varmx_vs_n(cfg: RunConfig) -> List[Path]:
    """Gibbs Var(M_x), its fluctuation-dissipation estimate and chi_x along a graph family"""
    rows = []
    for n in cfg.sizes:
        g = standard_graph(cfg.graph_kind, n)
        variance = magnetization_variance(g, cfg.physics)
        rows.append({
            "N": n,
            "mean_mx": variance.mean_mx,
            "var_mx": variance.direct,
            "var_mx_fdt": variance.fdt_estimate,
            "chi_x": susceptibility_chi_x(g, cfg.physics),
            "relative_deviation": variance.relative_deviation,
        })
    frame = pd.DataFrame(rows)
    return [write_table(frame, cfg.target("varmx_vs_n"), "sweep varmx-vs-n", cfg, cfg.seed, cfg.fmt.value)]


def sweep_rescaled_qfi(cfg: RunConfig) -> List[Path]:
    rows = []
    for n in cfg.sizes:
        qfi = _field_qfi(standard_graph(cfg.graph_kind, n), cfg.physics)
        rows.append({"N": n, "qfi": qfi, "qfi_per_n": qfi / n, "qfi_per_n2": qfi / n ** 2})
    frame = pd.DataFrame(rows)
    per_n = frame["qfi_per_n"]
    summary = {
        "qfi_per_n_relative_spread": float((per_n.max() - per_n.min()) / per_n.mean()),
        "qfi_per_n2_peak": peak_size(frame["N"], frame["qfi_per_n2"]).model_dump(),
    }
    if len(frame) >= 3:
        summary["linear_fit"] = polynomial_fit(frame["N"], frame["qfi"], 1).model_dump(mode="json")
    return [write_table(frame, cfg.target("rescaled_qfi"), "sweep rescaled-qfi", cfg, cfg.seed, cfg.fmt.value, summary)]


def sweep_gap_vs_n(cfg: RunConfig) -> List[Path]:
    """E_1 - E_0 for cycle and complete graphs"""
    rows = []
    for kind in (GraphKind.CYCLE, GraphKind.COMPLETE):
        for n in cfg.sizes:
            if n < 2:
                continue
            gap = energy_gap(build_tfim(standard_graph(kind, n), cfg.physics))
            rows.append({"family": kind.value, "N": n, "gap": gap})
    if not rows:
        raise ConfigurationError("gap-vs-n needs sizes of at least 2")
    frame = pd.DataFrame(rows)
    return [write_table(frame, cfg.target("gap_vs_n"), "sweep gap-vs-n", cfg, cfg.seed, cfg.fmt.value)]


def selected_graph(cfg: RunConfig) -> Graph:
    """Graph from --graph, otherwise the standard family at size n"""
    if cfg.graph_file is not None:
        return read_graph(cfg.graph_file)
    return standard_graph(cfg.graph_kind, cfg.n)


def sweep_husimi(cfg: RunConfig) -> List[Path]:
    """Husimi grid and equatorial overlap profile of a ground state"""
    g = selected_graph(cfg)
    state = ground_state(build_tfim(g, cfg.physics)).vector
    grid = husimi_grid(state, cfg.theta_samples, cfg.phi_samples)
    profile = equatorial_overlap_profile(state, cfg.phi_samples)
    moments = sx_from_husimi(grid)

    summary = {
        "graph": g.to_dict(),
        "normalization": grid.normalization(),
        "symmetric": grid.symmetric,
        "argmax_phi": profile.argmax_phi,
        "antipodal_ratio": profile.antipodal_ratio,
        "local_maxima": profile.local_maxima,
        "sx_exact_symbol": moments.sx_exact_symbol,
        "sx_literal_integral": moments.sx_literal_integral,
        "sx_direct": moments.sx_direct,
        "sx2_direct": moments.sx2_direct,
    }
    logger.info(
        f"Husimi for {g}: norm={summary['normalization']:.6f}, "
        f"antipodal ratio={profile.antipodal_ratio:.3e}"
    )
    return [
        write_table(grid.to_frame(), cfg.target("husimi_grid"), "sweep husimi", cfg, cfg.seed, cfg.fmt.value, summary),
        write_table(profile.to_frame(), cfg.target("husimi_profile"), "sweep husimi", cfg, cfg.seed, cfg.fmt.value, summary),
    ]


def _exponents(Ns: List[int], values: List[float]) -> Dict:
    exponents = {}
    for parity in (Parity.EVEN, Parity.ODD):
        try:
            exponents[parity.value] = power_law_fit(Ns, values, parity).exponent
        except InsufficientDataError:
            exponents[parity.value] = None
    return exponents


def sweep_t0_scaling(cfg: RunConfig) -> List[Path]:
    """Ground-state energy, generator QFI and xi^2 of complete graphs, bare and Kac"""
    rows, summary = [], {}
    for scaling in (CouplingScaling.BARE, CouplingScaling.KAC):
        physics = cfg.physics.model_copy(update={"scaling": scaling})
        Ns, qfis = [], []
        for n in cfg.sizes:
            ground = ground_state(build_tfim(standard_graph(GraphKind.COMPLETE, n), physics))
            f_q = generator_qfi_ground(ground.vector, n)
            Ns.append(n)
            qfis.append(f_q)
            rows.append({
                "scaling": scaling.value,
                "N": n,
                "e0": ground.energy,
                "f_q": f_q,
                "xi2": spin_squeezing(f_q, n),
                "f_q_per_n2": f_q / n ** 2,
            })
        summary[scaling.value] = {
            "f_q_per_n2_peak": peak_size(Ns, [f / n ** 2 for n, f in zip(Ns, qfis)]).model_dump(),
            "power_law_exponents": _exponents(Ns, qfis),
        }
    frame = pd.DataFrame(rows)
    return [write_table(frame, cfg.target("t0_scaling"), "sweep t0-scaling", cfg, cfg.seed, cfg.fmt.value, summary)]


def fit_series(Ns: List[int], values: List[float], degree: int) -> List[ScalingFit]:
    """Every fit that the series supports: polynomial, log-log and per-parity power laws"""
    fits = [polynomial_fit(Ns, values, degree)]
    if all(v > 0 for v in values):
        try:
            fits.append(polynomial_fit(Ns, values, degree, log_space=True))
        except InsufficientDataError:
            pass
        for parity in (Parity.ALL, Parity.EVEN, Parity.ODD):
            try:
                fits.append(power_law_fit(Ns, values, parity))
            except InsufficientDataError:
                logger.info(f"Skipping {parity.value} power law: too few points")
    return fits


def sweep_fits(cfg: RunConfig) -> List[Path]:
    if cfg.series_file is None:
        raise ConfigurationError("The fits sweep needs a series file")
    Ns, values = read_series(cfg.series_file)
    fits = fit_series(Ns, values, cfg.fit_degree)
    frame = pd.DataFrame([
        {
            "kind": fit.kind.value,
            "parity": fit.parity.value,
            "degree": fit.degree,
            "exponent": fit.exponent,
            "residual": fit.residual,
            "r_squared": fit.r_squared,
            "coefficients": " ".join(f"{c:.12g}" for c in fit.coefficients),
        }
        for fit in fits
    ])
    summary = {"fits": [fit.model_dump(mode="json") for fit in fits]}
    return [write_table(frame, cfg.target("fits"), "sweep fits", cfg, cfg.seed, cfg.fmt.value, summary)]


def sweep_h(cfg: RunConfig) -> List[Path]:
    """GA winners across field strengths"""
    rows = []
    for h in cfg.h_values:
        physics = cfg.physics.with_field(h)
        for n in cfg.sizes:
            record = evolve(cfg.ga_config(n, physics))
            best = record.graph()
            rows.append({
                "h": h,
                "N": n,
                "best_dn": record.best_dn,
                "edge_count": best.edge_count,
                "edges": _edges_text(best),
            })
    frame = pd.DataFrame(rows)
    return [write_table(frame, cfg.target("h_sweep"), "sweep h-sweep", cfg, cfg.seed, cfg.fmt.value)]


SWEEPS = {
    SweepKind.DN_QFI_VS_N: sweep_dn_qfi_vs_n,
    SweepKind.VARMX_VS_N: sweep_varmx_vs_n,
    SweepKind.RESCALED_QFI: sweep_rescaled_qfi,
    SweepKind.GAP_VS_N: sweep_gap_vs_n,
    SweepKind.HUSIMI: sweep_husimi,
    SweepKind.T0_SCALING: sweep_t0_scaling,
    SweepKind.FITS: sweep_fits,
    SweepKind.H_SWEEP: sweep_h,
}


# Sweeps that build one dense Hamiltonian per size in n_min..n_max
SIZE_SWEEPS = {
    sweep_dn_qfi_vs_n,
    sweep_varmx_vs_n,
    sweep_rescaled_qfi,
    sweep_gap_vs_n,
    sweep_t0_scaling,
    sweep_h,
}


def run_sweep(kind: str, cfg: RunConfig) -> List[Path]:
    """Run the named sweep and return the files it wrote"""
    try:
        sweep = SWEEPS[SweepKind(kind)]
    except ValueError as e:
        known = ", ".join(k.value for k in SweepKind)
        raise ConfigurationError(f"Unknown sweep '{kind}' (expected one of: {known})") from e
    if sweep in SIZE_SWEEPS:
        cfg.check_size_cap()
    logger.info(f"Running sweep {kind} into {cfg.out}")
    return sweep(cfg)
