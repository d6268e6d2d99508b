"""
Command-line front end.

    python sensornet_cli.py ga --n 4 --seed 3
    python sensornet_cli.py sweep gap-vs-n --h 0.1 --n-min 2 --n-max 10

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import orjson
import pandas as pd
from pydantic import ValidationError

from .config import CouplingScaling, SpinSystemParams
from .errors import ConfigurationError, SensorNetError
from .genetic_topology_optimizer import CrossoverMode, FitnessKind, evolve
from .graph_topology import GraphKind, write_graph
from .ground_state_metrology import Parity, polynomial_fit, power_law_fit
from .ising_hamiltonian import build_tfim
from .logging_setup import configure_logging
from .record_export import export_records, read_series, write_fit, write_provenance, write_table
from .sensitivity_network import TargetKind, TrainConfig, load_model, predict_series, save_model, split_by_parity, train
from .spectral_analysis import energy_gap, spectral_deformation_dn
from .sweep_runner import RunConfig, SweepKind, fit_series, run_sweep, selected_graph
from .thermal_metrology import magnetization_variance, thermal_qfi_sld

logger = logging.getLogger(__name__)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="number of spins")
    common.add_argument("--n-min", type=int, default=1)
    common.add_argument("--n-max", type=int, default=8)
    common.add_argument("--t", type=float, default=0.08, help="temperature")
    common.add_argument("--h", type=float, default=0.05, help="transverse field")
    common.add_argument("--j", type=float, default=-1.0, help="coupling")
    common.add_argument("--scaling", choices=[s.value for s in CouplingScaling], default="bare")
    common.add_argument("--dn-levels", type=int, default=2)
    common.add_argument("--max-spins", type=int, default=None, help="override the dense size cap")
    common.add_argument("--pop", type=int, default=100, help="GA population size")
    common.add_argument("--gens", type=int, default=15, help="GA generations")
    common.add_argument("--mut-prob", type=float, default=0.3)
    common.add_argument("--crossover", choices=[m.value for m in CrossoverMode], default="intersection")
    common.add_argument("--fitness", choices=[f.value for f in FitnessKind], default="dn")
    common.add_argument("--seed", type=int, default=None, help="required by ga, nn-train and the GA sweeps")
    common.add_argument("--kind", choices=[k.value for k in GraphKind], default="complete",
                        help="graph family for single-graph commands")
    common.add_argument("--graph", type=Path, default=None, help="graph JSON file")
    common.add_argument("--temperatures", type=float, nargs="+", default=[0.08, 2.0])
    common.add_argument("--h-values", type=float, nargs="+", default=[0.05, 0.1, 0.5, 1.0])
    common.add_argument("--series", type=Path, default=None, help="CSV with columns N,value")
    common.add_argument("--degree", type=int, default=1)
    common.add_argument("--theta-samples", type=int, default=181)
    common.add_argument("--phi-samples", type=int, default=361)
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="sensornet",
        description="Topology optimization and metrology of graph spin sensors",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("ga", parents=[common], help="evolve the best topology for --n spins")
    commands.add_parser("dn", parents=[common], help="spectral deformation of one graph")
    commands.add_parser("qfi", parents=[common], help="thermal QFI of one graph")
    commands.add_parser("gap", parents=[common], help="energy gap of one graph")
    commands.add_parser("varmx", parents=[common], help="Gibbs Var(M_x) of one graph")
    commands.add_parser("husimi", parents=[common], help="Husimi grid of a ground state")
    commands.add_parser("t0-scaling", parents=[common], help="zero-temperature complete-graph scaling")

    fit = commands.add_parser("fit", parents=[common], help="scaling fit of a series file")
    fit.add_argument("--log-space", action="store_true")
    fit.add_argument("--power-law", action="store_true")
    fit.add_argument("--parity", choices=[p.value for p in Parity], default="all")

    nn_train = commands.add_parser("nn-train", parents=[common], help="train the size-extrapolation network")
    nn_train.add_argument("--parity", choices=[Parity.EVEN.value, Parity.ODD.value], required=True)
    nn_train.add_argument("--target", choices=[t.value for t in TargetKind], default="dn")
    nn_train.add_argument("--epochs", type=int, default=4000)
    nn_train.add_argument("--lr", type=float, default=1e-3)

    nn_predict = commands.add_parser("nn-predict", parents=[common], help="extrapolate with a trained model")
    nn_predict.add_argument("--model", type=Path, required=True)

    sweep = commands.add_parser("sweep", parents=[common], help="run a named sweep")
    sweep.add_argument("sweep_kind", metavar="kind", help=", ".join(k.value for k in SweepKind))
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    """Validate every flag up front; pydantic errors become configuration errors"""
    try:
        physics = SpinSystemParams(
            J=args.j,
            h=args.h,
            T=args.t,
            scaling=args.scaling,
            dn_levels=args.dn_levels,
            max_spins=args.max_spins,
        )
        values = dict(
            physics=physics,
            n=args.n,
            n_min=args.n_min,
            n_max=args.n_max,
            population=args.pop,
            generations=args.gens,
            mutation_prob=args.mut_prob,
            crossover_mode=args.crossover,
            fitness=args.fitness,
            seed=args.seed,
            graph_kind=args.kind,
            graph_file=args.graph,
            temperatures=args.temperatures,
            h_values=args.h_values,
            series_file=args.series,
            fit_degree=args.degree,
            theta_samples=args.theta_samples,
            phi_samples=args.phi_samples,
            fmt=args.format,
        )
        if args.out is not None:
            values["out"] = args.out
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid parameters: {e}") from e


def _emit(result: Dict) -> None:
    sys.stdout.write(orjson.dumps(result, option=orjson.OPT_SORT_KEYS).decode() + "\n")


def _single_row(cfg: RunConfig, command: str, row: Dict) -> List[Path]:
    _emit(row)
    return [write_table(pd.DataFrame([row]), cfg.target(command), command, cfg, cfg.seed, cfg.fmt.value)]


def cmd_ga(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    record = evolve(cfg.ga_config(cfg.n))
    written = export_records([record], cfg.out, "ga", cfg)
    graph_path = cfg.out / f"best_graph_n{cfg.n}_seed{record.seed}.json"
    write_graph(record.graph(), graph_path)
    write_provenance(graph_path, "ga", cfg, record.seed)
    _emit({
        "N": record.n,
        "best_fitness": record.best_fitness,
        "best_dn": record.best_dn,
        "best_qfi": record.best_qfi,
        "first_hit_generation": record.first_hit_generation,
        "edges": [list(e) for e in record.graph().edges],
    })
    return written + [graph_path]


def cmd_dn(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    g = selected_graph(cfg)
    return _single_row(cfg, "dn", {"N": g.n, "edge_count": g.edge_count, "dn": spectral_deformation_dn(g, cfg.physics)})


def cmd_qfi(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    g = selected_graph(cfg)
    qfi = thermal_qfi_sld(g, cfg.physics)
    return _single_row(cfg, "qfi", {
        "N": g.n,
        "T": cfg.physics.T,
        "qfi": qfi.value,
        "classical": qfi.classical,
        "coherent": qfi.coherent,
    })


def cmd_gap(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    g = selected_graph(cfg)
    return _single_row(cfg, "gap", {"N": g.n, "gap": energy_gap(build_tfim(g, cfg.physics))})


def cmd_varmx(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    g = selected_graph(cfg)
    variance = magnetization_variance(g, cfg.physics)
    return _single_row(cfg, "varmx", {
        "N": g.n,
        "var_mx": variance.direct,
        "var_mx_fdt": variance.fdt_estimate,
        "mean_mx": variance.mean_mx,
    })


def cmd_husimi(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    return run_sweep(SweepKind.HUSIMI.value, cfg)


def cmd_t0_scaling(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    return run_sweep(SweepKind.T0_SCALING.value, cfg)


def cmd_fit(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    if cfg.series_file is None:
        raise ConfigurationError("fit needs --series")
    Ns, values = read_series(cfg.series_file)
    if args.power_law:
        fit = power_law_fit(Ns, values, Parity(args.parity))
    elif args.parity != Parity.ALL.value:
        fits = [f for f in fit_series(Ns, values, cfg.fit_degree) if f.parity.value == args.parity]
        if not fits:
            raise ConfigurationError(f"No {args.parity} fit could be formed from {cfg.series_file}")
        fit = fits[0]
    else:
        fit = polynomial_fit(Ns, values, cfg.fit_degree, log_space=args.log_space)
    path = write_fit(fit, cfg.out / "fit.json")
    write_provenance(path, "fit", cfg, cfg.seed)
    _emit(fit.model_dump(mode="json"))
    return [path]


def cmd_nn_train(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    if cfg.series_file is None:
        raise ConfigurationError("nn-train needs --series with columns N,value")
    Ns, values = read_series(cfg.series_file)
    data = split_by_parity(list(zip(Ns, values)), args.parity)
    try:
        train_cfg = TrainConfig(epochs=args.epochs, learning_rate=args.lr, seed=cfg.require_seed("Training runs"))
    except ValidationError as e:
        raise ConfigurationError(f"Invalid training parameters: {e}") from e

    model, history = train(data, train_cfg, args.parity, args.target)
    model_path = cfg.out / f"model_{args.target}_{args.parity}.json"
    model_path.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, model_path)
    write_provenance(model_path, "nn-train", {"run": cfg, "train": train_cfg}, cfg.seed)

    loss_path = write_table(
        pd.DataFrame({"epoch": range(1, len(history) + 1), "mse": history}),
        cfg.target(f"loss_{args.target}_{args.parity}"),
        "nn-train", {"run": cfg, "train": train_cfg}, cfg.seed, cfg.fmt.value,
    )
    _emit({"final_mse": history[-1], "points": len(data), "model": str(model_path)})
    return [model_path, loss_path]


def cmd_nn_predict(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    model = load_model(args.model)
    predictions = predict_series(model, list(cfg.sizes))
    frame = pd.DataFrame(predictions, columns=["N", "prediction"])
    if model.parity is not Parity.ALL:
        wanted = 0 if model.parity is Parity.EVEN else 1
        frame = frame[frame["N"].astype(int) % 2 == wanted].reset_index(drop=True)

    steps = frame["prediction"].diff().dropna()
    trend = "increasing" if (steps > 0).all() else "decreasing" if (steps < 0).all() else "mixed"
    path = write_table(
        frame,
        cfg.target(f"predictions_{model.target.value}_{model.parity.value}"),
        "nn-predict", {"run": cfg, "model": str(args.model)}, model.seed, cfg.fmt.value,
        extra={"trend": trend},
    )
    _emit({"trend": trend, "rows": len(frame)})
    return [path]


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig) -> List[Path]:
    return run_sweep(args.sweep_kind, cfg)


COMMANDS = {
    "ga": cmd_ga,
    "dn": cmd_dn,
    "qfi": cmd_qfi,
    "gap": cmd_gap,
    "varmx": cmd_varmx,
    "husimi": cmd_husimi,
    "t0-scaling": cmd_t0_scaling,
    "fit": cmd_fit,
    "nn-train": cmd_nn_train,
    "nn-predict": cmd_nn_predict,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        configure_logging(args.log_level)
        cfg = run_config_from_args(args)
        written = COMMANDS[args.command](args, cfg)
    except SensorNetError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code

    for path in written:
        logger.info(f"Wrote {path}")
    return 0
