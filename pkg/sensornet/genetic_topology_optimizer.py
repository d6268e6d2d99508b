"""
Genetic algorithm over connected graph topologies.

Individuals are labeled connected graphs on a fixed node count. Each
generation is ranked by fitness (D_n by default) with the canonical edge key
breaking ties, the top half becomes the parent pool, the best individual is
copied unchanged into the next generation, and the remaining slots are
filled with crossover children that then undergo add-only mutation.

Every random draw comes from a generator seeded by (seed, generation, slot),
so results do not depend on the order in which fitness values are computed.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .config import SpinSystemParams, check_size_cap, get_settings
from .errors import ConfigurationError, NumericalFailure
from .graph_topology import (
    Edge,
    Graph,
    add_random_missing_edge,
    canonical_key,
    connect_components,
    enumerate_connected_graphs,
    random_connected_init,
)
from .spectral_analysis import spectral_deformation_dn
from .thermal_metrology import thermal_qfi_sld

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_NODES = 5
FITNESS_TIE_TOLERANCE = 1e-12


class FitnessKind(str, Enum):
    DN = "dn"
    QFI = "qfi"


class CrossoverMode(str, Enum):
    INTERSECTION = "intersection"
    UNION = "union"


class GaConfig(BaseModel):
    """Genetic algorithm settings; defaults follow the headline runs"""
    n: int = Field(default=2, ge=1)
    population: int = Field(default=100, ge=2)
    generations: int = Field(default=15, ge=1)
    mutation_prob: float = Field(default=0.3, ge=0.0, le=1.0)
    crossover_extra_edge_prob: float = Field(default=0.5, ge=0.0, le=1.0)
    crossover_mode: CrossoverMode = CrossoverMode.INTERSECTION
    extra_edge_budget: Optional[int] = Field(default=None, ge=0)
    fitness: FitnessKind = FitnessKind.DN
    physics: SpinSystemParams = SpinSystemParams()
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    workers: Optional[int] = Field(default=None, ge=1)

    @property
    def init_budget(self) -> int:
        return self.n if self.extra_edge_budget is None else self.extra_edge_budget

    @property
    def parent_count(self) -> int:
        return math.ceil(self.population / 2)


class GenerationRecord(BaseModel):
    generation: int
    best_edges: List[Edge]
    best_fitness: float
    mean_fitness: float


class GaRunRecord(BaseModel):
    """Per-generation history and summary of one GA run"""
    config: GaConfig
    seed: int
    history: List[GenerationRecord]
    best_graph: Dict
    best_fitness: float
    best_dn: float
    best_qfi: Optional[float] = None
    first_hit_generation: int

    @model_validator(mode="after")
    def _elitism_holds(self) -> "GaRunRecord":
        best = [record.best_fitness for record in self.history]
        if any(later < earlier for earlier, later in zip(best, best[1:])):
            raise ValueError("best fitness decreased between generations")
        if self.first_hit_generation > self.config.generations:
            raise ValueError("first hit generation exceeds the generation count")
        return self

    @property
    def n(self) -> int:
        return self.config.n

    def graph(self) -> Graph:
        return Graph.from_dict(self.best_graph)


class ExhaustiveResult(BaseModel):
    best_graph: Dict
    best_dn: float
    graphs_enumerated: int

    def graph(self) -> Graph:
        return Graph.from_dict(self.best_graph)


def slot_rng(seed: int, generation: int, slot: int) -> np.random.Generator:
    """Independent stream for one population slot of one generation"""
    return np.random.default_rng([seed, generation, slot])


def crossover(
    parent1: Graph,
    parent2: Graph,
    rng: np.random.Generator,
    extra_edge_prob: float = 0.5,
    mode: CrossoverMode = CrossoverMode.INTERSECTION,
) -> Graph:
    """Child from the parents' common edges, repaired to be connected,
    plus one random new edge with probability extra_edge_prob"""
    if parent1.n != parent2.n:
        raise ConfigurationError(f"Parents differ in size: {parent1.n} vs {parent2.n}")

    first, second = set(parent1.edges), set(parent2.edges)
    common = first & second if CrossoverMode(mode) is CrossoverMode.INTERSECTION else first | second
    child = connect_components(Graph(parent1.n, tuple(common)), rng)

    if rng.random() < extra_edge_prob:
        child = add_random_missing_edge(child, rng)
    return child


def mutate(g: Graph, mutation_prob: float, rng: np.random.Generator) -> Graph:
    """Add one random missing edge with probability mutation_prob"""
    if rng.random() < mutation_prob:
        return add_random_missing_edge(g, rng)
    return g


def evaluate_fitness(g: Graph, physics: SpinSystemParams, kind: FitnessKind = FitnessKind.DN) -> float:
    if FitnessKind(kind) is FitnessKind.QFI:
        return thermal_qfi_sld(g, physics).value
    return spectral_deformation_dn(g, physics)


def _fitness_job(job: Tuple[Graph, SpinSystemParams, FitnessKind]) -> float:
    return evaluate_fitness(*job)


class GeneticTopologyOptimizer:
    """Runs one GA according to a GaConfig"""

    def __init__(self, config: GaConfig):
        self.config = config
        self.cache: Dict[Tuple[Edge, ...], float] = {}
        self.workers = config.workers or get_settings().workers
        check_size_cap(config.n, config.physics.size_cap())

    def initial_population(self) -> List[Graph]:
        cfg = self.config
        return [
            random_connected_init(cfg.n, cfg.init_budget, slot_rng(cfg.seed, 0, slot))
            for slot in range(cfg.population)
        ]

    def evaluate(self, population: List[Graph]) -> List[float]:
        """Fitness of every individual; each distinct graph is computed once"""
        pending = sorted({g.edges: g for g in population if g.edges not in self.cache}.items())
        if pending:
            jobs = [(g, self.config.physics, self.config.fitness) for _, g in pending]
            if self.workers > 1 and len(jobs) > 1:
                with ProcessPoolExecutor(max_workers=self.workers) as pool:
                    values = list(pool.map(_fitness_job, jobs, chunksize=max(1, len(jobs) // (4 * self.workers))))
            else:
                values = [_fitness_job(job) for job in jobs]
            for (key, _), value in zip(pending, values):
                if not np.isfinite(value):
                    raise NumericalFailure(f"Non-finite fitness for edges {list(key)}")
                self.cache[key] = float(value)
        return [self.cache[g.edges] for g in population]

    def rank(self, population: List[Graph], fitness: List[float]) -> List[int]:
        return sorted(range(len(population)), key=lambda i: (-fitness[i], canonical_key(population[i])))

    def breed(self, parents: List[Graph], generation: int) -> List[Graph]:
        """Elite first, then crossover-and-mutate children for the other slots"""
        cfg = self.config
        offspring = [parents[0]]
        for slot in range(1, cfg.population):
            rng = slot_rng(cfg.seed, generation, slot)
            first = int(rng.integers(len(parents)))
            if len(parents) > 1:
                second = int(rng.integers(len(parents) - 1))
                if second >= first:
                    second += 1
            else:
                second = first
            child = crossover(
                parents[first], parents[second], rng,
                extra_edge_prob=cfg.crossover_extra_edge_prob,
                mode=cfg.crossover_mode,
            )
            offspring.append(mutate(child, cfg.mutation_prob, rng))
        return offspring

    def run(self) -> GaRunRecord:
        cfg = self.config
        logger.info(
            f"Evolving n={cfg.n} topologies: population {cfg.population}, "
            f"{cfg.generations} generations, fitness {cfg.fitness.value}, seed {cfg.seed}"
        )

        population = self.initial_population()
        history: List[GenerationRecord] = []
        best_graph: Optional[Graph] = None

        for generation in range(cfg.generations):
            fitness = self.evaluate(population)
            order = self.rank(population, fitness)
            best_graph = population[order[0]]

            history.append(GenerationRecord(
                generation=generation,
                best_edges=canonical_key(best_graph),
                best_fitness=fitness[order[0]],
                mean_fitness=float(np.mean(fitness)),
            ))
            logger.info(
                f"Generation {generation}: best {cfg.fitness.value}={fitness[order[0]]:.8g}, "
                f"mean={history[-1].mean_fitness:.6g}, edges={best_graph.edge_count}"
            )

            if generation + 1 < cfg.generations:
                parents = [population[i] for i in order[:cfg.parent_count]]
                population = self.breed(parents, generation + 1)

        best_fitness = history[-1].best_fitness
        first_hit = next(
            record.generation for record in history
            if record.best_fitness >= best_fitness - FITNESS_TIE_TOLERANCE
        )

        best_dn = (
            best_fitness if cfg.fitness is FitnessKind.DN
            else spectral_deformation_dn(best_graph, cfg.physics)
        )
        best_qfi = None
        if cfg.physics.T > 0:
            best_qfi = (
                best_fitness if cfg.fitness is FitnessKind.QFI
                else thermal_qfi_sld(best_graph, cfg.physics).value
            )

        logger.info(f"Best graph for n={cfg.n}: {best_graph} (first hit at generation {first_hit})")

        return GaRunRecord(
            config=cfg,
            seed=cfg.seed,
            history=history,
            best_graph=best_graph.to_dict(),
            best_fitness=best_fitness,
            best_dn=best_dn,
            best_qfi=best_qfi,
            first_hit_generation=first_hit,
        )


def evolve(config: GaConfig) -> GaRunRecord:
    """Run the genetic algorithm described by config"""
    return GeneticTopologyOptimizer(config).run()


def exhaustive_best(n: int, p: SpinSystemParams) -> ExhaustiveResult:
    """Maximum-D_n graph over every labeled connected graph on n <= 5 nodes"""
    if n < 1:
        raise ConfigurationError(f"Graph size must be at least 1, got {n}")
    if n > EXHAUSTIVE_MAX_NODES:
        raise ConfigurationError(
            f"Exhaustive enumeration is limited to n <= {EXHAUSTIVE_MAX_NODES}, got {n}"
        )

    scored = [(spectral_deformation_dn(g, p), g) for g in enumerate_connected_graphs(n)]
    best_dn, best = min(scored, key=lambda item: (-item[0], canonical_key(item[1])))
    logger.info(f"Exhaustive search over {len(scored)} connected graphs on {n} nodes: D_n={best_dn:.10g}")

    return ExhaustiveResult(best_graph=best.to_dict(), best_dn=best_dn, graphs_enumerated=len(scored))
