"""Global-best particle swarm search over integer structural indices."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from karma.core import ParameterError, StructuralIndices

logger = logging.getLogger(__name__)

DEFAULT_BOUNDS = ((0, 3), (0, 6), (0, 4), (0, 6))  # p, na, nb, nc


@dataclass(frozen=True)
class SearchConfig:
    bounds: tuple[tuple[int, int], ...] = DEFAULT_BOUNDS
    swarm_size: int = 16
    iterations: int = 30
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    seed: int = 0
    initial_positions: np.ndarray | None = None
    initial_velocities: np.ndarray | None = None

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ParameterError("swarm_size must be >= 2")
        if not self.bounds:
            raise ParameterError("bounds must be non-empty")
        for lo, hi in self.bounds:
            if lo > hi:
                raise ParameterError(f"empty bound ({lo}, {hi})")
        if self.iterations < 0:
            raise ParameterError("iterations must be >= 0")


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_score: float = -math.inf


@dataclass
class SearchResult:
    best: tuple[int, ...] | None
    best_score: float
    history: list[float]
    evaluations: dict[tuple[int, ...], float] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.best is not None

    @property
    def indices(self) -> StructuralIndices:
        if self.best is None or len(self.best) != 4:
            raise ParameterError("no 4-component solution to convert")
        return StructuralIndices(*self.best)


def pso_search(evaluate: Callable[[tuple[int, ...]], float], config: SearchConfig | None = None) -> SearchResult:
    """Maximize ``evaluate`` over the integer box ``config.bounds``.

    Positions stay continuous; they are rounded and clamped only to pick the
    tuple that gets evaluated. Scores are cached per tuple and an exception
    raised by ``evaluate`` scores the tuple -inf.
    """
    config = config or SearchConfig()
    rng = np.random.default_rng(config.seed)
    lo = np.array([b[0] for b in config.bounds], dtype=float)
    hi = np.array([b[1] for b in config.bounds], dtype=float)
    dim = lo.size
    vmax = np.maximum(hi - lo, 1.0)
    cache: dict[tuple[int, ...], float] = {}

    def score(pos: np.ndarray) -> tuple[tuple[int, ...], float]:
        key = tuple(int(v) for v in np.clip(np.rint(pos), lo, hi))
        if key not in cache:
            try:
                value = float(evaluate(key))
                if math.isnan(value):
                    value = -math.inf
            except Exception as exc:  # infeasible structure
                logger.debug("evaluation of %s failed: %s", key, exc)
                value = -math.inf
            cache[key] = value
        return key, cache[key]

    if config.initial_positions is not None:
        pos = np.array(config.initial_positions, dtype=float).reshape(config.swarm_size, dim)
    else:
        pos = rng.uniform(lo - 0.5, hi + 0.5, size=(config.swarm_size, dim))
    pos = np.clip(pos, lo, hi)
    if config.initial_velocities is not None:
        vel = np.array(config.initial_velocities, dtype=float).reshape(config.swarm_size, dim)
    else:
        vel = rng.uniform(-vmax, vmax, size=(config.swarm_size, dim)) * 0.5

    swarm = [Particle(pos[i].copy(), vel[i].copy(), pos[i].copy()) for i in range(config.swarm_size)]
    best_pos: np.ndarray | None = None
    best_key: tuple[int, ...] | None = None
    best_score = -math.inf
    for p in swarm:
        key, s = score(p.position)
        p.best_score = s
        if s > best_score:
            best_score, best_key, best_pos = s, key, p.position.copy()
    history = [best_score]

    for _ in range(config.iterations):
        g = best_pos if best_pos is not None else swarm[0].position
        for p in swarm:
            r1 = rng.random(dim)
            r2 = rng.random(dim)
            p.velocity = (
                config.inertia * p.velocity
                + config.cognitive * r1 * (p.best_position - p.position)
                + config.social * r2 * (g - p.position)
            )
            p.velocity = np.clip(p.velocity, -vmax, vmax)
            p.position = np.clip(p.position + p.velocity, lo, hi)
        # evaluation after the whole swarm moved (synchronous update)
        for p in swarm:
            key, s = score(p.position)
            if s > p.best_score:
                p.best_score = s
                p.best_position = p.position.copy()
            if s > best_score:
                best_score, best_key, best_pos = s, key, p.position.copy()
        history.append(best_score)
    return SearchResult(best_key, best_score, history, dict(cache))

