"""Random search over literal 3-D chains, used as an independent check on
the profile DP. Chains are not restricted to a plane."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import Chain, chain_cost
from .geometry import STEP_SLACK
from .sphere_metric import Param, chord_cost


@dataclass(frozen=True)
class SearchResult:
    cost: float
    chain: Chain | None
    evaluated: int


def _batch_costs(param: Param, steps: np.ndarray) -> np.ndarray:
    """Cost of each chain in a (batch, n, 3) stack of step vectors; inf if invalid."""
    lengths = np.linalg.norm(steps, axis=-1)
    valid = np.all(lengths <= 2.0 + STEP_SLACK, axis=-1)
    lengths = np.where(lengths >= 2.0 - STEP_SLACK, 2.0, lengths)
    costs = np.sum(chord_cost(param, np.minimum(lengths, 2.0)), axis=-1)
    return np.where(valid, costs, np.inf)


def _sample_steps(rng, n: int, count: int, p, q) -> np.ndarray:
    """Random chains of n steps from p to q, as (count, n, 3) step vectors.

    Each free step aims at q with per-chain angular noise drawn on a log
    scale and has length exactly 2 with probability 0.4, otherwise uniform
    in [0, 2]. The last step closes the chain and may be too long.
    """
    noise = 10.0 ** rng.uniform(-6, 0, size=(count, 1))
    pos = np.broadcast_to(p, (count, 3)).copy()
    steps = np.empty((count, n, 3))
    for i in range(n - 1):
        aim = q - pos
        dist = np.linalg.norm(aim, axis=1, keepdims=True)
        aim = np.where(dist > 1e-12, aim / np.maximum(dist, 1e-300), 0.0)
        direction = aim + noise * rng.standard_normal((count, 3))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        length = np.where(rng.random((count, 1)) < 0.4, 2.0, rng.uniform(0, 2, (count, 1)))
        steps[:, i] = length * direction
        pos += steps[:, i]
    steps[:, n - 1] = q - pos
    return steps


def _refine(param, steps, rng, iters):
    """Greedy local perturbation of the free steps, keeping the endpoints."""
    n = len(steps)
    best = steps.copy()
    best_cost = _batch_costs(param, best[None])[0]
    if n == 1:
        return best, best_cost
    scale = 0.1
    total = best.sum(axis=0)
    for _ in range(iters):
        trial = best.copy()
        idx = rng.integers(0, n - 1)
        trial[idx] += scale * rng.standard_normal(3)
        norm = np.linalg.norm(trial[idx])
        if norm > 2.0 or rng.random() < 0.2:
            trial[idx] *= 2.0 / max(norm, 1e-300)
        trial[n - 1] = total - trial[: n - 1].sum(axis=0)
        cost = _batch_costs(param, trial[None])[0]
        if cost < best_cost:
            best, best_cost = trial, cost
            scale = min(scale * 1.5, 1.0)
        else:
            scale = max(scale * 0.97, 1e-9)
    return best, best_cost


def monte_carlo_chain_search(
    param: Param,
    D: float,
    samples: int = 100_000,
    seed=0,
    refine: int = 8,
    refine_iters: int = 1500,
    p=None,
    q=None,
) -> SearchResult:
    """Best chain cost found by sampling random chains from p to q.

    ``samples`` chains are spread over step counts from max(1, ceil(D/2)) to
    ceil(D/2) + 3; the ``refine`` cheapest are then improved by local
    perturbation. p defaults to the origin and q to (D, 0, 0).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    p = np.zeros(3) if p is None else np.asarray(p, dtype=float)
    q = np.array([D, 0.0, 0.0]) if q is None else np.asarray(q, dtype=float)
    counts = list(range(max(1, math.ceil(D / 2)), math.ceil(D / 2) + 4))
    share = np.full(len(counts), samples // len(counts))
    share[: samples % len(counts)] += 1

    pool = []
    for n, count in zip(counts, share):
        if count == 0:
            continue
        for start in range(0, count, 8192):
            size = min(8192, count - start)
            steps = _sample_steps(rng, n, size, p, q)
            costs = _batch_costs(param, steps)
            order = np.argsort(costs, kind="stable")[:refine]
            pool.extend((float(costs[i]), n, steps[i]) for i in order if np.isfinite(costs[i]))
    if not pool:
        return SearchResult(math.inf, None, samples)

    pool.sort(key=lambda item: (item[0], item[1]))
    best_cost, best_steps = math.inf, None
    for _, _, steps in pool[:refine]:
        steps, cost = _refine(param, steps, rng, refine_iters)
        if cost < best_cost:
            best_cost, best_steps = cost, steps

    points = np.vstack([p, p + np.cumsum(best_steps, axis=0)])
    points[-1] = q
    chain = Chain(points)
    return SearchResult(chain_cost(param, chain), chain, samples)
