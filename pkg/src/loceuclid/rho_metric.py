"""Certified brackets for the chain metric rho_t on R^3.

rho_t(P, Q) is the infimum of the d_t cost over chains from P to Q whose
steps are at most 2 long. It only depends on D = |PQ|, and a chain's cost
only depends on its step lengths, so the infimum runs over realizable step
profiles (see ``chains``).

The evaluator splits a profile into *long* steps (longer than c_star, on
the antipodal branch) and *short* steps, whose cost equals their length. The
short steps are pooled into one continuous length ``sigma`` handled in
closed form, and the long steps are restricted to a grid and searched by an
unbounded-knapsack DP over their total length.

Lower bound. On the long branch the cost 2t + sqrt(4 - c^2) has slope
<= -1 (because c_star >= sqrt 2). Rounding each long step of any chain up to
the grid therefore lowers its cost by at least the added length, while the
extra short length the closing polygon may then need is at most that
amount. So every chain is dominated by a grid configuration, and the DP
minimum is a lower bound on rho_t itself, not only on the grid family.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .chains import StepProfile, realizable
from .errors import BudgetError
from .geometry import d_E
from .sphere_metric import Param, chord_cost

DEFAULT_GRID = 1.0 / 32.0
DEFAULT_BUDGET = 50_000_000
# relative floating-point guard subtracted from DP minima used as lower bounds
FP_GUARD = 1e-14


@dataclass(frozen=True)
class IntervalEstimate:
    """Certified bracket lo <= rho_t <= hi at separation D."""

    lo: float
    hi: float
    D: float
    t: float
    witness: StepProfile | None = None
    converged: bool = True
    grid: float | None = None
    source: str = ""
    n_used: int = field(default=0)

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= value <= self.hi + slack


def _profile_key(param: Param, prof: StepProfile):
    # cost, then fewer steps, then lexicographically smaller lengths
    return (prof.cost(param), len(prof), prof.lengths)


def euclidean_pieces(length: float, c_star: float) -> list[float]:
    """Split ``length`` into the fewest equal pieces no longer than c_star."""
    if length <= 0.0:
        return []
    k = max(1, math.ceil(length / c_star))
    while length / k > c_star:
        k += 1
    return [length / k] * k


def subdivision_upper_bound(param: Param, D: float):
    """Cost D from m+1 equal pieces, where m <= D < m+1; returns (cost, profile)."""
    if D < 0:
        raise ValueError(f"D must be >= 0, got {D}")
    m = math.floor(D)
    prof = StepProfile((D / (m + 1),) * (m + 1), D)
    return prof.cost(param), prof


def shortcut_upper_bound(param: Param, D: float):
    """Best of the chains made of k full steps of length 2 plus a closure.

    For 2k <= D the gap D - 2k is covered by one step (if <= 2) or by short
    steps, whichever is cheaper. For 2k > D the full steps overshoot and,
    when the polygon does not close on its own, a short step folds back.
    Returns (cost, profile).
    """
    if D < 0:
        raise ValueError(f"D must be >= 0, got {D}")
    if D == 0:
        prof = StepProfile((0.0,), 0.0)
        return 0.0, prof
    candidates = []
    for k in range(0, math.ceil(D / 2.0) + 2):
        full = [2.0] * k
        if 2 * k <= D:
            r = D - 2.0 * k
            options = [full + euclidean_pieces(r, param.c_star)] if r > 0 else [full]
            if 0 < r <= 2.0:
                options.append(full + [r])
        else:
            back = max(0.0, 4.0 - D - 2.0 * k)
            options = [full + euclidean_pieces(back, param.c_star)]
        for lengths in options:
            if not lengths:
                continue
            prof = StepProfile(tuple(lengths), D)
            if realizable(prof):
                candidates.append(prof)
    best = min(candidates, key=lambda prof: _profile_key(param, prof))
    return best.cost(param), best


def _unbounded_add(W, last, weight, cost, tag):
    """In-place unbounded-knapsack update of W with one item type.

    W[s] <- min_k W[s - k*weight] + k*cost, done per residue class with a
    running minimum; ``last`` records ``tag`` wherever W improved.
    """
    size = len(W)
    rows = -(-size // weight)
    X = np.full(rows * weight, np.inf)
    X[:size] = W
    X = X.reshape(rows, weight)
    m = np.arange(rows, dtype=float)[:, None] * cost
    new = (np.minimum.accumulate(X - m, axis=0) + m).ravel()[:size]
    improved = new < W
    W[improved] = new[improved]
    last[improved] = tag


def _grid_dp(param: Param, D: float, h: float, budget: int):
    """Minimize over grid configurations; returns (value, profile)."""
    N = round(2.0 / h)
    h = 2.0 / N
    j_first = math.floor(param.c_star / h) + 1
    items = range(j_first, N + 1)
    size = math.ceil((D + 4.0) / h) + 1
    if len(items) * size > budget:
        raise BudgetError(f"DP needs {len(items) * size} cells, budget is {budget}")

    # no long steps: short steps of total length D
    best_val = D
    best = None
    W = np.full(size, np.inf)
    W[0] = 0.0
    last = np.full(size, -1, dtype=np.int64)
    others = np.arange(size) * h
    for j in items:
        b = j * h
        fb = float(chord_cost(param, b))
        _unbounded_add(W, last, j, fb, j)
        sigma = np.maximum(0.0, np.maximum(D - b - others, b - D - others))
        vals = fb + W + sigma
        s = int(np.argmin(vals))
        if vals[s] < best_val:
            best_val = float(vals[s])
            best = (j, s, last.copy(), float(sigma[s]))

    if best is None:
        if D <= param.c_star:
            lengths = (D,)
        else:
            lengths = tuple(euclidean_pieces(D, param.c_star))
        return best_val, StepProfile(lengths, D)

    j, s, trace, sigma = best
    long_steps = [j * h]
    while s > 0:
        item = int(trace[s])
        long_steps.append(item * h)
        s -= item
    if sigma < FP_GUARD * (1.0 + D):
        sigma = 0.0
    lengths = sorted(long_steps, reverse=True) + euclidean_pieces(sigma, param.c_star)
    return best_val, StepProfile(tuple(lengths), D)


_memo: dict = {}
_memo_lock = threading.Lock()


def rho_profile_dp(
    param: Param,
    D: float,
    grid: float = DEFAULT_GRID,
    n_cap: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> IntervalEstimate:
    """Bracket rho_t at separation D.

    ``hi`` is the cheapest of the subdivision chain, the full-step shortcut
    chains and the DP witness; all are realizable profiles, so ``hi`` is a
    genuine chain cost. ``lo`` is the larger of t*D and the DP minimum (see
    the module docstring for why the latter bounds rho_t from below).
    ``n_cap`` bounds the number of steps a witness may use; it must be at
    least ceil(D/2) + 2, which also keeps the DP's length range large enough.
    """
    if D < 0 or not math.isfinite(D):
        raise ValueError(f"D must be finite and >= 0, got {D}")
    if grid <= 0 or grid > 2:
        raise ValueError(f"grid resolution must lie in (0, 2], got {grid}")
    need = math.ceil(D / 2.0) + 2
    if n_cap is None:
        n_cap = math.ceil(D / 2.0) + 4
    if n_cap < need:
        raise ValueError(f"n_cap={n_cap} is below ceil(D/2) + 2 = {need}")

    key = (param.t, D, grid, n_cap)
    cached = _memo.get(key)
    if cached is not None:
        return cached

    if D == 0.0:
        est = IntervalEstimate(0.0, 0.0, 0.0, param.t, None, True, grid, "zero", 0)
    else:
        dp_val, dp_prof = _grid_dp(param, D, grid, budget)
        candidates = [
            ("subdivision", subdivision_upper_bound(param, D)[1]),
            ("shortcut", shortcut_upper_bound(param, D)[1]),
        ]
        if realizable(dp_prof) and len(dp_prof) <= n_cap:
            candidates.append(("dp", dp_prof))
        candidates = [(name, prof) for name, prof in candidates if len(prof) <= n_cap]
        source, witness = min(candidates, key=lambda c: _profile_key(param, c[1]))
        hi = witness.cost(param)
        lo = max(param.t * D, dp_val - FP_GUARD * (1.0 + D))
        if lo > hi:
            # only rounding can put the certified bound above a chain cost
            assert lo - hi <= 2 * FP_GUARD * (1.0 + D), (lo, hi)
            lo = hi
        est = IntervalEstimate(lo, hi, D, param.t, witness, True, grid, source, len(witness))

    with _memo_lock:
        _memo.setdefault(key, est)
    return est


def rho_at(
    param: Param,
    D: float,
    tol: float = 1e-9,
    grid: float = DEFAULT_GRID,
    n_cap: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> IntervalEstimate:
    """Bracket rho_t at separation D, halving the grid until hi - lo <= tol.

    If the budget runs out first, the best bracket found is returned with
    ``converged=False``; when not even the first grid fits, that bracket is
    [t*D, cheapest closed-form chain].
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    est = None
    h = grid
    while True:
        try:
            est = rho_profile_dp(param, D, h, n_cap, budget)
        except BudgetError:
            if est is None:
                est = _closed_form_bracket(param, D, grid)
            return _unconverged(est)
        if est.width <= tol:
            return est
        h /= 2.0


def rho(param: Param, p, q, tol: float = 1e-9, **kwargs) -> IntervalEstimate:
    """Bracket rho_t(p, q); only D = |pq| enters (see ``rho_at``)."""
    return rho_at(param, d_E(p, q), tol, **kwargs)


def _closed_form_bracket(param: Param, D: float, grid: float) -> IntervalEstimate:
    source, witness = min(
        [
            ("subdivision", subdivision_upper_bound(param, D)[1]),
            ("shortcut", shortcut_upper_bound(param, D)[1]),
        ],
        key=lambda c: _profile_key(param, c[1]),
    )
    hi = witness.cost(param)
    return IntervalEstimate(min(param.t * D, hi), hi, D, param.t, witness, False, grid, source, len(witness))


def _unconverged(est: IntervalEstimate) -> IntervalEstimate:
    return IntervalEstimate(
        est.lo, est.hi, est.D, est.t, est.witness, False, est.grid, est.source, est.n_used
    )


def clear_cache():
    with _memo_lock:
        _memo.clear()
