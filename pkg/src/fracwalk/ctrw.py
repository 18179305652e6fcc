"""Monte Carlo engine for the rescaled compound renewal walk, plus the exact
lattice evolution of the renewal integral equation for the fully discrete law
pair.

Randomness is counter-based: the uniform feeding (wait | jump) number k of
walker w under master seed s is draw number w from a Philox stream keyed by
(s, 2k + channel).  Any walker, any step, any channel is addressable in O(1),
so ensembles are bitwise reproducible for every chunking, thread count, and
execution order, and a single walker can be regenerated in isolation.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .asymptotics import ScalingPair
from .laws import (
    JumpLaw,
    WaitingLaw,
    discrete_wait_pmf,
    lattice_jump_pmf,
    sample_jump_many,
    sample_wait_many,
)

__all__ = [
    "WalkConfig",
    "Trajectory",
    "LatticeEvolution",
    "simulate_walk",
    "position_at",
    "ensemble_positions",
    "ensemble_at_times",
    "evolve_lattice",
    "trajectory_csv",
]

_WAIT, _JUMP = 0, 1
# numpy uniforms live on [0, 1); half an ulp shifts them into (0, 1) so the
# inverse-CDF maps stay finite.
_OPEN_SHIFT = 2.0**-54
# hard stop against pathological configurations (t_max >> tau)
_MAX_STEPS = 1 << 22


@dataclass(frozen=True)
class WalkConfig:
    """Rescaled-walk specification: laws, scales, horizon, size, seed."""

    jump: JumpLaw
    wait: WaitingLaw
    scale: ScalingPair
    t_max: float
    n_walkers: int
    seed: int

    def __post_init__(self):
        if not self.t_max > 0.0:
            raise ValueError(f"horizon t_max must be positive, got {self.t_max}")
        if self.n_walkers < 1:
            raise ValueError(f"need at least one walker, got {self.n_walkers}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit an unsigned 64-bit integer")


@dataclass
class Trajectory:
    """Piecewise-constant sample path: position S_n on [t_n, t_n+1)."""

    jump_times: np.ndarray
    positions: np.ndarray
    t_max: float

    def __post_init__(self):
        self.jump_times = np.asarray(self.jump_times, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        if self.jump_times.shape != self.positions.shape:
            raise ValueError("jump_times and positions must align")
        if self.jump_times.size and (
            self.jump_times[0] <= 0.0 or np.any(np.diff(self.jump_times) <= 0.0)
        ):
            raise ValueError("jump times must be strictly increasing and positive")


def _stream_key(seed: int, step: int, channel: int) -> list[int]:
    return [int(seed), (int(step) << 1) | channel]


def _uniform_row(seed: int, step: int, channel: int, start: int, stop: int) -> np.ndarray:
    """Uniform draws for walkers [start, stop) at one (step, channel)."""
    bg = Philox(key=_stream_key(seed, step, channel))
    bg.advance(start // 4)  # Philox blocks hold 4 doubles
    skip = start % 4
    row = Generator(bg).random(stop - start + skip)[skip:]
    return row + _OPEN_SHIFT


def _uniform_one(seed: int, step: int, channel: int, walker_id: int) -> float:
    bg = Philox(key=_stream_key(seed, step, channel))
    bg.advance(walker_id // 4)
    return float(Generator(bg).random(walker_id % 4 + 1)[-1]) + _OPEN_SHIFT


def simulate_walk(config: WalkConfig, walker_id: int) -> Trajectory:
    """Sample path of one walker; jumps at t_n <= t_max are included."""
    if not 0 <= walker_id < config.n_walkers:
        raise ValueError(f"walker_id {walker_id} outside [0, {config.n_walkers})")
    h, tau = config.scale.h, config.scale.tau
    times, positions = [], []
    t, x = 0.0, 0.0
    for k in range(_MAX_STEPS):
        u_wait = _uniform_one(config.seed, k, _WAIT, walker_id)
        t = t + tau * float(sample_wait_many(config.wait, np.array([u_wait]))[0])
        if t > config.t_max:
            return Trajectory(np.array(times), np.array(positions), config.t_max)
        u_jump = _uniform_one(config.seed, k, _JUMP, walker_id)
        x = x + h * float(sample_jump_many(config.jump, np.array([u_jump]))[0])
        times.append(t)
        positions.append(x)
    raise RuntimeError(f"walker exceeded {_MAX_STEPS} steps before t_max")


def position_at(traj: Trajectory, t: float) -> float:
    """Position S_n for the unique n with t_n <= t < t_(n+1); S_0 = 0."""
    if not 0.0 <= t <= traj.t_max:
        raise ValueError(f"time {t} outside the trajectory horizon [0, {traj.t_max}]")
    n = int(np.searchsorted(traj.jump_times, t, side="right"))
    return float(traj.positions[n - 1]) if n else 0.0


def _walk_chunk(config: WalkConfig, times: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Positions at the sorted observation times for walkers [start, stop)."""
    h, tau = config.scale.h, config.scale.tau
    n = stop - start
    m = len(times)
    t = np.zeros(n)
    x = np.zeros(n)
    out = np.zeros((n, m))
    done = np.zeros((n, m), dtype=bool)
    alive = np.arange(n)
    for k in range(_MAX_STEPS):
        u_wait = _uniform_row(config.seed, k, _WAIT, start, stop)
        t_next = t[alive] + tau * sample_wait_many(config.wait, u_wait[alive])
        # observation times strictly below the next jump freeze at current x
        for j in range(m):
            col = done[alive, j]
            need = ~col & (t_next > times[j])
            if np.any(need):
                idx = alive[need]
                out[idx, j] = x[idx]
                done[idx, j] = True
        still = ~done[alive, -1]
        if not np.any(still):
            return out
        u_jump = _uniform_row(config.seed, k, _JUMP, start, stop)
        move = alive[still]
        t[move] = t_next[still]
        x[move] += h * sample_jump_many(config.jump, u_jump[move])
        alive = move
    raise RuntimeError(f"ensemble exceeded {_MAX_STEPS} steps before the horizon")


def ensemble_at_times(
    config: WalkConfig, times, threads: int = 1
) -> np.ndarray:
    """Positions of all walkers at each observation time, shape (n, len(times)).

    Bitwise identical for any thread count: every variate is addressed by
    (seed, step, channel, walker) independent of the chunking.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0.0) or np.any(times > config.t_max):
        raise ValueError("observation times must lie in [0, t_max]")
    order = np.argsort(times, kind="stable")
    sorted_times = times[order]
    n = config.n_walkers
    if threads <= 1:
        sorted_out = _walk_chunk(config, sorted_times, 0, n)
    else:
        chunk = max(1, math.ceil(n / threads))
        spans = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda sp: _walk_chunk(config, sorted_times, *sp), spans)
            )
        sorted_out = np.vstack(parts)
    out = np.empty_like(sorted_out)
    out[:, order] = sorted_out
    return out


def ensemble_positions(config: WalkConfig, t: float, threads: int = 1) -> np.ndarray:
    """Positions of all walkers at a single observation time."""
    return ensemble_at_times(config, [t], threads=threads)[:, 0]


# ---------------------------------------------------------------------------
# Exact lattice evolution


@dataclass
class LatticeEvolution:
    """Site probabilities p(x, t) on |x| <= support for t = 0..T.

    ``leakage[t]`` is the mass that has crossed the truncation boundary by
    time t (absorbed, never renormalized); probabilities + leakage sum to 1.
    """

    alpha: float
    beta: float
    support: int
    probabilities: np.ndarray  # shape (T+1, 2*support+1)
    leakage: np.ndarray  # shape (T+1,)
    warning: str | None = None

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.support, self.support + 1)

    def pmf(self, t: int) -> np.ndarray:
        return self.probabilities[t]


def evolve_lattice(alpha: float, beta: float, K: int, T: int) -> LatticeEvolution:
    """Exact renewal recursion for the integer-law pair on |x| <= K, t <= T.

    p(x,t) = delta_x0 (1 - Phi(t)) + sum_{m=1..t} c_m sum_k p_k p(x-k, t-m),
    with the jump kernel carried on |k| <= 2K so every in-grid target receives
    its full convolution mass; anything landing outside is absorbed into the
    leakage account.
    """
    if K < 1 or T < 1:
        raise ValueError("need K >= 1 lattice sites and T >= 1 steps")
    if not 0.0 < alpha < 2.0 or not 0.0 < beta < 1.0:
        raise ValueError("lattice evolution requires 0 < alpha < 2 and 0 < beta < 1")
    width = 2 * K + 1
    kernel_k = np.arange(-2 * K, 2 * K + 1)
    kernel = np.array([lattice_jump_pmf(alpha, int(k)) for k in kernel_k])
    waits = np.array([discrete_wait_pmf(beta, m) for m in range(1, T + 1)])
    wait_cdf = np.concatenate([[0.0], np.cumsum(waits)])  # Phi(0..T)

    probs = np.zeros((T + 1, width))
    leak = np.zeros(T + 1)
    probs[0, K] = 1.0
    for t in range(1, T + 1):
        acc = np.zeros(width)
        acc[K] = 1.0 - wait_cdf[t]
        leaked = 0.0
        for m in range(1, t + 1):
            prev = probs[t - m]
            full = np.convolve(prev, kernel)  # support 6K+1, centre index 3K
            crop = full[2 * K : 2 * K + width]
            spill = float(np.sum(prev)) - float(np.sum(crop))
            acc += waits[m - 1] * crop
            leaked += waits[m - 1] * (leak[t - m] + spill)
        probs[t] = acc
        leak[t] = leaked
    warning = None
    if leak[-1] > 1e-6:
        warning = (
            f"leakage {leak[-1]:.3e} beyond the |x| <= {K} grid exceeds 1e-6; "
            "enlarge the support for tail-sensitive comparisons"
        )
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    return LatticeEvolution(
        alpha=alpha, beta=beta, support=K, probabilities=probs, leakage=leak,
        warning=warning,
    )


def trajectory_csv(traj: Trajectory):
    """Rows (t, x) of the sojourn staircase, duplicating times at jumps."""
    yield "t,x"
    yield "0.0,0.0"
    x_prev = 0.0
    for t, x in zip(traj.jump_times.tolist(), traj.positions.tolist()):
        yield f"{t!r},{x_prev!r}"
        yield f"{t!r},{x!r}"
        x_prev = x
    yield f"{float(traj.t_max)!r},{x_prev!r}"
