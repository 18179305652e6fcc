"""Jump and waiting-time probability laws with invertible CDFs and tail constants.

Jump laws (symmetric):
  * ``cpow``  -- continuous power law, W(x) = 1/2 + sign(x)/2 * |x|^a/(1+|x|^a);
  * ``gauss`` -- standard normal, the finite-variance border case (a = 2);
  * ``lpow``  -- integer lattice law p_0 = 0, p_k = b |k|^-(a+1).

Waiting laws (non-negative):
  * ``cpow``  -- continuous power law, Phi(t) = 1 - 1/(1 + Gamma(1-b) t^b);
  * ``exp``   -- unit exponential, the finite-mean border case (b = 1);
  * ``dpow``  -- integer law c_n = c n^-(b+1), n >= 1.

All samplers are deterministic maps from a caller-supplied uniform variate,
so the walk engine owns every source of randomness.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .specfun import gamma, riemann_zeta

__all__ = [
    "JumpLaw",
    "WaitingLaw",
    "TailConstants",
    "continuous_power_jump",
    "gaussian_jump",
    "lattice_power_jump",
    "continuous_power_wait",
    "exponential_wait",
    "discrete_power_wait",
    "parse_jump_law",
    "parse_waiting_law",
    "jump_cdf",
    "waiting_cdf",
    "sample_jump",
    "sample_wait",
    "lattice_jump_pmf",
    "discrete_wait_pmf",
    "tail_constants",
]

# Inverse-PMF tables for the integer laws extend this far; beyond, sampling
# falls back to an analytic Pareto tail anchored at the table edge, so extreme
# uniforms still produce the right tail exponent.
_TABLE_SIZE = 1_000_000


@dataclass(frozen=True)
class JumpLaw:
    """Symmetric jump-size law; ``kind`` is one of cpow / gauss / lpow."""

    kind: str
    alpha: float = 2.0

    def __post_init__(self):
        if self.kind not in ("cpow", "gauss", "lpow"):
            raise ValueError(f"unknown jump law kind {self.kind!r}")
        if self.kind == "gauss":
            if self.alpha != 2.0:
                raise ValueError("gaussian jump law has alpha fixed at 2")
        elif not 0.0 < self.alpha < 2.0:
            raise ValueError(
                f"{self.kind} jump law requires 0 < alpha < 2, got {self.alpha}"
            )

    @property
    def is_lattice(self) -> bool:
        return self.kind == "lpow"

    def token(self) -> str:
        return "gauss" if self.kind == "gauss" else f"{self.kind}:{self.alpha:g}"


@dataclass(frozen=True)
class WaitingLaw:
    """Waiting-time law; ``kind`` is one of cpow / exp / dpow."""

    kind: str
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("cpow", "exp", "dpow"):
            raise ValueError(f"unknown waiting law kind {self.kind!r}")
        if self.kind == "exp":
            if self.beta != 1.0:
                raise ValueError("exponential waiting law has beta fixed at 1")
        elif not 0.0 < self.beta < 1.0:
            raise ValueError(
                f"{self.kind} waiting law requires 0 < beta < 1, got {self.beta}"
            )

    @property
    def is_discrete(self) -> bool:
        return self.kind == "dpow"

    def token(self) -> str:
        return "exp" if self.kind == "exp" else f"{self.kind}:{self.beta:g}"


def continuous_power_jump(alpha: float) -> JumpLaw:
    return JumpLaw("cpow", float(alpha))


def gaussian_jump() -> JumpLaw:
    return JumpLaw("gauss", 2.0)


def lattice_power_jump(alpha: float) -> JumpLaw:
    return JumpLaw("lpow", float(alpha))


def continuous_power_wait(beta: float) -> WaitingLaw:
    return WaitingLaw("cpow", float(beta))


def exponential_wait() -> WaitingLaw:
    return WaitingLaw("exp", 1.0)


def discrete_power_wait(beta: float) -> WaitingLaw:
    return WaitingLaw("dpow", float(beta))


def _parse_token(token: str, plain: str, powered: tuple[str, ...]):
    token = token.strip()
    if token == plain:
        return plain, None
    head, sep, value = token.partition(":")
    if sep and head in powered:
        try:
            return head, float(value)
        except ValueError:
            pass
    raise ValueError(f"unrecognized law token {token!r}")


def parse_jump_law(token: str) -> JumpLaw:
    """Parse a jump-law token: ``cpow:1.5`` | ``gauss`` | ``lpow:1.5``."""
    kind, value = _parse_token(token, "gauss", ("cpow", "lpow"))
    return gaussian_jump() if kind == "gauss" else JumpLaw(kind, value)


def parse_waiting_law(token: str) -> WaitingLaw:
    """Parse a waiting-law token: ``cpow:0.5`` | ``exp`` | ``dpow:0.5``."""
    kind, value = _parse_token(token, "exp", ("cpow", "dpow"))
    return exponential_wait() if kind == "exp" else WaitingLaw(kind, value)


# ---------------------------------------------------------------------------
# CDFs


def jump_cdf(law: JumpLaw, x: float) -> float:
    """W(x) for the continuous jump laws (lattice laws use lattice_jump_pmf)."""
    if law.is_lattice:
        raise ValueError("lattice jump law has no continuous CDF; use lattice_jump_pmf")
    x = float(x)
    if law.kind == "gauss":
        return float(sp.ndtr(x))
    a = abs(x) ** law.alpha
    return 0.5 + math.copysign(0.5 * a / (1.0 + a), x)


def waiting_cdf(law: WaitingLaw, t: float) -> float:
    """Phi(t) for the continuous waiting laws."""
    if law.is_discrete:
        raise ValueError("discrete waiting law has no continuous CDF; use discrete_wait_pmf")
    t = float(t)
    if t < 0.0:
        raise ValueError(f"waiting times are non-negative, got t={t}")
    if law.kind == "exp":
        return -math.expm1(-t)
    return 1.0 - 1.0 / (1.0 + gamma(1.0 - law.beta) * t**law.beta)


# ---------------------------------------------------------------------------
# Inverse-PMF tables for the integer laws


@functools.lru_cache(maxsize=32)
def _lattice_jump_table(alpha: float) -> tuple[np.ndarray, float]:
    """Cumulative magnitudes of p(|k| = m)/P(k > 0) for m = 1.._TABLE_SIZE."""
    m = np.arange(1, _TABLE_SIZE + 1, dtype=float)
    pmf = m ** -(alpha + 1.0) / riemann_zeta(alpha + 1.0)
    return np.cumsum(pmf), float(pmf[-1])


@functools.lru_cache(maxsize=32)
def _discrete_wait_table(beta: float) -> tuple[np.ndarray, float]:
    m = np.arange(1, _TABLE_SIZE + 1, dtype=float)
    pmf = m ** -(beta + 1.0) / riemann_zeta(beta + 1.0)
    return np.cumsum(pmf), float(pmf[-1])


def _table_quantile(cum: np.ndarray, v: float, exponent: float) -> float:
    """Magnitude quantile from a cumulative table with anchored Pareto tail."""
    edge = cum[-1]
    if v <= edge:
        return float(np.searchsorted(cum, v, side="left") + 1)
    # survival at the table edge, continued as S(m) = S(N) (m/N)^-exponent
    surv_edge = 1.0 - edge
    m = _TABLE_SIZE * (surv_edge / (1.0 - v)) ** (1.0 / exponent)
    return float(math.floor(m) + 1)


# ---------------------------------------------------------------------------
# Samplers (inverse transform; u is a uniform variate in (0,1))


def _check_uniform(u: float) -> float:
    u = float(u)
    if not 0.0 < u < 1.0:
        raise ValueError(f"uniform variate must lie in (0,1), got {u}")
    return u


def sample_jump(law: JumpLaw, u: float) -> float:
    """u-quantile of the jump law; symmetric around 0.

    Delegates to the vectorized kernel so that scalar and ensemble sampling
    are bitwise identical (the walk engine's determinism contract).
    """
    u = _check_uniform(u)
    return float(sample_jump_many(law, np.array([u]))[0])


def sample_wait(law: WaitingLaw, u: float) -> float:
    """u-quantile of the waiting law; non-negative."""
    u = _check_uniform(u)
    return float(sample_wait_many(law, np.array([u]))[0])


def sample_jump_many(law: JumpLaw, u: np.ndarray) -> np.ndarray:
    """Vectorized sample_jump for uniform arrays (same quantile map)."""
    u = np.asarray(u, dtype=float)
    if law.kind == "gauss":
        v = u - 0.5
        return np.where(v == 0.0, 0.0, np.copysign(sp.ndtri(0.5 + np.abs(v)), v))
    v = 2.0 * u - 1.0
    sign = np.where(v > 0.0, 1.0, -1.0)
    v = np.abs(v)
    if law.kind == "cpow":
        out = np.zeros_like(v)
        nz = v > 0.0
        out[nz] = (v[nz] / (1.0 - v[nz])) ** (1.0 / law.alpha)
        return sign * out
    cum, _ = _lattice_jump_table(law.alpha)
    idx = np.searchsorted(cum, v, side="left")
    mag = (idx + 1).astype(float)
    over = idx >= _TABLE_SIZE
    if np.any(over):
        surv_edge = 1.0 - cum[-1]
        mag[over] = np.floor(
            _TABLE_SIZE * (surv_edge / (1.0 - v[over])) ** (1.0 / law.alpha)
        ) + 1.0
    return sign * mag


def sample_wait_many(law: WaitingLaw, u: np.ndarray) -> np.ndarray:
    """Vectorized sample_wait."""
    u = np.asarray(u, dtype=float)
    if law.kind == "exp":
        return -np.log1p(-u)
    if law.kind == "cpow":
        return (u / ((1.0 - u) * gamma(1.0 - law.beta))) ** (1.0 / law.beta)
    cum, _ = _discrete_wait_table(law.beta)
    idx = np.searchsorted(cum, u, side="left")
    out = (idx + 1).astype(float)
    over = idx >= _TABLE_SIZE
    if np.any(over):
        surv_edge = 1.0 - cum[-1]
        out[over] = np.floor(
            _TABLE_SIZE * (surv_edge / (1.0 - u[over])) ** (1.0 / law.beta)
        ) + 1.0
    return out


# ---------------------------------------------------------------------------
# Integer-law PMFs and tail constants


def lattice_jump_pmf(alpha: float, k: int) -> float:
    """p_k = |k|^-(alpha+1) / (2 zeta(alpha+1)) for k != 0, and p_0 = 0."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"lattice jump law requires 0 < alpha < 2, got {alpha}")
    if k == 0:
        return 0.0
    b = 1.0 / (2.0 * riemann_zeta(alpha + 1.0))
    return b * abs(k) ** -(alpha + 1.0)


def discrete_wait_pmf(beta: float, n: int) -> float:
    """c_n = n^-(beta+1) / zeta(beta+1) for integer waits n >= 1."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"discrete waiting law requires 0 < beta < 1, got {beta}")
    if n < 1:
        raise ValueError(f"discrete waiting times start at n=1, got {n}")
    return n ** -(beta + 1.0) / riemann_zeta(beta + 1.0)


@dataclass(frozen=True)
class TailConstants:
    """Power-tail amplitudes / moments feeding the scale constants.

    Exactly one of (jump_b, jump_sigma2) and one of (wait_c, wait_rho) is
    populated, matching the alpha < 2 / alpha = 2 and beta < 1 / beta = 1
    dichotomies.
    """

    jump_b: float | None = None
    jump_sigma2: float | None = None
    wait_c: float | None = None
    wait_rho: float | None = None


def tail_constants(jump: JumpLaw, wait: WaitingLaw) -> TailConstants:
    """Tail amplitude b (or variance sigma^2) and c (or mean rho) of the laws."""
    if jump.kind == "cpow":
        jb, js = jump.alpha / 2.0, None
    elif jump.kind == "lpow":
        jb, js = 1.0 / (2.0 * riemann_zeta(jump.alpha + 1.0)), None
    else:
        jb, js = None, 1.0
    if wait.kind == "cpow":
        wc, wr = 1.0 / abs(gamma(-wait.beta)), None
    elif wait.kind == "dpow":
        wc, wr = 1.0 / riemann_zeta(wait.beta + 1.0), None
    else:
        wc, wr = None, 1.0
    return TailConstants(jump_b=jb, jump_sigma2=js, wait_c=wc, wait_rho=wr)
