"""Deterministic optimizers: catalysis transmittance, source variance,
and maximum transmission distance.

Everything is coarse-grid scan plus golden-section refinement around the
best bracket.  No randomness, no gradient estimates; ties break toward
the smaller parameter value so repeated runs agree bit for bit.  The
rate surface is smooth but not assumed unimodal: the refined value is
only trusted when it beats the coarse scan.
"""

import math
from dataclasses import dataclass, replace

from .channel import LinkGeometry
from .keyrate import KeyRateResult, ProtocolConfig, secret_key_rate

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizationGrid:
    """Scan ranges and refinement depth shared by all optimizers.

    The transmittance range is open at the bottom (the rate vanishes
    with T, so the excluded sliver cannot hold the optimum) and closed
    at 1; the variance range is closed on both ends.
    """

    t_lo: float = 0.01
    t_hi: float = 1.0
    t_steps: int = 200
    v_lo: float = 1.01
    v_hi: float = 10.0
    v_steps: int = 200
    refine_iters: int = 30

    def __post_init__(self):
        if not (0.0 <= self.t_lo < self.t_hi <= 1.0):
            raise ValueError(f"need 0 <= t_lo < t_hi <= 1, got ({self.t_lo}, {self.t_hi}]")
        if not (1.0 < self.v_lo < self.v_hi):
            raise ValueError(f"need 1 < v_lo < v_hi, got [{self.v_lo}, {self.v_hi}]")
        if self.t_steps < 2 or self.v_steps < 2:
            raise ValueError("steps must be >= 2")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")

    def t_points(self) -> list[float]:
        """Grid over (t_lo, t_hi]: lo excluded, hi included."""
        span = self.t_hi - self.t_lo
        return [self.t_lo + span * (i + 1) / self.t_steps for i in range(self.t_steps)]

    def v_points(self) -> list[float]:
        return [
            self.v_lo + (self.v_hi - self.v_lo) * i / (self.v_steps - 1)
            for i in range(self.v_steps)
        ]


@dataclass(frozen=True)
class TOptimum:
    t_star: float
    skr_star: float
    result: KeyRateResult
    no_key: bool


@dataclass(frozen=True)
class TvOptimum:
    t_star: float
    v_star: float
    skr_star: float
    no_key: bool


@dataclass(frozen=True)
class MaxDistance:
    distance_km: float
    no_key: bool


def _golden_max(f, lo: float, hi: float, iters: int) -> tuple[float, float]:
    """Golden-section maximum of f on [lo, hi]; ties keep the left
    subinterval so the smaller argument wins."""
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd


def _scan_and_refine(f, points: list[float], lo_cap: float, hi_cap: float, iters: int):
    """Best of a coarse scan and a golden pass around its bracket.

    Returns (x, f(x)) with f(x) >= every coarse value; ties on the scan
    keep the first (smallest) point.
    """
    best_i = 0
    best_f = f(points[0])
    for i in range(1, len(points)):
        fi = f(points[i])
        if fi > best_f:
            best_i, best_f = i, fi
    lo = points[best_i - 1] if best_i > 0 else lo_cap
    hi = points[best_i + 1] if best_i + 1 < len(points) else hi_cap
    x_ref, f_ref = _golden_max(f, lo, hi, iters)
    if f_ref > best_f:
        return x_ref, f_ref
    return points[best_i], best_f


def _skr_of(config: ProtocolConfig) -> float:
    r = secret_key_rate(config)
    if not r.physical or r.skr is None:
        return -math.inf
    return r.skr


def optimize_t(config: ProtocolConfig, grid: OptimizationGrid | None = None) -> TOptimum:
    """Transmittance maximizing the key rate, everything else fixed.

    The catalysis setting must be enabled; the T stored in config is a
    placeholder and does not bias the search.
    """
    if not config.zpc.enabled:
        raise ValueError("optimize_t requires an enabled catalysis setting")
    grid = grid or OptimizationGrid()

    def f(t: float) -> float:
        return _skr_of(replace(config, zpc=config.zpc.with_t(t)))

    t_star, skr_star = _scan_and_refine(
        f, grid.t_points(), grid.t_lo, grid.t_hi, grid.refine_iters
    )
    result = secret_key_rate(replace(config, zpc=config.zpc.with_t(t_star)))
    return TOptimum(
        t_star=t_star,
        skr_star=skr_star,
        result=result,
        no_key=not (skr_star > 0.0),
    )


def best_rate(config: ProtocolConfig, grid: OptimizationGrid | None = None) -> tuple[float, float]:
    """(skr, t) with T optimized when catalysis is on, pinned to 1 otherwise."""
    if config.zpc.enabled:
        opt = optimize_t(config, grid)
        return opt.skr_star, opt.t_star
    return _skr_of(config), 1.0


def optimize_tv(config: ProtocolConfig, grid: OptimizationGrid | None = None) -> TvOptimum:
    """Joint optimum over source variance and (when enabled) transmittance.

    Nested search: a variance scan with the transmittance optimizer
    inside, then golden refinement of the variance around the best
    bracket.  Without catalysis the inner stage is a single evaluation
    at T = 1.
    """
    grid = grid or OptimizationGrid()
    t_for: dict[float, float] = {}

    def f(v: float) -> float:
        skr, t = best_rate(replace(config, variance_v=v), grid)
        t_for[v] = t
        return skr

    v_star, skr_star = _scan_and_refine(
        f, grid.v_points(), grid.v_lo, grid.v_hi, grid.refine_iters
    )
    return TvOptimum(
        t_star=t_for[v_star],
        v_star=v_star,
        skr_star=skr_star,
        no_key=not (skr_star > 0.0),
    )


def max_distance(
    config: ProtocolConfig,
    grid: OptimizationGrid | None = None,
    tol_km: float = 0.05,
) -> MaxDistance:
    """Largest total distance with a positive (T-optimized) key rate.

    The arm ratio of config.geometry is preserved while the total length
    is scaled; the zero crossing is bracketed by doubling and then
    bisected to tol_km.  Degenerate configs with no key even at zero
    distance return 0 with the no_key flag set.
    """
    grid = grid or OptimizationGrid()
    if tol_km <= 0.0:
        raise ValueError(f"tol_km must be > 0, got {tol_km}")
    base = config.geometry
    if base.total_km == 0.0:
        # no arm ratio to preserve; fall back to a single-link scan
        base = LinkGeometry(1.0, 0.0, base.loss_mu)

    def rate_at(total_km: float) -> float:
        return best_rate(replace(config, geometry=base.scaled(total_km)), grid)[0]

    if not (rate_at(0.0) > 0.0):
        return MaxDistance(distance_km=0.0, no_key=True)
    lo, hi = 0.0, max(base.total_km, 1.0)
    while rate_at(hi) > 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e5:
            raise RuntimeError("no zero crossing found below 1e5 km")
    while hi - lo > tol_km:
        mid = 0.5 * (lo + hi)
        if rate_at(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return MaxDistance(distance_km=0.5 * (lo + hi), no_key=False)
