"""Discrete-modulation constants for coherent-state constellations.

A phase-encoded constellation of M coherent states (all with the same
real amplitude alpha) decomposes into M orthogonal states whose weights
lambda_k are the probabilities that a Poisson variable with mean alpha^2
falls in residue class k mod M.  Those weights determine the correlation
coefficient Z of the equivalent two-mode entangled state, which is the
only constellation-dependent quantity entering the key-rate analysis.

All quantities are in shot-noise units; the modulation variance is
V_M = 2 alpha^2.
"""

import math
from dataclasses import dataclass
from enum import Enum


class Scheme(Enum):
    """Modulation constellation: 4 phases, 8 phases, or Gaussian."""

    FOUR = "four"
    EIGHT = "eight"
    GAUSSIAN = "gaussian"


_SQRT2 = math.sqrt(2.0)

# Above this mean the closed forms multiply huge cosh/sinh values by a tiny
# exponential and shed digits; the term-by-term Poisson sum stays exact.
_CLOSED_FORM_MAX = 30.0

# Below this the closed forms cancel down to values near the 1e-16 noise
# floor of cosh/cos (the smallest weight scales like alpha_sq^7), so the
# all-positive Poisson sum is used there as well.
_CLOSED_FORM_MIN = 1.0

# Beyond this every residue class holds 1/M to far below double precision
# (the deviation decays like exp(-alpha_sq * (1 - cos(2*pi/M)))).
_UNIFORM_MAX = 500.0

# Floor applied to denominators in the Z sum purely to avoid division
# exceptions; every affected term is zero or vanishes in exact arithmetic.
_DENOM_FLOOR = 1e-300


def _check_alpha_sq(alpha_sq: float) -> float:
    alpha_sq = float(alpha_sq)
    if not (alpha_sq >= 0.0) or math.isinf(alpha_sq):
        raise ValueError(f"alpha_sq must be finite and >= 0, got {alpha_sq}")
    return alpha_sq


def _poisson_residue_sums(alpha_sq: float, modulus: int) -> list[float]:
    """Accumulate the Poisson pmf with mean alpha_sq into residue classes.

    Runs until the terms underflow so even the smallest class keeps full
    relative precision (all terms are positive, nothing cancels).
    """
    if alpha_sq > _UNIFORM_MAX:
        return [1.0 / modulus] * modulus
    out = [0.0] * modulus
    term = math.exp(-alpha_sq)
    n = 0
    while True:
        out[n % modulus] += term
        n += 1
        term *= alpha_sq / n
        if term < 1e-300 and n > alpha_sq:
            return out


def _lambdas_eight_closed(x: float) -> list[float]:
    # Discrete-Fourier resummation of the Poisson tail over the 8th roots
    # of unity; the cross terms live at x/sqrt(2).
    pref = 0.25 * math.exp(-x)
    ch, sh = math.cosh(x), math.sinh(x)
    co, si = math.cos(x), math.sin(x)
    xr = x / _SQRT2
    chr_, shr = math.cosh(xr), math.sinh(xr)
    cor, sir = math.cos(xr), math.sin(xr)
    even = 2.0 * cor * chr_
    odd_sum = _SQRT2 * (cor * shr + sir * chr_)
    mixed = 2.0 * sir * shr
    odd_diff = _SQRT2 * (cor * shr - sir * chr_)
    return [
        pref * (ch + co + even),
        pref * (sh + si + odd_sum),
        pref * (ch - co + mixed),
        pref * (sh - si - odd_diff),
        pref * (ch + co - even),
        pref * (sh + si - odd_sum),
        pref * (ch - co - mixed),
        pref * (sh - si + odd_diff),
    ]


def _lambdas_four_closed(x: float) -> list[float]:
    pref = 0.5 * math.exp(-x)
    ch, sh = math.cosh(x), math.sinh(x)
    co, si = math.cos(x), math.sin(x)
    return [
        pref * (ch + co),
        pref * (sh + si),
        pref * (ch - co),
        pref * (sh - si),
    ]


def lambdas_eight(alpha_sq: float) -> list[float]:
    """Weights of the eight orthogonal constellation states.

    lambda_k is the probability that a Poisson variable with mean
    alpha_sq equals k mod 8.  The weights are non-negative and sum to 1.
    """
    x = _check_alpha_sq(alpha_sq)
    if x < _CLOSED_FORM_MIN or x > _CLOSED_FORM_MAX:
        return _poisson_residue_sums(x, 8)
    return _lambdas_eight_closed(x)


def lambdas_four(alpha_sq: float) -> list[float]:
    """Weights of the four orthogonal constellation states (mod-4 classes)."""
    x = _check_alpha_sq(alpha_sq)
    if x < _CLOSED_FORM_MIN or x > _CLOSED_FORM_MAX:
        return _poisson_residue_sums(x, 4)
    return _lambdas_four_closed(x)


def lambdas(scheme: Scheme, alpha_sq: float) -> list[float]:
    """Constellation weights for a discrete scheme (empty for Gaussian)."""
    if scheme is Scheme.EIGHT:
        return lambdas_eight(alpha_sq)
    if scheme is Scheme.FOUR:
        return lambdas_four(alpha_sq)
    if scheme is Scheme.GAUSSIAN:
        return []
    raise ValueError(f"unknown scheme {scheme!r}")


def gaussian_z(alpha_sq: float) -> float:
    """EPR correlation sqrt((V_M + 1)^2 - 1) of Gaussian modulation."""
    x = _check_alpha_sq(alpha_sq)
    v_m = 2.0 * x
    return math.sqrt((v_m + 1.0) * (v_m + 1.0) - 1.0)


def correlation_z(scheme: Scheme, alpha_sq: float) -> float:
    """Correlation coefficient Z of the two-mode state, shot-noise units.

    For discrete schemes this is 2 alpha^2 * sum_k lambda_{k-1}^{3/2} /
    sqrt(lambda_k) with the index wrapping cyclically; Gaussian modulation
    gives the EPR value.  All three vanish at alpha_sq = 0.
    """
    x = _check_alpha_sq(alpha_sq)
    if scheme is Scheme.GAUSSIAN:
        return gaussian_z(x)
    lams = lambdas(scheme, x)
    total = 0.0
    for k in range(len(lams)):
        # lams[k - 1] wraps to the last weight at k = 0
        num = lams[k - 1] ** 1.5
        total += num / math.sqrt(max(lams[k], _DENOM_FLOOR))
    return 2.0 * x * total


@dataclass(frozen=True)
class ModulationConstants:
    """Constellation weights and correlation for one amplitude-squared."""

    scheme: Scheme
    alpha_sq: float
    lambdas: tuple[float, ...]
    z: float


def modulation_constants(scheme: Scheme, alpha_sq: float) -> ModulationConstants:
    """Bundle the weights and correlation coefficient for a scheme."""
    x = _check_alpha_sq(alpha_sq)
    return ModulationConstants(
        scheme=scheme,
        alpha_sq=x,
        lambdas=tuple(lambdas(scheme, x)),
        z=correlation_z(scheme, x),
    )
