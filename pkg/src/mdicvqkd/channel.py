"""Reduction of the two-link relay topology to one equivalent channel.

Alice and Bob each send through fiber to an untrusted middle node that
publishes a Bell-type measurement; Bob's displacement gain g folds his
link into an effective one-way channel from Alice.  The result is a
single transmittance T_C = g^2 T_A / 2 and an equivalent excess noise

    eps_th = 1 + chi_A + (T_B / T_A) (chi_B - 1)
           + (T_B / T_A) (sqrt(2 (V_B - 1) / (g^2 T_B)) - sqrt(V_B + 1))^2

where chi_i = (1 - T_i) / T_i + eps_i.  Choosing g^2 = 2 (V_B - 1) /
(T_B (V_B + 1)) kills the last term, which is the gain used throughout.
"""

import math
from dataclasses import dataclass

FIBER_LOSS_DB_PER_KM = 0.2


def fiber_transmittance(length_km: float, loss_mu: float = FIBER_LOSS_DB_PER_KM) -> float:
    """Power transmittance of a fiber span, 10^(-mu L / 10)."""
    if length_km < 0.0:
        raise ValueError(f"length_km must be >= 0, got {length_km}")
    if loss_mu <= 0.0:
        raise ValueError(f"loss_mu must be > 0, got {loss_mu}")
    return 10.0 ** (-loss_mu * length_km / 10.0)


@dataclass(frozen=True)
class LinkGeometry:
    """Fiber lengths of the two links to the relay, in km."""

    l_ac: float
    l_bc: float
    loss_mu: float = FIBER_LOSS_DB_PER_KM

    def __post_init__(self):
        if not (math.isfinite(self.l_ac) and math.isfinite(self.l_bc)):
            raise ValueError("link lengths must be finite")
        if self.l_ac < 0.0 or self.l_bc < 0.0:
            raise ValueError("link lengths must be >= 0")
        if self.loss_mu <= 0.0:
            raise ValueError("loss_mu must be > 0")

    @property
    def total_km(self) -> float:
        return self.l_ac + self.l_bc

    def scaled(self, total_km: float) -> "LinkGeometry":
        """Same arm ratio stretched to a new total length."""
        if self.total_km == 0.0:
            if total_km == 0.0:
                return self
            raise ValueError("cannot scale a zero-length geometry to a nonzero total")
        f = total_km / self.total_km
        return LinkGeometry(self.l_ac * f, self.l_bc * f, self.loss_mu)


def optimal_g_sq(t_b: float, v_bob: float) -> float:
    """Displacement gain g^2 = 2 (V_B - 1) / (T_B (V_B + 1)) that removes
    the gain-mismatch noise term."""
    if not (0.0 < t_b <= 1.0):
        raise ValueError(f"t_b must be in (0, 1], got {t_b}")
    if v_bob <= 1.0:
        raise ValueError(f"v_bob must exceed 1, got {v_bob}")
    return 2.0 * (v_bob - 1.0) / (t_b * (v_bob + 1.0))


@dataclass(frozen=True)
class EquivalentChannel:
    """One-way channel equivalent to the relay topology."""

    t_a: float
    t_b: float
    chi_a: float
    chi_b: float
    g_sq: float
    t_c: float
    eps_th: float
    chi_t: float


def equivalent_excess_noise(geometry: LinkGeometry, eps_a: float, eps_b: float) -> float:
    """eps_th at the mismatch-cancelling gain; independent of v_bob."""
    t_a = fiber_transmittance(geometry.l_ac, geometry.loss_mu)
    t_b = fiber_transmittance(geometry.l_bc, geometry.loss_mu)
    chi_a = (1.0 - t_a) / t_a + eps_a
    chi_b = (1.0 - t_b) / t_b + eps_b
    return 1.0 + chi_a + (t_b / t_a) * (chi_b - 1.0)


def equivalent_excess_noise_curve(
    d_ratio: float,
    distances_km: list[float],
    eps_a: float,
    eps_b: float,
    loss_mu: float = FIBER_LOSS_DB_PER_KM,
) -> list[tuple[float, float]]:
    """eps_th sampled over total Alice-Bob distances for one arm ratio.

    d_ratio is l_bc / l_ac, so d_ratio = 0 puts the relay at Bob and
    d_ratio = 1 in the middle; each total distance splits as
    l_ac = total / (1 + d_ratio), l_bc = d_ratio * l_ac.
    """
    if not (0.0 <= d_ratio <= 1.0):
        raise ValueError(f"d_ratio must be in [0, 1], got {d_ratio}")
    out = []
    for total in distances_km:
        l_ac = total / (1.0 + d_ratio)
        geom = LinkGeometry(l_ac, d_ratio * l_ac, loss_mu)
        out.append((total, equivalent_excess_noise(geom, eps_a, eps_b)))
    return out


def equivalent_channel(
    geometry: LinkGeometry,
    eps_a: float,
    eps_b: float,
    v_bob: float,
    g_sq: float | None = None,
) -> EquivalentChannel:
    """Collapse both links and Bob's modulation into one channel.

    v_bob is the variance of Bob's mode entering his fiber.  g_sq
    defaults to the mismatch-cancelling choice; passing a value keeps
    the general expression, which adds the quadratic penalty term.
    """
    if v_bob <= 1.0:
        raise ValueError(f"v_bob must exceed 1 (vacuum) to define a gain, got {v_bob}")
    if eps_a < 0.0 or eps_b < 0.0:
        raise ValueError("excess noise must be >= 0")
    t_a = fiber_transmittance(geometry.l_ac, geometry.loss_mu)
    t_b = fiber_transmittance(geometry.l_bc, geometry.loss_mu)
    if t_a == 0.0 or t_b == 0.0:
        raise ValueError("link so long its transmittance underflowed to zero")
    chi_a = (1.0 - t_a) / t_a + eps_a
    chi_b = (1.0 - t_b) / t_b + eps_b
    if g_sq is None:
        g_sq = optimal_g_sq(t_b, v_bob)
        mismatch = 0.0
    else:
        if g_sq <= 0.0:
            raise ValueError(f"g_sq must be > 0, got {g_sq}")
        root = math.sqrt(2.0 * (v_bob - 1.0) / (g_sq * t_b)) - math.sqrt(v_bob + 1.0)
        mismatch = root * root
    eps_th = 1.0 + chi_a + (t_b / t_a) * (chi_b - 1.0 + mismatch)
    t_c = g_sq * t_a / 2.0
    chi_t = 1.0 / t_c - 1.0 + eps_th
    return EquivalentChannel(
        t_a=t_a,
        t_b=t_b,
        chi_a=chi_a,
        chi_b=chi_b,
        g_sq=g_sq,
        t_c=t_c,
        eps_th=eps_th,
        chi_t=chi_t,
    )
