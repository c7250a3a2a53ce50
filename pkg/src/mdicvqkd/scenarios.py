"""Named parameter studies emitted as tabular datasets.

Each study fixes the conventions used throughout: reconciliation
efficiency 0.95, excess noise 0.002 on both links, fiber loss 0.2 dB/km,
and per-variant source variances taken from the variance studies.  The
asymmetric layout puts the relay at Bob (l_bc = 0) and reports l_ac;
the symmetric layout splits the reported total distance evenly between
the two arms (a per-arm reporting switch is available since either axis
convention appears in practice).
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .channel import LinkGeometry, equivalent_excess_noise_curve
from .keyrate import ProtocolConfig, secret_key_rate
from .modulation import Scheme, correlation_z
from .optimize import OptimizationGrid, best_rate, _golden_max
from .zpc import ZpcSetting

DEFAULT_BETA = 0.95
DEFAULT_EPS = 0.002
DEFAULT_LOSS_MU = 0.2


class Case(Enum):
    """Relay placement: at Bob's site or midway."""

    ASYMMETRIC = "asymmetric"
    SYMMETRIC = "symmetric"


class Variant(Enum):
    """The four protocol flavors compared throughout."""

    FOUR = "four"
    EIGHT = "eight"
    FOUR_ZPC = "four_zpc"
    EIGHT_ZPC = "eight_zpc"

    @property
    def scheme(self) -> Scheme:
        return Scheme.FOUR if self in (Variant.FOUR, Variant.FOUR_ZPC) else Scheme.EIGHT

    @property
    def zpc_enabled(self) -> bool:
        return self in (Variant.FOUR_ZPC, Variant.EIGHT_ZPC)


# Source variances giving the best rate for each variant, from the
# variance-distance surfaces (asymmetric read near 30 km, symmetric
# near 0.1 km).
OPTIMAL_V = {
    (Case.ASYMMETRIC, Variant.FOUR): 1.4,
    (Case.ASYMMETRIC, Variant.EIGHT): 1.5,
    (Case.ASYMMETRIC, Variant.FOUR_ZPC): 2.5,
    (Case.ASYMMETRIC, Variant.EIGHT_ZPC): 2.6,
    (Case.SYMMETRIC, Variant.FOUR): 1.5,
    (Case.SYMMETRIC, Variant.EIGHT): 1.8,
    (Case.SYMMETRIC, Variant.FOUR_ZPC): 2.6,
    (Case.SYMMETRIC, Variant.EIGHT_ZPC): 2.7,
}

BETA_SCAN_DISTANCES = {
    Case.ASYMMETRIC: (20.0, 25.0, 30.0, 35.0),
    Case.SYMMETRIC: (0.1, 0.2, 0.3, 0.4),
}

# Extra excess-noise presets for the distance curves of the best variant.
EXTRA_EPS = {
    Case.ASYMMETRIC: (0.0015, 0.00225, 0.0030),
    Case.SYMMETRIC: (0.0015, 0.0025, 0.0030),
}


@dataclass(frozen=True)
class Dataset:
    """One table: a name, a column header, and row tuples."""

    name: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)


def geometry_for(
    case: Case,
    distance_km: float,
    loss_mu: float = DEFAULT_LOSS_MU,
    sym_per_arm: bool = False,
) -> LinkGeometry:
    """Link geometry whose reported distance is distance_km.

    Asymmetric: the whole span is the Alice-relay link.  Symmetric: the
    distance is the Alice-Bob total split in half, unless sym_per_arm
    makes it the length of each arm instead.
    """
    if case is Case.ASYMMETRIC:
        return LinkGeometry(distance_km, 0.0, loss_mu)
    arm = distance_km if sym_per_arm else distance_km / 2.0
    return LinkGeometry(arm, arm, loss_mu)


def config_for(
    variant: Variant,
    case: Case,
    distance_km: float,
    variance_v: float | None = None,
    beta: float = DEFAULT_BETA,
    eps: float = DEFAULT_EPS,
    loss_mu: float = DEFAULT_LOSS_MU,
    sym_per_arm: bool = False,
) -> ProtocolConfig:
    """Preset configuration for one variant; T starts at 1 (optimizers
    and sweeps replace it)."""
    if variance_v is None:
        variance_v = OPTIMAL_V[(case, variant)]
    zpc = ZpcSetting.on(1.0) if variant.zpc_enabled else ZpcSetting.off()
    return ProtocolConfig(
        scheme=variant.scheme,
        zpc=zpc,
        variance_v=variance_v,
        beta=beta,
        eps_a=eps,
        eps_b=eps,
        geometry=geometry_for(case, distance_km, loss_mu, sym_per_arm),
    )


def _linspace(lo: float, hi: float, steps: int) -> list[float]:
    if steps < 2:
        raise ValueError("steps must be >= 2")
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


def correlation_curves(v_m_max: float = 4.0, steps: int = 200) -> Dataset:
    """Correlation coefficient of the three modulations versus the
    effective modulation variance."""
    rows = []
    for v_m in _linspace(0.0, v_m_max, steps):
        x = v_m / 2.0
        rows.append(
            (
                v_m,
                correlation_z(Scheme.FOUR, x),
                correlation_z(Scheme.EIGHT, x),
                correlation_z(Scheme.GAUSSIAN, x),
            )
        )
    return Dataset(name="fig2", columns=("v_m_tilde", "z4", "z8", "zg"), rows=rows)


def rate_surface(
    case: Case,
    v_lo: float = 1.05,
    v_hi: float = 10.0,
    v_steps: int = 100,
    l_steps: int = 100,
    l_max: float | None = None,
    grid: OptimizationGrid | None = None,
    fig_name: str | None = None,
    sym_per_arm: bool = False,
) -> list[Dataset]:
    """Rate over the (variance, distance) plane, one table per variant.

    Distances sample [0, l_max]; non-positive rates are recorded as-is
    so the positive region's boundary stays visible in the data.
    """
    if l_max is None:
        l_max = 60.0 if case is Case.ASYMMETRIC else 1.5
    if fig_name is None:
        fig_name = "fig3" if case is Case.ASYMMETRIC else "fig6"
    out = []
    for variant in Variant:
        rows = []
        for v in _linspace(v_lo, v_hi, v_steps):
            for l in _linspace(0.0, l_max, l_steps):
                cfg = config_for(variant, case, l, variance_v=v, sym_per_arm=sym_per_arm)
                skr, t_star = best_rate(cfg, grid)
                if not math.isfinite(skr):
                    skr = float("nan")
                rows.append((v, l, skr, t_star))
        out.append(
            Dataset(
                name=f"{fig_name}_{variant.value}",
                columns=("variance_v", "distance_km", "skr_bits_per_use", "t_star"),
                rows=rows,
            )
        )
    return out


def rate_vs_distance(
    case: Case,
    l_steps: int = 200,
    l_max: float | None = None,
    extra_eps: tuple[float, ...] | None = None,
    grid: OptimizationGrid | None = None,
    fig_name: str | None = None,
    sym_per_arm: bool = False,
) -> list[Dataset]:
    """Rate against distance at each variant's preset variance, plus the
    best variant rerun at alternative excess noises."""
    if l_max is None:
        l_max = 60.0 if case is Case.ASYMMETRIC else 1.5
    if extra_eps is None:
        extra_eps = EXTRA_EPS[case]
    if fig_name is None:
        fig_name = "fig4" if case is Case.ASYMMETRIC else "fig7"
    distances = _linspace(0.0, l_max, l_steps)

    def curve(name: str, variant: Variant, eps: float) -> Dataset:
        rows = []
        for l in distances:
            cfg = config_for(variant, case, l, eps=eps, sym_per_arm=sym_per_arm)
            _, t_star = best_rate(cfg, grid)
            res = secret_key_rate(replace(cfg, zpc=cfg.zpc.with_t(t_star)))
            p_d = res.p_d
            i_ab = res.i_ab if res.i_ab is not None else float("nan")
            chi_be = res.chi_be if res.chi_be is not None else float("nan")
            skr_out = res.skr if res.skr is not None else float("nan")
            rows.append((l, skr_out, p_d, i_ab, chi_be, t_star))
        return Dataset(
            name=name,
            columns=(
                "distance_km",
                "skr_bits_per_use",
                "p_d",
                "i_ab",
                "chi_be",
                "t_star",
            ),
            rows=rows,
        )

    out = [curve(f"{fig_name}_{v.value}", v, DEFAULT_EPS) for v in Variant]
    for eps in extra_eps:
        out.append(curve(f"{fig_name}_eight_zpc_eps{eps!r}", Variant.EIGHT_ZPC, eps))
    return out


def rate_vs_beta(
    case: Case,
    beta_lo: float = 0.8,
    beta_hi: float = 1.0,
    beta_steps: int = 200,
    distances: tuple[float, ...] | None = None,
    grid: OptimizationGrid | None = None,
    fig_name: str | None = None,
    sym_per_arm: bool = False,
) -> list[Dataset]:
    """Rate against reconciliation efficiency at the preset distances,
    transmittance re-optimized at every point."""
    if distances is None:
        distances = BETA_SCAN_DISTANCES[case]
    if fig_name is None:
        fig_name = "fig5" if case is Case.ASYMMETRIC else "fig8"
    out = []
    for variant in Variant:
        rows = []
        for l in distances:
            for beta in _linspace(beta_lo, beta_hi, beta_steps):
                cfg = config_for(variant, case, l, beta=beta, sym_per_arm=sym_per_arm)
                skr, t_star = best_rate(cfg, grid)
                rows.append((l, beta, skr, t_star))
        out.append(
            Dataset(
                name=f"{fig_name}_{variant.value}",
                columns=("distance_km", "beta", "skr_bits_per_use", "t_star"),
                rows=rows,
            )
        )
    return out


def beta_zero_crossing(
    config: ProtocolConfig, grid: OptimizationGrid | None = None
) -> tuple[float, float]:
    """Reconciliation efficiency at which the best achievable rate turns
    positive, with the transmittance attaining it.

    The rate is linear in beta with slope P_d I_AB, so for every fixed T
    the crossing sits at chi_BE / I_AB and optimizing T means taking the
    smallest such ratio.  Values above 1 mean no key at any efficiency;
    inf means no physical operating point at all.
    """
    grid = grid or OptimizationGrid()

    def neg_ratio(t: float | None) -> float:
        zpc = config.zpc if t is None else config.zpc.with_t(t)
        res = secret_key_rate(replace(config, zpc=zpc))
        if not res.physical or res.i_ab is None or res.i_ab <= 0.0:
            return -math.inf
        return -res.chi_be / res.i_ab

    if not config.zpc.enabled:
        return -neg_ratio(None), 1.0
    points = grid.t_points()
    best_i = 0
    best_f = neg_ratio(points[0])
    for i in range(1, len(points)):
        fi = neg_ratio(points[i])
        if fi > best_f:
            best_i, best_f = i, fi
    lo = points[best_i - 1] if best_i > 0 else grid.t_lo
    hi = points[best_i + 1] if best_i + 1 < len(points) else grid.t_hi
    t_ref, f_ref = _golden_max(neg_ratio, lo, hi, grid.refine_iters)
    if f_ref > best_f:
        return -f_ref, t_ref
    return -best_f, points[best_i]


def asymmetry_rate_curves(
    d_list: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0),
    l_steps: int = 200,
    l_max: float = 50.0,
    variance_v: float = 2.7,
    grid: OptimizationGrid | None = None,
    arm_diff_axis: bool = False,
) -> Dataset:
    """Rate versus distance as the relay slides from Bob toward the
    middle; d is the ratio l_bc / l_ac.

    The distance column is the Alice-Bob total l_ac (1 + d) by default;
    arm_diff_axis reports the arm difference l_ac - l_bc = (1 - d) l_ac
    instead.  Rows are sorted by distance then d.
    """
    rows = []
    for d in d_list:
        if not (0.0 <= d <= 1.0):
            raise ValueError(f"d must be in [0, 1], got {d}")
        for l_ac in _linspace(0.0, l_max, l_steps):
            geom = LinkGeometry(l_ac, d * l_ac, DEFAULT_LOSS_MU)
            cfg = ProtocolConfig(
                scheme=Scheme.EIGHT,
                zpc=ZpcSetting.on(1.0),
                variance_v=variance_v,
                beta=DEFAULT_BETA,
                eps_a=DEFAULT_EPS,
                eps_b=DEFAULT_EPS,
                geometry=geom,
            )
            skr, t_star = best_rate(cfg, grid)
            reported = (1.0 - d) * l_ac if arm_diff_axis else l_ac * (1.0 + d)
            rows.append((reported, d, skr, t_star))
    rows.sort(key=lambda r: (r[0], r[1]))
    return Dataset(
        name="fig9a",
        columns=("distance_km", "d", "skr_bits_per_use", "t_star"),
        rows=rows,
    )


def excess_noise_transition(
    d_list: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0),
    l_steps: int = 200,
    l_max: float = 60.0,
    eps: float = DEFAULT_EPS,
    loss_mu: float = DEFAULT_LOSS_MU,
) -> Dataset:
    """Equivalent excess noise versus total distance for each arm ratio."""
    distances = _linspace(0.0, l_max, l_steps)
    rows = []
    for d in d_list:
        for total, eps_th in equivalent_excess_noise_curve(d, distances, eps, eps, loss_mu):
            rows.append((total, d, eps_th))
    rows.sort(key=lambda r: (r[0], r[1]))
    return Dataset(name="fig9b", columns=("distance_km", "d", "eps_th"), rows=rows)


def run_figure(figure_id: str, **overrides) -> list[Dataset]:
    """Dispatch a figure name to its study with optional grid overrides."""
    fid = figure_id.lower()
    if fid == "fig2":
        return [correlation_curves(**overrides)]
    if fid in ("fig3", "fig6"):
        case = Case.ASYMMETRIC if fid == "fig3" else Case.SYMMETRIC
        return rate_surface(case, fig_name=fid, **overrides)
    if fid in ("fig4", "fig7"):
        case = Case.ASYMMETRIC if fid == "fig4" else Case.SYMMETRIC
        return rate_vs_distance(case, fig_name=fid, **overrides)
    if fid in ("fig5", "fig8"):
        case = Case.ASYMMETRIC if fid == "fig5" else Case.SYMMETRIC
        return rate_vs_beta(case, fig_name=fid, **overrides)
    if fid == "fig9a":
        return [asymmetry_rate_curves(**overrides)]
    if fid == "fig9b":
        return [excess_noise_transition(**overrides)]
    raise ValueError(f"unknown figure id {figure_id!r}")


FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9a", "fig9b")
