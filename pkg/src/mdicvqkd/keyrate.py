"""Secret key rate of the relay protocol under collective attacks.

The pipeline: attenuate the source through the catalysis herald, build
the two-mode covariance matrix seen by Alice and the equivalent channel
output, then score it.  The rate is

    SKR = P_d (beta I_AB - chi_BE)

per protocol use, including the herald probability; negative values
mean no key at those settings and are reported as-is.
"""

import math
from dataclasses import dataclass

from .channel import EquivalentChannel, LinkGeometry, equivalent_channel
from .modulation import Scheme, correlation_z
from .zpc import ZpcSetting, apply_zpc

# States are declared unphysical only below this, leaving room for
# honest rounding at pure-state boundaries where kappa = 1 exactly.
KAPPA_TOL = 1e-9

# Proven security region of the discrete-modulation argument: the
# effective modulation variance reaching the channel has to stay small
# for the Gaussian-channel reduction to hold.
DOMAIN_V_M_MAX = 0.5


class NonPhysicalStateError(ValueError):
    """Covariance matrix fails the physicality conditions."""


@dataclass(frozen=True)
class ProtocolConfig:
    """Complete description of one protocol evaluation.

    variance_v is the source variance V = 1 + V_M shared by both arms;
    the catalysis setting attenuates only Alice's arm.  Excess noises
    are per-link, in shot-noise units.
    """

    scheme: Scheme
    zpc: ZpcSetting
    variance_v: float
    beta: float
    eps_a: float
    eps_b: float
    geometry: LinkGeometry

    def __post_init__(self):
        if not (self.variance_v > 1.0 and math.isfinite(self.variance_v)):
            raise ValueError(f"variance_v must be > 1, got {self.variance_v}")
        if not (0.0 < self.beta <= 1.0):
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if self.eps_a < 0.0 or self.eps_b < 0.0:
            raise ValueError("excess noise must be >= 0")

    @property
    def alpha_sq(self) -> float:
        return (self.variance_v - 1.0) / 2.0

    @property
    def warn_domain(self) -> bool:
        """True when the effective modulation variance T V_M leaves the
        region where the security argument is proven; evaluation still
        proceeds."""
        t = self.zpc.t if self.zpc.enabled else 1.0
        return t * (self.variance_v - 1.0) > DOMAIN_V_M_MAX


@dataclass(frozen=True)
class FinalCovariance:
    """Two-mode covariance (a, b diagonal blocks, c correlation block)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and math.isfinite(self.c)):
            raise NonPhysicalStateError("covariance entries must be finite")
        if self.a < 1.0 - KAPPA_TOL or self.b < 1.0 - KAPPA_TOL:
            raise NonPhysicalStateError(
                f"single-mode variances below vacuum: a={self.a}, b={self.b}"
            )


@dataclass(frozen=True)
class KeyRateResult:
    """Score of one configuration; fields are None when non-physical."""

    p_d: float
    i_ab: float | None
    chi_be: float | None
    kappa1: float | None
    kappa2: float | None
    kappa3: float | None
    skr: float | None
    physical: bool


@dataclass(frozen=True)
class Evaluation:
    """Key-rate result bundled with the intermediates that produced it."""

    config: ProtocolConfig
    result: KeyRateResult
    channel: EquivalentChannel
    covariance: FinalCovariance | None
    attenuated_alpha_sq: float


def final_covariance(config: ProtocolConfig) -> FinalCovariance:
    """Covariance of Alice's kept mode and the channel output mode.

    Alice's variance and the correlation are those of the attenuated
    source (a = 1 + 2 T alpha^2, Z at T alpha^2); the channel stretch
    and added noise act on the b and c entries.
    """
    atten, _ = apply_zpc(config.alpha_sq, config.zpc)
    chan = equivalent_channel(
        config.geometry, config.eps_a, config.eps_b, v_bob=config.variance_v
    )
    x_t = 1.0 + 2.0 * atten
    z_t = correlation_z(config.scheme, atten)
    a = x_t
    b = chan.t_c * (x_t + chan.chi_t)
    c = math.sqrt(chan.t_c) * z_t
    return FinalCovariance(a=a, b=b, c=c)


def mutual_information(cov: FinalCovariance) -> float:
    """Shannon information of the heterodyne outcomes, bits per use."""
    denom = (cov.a + 1.0) - cov.c * cov.c / (cov.b + 1.0)
    if denom <= 0.0:
        raise NonPhysicalStateError(f"correlation exceeds the physical bound: c={cov.c}")
    return math.log2((cov.a + 1.0) / denom)


def von_neumann_g(x: float) -> float:
    """Thermal-state entropy G(x) = (x+1) log2(x+1) - x log2 x."""
    if x < -KAPPA_TOL:
        raise ValueError(f"G requires x >= 0, got {x}")
    if x <= 0.0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)


def symplectic_eigenvalues(cov: FinalCovariance) -> tuple[float, float, float]:
    """Symplectic spectrum (kappa1 >= kappa2) plus the conditional kappa3.

    kappa_{1,2}^2 = [Delta +- sqrt(Delta^2 - 4 F^2)] / 2 with
    Delta = a^2 + b^2 - 2 c^2 and F = ab - c^2.  The discriminant is
    evaluated in the factored form (a-b)^2 ((a+b)^2 - 4c^2) and kappa2
    as F / kappa1, both to dodge cancellation; kappa1 kappa2 = F then
    holds to rounding by construction.
    """
    a, b, c = cov.a, cov.b, cov.c
    f = a * b - c * c
    # products, not **: float pow raises OverflowError where * yields inf,
    # and inf is handled below as a non-physical state
    disc = ((a - b) * (a - b)) * ((a + b) * (a + b) - 4.0 * c * c)
    if disc < 0.0 or f <= 0.0 or not math.isfinite(disc):
        raise NonPhysicalStateError(f"no real symplectic spectrum: disc={disc}, F={f}")
    delta = a * a + b * b - 2.0 * c * c
    kappa1 = math.sqrt((delta + math.sqrt(disc)) / 2.0)
    kappa2 = f / kappa1
    kappa3 = a - c * c / (b + 1.0)
    for k in (kappa1, kappa2, kappa3):
        if not math.isfinite(k) or k < 1.0 - KAPPA_TOL:
            raise NonPhysicalStateError(f"symplectic eigenvalue below 1: {k}")
    return kappa1, kappa2, kappa3


def holevo_bound(cov: FinalCovariance) -> float:
    """Eavesdropper information bound chi_BE, bits per use."""
    kappa1, kappa2, kappa3 = symplectic_eigenvalues(cov)
    return (
        von_neumann_g((kappa1 - 1.0) / 2.0)
        + von_neumann_g((kappa2 - 1.0) / 2.0)
        - von_neumann_g((kappa3 - 1.0) / 2.0)
    )


def evaluate_protocol(config: ProtocolConfig) -> Evaluation:
    """Run the full pipeline, keeping channel and covariance intermediates.

    Non-physical covariances do not raise; they yield a result with
    physical = False and the score fields unset.
    """
    atten, p_d = apply_zpc(config.alpha_sq, config.zpc)
    chan = equivalent_channel(
        config.geometry, config.eps_a, config.eps_b, v_bob=config.variance_v
    )
    try:
        cov = final_covariance(config)
        kappa1, kappa2, kappa3 = symplectic_eigenvalues(cov)
        i_ab = mutual_information(cov)
        chi_be = (
            von_neumann_g((kappa1 - 1.0) / 2.0)
            + von_neumann_g((kappa2 - 1.0) / 2.0)
            - von_neumann_g((kappa3 - 1.0) / 2.0)
        )
        skr = p_d * (config.beta * i_ab - chi_be)
        if not (math.isfinite(i_ab) and math.isfinite(chi_be) and math.isfinite(skr)):
            raise NonPhysicalStateError("non-finite rate")
    except NonPhysicalStateError:
        result = KeyRateResult(
            p_d=p_d,
            i_ab=None,
            chi_be=None,
            kappa1=None,
            kappa2=None,
            kappa3=None,
            skr=None,
            physical=False,
        )
        return Evaluation(
            config=config,
            result=result,
            channel=chan,
            covariance=None,
            attenuated_alpha_sq=atten,
        )
    result = KeyRateResult(
        p_d=p_d,
        i_ab=i_ab,
        chi_be=chi_be,
        kappa1=kappa1,
        kappa2=kappa2,
        kappa3=kappa3,
        skr=skr,
        physical=True,
    )
    return Evaluation(
        config=config,
        result=result,
        channel=chan,
        covariance=cov,
        attenuated_alpha_sq=atten,
    )


def secret_key_rate(config: ProtocolConfig) -> KeyRateResult:
    """Secret key rate in bits per protocol use (herald factor included)."""
    return evaluate_protocol(config).result
