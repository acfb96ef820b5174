"""Phase sensitivity of the read-out strategies.

Error propagation (Delta phi)^2 = Var(O)/(d<O>/dphi)^2 applied to the
photocounting observables gives, for every strategy, a floor plus a
working-point penalty:

    single        dphi_min^2 + K tan^2(phi/2)
    differential  dphi_min^2 + K cot^2(phi)
    optimal       dphi_min^2                      (flat in phi)
    suboptimal    dphi_min^2 + K (cos phi - cos phi_apr)^2 / sin^2 phi

with dphi_min^2 = (e^{-2 r1} + eps^2)/N and K = (A + eps^2)/N.  The closed
forms are cross-checked against the error-propagation route through the
photocounting moments on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import photostats
from .model import (
    InterferometerParams,
    ParameterError,
    Strategy,
    StrategyKind,
    inefficiency,
    technical_noise_factor,
)

# re-exported: eps^2 belongs to the loss model but is mostly consumed here
__all__ = [
    "SensitivityResult",
    "snl",
    "dphi_min",
    "k_factor",
    "optimal_weight",
    "phase_uncertainty",
    "fwhm",
    "fwhm_approx",
    "apriori_tolerance",
    "small_deviation_dphi_squared",
    "required_r2",
    "implied_inefficiency",
    "inefficiency",
]

# |sin| or |cos| below this counts as an exact singularity of a strategy formula
SINGULARITY_TOL = 1e-12

# closed form vs error propagation, relative
CROSSCHECK_RTOL = 1e-10


def snl(n_photons: float) -> float:
    """Shot-noise-limited phase uncertainty 1/sqrt(N) of an ideal MZI."""
    if not (math.isfinite(n_photons) and n_photons > 0.0):
        raise ParameterError(f"n_photons must be > 0, got {n_photons!r}")
    return 1.0 / math.sqrt(n_photons)


def dphi_min(params: InterferometerParams) -> float:
    """Best attainable phase uncertainty sqrt((e^{-2 r1} + eps^2)/N)."""
    return math.sqrt((math.exp(-2.0 * params.r1) + inefficiency(params)) / params.n_photons)


def k_factor(params: InterferometerParams) -> float:
    """Deterioration coefficient K = (A + eps^2)/N multiplying the working-point
    penalty of every non-optimal strategy."""
    return (technical_noise_factor(params) + inefficiency(params)) / params.n_photons


def optimal_weight(phi: float) -> float:
    """Variance-minimizing weight k = cos(phi) of the N- + k N+ combination.

    Equals -Cov(N+, N-)/Var(N+); the loss and noise factors cancel in the ratio,
    so the weight depends on the phase alone.
    """
    if not math.isfinite(phi):
        raise ParameterError(f"phi must be finite, got {phi!r}")
    return math.cos(phi)


@dataclass(frozen=True)
class SensitivityResult:
    """Phase uncertainty of one strategy at one working point.

    dphi is math.inf exactly at a strategy's singular phases (diagnostic says
    which); normalized = dphi/dphi_snl.  fwhm is the width of the high-
    sensitivity region where defined (None for the flat strategies), k_opt the
    applied weight for the weighted strategies.
    """

    strategy: Strategy
    phi: float
    dphi: float
    dphi_min: float
    dphi_snl: float
    k_factor: float
    eps2: float
    normalized: float
    fwhm: float | None = None
    fwhm_lobes: int | None = None
    k_opt: float | None = None
    diagnostic: str | None = None


def _error_propagation_check(
    strategy: Strategy, params: InterferometerParams, phi: float, dphi: float
) -> None:
    """Recompute dphi as sqrt(Var O)/|d<O>/dphi| and compare.

    Skipped where the derivative vanishes (the ratio is 0/0 there while the
    closed form stays finite)."""
    scale = photostats.transfer_gain(params) ** 2 * params.n_photons
    kind = strategy.kind
    if kind is StrategyKind.SINGLE:
        var_o = photostats.photon_second_moments(params, phi)[0]
        slope = photostats.photon_mean_slopes(params, phi)[0]
    elif kind is StrategyKind.DIFFERENTIAL:
        var_o = photostats.sumdiff_stats(params, phi)[3]
        slope = photostats.sumdiff_mean_slopes(params, phi)[1]
    elif kind is StrategyKind.OPTIMAL:
        var_o = photostats.weighted_variance(params, phi, phi)
        slope = photostats.sumdiff_mean_slopes(params, phi)[1]
    else:
        var_o = photostats.weighted_variance(params, phi, strategy.phi_apr)
        slope = photostats.sumdiff_mean_slopes(params, phi)[1]
    if abs(slope) <= 1e-9 * scale:
        return
    alt = math.sqrt(var_o) / abs(slope)
    if abs(alt - dphi) > CROSSCHECK_RTOL * max(alt, dphi):
        raise photostats.ConsistencyError(
            f"{kind.value} dphi: closed form {dphi!r} vs error propagation {alt!r}"
        )


def phase_uncertainty(
    strategy: Strategy, params: InterferometerParams, phi: float
) -> SensitivityResult:
    """Phase uncertainty of ``strategy`` at working point ``phi``."""
    if not math.isfinite(phi):
        raise ParameterError(f"phi must be finite, got {phi!r}")
    floor = dphi_min(params)
    floor2 = floor * floor
    k = k_factor(params)
    shot = snl(params.n_photons)
    eps2 = inefficiency(params)
    kind = strategy.kind

    diagnostic = None
    width = None
    lobes = None
    k_opt = None

    if kind is StrategyKind.SINGLE:
        c = math.cos(0.5 * phi)
        if abs(c) <= SINGULARITY_TOL:
            dphi = math.inf
            diagnostic = "single-detector read-out diverges at phi = pi (mod 2 pi): the fringe slope vanishes"
        else:
            t = math.tan(0.5 * phi)
            dphi = math.sqrt(floor2 + k * t * t)
        width = fwhm(strategy, params)
        lobes = 1
    elif kind is StrategyKind.DIFFERENTIAL:
        s = math.sin(phi)
        if abs(s) <= SINGULARITY_TOL:
            dphi = math.inf
            diagnostic = "differential read-out diverges at phi = 0 and pi (mod pi): the fringe slope vanishes"
        else:
            cot = math.cos(phi) / s
            dphi = math.sqrt(floor2 + k * cot * cot)
        width = fwhm(strategy, params)
        lobes = 2
    elif kind is StrategyKind.OPTIMAL:
        dphi = floor
        k_opt = optimal_weight(phi)
    elif kind is StrategyKind.SUBOPTIMAL:
        s = math.sin(phi)
        dcos = math.cos(phi) - math.cos(strategy.phi_apr)
        k_opt = math.cos(strategy.phi_apr)
        if abs(s) <= SINGULARITY_TOL:
            if abs(dcos) <= SINGULARITY_TOL:
                # removable singularity: the weight is exactly optimal here
                dphi = floor
            else:
                dphi = math.inf
                diagnostic = (
                    "suboptimal read-out diverges where sin(phi) = 0 unless "
                    "cos(phi_apr) = cos(phi)"
                )
        else:
            dphi = math.sqrt(floor2 + k * (dcos / s) ** 2)
    else:  # pragma: no cover - exhaustive over StrategyKind
        raise ParameterError(f"unknown strategy kind {kind!r}")

    if math.isfinite(dphi):
        _error_propagation_check(strategy, params, phi, dphi)

    return SensitivityResult(
        strategy=strategy,
        phi=phi,
        dphi=dphi,
        dphi_min=floor,
        dphi_snl=shot,
        k_factor=k,
        eps2=eps2,
        normalized=dphi / shot,
        fwhm=width,
        fwhm_lobes=lobes,
        k_opt=k_opt,
        diagnostic=diagnostic,
    )


def fwhm(strategy: Strategy, params: InterferometerParams) -> float:
    """Width of the phase interval where (Delta phi)^2 stays within twice its
    minimum.

    Single: 4 arctan sqrt((e^{-2 r1} + eps^2)/(A + eps^2)), one lobe per 2 pi
    period centered on phi = 0.  Differential: exactly half that, but two lobes
    per period (centered on pi/2 and 3 pi/2), so the total usable phase range
    per period is the same.
    """
    ratio = (math.exp(-2.0 * params.r1) + inefficiency(params)) / (
        technical_noise_factor(params) + inefficiency(params)
    )
    if strategy.kind is StrategyKind.SINGLE:
        return 4.0 * math.atan(math.sqrt(ratio))
    if strategy.kind is StrategyKind.DIFFERENTIAL:
        return 2.0 * math.atan(math.sqrt(ratio))
    raise ValueError(
        "FWHM is defined only for the single-detector and differential "
        f"strategies; the {strategy.kind.value} read-out has a phase-independent "
        "uncertainty"
    )


def fwhm_approx(strategy: Strategy, params: InterferometerParams) -> float:
    """Small-width approximation of :func:`fwhm`: (4 or 2)/sqrt(A) times the
    sensitivity enhancement dphi_min/dphi_snl.  Accurate when eps^2 is small
    against A and the enhancement is strong."""
    if strategy.kind not in (StrategyKind.SINGLE, StrategyKind.DIFFERENTIAL):
        raise ValueError(
            "FWHM is defined only for the single-detector and differential strategies"
        )
    lead = 4.0 if strategy.kind is StrategyKind.SINGLE else 2.0
    enhancement = dphi_min(params) / snl(params.n_photons)
    return lead / math.sqrt(technical_noise_factor(params)) * enhancement


def apriori_tolerance(params: InterferometerParams) -> float:
    """How far the a-priori phase may sit from the true phase before the frozen
    weight doubles (Delta phi)^2: sqrt((e^{-2 r1} + eps^2)/(A + eps^2)).

    Independent of N, and wider than the squeezing-enhanced uncertainty itself
    by a factor sqrt(N) dphi_min, so a previous coarse estimate suffices.
    """
    return math.sqrt(
        (math.exp(-2.0 * params.r1) + inefficiency(params))
        / (technical_noise_factor(params) + inefficiency(params))
    )


def small_deviation_dphi_squared(params: InterferometerParams, dphi_apr: float) -> float:
    """(Delta phi)^2 predicted by the small-deviation law dphi_min^2 + K dphi_apr^2
    for a suboptimal weight frozen dphi_apr away from the true phase."""
    if not math.isfinite(dphi_apr):
        raise ParameterError(f"dphi_apr must be finite, got {dphi_apr!r}")
    floor = dphi_min(params)
    return floor * floor + k_factor(params) * dphi_apr * dphi_apr


def required_r2(mu: float, eta: float, target_eps2: float) -> float | None:
    """Output amplification needed to push eps^2 down to ``target_eps2``.

    Returns 0.0 when the target is already met without amplification, None when
    it is unattainable (below the internal-loss floor (1 - mu)/mu, which no
    amount of output gain can beat).
    """
    if not (0.0 < mu <= 1.0):
        raise ParameterError(f"internal transmissivity must be in (0, 1], got {mu!r}")
    if not (0.0 < eta <= 1.0):
        raise ParameterError(f"external transmissivity must be in (0, 1], got {eta!r}")
    if not (math.isfinite(target_eps2) and target_eps2 >= 0.0):
        raise ParameterError(f"target eps^2 must be >= 0, got {target_eps2!r}")
    floor = (1.0 - mu) / mu
    if eta == 1.0:
        return 0.0 if target_eps2 >= floor else None
    if target_eps2 <= floor:
        return None
    r2 = -0.5 * math.log((target_eps2 - floor) * mu * eta / (1.0 - eta))
    return max(0.0, r2)


def implied_inefficiency(r1: float, gain_db: float) -> float:
    """eps^2 implied by an observed sensitivity gain below the loss-free limit.

    A measured gain of ``gain_db`` dB (amplitude convention) with input squeezing
    r1 means e^{-2 r1} + eps^2 = 10^{-gain_db/10}; solves for eps^2.
    """
    if not math.isfinite(r1) or r1 < 0.0:
        raise ParameterError(f"r1 must be >= 0, got {r1!r}")
    if not math.isfinite(gain_db):
        raise ParameterError(f"gain_db must be finite, got {gain_db!r}")
    eps2 = 10.0 ** (-gain_db / 10.0) - math.exp(-2.0 * r1)
    if eps2 < 0.0:
        raise ParameterError(
            f"a gain of {gain_db} dB exceeds the loss-free limit for r1 = {r1}"
        )
    return eps2
