"""Parameter types and shared conventions for the squeezed-light interferometer.

The device: a Mach-Zehnder interferometer fed by a bright laser on one port and
squeezed vacuum on the other, with a phase-sensitive amplifier on each output
port and direct photocounting behind them.  Conventions used throughout the
package: phases in radians, squeeze factors as natural-log amplitude gains
(decibels appear only at the CLI boundary), quadrature vacuum variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

LN10 = math.log(10.0)


class ParameterError(ValueError):
    """A parameter set violates its physical domain."""


def db_to_squeeze_factor(db: float) -> float:
    """Convert squeezing in dB (variance convention, 10*log10 e^{2r}) to the factor r."""
    if not math.isfinite(db):
        raise ParameterError(f"squeezing in dB must be finite, got {db!r}")
    return db * LN10 / 20.0


def squeeze_factor_to_db(r: float) -> float:
    """Inverse of :func:`db_to_squeeze_factor`."""
    if not math.isfinite(r):
        raise ParameterError(f"squeeze factor must be finite, got {r!r}")
    return 20.0 * r / LN10


def _check(ok: bool, msg: str, errors: list[str]) -> None:
    if not ok:
        errors.append(msg)


@dataclass(frozen=True)
class InterferometerParams:
    """Physical knobs of one interferometer configuration.

    r1          amplitude squeeze factor of the input squeezer (>= 0)
    r2          amplitude gain of the two output amplifiers, shared (>= 0)
    mu          internal power transmissivity of each arm, in (0, 1]
    eta         external transmissivity incl. detector efficiency, in (0, 1]
    n_photons   mean photon number N = alpha^2 of the bright input (> 0)
    g2          degree of second-order coherence of the bright input (>= 1)
    """

    r1: float = 0.0
    r2: float = 0.0
    mu: float = 1.0
    eta: float = 1.0
    n_photons: float = 1e6
    g2: float = 1.0

    def __post_init__(self) -> None:
        validate(self)

    @classmethod
    def with_technical_noise(
        cls,
        technical_noise: float,
        *,
        r1: float = 0.0,
        r2: float = 0.0,
        mu: float = 1.0,
        eta: float = 1.0,
        n_photons: float = 1e6,
    ) -> "InterferometerParams":
        """Build params from the excess-noise factor A = N(g2 - 1) + 1 instead of g2."""
        if not math.isfinite(technical_noise) or technical_noise < 1.0:
            raise ParameterError(
                f"technical noise factor must be >= 1, got {technical_noise!r}"
            )
        if not (math.isfinite(n_photons) and n_photons > 0.0):
            raise ParameterError(f"n_photons must be > 0, got {n_photons!r}")
        g2 = 1.0 + (technical_noise - 1.0) / n_photons
        return cls(r1=r1, r2=r2, mu=mu, eta=eta, n_photons=n_photons, g2=g2)

    @property
    def alpha(self) -> float:
        """Coherent amplitude alpha = sqrt(N), taken real and positive."""
        return math.sqrt(self.n_photons)


def validate(params: InterferometerParams) -> None:
    """Raise :class:`ParameterError` listing every domain violation in ``params``."""
    errors: list[str] = []
    for name in ("r1", "r2", "mu", "eta", "n_photons", "g2"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            errors.append(f"{name} must be a finite number, got {value!r}")
    if not errors:
        _check(params.r1 >= 0.0, f"squeeze factor r1 must be >= 0, got {params.r1}", errors)
        _check(params.r2 >= 0.0, f"amplifier gain r2 must be >= 0, got {params.r2}", errors)
        _check(params.mu > 0.0, f"internal transmissivity must be > 0, got {params.mu}", errors)
        _check(params.mu <= 1.0, f"internal transmissivity must be <= 1, got {params.mu}", errors)
        _check(params.eta > 0.0, f"external transmissivity must be > 0, got {params.eta}", errors)
        _check(params.eta <= 1.0, f"external transmissivity must be <= 1, got {params.eta}", errors)
        _check(params.n_photons > 0.0, f"n_photons must be > 0, got {params.n_photons}", errors)
        _check(params.g2 >= 1.0, f"g2 must be >= 1, got {params.g2}", errors)
    if errors:
        raise ParameterError("; ".join(errors))


def technical_noise_factor(params: InterferometerParams) -> float:
    """Excess photon-number noise of the bright input, A = N(g2 - 1) + 1.

    A = 1 for an ideal coherent state; super-Poissonian lasers have A > 1 and
    A approaches N(g2 - 1) when that product is large.
    """
    return params.n_photons * (params.g2 - 1.0) + 1.0


def inefficiency(params: InterferometerParams) -> float:
    """Combined quantum inefficiency eps^2 of the loss chain.

    eps^2 = (1 - mu)/mu + (1 - eta)/(mu eta) e^{-2 r2}: internal loss enters
    raw, external loss is suppressed by the output amplification.
    """
    return (1.0 - params.mu) / params.mu + (1.0 - params.eta) / (
        params.mu * params.eta
    ) * math.exp(-2.0 * params.r2)


@dataclass(frozen=True)
class PhaseConfig:
    """A working point: interferometer phase and the a-priori estimate of it."""

    phi: float
    phi_apr: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.phi):
            raise ParameterError(f"phi must be finite, got {self.phi!r}")
        if not math.isfinite(self.phi_apr):
            raise ParameterError(f"phi_apr must be finite, got {self.phi_apr!r}")


class StrategyKind(Enum):
    SINGLE = "single"
    DIFFERENTIAL = "differential"
    OPTIMAL = "optimal"
    SUBOPTIMAL = "suboptimal"


@dataclass(frozen=True)
class Strategy:
    """Read-out strategy: which photocurrent combination estimates the phase.

    single        one detector, observable N1
    differential  difference N- = N1 - N2
    optimal       weighted sum N- + k N+ with the variance-minimizing k = cos(phi)
    suboptimal    weighted sum with k = cos(phi_apr) frozen at an a-priori phase
    """

    kind: StrategyKind
    phi_apr: float | None = None

    def __post_init__(self) -> None:
        if self.kind is StrategyKind.SUBOPTIMAL:
            if self.phi_apr is None or not math.isfinite(self.phi_apr):
                raise ParameterError(
                    f"suboptimal strategy needs a finite phi_apr, got {self.phi_apr!r}"
                )
        elif self.phi_apr is not None:
            raise ParameterError(f"{self.kind.value} strategy takes no phi_apr")

    @classmethod
    def single(cls) -> "Strategy":
        return cls(StrategyKind.SINGLE)

    @classmethod
    def differential(cls) -> "Strategy":
        return cls(StrategyKind.DIFFERENTIAL)

    @classmethod
    def optimal(cls) -> "Strategy":
        return cls(StrategyKind.OPTIMAL)

    @classmethod
    def suboptimal(cls, phi_apr: float) -> "Strategy":
        return cls(StrategyKind.SUBOPTIMAL, phi_apr=phi_apr)
