"""First and second moments of field quadratures along the optical chain.

Quadrature convention: x_c = (a + a^dag)/sqrt(2), x_s = (a - a^dag)/(i sqrt(2)),
so vacuum has variance 1/2 in both.  The chain is linear throughout: symmetric
beamsplitter -> opposite arm phases +/- phi/2 with internal loss mu -> symmetric
recombining beamsplitter -> phase-sensitive amplifiers e^{+/- r2} -> external
loss eta.  The bright input sits on the c quadrature (alpha real), the squeezed
vacuum enters the other port with its squeezed axis along s.

Internal losses of both arms enter only through the symmetric/antisymmetric
vacuum combinations m_+/- = (m_1 +/- m_2)/sqrt(2), which are again independent
vacua; the external loss ports n_1, n_2 stay separate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import InterferometerParams, ParameterError, technical_noise_factor

PSD_TOL = 1e-10

# noise sources feeding the interferometer core, in the column order used by
# the coefficient matrix of core_noise_covariance
CORE_SOURCES = ("a1c", "a1s", "z2c", "z2s", "m_plus_c", "m_plus_s", "m_minus_c", "m_minus_s")

CORE_LABELS = ("e1c", "e1s", "e2c", "e2s")
DETECTOR_LABELS = ("g1s", "g2c")
DETECTOR_LABELS_EXTENDED = ("g1c", "g1s", "g2c", "g2s")


@dataclass(frozen=True)
class QuadratureStats:
    """Mean vector and covariance matrix of a set of labeled quadratures."""

    labels: tuple[str, ...]
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        n = len(self.labels)
        if mean.shape != (n,):
            raise ValueError(f"mean shape {mean.shape} does not match {n} labels")
        if cov.shape != (n, n):
            raise ValueError(f"cov shape {cov.shape} does not match {n} labels")
        scale = max(1.0, float(np.max(np.abs(cov))) if n else 1.0)
        if not np.allclose(cov, cov.T, rtol=0.0, atol=PSD_TOL * scale):
            raise ValueError("covariance matrix is not symmetric")
        if n and float(np.linalg.eigvalsh(cov).min()) < -PSD_TOL * scale:
            raise ValueError("covariance matrix is not positive semidefinite")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def _index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown quadrature label {label!r}") from None

    def mean_of(self, label: str) -> float:
        return float(self.mean[self._index(label)])

    def variance(self, label: str) -> float:
        i = self._index(label)
        return float(self.cov[i, i])

    def covariance(self, label_a: str, label_b: str) -> float:
        return float(self.cov[self._index(label_a), self._index(label_b)])


@dataclass(frozen=True)
class InputNoiseSpec:
    """Variances of the independent input noise quadratures.

    var_a1s   squeezed quadrature of the squeezer output, e^{-2 r1}/2
    var_a1c   anti-squeezed quadrature, e^{+2 r1}/2 for a minimum-uncertainty state
    var_z2c   amplitude (excess) noise of the bright input, A/2
    var_z2s   phase noise of the bright input; vacuum-level 1/2 by default (it
              never enters the measured linearized observables)
    vacuum    variance of every loss port, 1/2
    """

    var_a1s: float
    var_a1c: float
    var_z2c: float
    var_z2s: float = 0.5
    vacuum: float = 0.5

    def __post_init__(self) -> None:
        for name in ("var_a1s", "var_a1c", "var_z2c", "var_z2s", "vacuum"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0.0):
                raise ParameterError(f"{name} must be a finite variance >= 0, got {v!r}")
        # Heisenberg: the squeezer output must satisfy the uncertainty relation
        if self.var_a1s * self.var_a1c < 0.25 * (1.0 - 1e-12):
            raise ParameterError(
                "var_a1s * var_a1c must be >= 1/4 (uncertainty relation), got "
                f"{self.var_a1s * self.var_a1c}"
            )

    @classmethod
    def from_params(cls, params: InterferometerParams, var_z2s: float = 0.5) -> "InputNoiseSpec":
        return cls(
            var_a1s=0.5 * math.exp(-2.0 * params.r1),
            var_a1c=0.5 * math.exp(2.0 * params.r1),
            var_z2c=0.5 * technical_noise_factor(params),
            var_z2s=var_z2s,
        )


def _noise_or_default(params: InterferometerParams, noise: InputNoiseSpec | None) -> InputNoiseSpec:
    return InputNoiseSpec.from_params(params) if noise is None else noise


def core_output_means(params: InterferometerParams, phi: float) -> tuple[float, float]:
    """Mean signal quadratures at the recombining beamsplitter outputs.

    Returns (<e1s>, <e2c>) = sqrt(2 mu) alpha (sin(phi/2), cos(phi/2)); the
    orthogonal quadratures e1c, e2s have zero mean.
    """
    amp = math.sqrt(2.0 * params.mu) * params.alpha
    return amp * math.sin(0.5 * phi), amp * math.cos(0.5 * phi)


def _core_coefficients(mu: float, phi: float) -> np.ndarray:
    """Coefficients of the core output fluctuations over CORE_SOURCES.

    Rows are (de1c, de1s, de2c, de2s).  Obtained by pushing the input noise
    operators through beamsplitter -> +/- phi/2 rotations -> loss -> beamsplitter;
    the two arm phases collapse into cos/sin(phi/2) couplings between the
    squeezer and bright-port noise.
    """
    c = math.cos(0.5 * phi)
    s = math.sin(0.5 * phi)
    t = math.sqrt(mu)
    l = math.sqrt(1.0 - mu)
    # columns: a1c, a1s, z2c, z2s, m+c, m+s, m-c, m-s
    return np.array(
        [
            [t * c, 0.0, 0.0, -t * s, l, 0.0, 0.0, 0.0],
            [0.0, t * c, t * s, 0.0, 0.0, l, 0.0, 0.0],
            [0.0, -t * s, t * c, 0.0, 0.0, 0.0, l, 0.0],
            [t * s, 0.0, 0.0, t * c, 0.0, 0.0, 0.0, l],
        ]
    )


def _core_source_variances(noise: InputNoiseSpec) -> np.ndarray:
    return np.array(
        [
            noise.var_a1c,
            noise.var_a1s,
            noise.var_z2c,
            noise.var_z2s,
            noise.vacuum,
            noise.vacuum,
            noise.vacuum,
            noise.vacuum,
        ]
    )


def core_noise_covariance(
    params: InterferometerParams, phi: float, noise: InputNoiseSpec | None = None
) -> QuadratureStats:
    """Covariance of the four fluctuation quadratures (e1c, e1s, e2c, e2s).

    Built as B diag(v) B^T from the source coefficient matrix, so positive
    semidefiniteness is structural.  Means are zero by construction (the
    fluctuations are defined about the signal)."""
    noise = _noise_or_default(params, noise)
    b = _core_coefficients(params.mu, phi)
    v = _core_source_variances(noise)
    cov = (b * v) @ b.T
    return QuadratureStats(labels=CORE_LABELS, mean=np.zeros(4), cov=cov)


def _core_variances_scalar(
    params: InterferometerParams, phi: float, noise: InputNoiseSpec
) -> dict[str, float]:
    """Scalar closed forms for the core second moments (independent of the
    matrix route above; the two are compared in tests)."""
    c2 = math.cos(0.5 * phi) ** 2
    s2 = math.sin(0.5 * phi) ** 2
    sc = math.sin(0.5 * phi) * math.cos(0.5 * phi)
    mu = params.mu
    leak = (1.0 - mu) * noise.vacuum
    return {
        "var_e1c": mu * (noise.var_a1c * c2 + noise.var_z2s * s2) + leak,
        "var_e1s": mu * (noise.var_a1s * c2 + noise.var_z2c * s2) + leak,
        "var_e2c": mu * (noise.var_a1s * s2 + noise.var_z2c * c2) + leak,
        "var_e2s": mu * (noise.var_a1c * s2 + noise.var_z2s * c2) + leak,
        "cov_e1s_e2c": mu * sc * (noise.var_z2c - noise.var_a1s),
        "cov_e1c_e2s": mu * sc * (noise.var_a1c - noise.var_z2s),
    }


def detector_field_stats(
    params: InterferometerParams,
    phi: float,
    noise: InputNoiseSpec | None = None,
    extended: bool = False,
) -> QuadratureStats:
    """Moments of the quadratures reaching the detectors.

    Default: the two measured quadratures (g1s, g2c), amplified by e^{r2} and
    attenuated by the external loss.  With ``extended=True`` the deamplified
    orthogonal pair (g1c, g2s) is included, which fixes the full Gaussian state
    of the detected modes.
    """
    noise = _noise_or_default(params, noise)
    core = _core_variances_scalar(params, phi, noise)
    m1s, m2c = core_output_means(params, phi)
    eta = params.eta
    amp2 = eta * math.exp(2.0 * params.r2)
    deamp2 = eta * math.exp(-2.0 * params.r2)
    leak = (1.0 - eta) * noise.vacuum
    gain = math.sqrt(eta) * math.exp(params.r2)

    var_g1s = amp2 * core["var_e1s"] + leak
    var_g2c = amp2 * core["var_e2c"] + leak
    cov_sig = amp2 * core["cov_e1s_e2c"]
    mean_g1s = gain * m1s
    mean_g2c = gain * m2c

    if not extended:
        cov = np.array([[var_g1s, cov_sig], [cov_sig, var_g2c]])
        return QuadratureStats(DETECTOR_LABELS, np.array([mean_g1s, mean_g2c]), cov)

    var_g1c = deamp2 * core["var_e1c"] + leak
    var_g2s = deamp2 * core["var_e2s"] + leak
    cov_orth = deamp2 * core["cov_e1c_e2s"]
    # amplification keeps c and s uncorrelated, so the only nonzero cross terms
    # pair like quadratures of opposite ports
    cov = np.array(
        [
            [var_g1c, 0.0, 0.0, cov_orth],
            [0.0, var_g1s, cov_sig, 0.0],
            [0.0, cov_sig, var_g2c, 0.0],
            [cov_orth, 0.0, 0.0, var_g2s],
        ]
    )
    mean = np.array([0.0, mean_g1s, mean_g2c, 0.0])
    return QuadratureStats(DETECTOR_LABELS_EXTENDED, mean, cov)


def amplification_loss_map(params: InterferometerParams) -> tuple[np.ndarray, np.ndarray]:
    """Linear map from (e1c, e1s, e2c, e2s, n1c, n1s, n2c, n2s) to the detected
    quadratures (g1c, g1s, g2c, g2s), split as (matrix on core, matrix on loss
    ports).  Used to check that detector_field_stats composes the core stats
    with this map."""
    g = math.exp(params.r2)
    t = math.sqrt(params.eta)
    l = math.sqrt(1.0 - params.eta)
    core = t * np.diag([1.0 / g, g, g, 1.0 / g])
    ports = l * np.eye(4)
    return core, ports
