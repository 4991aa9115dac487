"""Open-loop capacitive sensor: closed-form noise coefficients and spectrum.

The proof-mass velocity and the normalized force estimator are linear
combinations of the incoming noise fields,

    Xi_m V_fr = F_ext + sum_a lambda_a a_in
    F_hat     = F_ext + sum_a mu_a a_in

over the nine lines m, a1, a2, b1, b2, r1, r2, l1, l2.  The added force
noise spectrum is Sigma_FF = sum_a |mu_a|^2 sigma_a with the mechanical
spectrum evaluated at the signal frequency Omega and the electrical
quadrature spectra at the carrier omega_t.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .constants import HBAR, K_B
from .noise import LINE_LABELS, NoiseLine, effective_temperature, input_spectrum, quadrature_spectrum
from .params import InstrumentParams


@dataclass(frozen=True)
class CoefficientSet:
    """Complex coefficient per noise line, N per unit dimensionless field.

    Every one of the nine canonical labels is present; structural zeros
    are stored explicitly.
    """

    coefficients: dict[str, complex]

    def __post_init__(self):
        missing = set(LINE_LABELS) - set(self.coefficients)
        extra = set(self.coefficients) - set(LINE_LABELS)
        if missing or extra:
            raise ValueError(f"coefficient set must carry exactly {LINE_LABELS}; "
                             f"missing {sorted(missing)}, extra {sorted(extra)}")

    def __getitem__(self, label: str) -> complex:
        return self.coefficients[label]

    def as_tuple(self) -> tuple[complex, ...]:
        return tuple(self.coefficients[label] for label in LINE_LABELS)

    def max_rel_diff(self, other: "CoefficientSet") -> float:
        """Entry-wise relative deviation with a small-entry floor.

        Entries below 1e-6 of the row scale (including structural zeros)
        are compared against the row scale instead of themselves:
        double-precision linear algebra cannot resolve such entries
        relative to their own magnitude, and for zeros the meaningful
        statement is smallness relative to the row.
        """
        scale = max(abs(c) for c in self.as_tuple())
        worst = 0.0
        for mine, theirs in zip(self.as_tuple(), other.as_tuple()):
            denom = abs(mine) if abs(mine) >= 1e-6 * scale else scale
            worst = max(worst, abs(mine - theirs) / denom)
        return worst


@dataclass(frozen=True)
class SpectrumBreakdown:
    """Total added force noise and its named components, N^2/Hz.

    interference is signed; the other components are non-negative.  The
    total always equals the component sum to machine precision.
    """

    total: float
    langevin: float
    back_action: float
    sensing: float
    interference: float


def mechanical_impedance(p: InstrumentParams, omega: float) -> complex:
    """Free-running mechanical impedance H_m - i M Omega + i K / Omega, kg/s."""
    if omega == 0.0:
        raise ValueError("mechanical impedance diverges at zero frequency")
    return p.H_m_at(omega) - 1j * p.M * omega + 1j * p.K_at(omega) / omega


def transducer_impedance(p: InstrumentParams, omega: float) -> complex:
    """Electrical impedance of the detuned transducer mode, ohm (imaginary)."""
    return p.z_t(omega)


def free_mass_coefficients(p: InstrumentParams, omega: float) -> CoefficientSet:
    """Velocity noise coefficients lambda of the free-running mass.

    Only the mechanical Langevin term and the amplifier voltage-noise
    back action survive; the six remaining entries are structural zeros.
    """
    if omega == 0.0:
        raise ValueError("frequency must be nonzero")
    lam_m = -math.sqrt(2.0 * HBAR * abs(omega) * p.H_m_at(omega))
    lam_a1 = -math.sqrt(2.0 * HBAR * p.omega_t * p.R_a) * p.kappa_t
    coeffs = {label: 0j for label in LINE_LABELS}
    coeffs["m"] = complex(lam_m)
    coeffs["a1"] = complex(lam_a1)
    coeffs["b1"] = complex(-lam_a1)
    return CoefficientSet(coeffs)


def estimator_coefficients(p: InstrumentParams, omega: float) -> CoefficientSet:
    """Force-estimator noise coefficients mu of the open-loop sensor.

    The mechanical term and the back action are those of the velocity;
    every additional term is proportional to Xi_m and represents the
    sensing error added by the electrical detection chain.
    """
    if omega == 0.0:
        raise ValueError("frequency must be nonzero")
    if p.kappa_t == 0.0:
        raise ValueError("the force estimator is undefined without electromechanical coupling")
    xi_m = mechanical_impedance(p, omega)
    z_f = p.z_f
    z_t = p.z_t(omega)
    kt = p.kappa_t
    wt = p.omega_t

    lam = free_mass_coefficients(p, omega)
    mu_a1 = lam["a1"] + math.sqrt(2.0 * HBAR * p.R_a * wt) * omega * xi_m / (2.0 * kt * wt * z_f)
    sens_2 = -1j * omega * math.sqrt(HBAR * p.R_a / (2.0 * wt)) * xi_m / kt
    coeffs = {
        "m": lam["m"],
        "a1": mu_a1,
        "b1": -mu_a1,
        "a2": sens_2 * (1.0 / p.R_a - 1.0 / p.R_l - 1.0 / z_t),
        "b2": sens_2 * (1.0 / p.R_a + 1.0 / p.R_l + 1.0 / z_t),
        "r1": -math.sqrt(HBAR * p.R_r / (2.0 * wt)) * omega * xi_m / (2.0 * kt * z_f),
        "r2": 0j,
        "l1": 0j,
        "l2": -1j * omega * math.sqrt(HBAR / (2.0 * p.R_l * wt)) * xi_m / kt,
    }
    return CoefficientSet(coeffs)


def noise_lines(p: InstrumentParams) -> dict[str, NoiseLine]:
    """The nine noise lines with their impedances and temperatures."""
    lines = {"m": NoiseLine("m", p.H_m, p.T_m)}
    for label in ("a1", "a2"):
        lines[label] = NoiseLine(label, p.R_a, p.T_a)
    for label in ("b1", "b2"):
        lines[label] = NoiseLine(label, p.R_a, p.T_a, conjugated=True)
    for label in ("r1", "r2"):
        lines[label] = NoiseLine(label, p.R_r, p.T_r)
    for label in ("l1", "l2"):
        lines[label] = NoiseLine(label, p.R_l, p.T_l)
    return lines


def line_spectra(p: InstrumentParams, omega: float) -> dict[str, float]:
    """Input spectrum per line: mechanical at Omega, electrical at omega_t.

    The split is fixed here once rather than inferred per call site.
    """
    lines = noise_lines(p)
    spectra = {"m": input_spectrum(lines["m"], omega)}
    for label in LINE_LABELS[1:]:
        spectra[label] = quadrature_spectrum(lines[label], p.omega_t)
    return spectra


def coefficient_sum(coeffs: CoefficientSet, spectra: dict[str, float]) -> float:
    """The quadratic noise sum sum_a |c_a|^2 sigma_a."""
    return sum(abs(coeffs[label]) ** 2 * spectra[label] for label in LINE_LABELS)


def sensor_noise_spectrum(p: InstrumentParams, omega: float) -> SpectrumBreakdown:
    """Added force noise spectrum of the open-loop sensor, decomposed.

    The total is the direct quadratic sum over the mu coefficients; the
    named components are the closed forms for the mechanical Langevin
    noise, the amplifier back action, the sensing error and the signed
    interference between back action and sensing.
    """
    mu = estimator_coefficients(p, omega)
    total = coefficient_sum(mu, line_spectra(p, omega))

    k_theta_m = effective_temperature(p.T_m, omega)
    k_theta_a = effective_temperature(p.T_a, p.omega_t)
    k_theta_l = effective_temperature(p.T_l, p.omega_t)
    k_theta_r = effective_temperature(p.T_r, p.omega_t)

    h_m = p.H_m_at(omega)
    kt2 = p.kappa_t**2
    zf_mag = p.zf_mag
    y_lt = abs(1.0 / p.R_l + 1.0 / p.z_t(omega)) ** 2

    langevin = 2.0 * h_m * k_theta_m
    back_action = 8.0 * p.R_a * kt2 * k_theta_a
    ratio = abs(mechanical_impedance(p, omega)) ** 2 * omega**2 / (p.omega_t**2 * kt2)
    sensing = ratio * (
        k_theta_l / p.R_l
        + p.R_r * k_theta_r / (4.0 * zf_mag**2)
        + 2.0 * p.R_a * k_theta_a * (1.0 / zf_mag**2 + 1.0 / p.R_a**2 + y_lt)
    )
    delta = p.delta(omega)
    interference = -8.0 * (p.R_a / zf_mag) * (omega / p.omega_t) * delta * h_m * k_theta_a

    return SpectrumBreakdown(
        total=total,
        langevin=langevin,
        back_action=back_action,
        sensing=sensing,
        interference=interference,
    )
