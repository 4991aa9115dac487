import math

import pytest

from coldamp.params import InstrumentParams

REFERENCE_OMEGA = 2.0 * math.pi * 5e-4


@pytest.fixture(scope="session")
def reference_params() -> InstrumentParams:
    """The shipped design point, built directly from the quoted magnitudes."""
    return InstrumentParams.from_magnitudes(
        M=0.27, K=4e-6, H_m=1.3e-5,
        kappa_t=1e-7, omega_t=2.0 * math.pi * 1e5,
        R_l=2.5e5, R_r=50.0, R_a=1.5e5,
        Zf_mag=1.6e5, Zt_mag=1e14, omega_ref=REFERENCE_OMEGA,
        T_m=300.0, T_a=1.5, T_l=300.0, T_r=300.0,
    )


@pytest.fixture(scope="session")
def reference_omega() -> float:
    return REFERENCE_OMEGA
