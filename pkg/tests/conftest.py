import numpy as np
import pytest

from rydress import DressingParams, LockMode


@pytest.fixture
def quiet_params():
    """Noise-free dressing at omega2 = 2 delta, the plain plateau regime."""
    return DressingParams.from_mhz(omega1=1.0, omega2=20.0, delta=10.0)


@pytest.fixture
def noisy_params():
    """Equal laser linewidths at 10x the intermediate decay, unlocked."""
    return DressingParams.from_mhz(omega1=1.0, omega2=20.0, delta=10.0,
                                   gamma1=0.076, gamma2=0.076, lock="unlocked")


@pytest.fixture
def blue_params():
    """Strong-noise locked profile with core, barrier and well."""
    return DressingParams.from_mhz(omega1=0.33, omega2=6.0, delta=10.0,
                                   gamma1=7.6, gamma2=7.6, lock="out_of_phase")


@pytest.fixture
def red_params():
    """Moderate-noise locked profile whose outer well sits on the outer peak."""
    return DressingParams.from_mhz(omega1=0.45, omega2=10.0, delta=2.0,
                                   gamma1=0.76, gamma2=0.76, lock="out_of_phase")


def random_params(rng: np.random.Generator) -> DressingParams:
    """A physically sensible random parameter set for property tests."""
    delta = rng.uniform(2.0, 15.0) * (1 if rng.random() < 0.5 else -1)
    ratio = rng.uniform(0.3, 2.5)
    lock = LockMode.unlocked() if rng.random() < 0.5 else LockMode.out_of_phase()
    return DressingParams.from_mhz(
        omega1=rng.uniform(0.1, 2.0),
        omega2=2.0 * abs(delta) * ratio,
        delta=delta,
        gamma1=10 ** rng.uniform(-3, 0.5),
        gamma2=10 ** rng.uniform(-3, 0.5),
        lock=lock,
        gamma_p=7.6e-3,
        gamma_r=5e-4,
    )
