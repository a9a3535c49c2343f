from __future__ import annotations

import pytest

from varcalc.corpus import (
    free_particle,
    harmonic_oscillator,
    kdv_like,
    maxwell_like,
    wave_equation,
)


@pytest.fixture(scope="session")
def oscillator():
    return harmonic_oscillator()


@pytest.fixture(scope="session")
def particle():
    return free_particle()


@pytest.fixture(scope="session")
def wave():
    return wave_equation()


@pytest.fixture(scope="session")
def kdv():
    return kdv_like()


@pytest.fixture(scope="session")
def maxwell():
    return maxwell_like()
