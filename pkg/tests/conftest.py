import numpy as np
import pytest

from nodalqmc.configuration import random_positions
from nodalqmc.wavefunction import (
    build_be_hf,
    build_be_two_config,
    build_hydrogenic,
    build_li_rhf,
    load_shipped,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sample_positions(rng, n_electrons, size, scale=1.5):
    return random_positions(rng, n_electrons, scale, size=size)


@pytest.fixture(scope="session")
def he_triplet():
    return load_shipped("he_triplet")


@pytest.fixture(scope="session")
def li_rhf():
    return load_shipped("li_rhf")


@pytest.fixture(scope="session")
def be_hf():
    return load_shipped("be_hf")


@pytest.fixture(scope="session")
def be_two_config():
    return load_shipped("be_two_config")


@pytest.fixture(scope="session")
def plain_wavefunctions():
    """Jastrow-free CI functions of each layout."""
    return {
        "li_rhf": build_li_rhf(3.0, 1.0),
        "be_hf": build_be_hf(4.0, 1.4),
        "be_two_config": build_be_two_config(0.1, 4.0, 1.4, 1.2),
        "hydrogenic": build_hydrogenic(1),
    }


def fd_step(pos, h_max=1e-3):
    """Finite-difference step that stays well inside the cusp region of the closest pair.

    The 5-point error grows like (h / d)^4 with d the smallest electron-nucleus
    or electron-electron distance, so h is capped at d / 50.
    """
    r = np.linalg.norm(pos, axis=-1)
    d = [r.min()]
    if len(pos) > 1:
        iu = np.triu_indices(len(pos), 1)
        d.append(np.linalg.norm(pos[:, None] - pos[None], axis=-1)[iu].min())
    return min(h_max, min(d) / 50)
