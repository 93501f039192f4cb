import numpy as np
import pytest

from upbkit import (
    ShiftsParams,
    build_upb_witness,
    certify_unextendible,
    seesaw_max_product_overlap,
    shifts_family,
    upb_state,
)

CERT_SEED = 20240801
CERT_RESTARTS = 256


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


@pytest.fixture(scope="session")
def pi4_params():
    return ShiftsParams(np.pi / 4, np.pi / 4, np.pi / 4)


@pytest.fixture(scope="session")
def pi4_upb(pi4_params):
    return shifts_family(pi4_params)


@pytest.fixture(scope="session")
def pi4_state(pi4_upb):
    return upb_state(pi4_upb)


@pytest.fixture(scope="session")
def pi4_cert(pi4_upb):
    return certify_unextendible(pi4_upb, restarts=CERT_RESTARTS, seed=CERT_SEED)


@pytest.fixture(scope="session")
def pi4_witness(pi4_upb, pi4_cert):
    return build_upb_witness(pi4_upb, pi4_cert)


@pytest.fixture(scope="session")
def ten_seed_certs(pi4_upb):
    """Certificates at 256 restarts for ten distinct seeds (stability checks)."""
    proj = pi4_upb.complement_projector()
    return [
        seesaw_max_product_overlap(proj, pi4_upb.parts, restarts=CERT_RESTARTS, seed=seed)
        for seed in range(10)
    ]
