import json

import numpy as np
import pytest

from app.core.model_library import build_jc, build_jc_dephasing, build_tc2
from app.core.spectral_solver import full_eigensystem

JC_PARAMS = {"g": 1.0, "delta": 0.3, "kappa": 0.5, "gamma": 0.2}
TC_PARAMS = {"g1": 1.0, "g2": 0.7, "delta1": 0.3, "delta2": -0.2, "gamma1": 0.2, "gamma2": 0.35, "kappa": 0.5}
SYMMETRIC_JC = {"g": 1.0, "delta": 0.0, "kappa": 1.0, "gamma": 1.0}


@pytest.fixture(scope="session")
def jc_model():
    return build_jc(N=3, **JC_PARAMS)


@pytest.fixture(scope="session")
def jc_system(jc_model):
    return full_eigensystem(jc_model)


@pytest.fixture(scope="session")
def tc_model():
    return build_tc2(N=3, **TC_PARAMS)


@pytest.fixture(scope="session")
def tc_system(tc_model):
    return full_eigensystem(tc_model)


@pytest.fixture(scope="session")
def dephasing_model():
    return build_jc_dephasing(gamma_z=0.15, N=3, **JC_PARAMS)


@pytest.fixture(scope="session")
def dephasing_system(dephasing_model):
    return full_eigensystem(dephasing_model)


@pytest.fixture(scope="session")
def symmetric_jc_system():
    return full_eigensystem(build_jc(N=2, **SYMMETRIC_JC))


def projector(dim: int, index: int) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=complex)
    rho[index, index] = 1.0
    return rho


@pytest.fixture
def write_config(tmp_path):
    def _write(payload: dict, name: str = "run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write
