import json
import os

import numpy as np
import pytest

ORACLE_PATH = os.path.join(os.path.dirname(__file__), "oracles", "ml_oracle.json")


@pytest.fixture(scope="session")
def oracle():
    """Frozen arbitrary-precision reference values (see oracles/generate_ml_oracle.py)."""
    with open(ORACLE_PATH) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def oracle_ml_one(oracle):
    """(alpha, z) -> reference value."""
    return {(e["alpha"], e["z"]): float(e["value"]) for e in oracle["ml_one"]}


@pytest.fixture(scope="session")
def oracle_ml_two_shifted(oracle):
    """(alpha, z) -> reference E_{a,a+1}(z)."""
    return {(e["alpha"], e["z"]): float(e["value"]) for e in oracle["ml_two_shifted"]}


@pytest.fixture(scope="session")
def oracle_scalars(oracle):
    return {k: float(v) for k, v in oracle["scalars"].items()}


def make_linear_ocv(v0=3.2, v1=4.0, lo=0.0, hi=1.0, n=21):
    from fracbatt.ocv import OCVTable
    soc = np.linspace(lo, hi, n)
    return OCVTable(soc, v0 + (v1 - v0) * (soc - lo) / (hi - lo))


@pytest.fixture
def linear_ocv():
    return make_linear_ocv()
