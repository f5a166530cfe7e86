import numpy as np
import pytest

from tomosense.states import CatParams, SqueezeParams, StateSpec


def svs_spec(r=0.5, m=0, phi=0.0, tail_tol=1e-12):
    return StateSpec("svs", SqueezeParams(r, phi), m, tail_tol)


def ecs_spec(alpha=1.8, m=0, tail_tol=1e-12):
    return StateSpec("cat-even", CatParams(alpha), m, tail_tol)


def ocs_spec(alpha=1.8, tail_tol=1e-12):
    return StateSpec("cat-odd", CatParams(alpha), 0, tail_tol)


def align_global_phase(a: np.ndarray, b: np.ndarray):
    """Pad two amplitude vectors to equal length and rotate a onto b's phase."""
    k = max(len(a), len(b))
    aa = np.zeros(k, dtype=complex)
    bb = np.zeros(k, dtype=complex)
    aa[: len(a)] = a
    bb[: len(b)] = b
    i = int(np.argmax(np.abs(aa)))
    rot = bb[i] / aa[i]
    return aa * (rot / abs(rot)), bb


@pytest.fixture(scope="session")
def default_r():
    """The toolkit-default squeezing magnitude, 1/sqrt(2)."""
    return 1.0 / np.sqrt(2.0)
