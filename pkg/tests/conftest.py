import numpy as np
import pytest

from neqfridge import ModelParams

# canonical benchmark point used throughout the suite
P0 = ModelParams(e1=1.0, e3=4.0, gamma=0.3, t1=4.0 / 3.0, t2=2.0, t3=4.0, p=0.01, g=0.01)


def random_feasible(rng: np.random.Generator) -> ModelParams:
    """Draw a random parameter point in the fridge operating regime."""
    e1 = rng.uniform(0.5, 2.0)
    t1 = rng.uniform(0.5, 2.0)
    t2 = t1 + rng.uniform(0.0, 2.0)
    t3 = t2 + rng.uniform(0.0, 4.0)
    return ModelParams(
        e1=e1,
        e3=rng.uniform(2.0, 8.0),
        gamma=rng.uniform(0.0, 0.49) * e1,
        t1=t1,
        t2=t2,
        t3=t3,
        p=rng.uniform(0.002, 0.03),
        g=rng.uniform(0.002, 0.03),
    )


def random_hermitian(rng: np.random.Generator, dim: int = 8) -> np.ndarray:
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (raw + raw.conj().T)


@pytest.fixture
def p0() -> ModelParams:
    return P0
