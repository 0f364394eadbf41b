import numpy as np
import pytest

from stochroute import GenerationConfig, generate_instance


def random_instance(seed, nt=None, n=None, num_scenarios=None, f=None,
                    box=100.0):
    """Small randomized instance for solver/oracle comparisons."""
    rng = np.random.default_rng(seed)
    nt = nt if nt is not None else int(rng.integers(4, 9))
    n = n if n is not None else int(rng.integers(1, 4))
    num_scenarios = num_scenarios if num_scenarios is not None else \
        int(rng.integers(1, 11))
    if f is None:
        f = 1 if (n > 1 and nt >= 2 * n) else 0
    coords = [(float(x), float(y)) for x, y in rng.uniform(0, box, (nt, 2))]
    return generate_instance(coords, n, f, num_scenarios, seed,
                             GenerationConfig(base_name="rnd"))


@pytest.fixture
def tiny_instance():
    return random_instance(7, nt=4, n=2, num_scenarios=3, f=1)
