import numpy as np
import pytest

from sdgnn.toys import branching_hub, grouped_outlier, random_graph


@pytest.fixture
def hub_graph():
    return branching_hub()


@pytest.fixture
def outlier_graph():
    return grouped_outlier()


def er_graph(trial, n_max=20, p_choices=(0.1, 0.3, 0.5)):
    """Deterministic small random graph for oracle sweeps."""
    rng = np.random.default_rng(trial)
    n = int(rng.integers(2, n_max + 1))
    p = float(rng.choice(p_choices))
    return random_graph(n, p, seed=trial)


def random_features(graph, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    return rng.random((graph.num_nodes, dim))
