"""Small construction helpers shared across test modules."""

import numpy as np

from prmimo import PathSet


def random_paths(rng, n_paths, max_angle=np.pi / 2):
    """Random path set: unit-variance complex gains, uniform azimuths."""
    gains = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / np.sqrt(2)
    aod = rng.uniform(-max_angle, max_angle, n_paths)
    aoa = rng.uniform(-max_angle, max_angle, n_paths)
    return PathSet(gains=gains, aod=aod, aoa=aoa)


def feasible_m_hat(rng, n_t, n_paths):
    """Strictly positive modification columns with squared norm n_t."""
    raw = rng.uniform(0.1, 1.0, (n_t, n_paths))
    return raw * np.sqrt(n_t / np.sum(raw**2, axis=0))
