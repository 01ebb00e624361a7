"""Geometric multi-path channels for uniform linear arrays.

Steering vectors, deterministic channel assembly from a path set, and a
randomized cluster-channel generator with good- and ill-conditioned
cluster power profiles. All angles are azimuths in radians; spacings are
normalized to the carrier wavelength.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

HALF_PI = np.pi / 2.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Antenna counts and normalized element spacings at both ends.

    The transmit array is assumed at least as large as the receive array.
    """

    n_t: int
    n_r: int
    spacing_t: float = 0.5
    spacing_r: float = 0.5

    def __post_init__(self):
        if self.n_r < 1 or self.n_t < self.n_r:
            raise InvalidInputError(
                f"need n_t >= n_r >= 1, got n_t={self.n_t}, n_r={self.n_r}"
            )
        if self.spacing_t <= 0 or self.spacing_r <= 0:
            raise InvalidInputError("antenna spacings must be positive")


@dataclass
class PathSet:
    """Complex path gains with their departure and arrival azimuths."""

    gains: np.ndarray
    aod: np.ndarray
    aoa: np.ndarray

    def __post_init__(self):
        self.gains = np.atleast_1d(np.asarray(self.gains, dtype=complex))
        self.aod = np.atleast_1d(np.asarray(self.aod, dtype=float))
        self.aoa = np.atleast_1d(np.asarray(self.aoa, dtype=float))
        sizes = {self.gains.size, self.aod.size, self.aoa.size}
        if len(sizes) != 1 or self.gains.size < 1:
            raise InvalidInputError("gains, aod and aoa must share one length >= 1")
        for name, angles in (("aod", self.aod), ("aoa", self.aoa)):
            if np.any(np.abs(angles) > HALF_PI):
                raise InvalidInputError(f"{name} angles must lie in [-pi/2, pi/2]")

    def __len__(self):
        return self.gains.size


@dataclass
class ClusterProfile:
    """Per-cluster average ray powers and the common angular spread."""

    n_cl: int
    n_ray: int
    sigma_sq: np.ndarray
    angle_spread: float

    def __post_init__(self):
        if self.n_cl < 1 or self.n_ray < 1:
            raise InvalidInputError("cluster and ray counts must be >= 1")
        self.sigma_sq = np.atleast_1d(np.asarray(self.sigma_sq, dtype=float))
        if self.sigma_sq.shape != (self.n_cl,):
            raise InvalidInputError(
                f"sigma_sq must have length n_cl={self.n_cl}, got {self.sigma_sq.shape}"
            )
        if np.any(self.sigma_sq <= 0):
            raise InvalidInputError("cluster powers must be positive")
        if self.angle_spread < 0:
            raise InvalidInputError("angle spread must be nonnegative")


def steering_vector(n, spacing, angle):
    """Unit-norm response of an n-element ULA toward one azimuth.

    Entry k (0-based) is ``exp(-j*2*pi*spacing*k*sin(angle)) / sqrt(n)``.
    """
    if n < 1:
        raise InvalidInputError("antenna count must be >= 1")
    if spacing <= 0:
        raise InvalidInputError("spacing must be positive")
    phase = -2j * np.pi * spacing * np.sin(angle) * np.arange(n)
    return np.exp(phase) / np.sqrt(n)


def steering_matrix(n, spacing, angles):
    """Steering vectors for several azimuths stacked as matrix columns."""
    if n < 1:
        raise InvalidInputError("antenna count must be >= 1")
    if spacing <= 0:
        raise InvalidInputError("spacing must be positive")
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    phase = -2j * np.pi * spacing * np.outer(np.arange(n), np.sin(angles))
    return np.exp(phase) / np.sqrt(n)


def steering_matrices(geometry, paths):
    """Receive- and transmit-side steering matrices for a path set.

    Returns ``(a_r, a_t)`` of shapes (n_r, L) and (n_t, L); together with
    ``diag(paths.gains)`` these are the factors of the physical channel.
    """
    a_r = steering_matrix(geometry.n_r, geometry.spacing_r, paths.aoa)
    a_t = steering_matrix(geometry.n_t, geometry.spacing_t, paths.aod)
    return a_r, a_t


def assemble_physical(geometry, paths):
    """Channel matrix of the bare scattering geometry, shape (n_r, n_t).

    Computed in factored form ``A_R diag(gains) A_T^H``; identical up to
    round-off to summing the rank-one per-path contributions, which the
    tests verify element-wise.
    """
    a_r, a_t = steering_matrices(geometry, paths)
    return (a_r * paths.gains) @ a_t.conj().T


def sample_cluster_paths(profile, means_aod, means_aoa, rng):
    """Draw one random path set from a cluster scattering profile.

    Ray gains in cluster i are circularly symmetric complex Gaussian with
    variance ``sigma_sq[i]``. Ray angles are uniform around the cluster
    mean with standard deviation ``angle_spread`` (half-width
    ``sqrt(3)*spread``, the unique symmetric uniform with that deviation)
    and are clipped to [-pi/2, pi/2]. Paths are ordered cluster-major.
    Draw order is gains (real then imaginary), departures, arrivals, so a
    given generator state maps to exactly one path set.
    """
    means_aod = np.atleast_1d(np.asarray(means_aod, dtype=float))
    means_aoa = np.atleast_1d(np.asarray(means_aoa, dtype=float))
    if means_aod.shape != (profile.n_cl,) or means_aoa.shape != (profile.n_cl,):
        raise InvalidInputError(
            f"cluster means must have length n_cl={profile.n_cl}"
        )
    total = profile.n_cl * profile.n_ray
    sigma = np.repeat(profile.sigma_sq, profile.n_ray)
    scale = np.sqrt(sigma / 2.0)
    gains = scale * (rng.standard_normal(total) + 1j * rng.standard_normal(total))
    half = np.sqrt(3.0) * profile.angle_spread
    centers_t = np.repeat(means_aod, profile.n_ray)
    centers_r = np.repeat(means_aoa, profile.n_ray)
    aod = np.clip(rng.uniform(centers_t - half, centers_t + half), -HALF_PI, HALF_PI)
    aoa = np.clip(rng.uniform(centers_r - half, centers_r + half), -HALF_PI, HALF_PI)
    return PathSet(gains=gains, aod=aod, aoa=aoa)


def condition_profile(kind, geometry, n_cl, n_ray, angle_spread, rng):
    """Build the cluster power profile for one conditioning regime.

    ``"ill"`` fixes the cluster power ratios at 100:50:50:1:...:1 (needs
    at least four clusters). ``"good"`` draws magnitudes of standard
    normal variables. Either way the powers are rescaled so their total
    equals ``n_t*n_r/n_ray``, which keeps the expected squared Frobenius
    norm of a sampled channel at ``n_t*n_r``.
    """
    if n_cl < 1 or n_ray < 1:
        raise InvalidInputError("cluster and ray counts must be >= 1")
    budget = geometry.n_t * geometry.n_r / n_ray
    if kind == "ill":
        if n_cl < 4:
            raise InvalidInputError("ill-conditioned profile needs n_cl >= 4")
        ratios = np.ones(n_cl)
        ratios[0] = 100.0
        ratios[1:3] = 50.0
    elif kind == "good":
        ratios = np.abs(rng.standard_normal(n_cl))
    else:
        raise InvalidInputError(f"unknown condition kind {kind!r}")
    sigma_sq = ratios * (budget / ratios.sum())
    return ClusterProfile(
        n_cl=n_cl, n_ray=n_ray, sigma_sq=sigma_sq, angle_spread=angle_spread
    )
