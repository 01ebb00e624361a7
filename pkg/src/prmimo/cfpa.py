"""Closed-form power allocation across modified subchannels.

Transmit power is split in inverse proportion to each subchannel's
correlation level (the most independent subchannel gets the most power),
scaled to the channel power budget, and folded into the final pattern
matrix as per-path factors.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, InvalidInputError
from .pattern import PatternMatrix, assemble_pattern_channel, modified_subchannels
from .sof import run_sof

# Indicator entries below this fraction of the maximum are floored before
# inversion, so a perfectly uncorrelated subchannel gets a large but
# finite weight instead of dividing by zero.
EPS_FLOOR = 1e-6


@dataclass
class PowerAllocation:
    """Closed-form power split across the allocated paths.

    Holds the raw inverse-correlation weights, the normalized power
    proportions, the budget scale factor, and the resulting per-path
    factors, all over the paths that actually carry energy.
    """

    w_hat: np.ndarray
    w: np.ndarray
    delta: float
    p: np.ndarray

    def __post_init__(self):
        self.w_hat = np.atleast_1d(np.asarray(self.w_hat, dtype=float))
        self.w = np.atleast_1d(np.asarray(self.w, dtype=float))
        self.p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if np.any(self.w <= 0) or abs(self.w.sum() - 1.0) > 1e-12:
            raise InvalidInputError("proportions must be positive and sum to 1")
        if self.delta <= 0:
            raise InvalidInputError("scale factor must be positive")
        if np.any(self.p <= 0):
            raise InvalidInputError("power factors must be positive")


def cfpa_weights(indicator):
    """Inverse-correlation weights and their normalized proportions.

    The raw weight of subchannel l is ``max(indicator) / indicator[l]``
    with the denominator floored at ``EPS_FLOOR * max(indicator)``. An
    all-zero indicator (a fully uncorrelated set) degenerates to uniform
    proportions rather than an error.
    """
    g = np.atleast_1d(np.asarray(indicator, dtype=float))
    if g.ndim != 1 or g.size < 1:
        raise InvalidInputError("indicator must be a nonempty vector")
    if np.any(g < 0):
        raise InvalidInputError("indicator entries must be nonnegative")
    g_max = float(g.max())
    if g_max == 0.0:
        w_hat = np.ones_like(g)
    else:
        w_hat = g_max / np.maximum(g, EPS_FLOOR * g_max)
    return w_hat, w_hat / w_hat.sum()


def power_scaling(geometry, subchannels, w):
    """Scale factor putting the proportion-weighted sum at the power budget.

    ``sqrt(n_t*n_r / tr(S^H S))`` for ``S`` the w-weighted subchannel
    sum. Raises if the sum cancels exactly.
    """
    subchannels = np.asarray(subchannels, dtype=complex)
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if subchannels.ndim != 3 or subchannels.shape[0] != w.size:
        raise InvalidInputError("need one (n_r, n_t) subchannel slab per weight")
    if abs(w.sum() - 1.0) > 1e-9:
        raise InvalidInputError("proportions must sum to 1")
    combined = np.tensordot(w, subchannels, axes=(0, 0))
    power = float(np.sum(np.abs(combined) ** 2))
    if power == 0.0:
        raise DegenerateChannelError("weighted subchannel sum is identically zero")
    return float(np.sqrt(geometry.n_t * geometry.n_r / power))


def power_factors(gains, w, delta):
    """Per-path factors ``p_l = w_l * delta / |gain_l|``.

    Equalizes the modified gain magnitudes at ``w_l * delta`` while the
    original gain phases pass through untouched (the factors are real and
    positive). Zero-magnitude gains must be dropped by the caller first.
    """
    magnitudes = np.abs(np.atleast_1d(np.asarray(gains, dtype=complex)))
    if np.any(magnitudes == 0.0):
        raise InvalidInputError(
            "zero-magnitude path gains carry no energy; drop them before allocation"
        )
    return np.atleast_1d(np.asarray(w, dtype=float)) * delta / magnitudes


def finalize_pattern(m_hat, p):
    """Fold per-path factors into the final pattern matrix."""
    return PatternMatrix(m_hat=np.asarray(m_hat, dtype=float), p=p)


def allocate_power(geometry, paths, m_hat, indicator, renormalize=True):
    """Run the closed-form allocation and assemble the final pattern.

    Paths with zero gain are excluded from the allocation and receive a
    zero power factor. With ``renormalize=True`` (the default) the
    factors are afterwards rescaled uniformly so the assembled channel
    meets the power budget ``tr(H H^H) = n_t*n_r`` exactly; the scale
    factor alone only guarantees this for the phase-free subchannel
    combination, and the gain phases perturb it. The returned
    ``PowerAllocation`` keeps the unrescaled closed-form quantities.

    Returns ``(pattern, allocation)``.
    """
    gains = paths.gains
    keep = np.abs(gains) > 0.0
    if not keep.any():
        raise DegenerateChannelError("every path gain is zero")
    indicator = np.atleast_1d(np.asarray(indicator, dtype=float))
    if indicator.shape != (len(paths),):
        raise InvalidInputError("indicator length must match the path count")

    w_hat, w = cfpa_weights(indicator[keep])
    subchannels = modified_subchannels(geometry, paths, m_hat)[keep]
    delta = power_scaling(geometry, subchannels, w)
    p_kept = power_factors(gains[keep], w, delta)
    allocation = PowerAllocation(w_hat=w_hat, w=w, delta=delta, p=p_kept)

    p_full = np.zeros(len(paths))
    p_full[keep] = p_kept
    pattern = finalize_pattern(m_hat, p_full)
    if renormalize:
        h = assemble_pattern_channel(geometry, paths, pattern)
        power = float(np.sum(np.abs(h) ** 2))
        if power == 0.0:
            raise DegenerateChannelError("assembled pattern channel is zero")
        scale = np.sqrt(geometry.n_t * geometry.n_r / power)
        pattern = finalize_pattern(m_hat, p_full * scale)
    return pattern, allocation


def design_pattern(geometry, paths, renormalize=True):
    """Full transmit-pattern design: correlation modification, then power.

    Returns ``(pattern, allocation, state)`` where ``state`` is the
    finished sequential-modification state the allocation was based on.
    """
    state = run_sof(geometry, paths)
    pattern, allocation = allocate_power(
        geometry, paths, state.m_hat, state.gram.indicator, renormalize=renormalize
    )
    return pattern, allocation, state
