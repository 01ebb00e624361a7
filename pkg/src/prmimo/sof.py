"""Sequential redesign of correlation-modification vectors.

Subchannels are visited in decreasing order of their correlation level.
Each visited column is replaced by a nonnegative unit-power vector that
(approximately) minimizes its accumulated squared correlation with the
already-designed columns: the quadratic form of that objective is
assembled, its smallest eigenvector is projected onto the nonnegative
orthant, and the result is rescaled to the required norm. The procedure
is a feasible heuristic, not a global optimum; the tests bound its gap
against an exhaustive grid search at small sizes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalFailureError
from .numerics import eig_sym
from .pattern import (
    SubchannelGram,
    _transmit_basis,
    correlation_indicator,
    receiver_factor_matrix,
    subchannel_gram,
)


@dataclass
class SofState:
    """Finished state of one sequential modification run."""

    order: np.ndarray
    m_hat: np.ndarray
    gram: SubchannelGram
    iteration: int

    def __post_init__(self):
        self.order = np.asarray(self.order, dtype=int)
        n_paths = self.m_hat.shape[1]
        if sorted(self.order.tolist()) != list(range(n_paths)):
            raise InvalidInputError("order must be a permutation of the path indices")


def receiver_correlation(geometry, theta_i, theta_k):
    """Receive-side correlation between two arrival angles.

    ``(1/n_r) * sum_n exp(j*2*pi*d_r*n*(sin theta_k - sin theta_i))``;
    magnitude is at most 1, with equality at identical angles.
    """
    n = np.arange(geometry.n_r)
    phases = 2.0 * np.pi * geometry.spacing_r * (np.sin(theta_k) - np.sin(theta_i)) * n
    return complex(np.exp(1j * phases).sum() / geometry.n_r)


def b_vector(geometry, m_hat_k, phi_i, phi_k):
    """Transmit-side coupling of a fixed column toward a new departure.

    Entry n is ``(1/n_t) * m_hat_k(n) *
    exp(j*2*pi*d_t*n*(sin phi_i - sin phi_k))``. Its inner product with
    the redesigned column gives the transmit part of the pair's Gram
    entry, which is what the quadratic objective penalizes.
    """
    m_hat_k = np.asarray(m_hat_k, dtype=float)
    n = np.arange(geometry.n_t)
    phase = np.exp(
        2j * np.pi * geometry.spacing_t * (np.sin(phi_i) - np.sin(phi_k)) * n
    )
    return m_hat_k * phase / geometry.n_t


def quadratic_matrix(rho_r, b):
    """Real symmetric PSD coefficient matrix of one squared-correlation term.

    ``real(|rho_r|^2 * conj(b) b^T)``, symmetrized. For any real m the
    quadratic form equals ``|rho_r|^2 * |b^T m|^2``, the squared
    magnitude of the corresponding Gram entry.
    """
    b = np.asarray(b, dtype=complex)
    m = (abs(rho_r) ** 2) * np.outer(b.conj(), b).real
    return 0.5 * (m + m.T)


def solve_modification_vector(b_sum, n_t):
    """Feasible minimizer of ``m^T B m`` over nonnegative m, ``|m|^2 = n_t``.

    Takes a unit eigenvector of the smallest eigenvalue, picks the sign
    with the larger positive mass (both signs are eigenvectors, and the
    wrong one can be annihilated by the clip), clips negatives to zero,
    and rescales to the required norm.
    """
    b_sum = np.asarray(b_sum, dtype=float)
    if b_sum.shape != (n_t, n_t):
        raise InvalidInputError(
            f"coefficient matrix shape {b_sum.shape} does not match n_t={n_t}"
        )
    pair = eig_sym(b_sum)
    u = pair.vectors[:, 0]
    pos_mass = float(np.clip(u, 0.0, None).sum())
    neg_mass = float(np.clip(-u, 0.0, None).sum())
    if neg_mass > pos_mass:
        u = -u
    elif neg_mass == pos_mass:
        # Exact tie: orient so the first nonzero entry is positive.
        nonzero = np.flatnonzero(u)
        if nonzero.size and u[nonzero[0]] < 0:
            u = -u
    candidate = np.clip(np.sqrt(n_t) * u, 0.0, None)
    norm_sq = float(candidate @ candidate)
    if norm_sq == 0.0:
        raise NumericalFailureError(
            "clipped eigenvector collapsed to zero",
            matrix_norm=float(np.linalg.norm(b_sum)),
        )
    return candidate * np.sqrt(n_t / norm_sq)


def run_sof(geometry, paths):
    """Sequentially redesign the modification columns for all paths.

    Starts from the neutral all-ones matrix, picks the subchannel with
    the highest correlation indicator (ties go to the lowest index), and
    leaves that first column untouched. Every later iteration masks the
    already-visited indices, picks the worst remaining subchannel,
    accumulates the quadratic penalty against the current columns of all
    previously visited indices, solves for the new column, and refreshes
    the Gram matrix incrementally (only one row and column change).

    Returns the completed state; the Gram inside it matches a from-
    scratch recomputation to tight tolerance, which the tests check.
    """
    n_paths = len(paths)
    n_t, n_r = geometry.n_t, geometry.n_r
    m_hat = np.ones((n_t, n_paths))
    initial = subchannel_gram(geometry, paths, m_hat)
    g = initial.g.copy()
    indicator = initial.indicator.copy()

    recv = receiver_factor_matrix(geometry, paths.aoa)
    basis = _transmit_basis(geometry, paths.aod, m_hat)
    sin_aod = np.sin(paths.aod)
    k = np.arange(n_t)

    first = int(np.argmax(indicator))
    order = [first]
    selected = np.zeros(n_paths, dtype=bool)
    selected[first] = True

    for _ in range(1, n_paths):
        masked = np.where(selected, -np.inf, indicator)
        target = int(np.argmax(masked))
        prior = np.asarray(order, dtype=int)

        # |rho^R|^2 weights against each previously designed column.
        weights = np.abs(recv[target, prior] / n_r) ** 2
        phase = np.exp(
            2j
            * np.pi
            * geometry.spacing_t
            * np.outer(k, sin_aod[target] - sin_aod[prior])
        )
        b_cols = m_hat[:, prior] * phase / n_t
        b_sum = ((b_cols.conj() * weights) @ b_cols.T).real

        new_col = solve_modification_vector(b_sum, n_t)
        m_hat[:, target] = new_col

        basis[:, target] = new_col * np.exp(
            2j * np.pi * geometry.spacing_t * k * sin_aod[target]
        )
        row = recv[target, :] * (basis[:, target].conj() @ basis) / (n_r * n_t)
        g[target, :] = row
        g[:, target] = row.conj()
        g[target, target] = row[target].real
        indicator = correlation_indicator(g)

        order.append(target)
        selected[target] = True

    gram = SubchannelGram(g=g, indicator=indicator)
    return SofState(order=np.asarray(order), m_hat=m_hat, gram=gram, iteration=n_paths)
