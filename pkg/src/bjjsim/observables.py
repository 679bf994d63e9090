"""Measured quantities: site intensities, imbalance distributions and moments."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._io import csv_text
from .errors import DomainError
from .lattice import LatticeShape, ModelParams, build_hamiltonian
from .propagation import AmplitudeField, decompose, evolve

SUM_TOL = 1e-10


@dataclass(frozen=True)
class ImbalanceDistribution:
    """``probs[i]`` is the probability of total imbalance ``m = i - N/2``."""

    shape: LatticeShape
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if p.size != self.shape.n_total + 1:
            raise DomainError(f"expected {self.shape.n_total + 1} probabilities, got {p.size}")
        if np.any(p < -SUM_TOL) or np.any(p > 1 + SUM_TOL):
            raise DomainError("probabilities outside [0, 1]")
        if abs(math.fsum(p) - 1.0) > SUM_TOL:
            raise DomainError(f"probabilities sum to {math.fsum(p)!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def two_m(self) -> np.ndarray:
        """Doubled imbalance for each entry, ``2i - N``."""
        return 2 * np.arange(self.probs.size) - self.shape.n_total

    @property
    def m(self) -> np.ndarray:
        return self.two_m / 2

    def at(self, m: float) -> float:
        i = int(round(m + self.shape.n_total / 2))
        if not 0 <= i < self.probs.size or i - self.shape.n_total / 2 != m:
            raise DomainError(f"imbalance {m} not on the grid of N={self.shape.n_total}")
        return float(self.probs[i])

    def to_csv(self) -> str:
        return csv_text(("two_m", "p"), zip(self.two_m.tolist(), self.probs))


def site_probabilities(field: AmplitudeField) -> np.ndarray:
    """``|c_{k,l}|^2`` as an ``(n_a+1, n_b+1)`` grid."""
    return np.abs(field.grid()) ** 2


def grid_to_csv(grid: np.ndarray) -> str:
    rows = ((k, l, grid[k, l]) for k in range(grid.shape[0]) for l in range(grid.shape[1]))
    return csv_text(("k", "l", "p"), rows)


def imbalance_distribution(field: AmplitudeField) -> ImbalanceDistribution:
    """Sum of intensities along each antidiagonal ``k + l = m + N/2``."""
    p = np.abs(field.amplitudes) ** 2
    probs = np.bincount(field.shape.antidiagonal(), weights=p, minlength=field.shape.n_total + 1)
    return ImbalanceDistribution(field.shape, probs)


def mean_imbalance(dist: ImbalanceDistribution) -> float:
    return float(np.dot(dist.m, dist.probs))


def variance_imbalance(dist: ImbalanceDistribution) -> float:
    """Second moment ``sum m^2 p_m`` (not centered)."""
    return float(np.dot(dist.m**2, dist.probs))


def odd_suppression_metric(dist: ImbalanceDistribution) -> float:
    """Total weight on odd imbalances; zero for perfect pairwise bunching."""
    if dist.shape.n_total % 2:
        raise DomainError("odd N gives half-integer imbalances; parity is undefined")
    odd = (dist.two_m // 2) % 2 == 1
    return float(dist.probs[odd].sum())


@dataclass(frozen=True)
class SignFlipReport:
    var_plus: float
    var_minus: float
    delta: float
    with_overlay: bool


def _flipped(params: ModelParams) -> ModelParams:
    return ModelParams(params.omega_a, params.omega_b, -params.u_a, -params.u_b, -params.u_ab)


def sign_flip_check(
    shape: LatticeShape,
    params: ModelParams,
    initial: AmplitudeField,
    t: float,
    overlay: np.ndarray | None = None,
) -> SignFlipReport:
    """Compare the imbalance variance at ``t`` for interactions ``+U`` and ``-U``.

    For a Fock-state input and no diagonal overlay the two agree; the overlay
    breaks the underlying antiunitary symmetry and ``delta`` is merely reported.
    """
    variances = []
    for p in (params, _flipped(params)):
        prop = decompose(build_hamiltonian(shape, p, diagonal=overlay))
        variances.append(variance_imbalance(imbalance_distribution(evolve(prop, initial, t))))
    plus, minus = variances
    return SignFlipReport(plus, minus, plus - minus, overlay is not None)
