"""Fock lattice of the two-species double well and its tight-binding matrix.

Site ``(k, l)`` holds the amplitude of the Fock state with ``k`` A-particles
and ``l`` B-particles in the left well.  Sites are stored k-major:
``idx = k * (n_b + 1) + l``.

Amplitudes obey ``dc/dt = i M c`` where ``M`` carries the nearest-neighbour
couplings off the diagonal and the on-site detunings on it.  This is the
Schrödinger equation for ``H = -M`` with hbar = 1; rates are in 1/cm and the
evolution parameter is the propagation distance in cm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError

MAX_SITES = 10_000


@dataclass(frozen=True)
class LatticeShape:
    """Particle numbers of both species; the lattice is (n_a+1) x (n_b+1)."""

    n_a: int
    n_b: int

    def __post_init__(self):
        for name in ("n_a", "n_b"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise ConfigurationError(f"{name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n_sites > MAX_SITES:
            raise ConfigurationError(
                f"lattice {self.n_a + 1}x{self.n_b + 1} has {self.n_sites} sites (limit {MAX_SITES})"
            )

    @property
    def n_total(self) -> int:
        return self.n_a + self.n_b

    @property
    def n_sites(self) -> int:
        return (self.n_a + 1) * (self.n_b + 1)

    @property
    def grid_shape(self) -> tuple[int, int]:
        return (self.n_a + 1, self.n_b + 1)

    def contains(self, k: int, l: int) -> bool:
        return 0 <= k <= self.n_a and 0 <= l <= self.n_b

    def index(self, k: int, l: int) -> int:
        if not self.contains(k, l):
            raise IndexError(f"label ({k}, {l}) outside lattice {self.grid_shape}")
        return k * (self.n_b + 1) + l

    def label(self, idx: int) -> "FockLabel":
        if not 0 <= idx < self.n_sites:
            raise IndexError(f"index {idx} outside [0, {self.n_sites})")
        k, l = divmod(idx, self.n_b + 1)
        return FockLabel(k, l)

    def labels(self):
        """All labels in storage order."""
        return [FockLabel(k, l) for k in range(self.n_a + 1) for l in range(self.n_b + 1)]

    def antidiagonal(self) -> np.ndarray:
        """``k + l`` for every site in storage order."""
        k, l = np.indices(self.grid_shape)
        return (k + l).ravel()


@dataclass(frozen=True, order=True)
class FockLabel:
    k: int
    l: int

    def two_m_a(self, shape: LatticeShape) -> int:
        """Twice the A-imbalance, ``2k - n_a``."""
        return 2 * self.k - shape.n_a

    def two_m_b(self, shape: LatticeShape) -> int:
        return 2 * self.l - shape.n_b

    def two_m(self, shape: LatticeShape) -> int:
        """Twice the total imbalance ``k + l - N/2``."""
        return 2 * (self.k + self.l) - shape.n_total


@dataclass(frozen=True)
class ModelParams:
    """Tunneling rates and interaction strengths, all in 1/cm."""

    omega_a: float
    omega_b: float
    u_a: float = 0.0
    u_b: float = 0.0
    u_ab: float = 0.0

    def __post_init__(self):
        if self.omega_a < 0 or self.omega_b < 0:
            raise ConfigurationError("tunneling rates must be non-negative")

    @classmethod
    def isospecific(cls, omega: float, u: float = 0.0) -> "ModelParams":
        return cls(omega, omega, u, u, u)

    @property
    def is_isospecific(self) -> bool:
        return self.omega_a == self.omega_b and self.u_a == self.u_b == self.u_ab

    @property
    def is_interacting(self) -> bool:
        return not (self.u_a == self.u_b == self.u_ab == 0)

    def with_interaction(self, u: float) -> "ModelParams":
        """Same tunneling rates, all three interactions set to ``u``."""
        return ModelParams(self.omega_a, self.omega_b, u, u, u)


def coupling_a(k: int, shape: LatticeShape, omega_a: float) -> float:
    """Coupling between rows ``k`` and ``k + 1``."""
    return _coupling(k, shape.n_a, omega_a)


def coupling_b(l: int, shape: LatticeShape, omega_b: float) -> float:
    """Coupling between columns ``l`` and ``l + 1``."""
    return _coupling(l, shape.n_b, omega_b)


def _coupling(k, n, omega):
    if not 0 <= k <= n - 1:
        raise IndexError(f"bond index {k} outside [0, {n - 1}]")
    return 0.5 * omega * np.sqrt((k + 1) * (n - k))


def couplings_a(shape: LatticeShape, omega_a: float) -> np.ndarray:
    return np.array([coupling_a(k, shape, omega_a) for k in range(shape.n_a)])


def couplings_b(shape: LatticeShape, omega_b: float) -> np.ndarray:
    return np.array([coupling_b(l, shape, omega_b) for l in range(shape.n_b)])


def detuning(label: FockLabel, shape: LatticeShape, params: ModelParams) -> float:
    k, l = label.k, label.l
    if not shape.contains(k, l):
        raise IndexError(f"label ({k}, {l}) outside lattice {shape.grid_shape}")
    if params.is_isospecific:
        # same value, written in k + l only so degenerate sites agree exactly
        n, s = shape.n_total, k + l
        return -0.5 * params.u_a * (s * s + (n - s) ** 2 - n)
    na, nb = shape.n_a, shape.n_b
    return (
        -0.5 * params.u_a * (k * k + (na - k) ** 2 - na)
        - 0.5 * params.u_b * (l * l + (nb - l) ** 2 - nb)
        - params.u_ab * (k * l + (na - k) * (nb - l))
    )


def detuning_grid(shape: LatticeShape, params: ModelParams, mode: str = "raw") -> np.ndarray:
    """Detunings as an ``(n_a+1, n_b+1)`` array; ``mode`` is ``raw`` or ``shifted``."""
    if mode == "raw":
        fn = detuning
    elif mode == "shifted":
        fn = shifted_detuning
    else:
        raise ConfigurationError(f"unknown detuning mode {mode!r}")
    grid = np.empty(shape.grid_shape)
    for lab in shape.labels():
        grid[lab.k, lab.l] = fn(lab, shape, params)
    return grid


def shifted_detuning(label: FockLabel, shape: LatticeShape, params: ModelParams) -> float:
    """Detuning offset so that its maximum and minimum are opposite.

    The isospecific closed form is used when it applies (it also needs even
    N, since only then does ``k + l`` reach ``N/2``); otherwise the midpoint
    of the actual detuning values is subtracted.
    """
    if params.is_isospecific and shape.n_total % 2 == 0:
        if not shape.contains(label.k, label.l):
            raise IndexError(f"label ({label.k}, {label.l}) outside lattice {shape.grid_shape}")
        n = shape.n_total
        s = label.k + label.l
        return -0.5 * params.u_a * (s * s + (n - s) ** 2 - 0.75 * n * n)
    raw = detuning_grid(shape, params, "raw")
    mid = 0.5 * (raw.max() + raw.min())
    return detuning(label, shape, params) - mid


@dataclass(frozen=True)
class EffectiveHamiltonian:
    shape: LatticeShape
    matrix: np.ndarray = field(repr=False)
    includes_diagonal: bool = False

    def to_csv(self, path) -> None:
        """Dump the dense matrix row-major without header."""
        np.savetxt(Path(path), self.matrix, delimiter=",", fmt="%.17g")


def build_hamiltonian(
    shape: LatticeShape,
    params: ModelParams,
    detuning_mode: str = "raw",
    diagonal: np.ndarray | None = None,
) -> EffectiveHamiltonian:
    """Assemble ``M`` for ``dc/dt = i M c``.

    Parameters
    ----------
    diagonal
        Optional ``(n_sites, n_sites)`` overlay with couplings between sites
        ``(k, l)`` and ``(k +- 1, l +- 1)``, e.g. from
        :func:`bjjsim.photonics.diagonal_overlay`.
    """
    n = shape.n_sites
    m = np.zeros((n, n))
    v = detuning_grid(shape, params, detuning_mode)
    for lab in shape.labels():
        m[shape.index(lab.k, lab.l), shape.index(lab.k, lab.l)] = v[lab.k, lab.l]
    for k in range(shape.n_a):
        kappa = coupling_a(k, shape, params.omega_a)
        for l in range(shape.n_b + 1):
            i, j = shape.index(k, l), shape.index(k + 1, l)
            m[i, j] = m[j, i] = kappa
    for l in range(shape.n_b):
        kappa = coupling_b(l, shape, params.omega_b)
        for k in range(shape.n_a + 1):
            i, j = shape.index(k, l), shape.index(k, l + 1)
            m[i, j] = m[j, i] = kappa

    if diagonal is not None:
        overlay = np.asarray(diagonal, dtype=float)
        if overlay.shape != (n, n):
            raise ConfigurationError(
                f"diagonal overlay has shape {overlay.shape}, lattice needs {(n, n)}"
            )
        allowed = diagonal_neighbour_mask(shape)
        if np.any(overlay[~allowed] != 0):
            raise ConfigurationError("diagonal overlay has entries outside (k+-1, l+-1) pairs")
        upper = np.triu(overlay, 1)
        if np.any(upper != np.triu(overlay.T, 1)):
            raise ConfigurationError("diagonal overlay is not symmetric")
        m += upper + upper.T

    m.setflags(write=False)
    return EffectiveHamiltonian(shape, m, includes_diagonal=diagonal is not None)


def diagonal_neighbour_mask(shape: LatticeShape) -> np.ndarray:
    """Boolean ``(n_sites, n_sites)`` mask of pairs with ``|dk| = |dl| = 1``."""
    k, l = np.indices(shape.grid_shape)
    k, l = k.ravel(), l.ravel()
    return (np.abs(k[:, None] - k[None, :]) == 1) & (np.abs(l[:, None] - l[None, :]) == 1)
