"""Exact evolution of amplitude fields by spectral decomposition."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .errors import ConfigurationError, DomainError, NumericalError
from .lattice import EffectiveHamiltonian, LatticeShape

NORM_TOL = 1e-12


@dataclass(frozen=True)
class AmplitudeField:
    """Normalized complex amplitudes over the Fock lattice, stored k-major."""

    shape: LatticeShape
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.amplitudes, dtype=complex).ravel()
        if c.size != self.shape.n_sites:
            raise ConfigurationError(
                f"{c.size} amplitudes given for a lattice of {self.shape.n_sites} sites"
            )
        norm = np.vdot(c, c).real
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"field is not normalized (norm^2 = {norm!r})")
        c.setflags(write=False)
        object.__setattr__(self, "amplitudes", c)

    @classmethod
    def fock(cls, shape: LatticeShape, k: int, l: int) -> "AmplitudeField":
        c = np.zeros(shape.n_sites, dtype=complex)
        c[shape.index(k, l)] = 1.0
        return cls(shape, c)

    @classmethod
    def from_unnormalized(cls, shape: LatticeShape, values: ArrayLike) -> "AmplitudeField":
        c = np.asarray(values, dtype=complex).ravel()
        norm = np.linalg.norm(c)
        if norm == 0:
            raise DomainError("cannot normalize a zero field")
        return cls(shape, c / norm)

    def grid(self) -> np.ndarray:
        """Amplitudes as an ``(n_a+1, n_b+1)`` array."""
        return self.amplitudes.reshape(self.shape.grid_shape)

    def overlap(self, other: "AmplitudeField") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "AmplitudeField") -> float:
        return abs(self.overlap(other)) ** 2


@dataclass(frozen=True)
class SpectralPropagator:
    shape: LatticeShape
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    def unitary(self, t: float) -> np.ndarray:
        """Dense ``exp(i M t)``."""
        q = self.eigenvectors
        return (q * np.exp(1j * self.eigenvalues * t)) @ q.T


def decompose(h: EffectiveHamiltonian) -> SpectralPropagator:
    m = h.matrix
    n = m.shape[0]
    try:
        lam, q = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigendecomposition failed for {n}x{n} matrix (cond={np.linalg.cond(m):.3g})"
        ) from exc
    scale = max(np.abs(m).max(), 1.0)
    recon = np.abs((q * lam) @ q.T - m).max()
    ortho = np.abs(q.T @ q - np.eye(n)).max()
    if recon > 1e-10 * scale or ortho > 1e-10:
        raise NumericalError(
            f"decomposition of {n}x{n} matrix inaccurate: reconstruction {recon:.3g}, "
            f"orthogonality {ortho:.3g}"
        )
    lam.setflags(write=False)
    q.setflags(write=False)
    return SpectralPropagator(h.shape, lam, q)


def _check_shape(prop, initial):
    if prop.shape != initial.shape:
        raise ConfigurationError(f"field shape {initial.shape} does not match propagator {prop.shape}")


def evolve(prop: SpectralPropagator, initial: AmplitudeField, t: float) -> AmplitudeField:
    """Field at distance ``t``; negative ``t`` runs the evolution backwards."""
    _check_shape(prop, initial)
    q = prop.eigenvectors
    coeffs = q.T @ initial.amplitudes
    c = q @ (np.exp(1j * prop.eigenvalues * t) * coeffs)
    return AmplitudeField(initial.shape, c)


def evolve_trajectory(prop: SpectralPropagator, initial: AmplitudeField, t_grid) -> list[AmplitudeField]:
    """Sample the evolution on a strictly increasing grid, each point from ``t = 0``."""
    _check_shape(prop, initial)
    ts = np.asarray(t_grid, dtype=float).ravel()
    if ts.size == 0:
        return []
    if np.any(np.diff(ts) <= 0):
        raise ConfigurationError("time grid must be strictly increasing")
    q = prop.eigenvectors
    coeffs = q.T @ initial.amplitudes
    phases = np.exp(1j * np.outer(ts, prop.eigenvalues))
    cs = (phases * coeffs) @ q.T
    return [AmplitudeField(initial.shape, c) for c in cs]
