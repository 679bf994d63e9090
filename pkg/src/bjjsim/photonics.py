"""Physical waveguide geometry for the Fock lattice.

Evanescent coupling between two waveguides decays as ``c0 * exp(-alpha d)``
with their separation ``d``.  Inverting that law along each axis turns the
target couplings into transverse positions: rows (A-index ``k``) are spaced
vertically with law A, columns (B-index ``l``) horizontally with law B.
Distances are in micrometres, couplings in 1/cm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._io import csv_text
from .errors import DomainError, InfeasibleGeometryError
from .lattice import LatticeShape, ModelParams, couplings_a, couplings_b


@dataclass(frozen=True)
class CouplingLaw:
    c0: float     # 1/cm
    alpha: float  # 1/um

    def __post_init__(self):
        if not (self.c0 > 0 and self.alpha > 0):
            raise DomainError(f"coupling law needs c0 > 0 and alpha > 0, got {self}")

    def coupling(self, d):
        return self.c0 * np.exp(-self.alpha * np.asarray(d, dtype=float))


def distance_for_coupling(law: CouplingLaw, kappa: float) -> float:
    """Separation at which ``law`` yields coupling ``kappa``."""
    if not kappa > 0:
        raise DomainError(f"target coupling must be positive, got {kappa!r}")
    if kappa >= law.c0:
        raise InfeasibleGeometryError(
            f"coupling {kappa!r} /cm needs zero or negative separation (law saturates at {law.c0} /cm)"
        )
    return math.log(law.c0 / kappa) / law.alpha


@dataclass(frozen=True)
class FabricationPreset:
    """Laser-written waveguides in fused silica at 633 nm, 15 cm long."""

    law_a: CouplingLaw = CouplingLaw(20.0, 0.20)
    law_b: CouplingLaw = CouplingLaw(30.0, 0.18)
    wavelength_nm: float = 633.0
    length_cm: float = 15.0

    @property
    def omega(self) -> float:
        """Tunneling rate giving a balanced splitter at the end of the sample."""
        return math.pi / (2 * self.length_cm)


FUSED_SILICA = FabricationPreset()


@dataclass(frozen=True)
class WaveguideLayout:
    shape: LatticeShape
    x: np.ndarray = field(repr=False)  # per column l, um
    y: np.ndarray = field(repr=False)  # per row k, um
    law_a: CouplingLaw = FUSED_SILICA.law_a
    law_b: CouplingLaw = FUSED_SILICA.law_b
    wavelength_nm: float = FUSED_SILICA.wavelength_nm
    length_cm: float = FUSED_SILICA.length_cm
    # exact neighbour gaps; differencing the cumulative positions would round
    x_gaps: np.ndarray | None = field(default=None, repr=False)
    y_gaps: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name, n in (("x", self.shape.n_b + 1), ("y", self.shape.n_a + 1)):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise DomainError(f"{name} needs {n} positions, got {arr.shape}")
            if np.any(np.diff(arr) <= 0):
                raise DomainError(f"{name} positions must be strictly increasing")
            gaps = getattr(self, f"{name}_gaps")
            gaps = np.diff(arr) if gaps is None else np.array(gaps, dtype=float)
            if gaps.shape != (n - 1,) or np.abs(np.cumsum(gaps) - (arr[1:] - arr[0])).max(initial=0) > 1e-9:
                raise DomainError(f"{name}_gaps inconsistent with positions")
            arr.setflags(write=False)
            gaps.setflags(write=False)
            object.__setattr__(self, name, arr)
            object.__setattr__(self, f"{name}_gaps", gaps)

    def couplings(self) -> tuple[np.ndarray, np.ndarray]:
        """Nearest-neighbour couplings re-derived from the spacings (A, B)."""
        return self.law_a.coupling(self.y_gaps), self.law_b.coupling(self.x_gaps)

    def positions(self) -> np.ndarray:
        """``(n_sites, 2)`` array of ``(x, y)`` in lattice storage order."""
        yy, xx = np.meshgrid(self.y, self.x, indexing="ij")
        return np.column_stack((xx.ravel(), yy.ravel()))

    def to_csv(self) -> str:
        rows = ((k, l, self.x[l], self.y[k]) for k in range(self.shape.n_a + 1) for l in range(self.shape.n_b + 1))
        return csv_text(("k", "l", "x_um", "y_um"), rows)


def _axis_gaps(kappas, law, axis):
    gaps = []
    for i, kappa in enumerate(kappas):
        try:
            gaps.append(distance_for_coupling(law, kappa))
        except InfeasibleGeometryError as exc:
            raise InfeasibleGeometryError(f"axis {axis}, bond {i}: {exc}", axis=axis, index=i) from exc
    return np.array(gaps)


def layout_from_couplings(
    shape: LatticeShape,
    kappa_a,
    kappa_b,
    law_a: CouplingLaw = FUSED_SILICA.law_a,
    law_b: CouplingLaw = FUSED_SILICA.law_b,
    wavelength_nm: float = FUSED_SILICA.wavelength_nm,
    length_cm: float = FUSED_SILICA.length_cm,
) -> WaveguideLayout:
    kappa_a = np.asarray(kappa_a, dtype=float).ravel()
    kappa_b = np.asarray(kappa_b, dtype=float).ravel()
    if kappa_a.size != shape.n_a or kappa_b.size != shape.n_b:
        raise DomainError("need n_a vertical and n_b horizontal couplings")
    dy = _axis_gaps(kappa_a, law_a, "A")
    dx = _axis_gaps(kappa_b, law_b, "B")
    x = np.concatenate(([0.0], np.cumsum(dx)))
    y = np.concatenate(([0.0], np.cumsum(dy)))
    return WaveguideLayout(shape, x, y, law_a, law_b, wavelength_nm, length_cm, dx, dy)


def build_layout(
    shape: LatticeShape,
    params: ModelParams,
    law_a: CouplingLaw = FUSED_SILICA.law_a,
    law_b: CouplingLaw = FUSED_SILICA.law_b,
    wavelength_nm: float = FUSED_SILICA.wavelength_nm,
    length_cm: float = FUSED_SILICA.length_cm,
) -> WaveguideLayout:
    """Positions realizing the lattice couplings, anchored at site ``(0, 0)``."""
    return layout_from_couplings(
        shape,
        couplings_a(shape, params.omega_a),
        couplings_b(shape, params.omega_b),
        law_a,
        law_b,
        wavelength_nm,
        length_cm,
    )


def diagonal_law(layout: WaveguideLayout) -> CouplingLaw:
    """Geometric mean of the two axis laws."""
    return CouplingLaw(
        math.sqrt(layout.law_a.c0 * layout.law_b.c0),
        math.sqrt(layout.law_a.alpha * layout.law_b.alpha),
    )


def diagonal_overlay(layout: WaveguideLayout, law: CouplingLaw | None = None) -> np.ndarray:
    """Couplings between ``(k, l)`` and ``(k +- 1, l +- 1)`` as a dense symmetric matrix.

    ``law`` overrides the default geometric-mean law.
    """
    law = law or diagonal_law(layout)
    shape = layout.shape
    n = shape.n_sites
    overlay = np.zeros((n, n))
    dy, dx = layout.y_gaps, layout.x_gaps
    for k in range(shape.n_a):
        for l in range(shape.n_b):
            kappa = float(law.coupling(math.hypot(dx[l], dy[k])))
            for (k1, l1), (k2, l2) in (((k, l), (k + 1, l + 1)), ((k, l + 1), (k + 1, l))):
                i, j = shape.index(k1, l1), shape.index(k2, l2)
                overlay[i, j] = overlay[j, i] = kappa
    return overlay


def overlay_to_csv(shape: LatticeShape, overlay: np.ndarray) -> str:
    i, j = np.nonzero(np.triu(overlay, 1))
    rows = []
    for a, b in zip(i.tolist(), j.tolist()):
        la, lb = shape.label(a), shape.label(b)
        rows.append((la.k, la.l, lb.k, lb.l, overlay[a, b]))
    return csv_text(("k1", "l1", "k2", "l2", "kappa_per_cm"), rows)


def diagonal_ratios(layout: WaveguideLayout, overlay: np.ndarray | None = None) -> np.ndarray:
    """Per plaquette: diagonal coupling over the mean of its two adjacent straight couplings."""
    overlay = diagonal_overlay(layout) if overlay is None else overlay
    shape = layout.shape
    kappa_a, kappa_b = layout.couplings()
    ratios = [
        overlay[shape.index(k, l), shape.index(k + 1, l + 1)] / (0.5 * (kappa_a[k] + kappa_b[l]))
        for k in range(shape.n_a)
        for l in range(shape.n_b)
    ]
    return np.array(ratios)
