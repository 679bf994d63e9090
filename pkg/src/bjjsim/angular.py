"""Schwinger-spin machinery for the two-species junction.

Each species maps onto a spin of length ``n/2`` whose z-projection is the
species' imbalance ``k - n/2``.  Half-integers are carried doubled
(``two_j = 2j``) so that label arithmetic stays in integers.  Public
functions accept either doubled integers through :class:`SpinLabel` or plain
half-integer numbers; both are validated.

Conventions are Condon-Shortley throughout: ``d^j_{m,m0}(0) = delta`` and
``d^{1/2}_{1/2,-1/2}(beta) = -sin(beta/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .errors import DomainError
from .lattice import FockLabel, LatticeShape, ModelParams
from .observables import ImbalanceDistribution
from .propagation import AmplitudeField

DEFAULT_FACTORIAL_BOUND = 512
# above this 2j the alternating sums cancel beyond double precision
EXTENDED_PRECISION_TWO_J = 20


@dataclass(frozen=True)
class SpinLabel:
    """Spin magnitude and projection, both stored doubled."""

    two_j: int
    two_m: int

    def __post_init__(self):
        if self.two_j < 0:
            raise DomainError(f"negative spin 2j={self.two_j}")
        if abs(self.two_m) > self.two_j or (self.two_j - self.two_m) % 2:
            raise DomainError(f"invalid projection 2m={self.two_m} for 2j={self.two_j}")

    @classmethod
    def of(cls, j, m) -> "SpinLabel":
        return cls(twice(j), twice(m))

    @property
    def j(self) -> Fraction:
        return Fraction(self.two_j, 2)

    @property
    def m(self) -> Fraction:
        return Fraction(self.two_m, 2)


def twice(x) -> int:
    """``2 x`` as an exact integer; rejects values that are not half-integers."""
    y = Fraction(x).limit_denominator(2) if isinstance(x, float) else Fraction(x)
    if isinstance(x, float) and float(y) != x:
        raise DomainError(f"{x!r} is not a half-integer")
    if (2 * y).denominator != 1:
        raise DomainError(f"{x!r} is not a half-integer")
    return int(2 * y)


class LogFactorialTable:
    """``ln(n!)`` for ``0 <= n <= bound``, built once and read-only."""

    def __init__(self, bound: int = DEFAULT_FACTORIAL_BOUND):
        table = np.array([math.lgamma(n + 1) for n in range(bound + 1)])
        table.setflags(write=False)
        self.bound = bound
        self.table = table

    def __call__(self, n: int) -> float:
        if n < 0:
            raise DomainError(f"factorial of negative number {n}")
        if n > self.bound:
            return _table_for(n)(n)
        return self.table[n]


@lru_cache(maxsize=None)
def _table_with_bound(bound: int) -> LogFactorialTable:
    return LogFactorialTable(bound)


def _table_for(n: int) -> LogFactorialTable:
    bound = DEFAULT_FACTORIAL_BOUND
    while bound < n:
        bound *= 2
    return _table_with_bound(bound)


log_factorial = _table_with_bound(DEFAULT_FACTORIAL_BOUND)


def _signed_log_sum(terms):
    """Sum of ``sign * exp(logabs)`` terms, rescaled by the largest magnitude."""
    if not terms:
        return 0.0
    top = max(t[1] for t in terms)
    return math.exp(top) * math.fsum(s * math.exp(la - top) for s, la in terms)


def _wigner_d_doubled(two_j: int, two_m: int, two_m0: int, beta: float) -> float:
    """Wigner small-d from doubled labels; labels must already be valid."""
    if two_j > EXTENDED_PRECISION_TWO_J:
        return _wigner_d_extended(two_j, two_m, two_m0, beta)
    j_p_m, j_m_m = (two_j + two_m) // 2, (two_j - two_m) // 2
    j_p_m0, j_m_m0 = (two_j + two_m0) // 2, (two_j - two_m0) // 2
    dm = (two_m - two_m0) // 2
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    lf = log_factorial
    # paired so that d(0) comes out exactly diagonal
    prefactor = 0.5 * ((lf(j_p_m) + lf(j_m_m)) + (lf(j_p_m0) + lf(j_m_m0)))
    terms = []
    for k in range(max(0, -dm), min(j_p_m0, j_m_m) + 1):
        cos_pow = two_j - dm - 2 * k  # 2j + m0 - m - 2k
        sin_pow = dm + 2 * k
        if (cos_pow and c == 0.0) or (sin_pow and s == 0.0):
            continue
        sign = -1 if (dm + k) % 2 else 1
        logabs = prefactor - (lf(j_p_m0 - k) + lf(k) + lf(dm + k) + lf(j_m_m - k))
        if cos_pow:
            logabs += cos_pow * math.log(abs(c))
            if c < 0 and cos_pow % 2:
                sign = -sign
        if sin_pow:
            logabs += sin_pow * math.log(abs(s))
            if s < 0 and sin_pow % 2:
                sign = -sign
        terms.append((sign, logabs))
    return _signed_log_sum(terms)


def _extra_digits(two_j: int) -> int:
    # largest term / result grows like 2^(2j)
    return 20 + int(0.35 * two_j)


def _wigner_d_extended(two_j, two_m, two_m0, beta):
    j_p_m, j_m_m = (two_j + two_m) // 2, (two_j - two_m) // 2
    j_p_m0 = (two_j + two_m0) // 2
    dm = (two_m - two_m0) // 2
    f = math.factorial
    with mpmath.workdps(_extra_digits(two_j)):
        half_beta = mpmath.mpf(beta) / 2
        c, s = mpmath.cos(half_beta), mpmath.sin(half_beta)
        pre = mpmath.sqrt(mpmath.mpf(f(j_p_m) * f(j_m_m) * f(j_p_m0) * f(two_j - j_p_m0)))
        total = mpmath.mpf(0)
        for k in range(max(0, -dm), min(j_p_m0, j_m_m) + 1):
            denom = f(j_p_m0 - k) * f(k) * f(dm + k) * f(j_m_m - k)
            term = c ** (two_j - dm - 2 * k) * s ** (dm + 2 * k) / denom
            total += -term if (dm + k) % 2 else term
        return float(pre * total)


def wigner_d(j, m, m0, beta: float) -> float:
    """Element ``d^j_{m,m0}(beta) = <j m| exp(-i beta J_y) |j m0>``."""
    two_j = twice(j)
    a, b = SpinLabel(two_j, twice(m)), SpinLabel(two_j, twice(m0))
    return _wigner_d_doubled(two_j, a.two_m, b.two_m, float(beta))


def wigner_d_matrix(j, beta: float) -> np.ndarray:
    """Full ``(2j+1)^2`` matrix, rows and columns ordered by ascending ``m``."""
    two_j = twice(j)
    if two_j < 0:
        raise DomainError(f"negative spin 2j={two_j}")
    ms = range(-two_j, two_j + 1, 2)
    return np.array([[_wigner_d_doubled(two_j, a, b, float(beta)) for b in ms] for a in ms])


def _clebsch_gordan_doubled(tja, tma, tjb, tmb, tj, tm) -> float:
    if tma + tmb != tm:
        return 0.0
    if max(tja, tjb, tj) > EXTENDED_PRECISION_TWO_J:
        return _clebsch_gordan_extended(tja, tma, tjb, tmb, tj, tm)
    lf = log_factorial
    ja_jb_j = (tja + tjb - tj) // 2
    j_ja_jb = (tj + tja - tjb) // 2
    j_jb_ja = (tj - tja + tjb) // 2
    pre = 0.5 * (
        math.log(tj + 1)
        + lf(j_ja_jb) + lf(j_jb_ja) + lf(ja_jb_j) - lf((tja + tjb + tj) // 2 + 1)
        + lf((tj + tm) // 2) + lf((tj - tm) // 2)
        + lf((tja - tma) // 2) + lf((tja + tma) // 2)
        + lf((tjb - tmb) // 2) + lf((tjb + tmb) // 2)
    )
    a1 = ja_jb_j
    a2 = (tja - tma) // 2
    a3 = (tjb + tmb) // 2
    b1 = (tj - tjb + tma) // 2
    b2 = (tj - tja - tmb) // 2
    terms = []
    for k in range(max(0, -b1, -b2), min(a1, a2, a3) + 1):
        logabs = pre - (lf(k) + lf(a1 - k) + lf(a2 - k) + lf(a3 - k) + lf(b1 + k) + lf(b2 + k))
        terms.append((-1 if k % 2 else 1, logabs))
    return _signed_log_sum(terms)


def _clebsch_gordan_extended(tja, tma, tjb, tmb, tj, tm):
    f = math.factorial
    a1 = (tja + tjb - tj) // 2
    a2 = (tja - tma) // 2
    a3 = (tjb + tmb) // 2
    b1 = (tj - tjb + tma) // 2
    b2 = (tj - tja - tmb) // 2
    num = (
        (tj + 1) * f((tj + tja - tjb) // 2) * f((tj - tja + tjb) // 2) * f(a1)
        * f((tj + tm) // 2) * f((tj - tm) // 2) * f(a2) * f((tja + tma) // 2)
        * f((tjb - tmb) // 2) * f(a3)
    )
    den = f((tja + tjb + tj) // 2 + 1)
    # the sum is a sum of exact rationals; evaluate it exactly
    total = sum(
        Fraction(-1 if k % 2 else 1, f(k) * f(a1 - k) * f(a2 - k) * f(a3 - k) * f(b1 + k) * f(b2 + k))
        for k in range(max(0, -b1, -b2), min(a1, a2, a3) + 1)
    )
    if total == 0:
        return 0.0
    with mpmath.workdps(30):
        magnitude = mpmath.sqrt(mpmath.mpf(num) / den) * mpmath.mpf(abs(total.numerator)) / total.denominator
        return float(magnitude) if total > 0 else -float(magnitude)


def _check_triangle(tja, tjb, tj):
    if not abs(tja - tjb) <= tj <= tja + tjb or (tja + tjb - tj) % 2:
        raise DomainError(
            f"j={Fraction(tj, 2)} violates the triangle condition with "
            f"j_a={Fraction(tja, 2)}, j_b={Fraction(tjb, 2)}"
        )


def clebsch_gordan(j_a, m_a, j_b, m_b, j, m) -> float:
    """``<j_a m_a; j_b m_b | j m>`` in the Condon-Shortley convention."""
    la, lb, lt = SpinLabel.of(j_a, m_a), SpinLabel.of(j_b, m_b), SpinLabel.of(j, m)
    _check_triangle(la.two_j, lb.two_j, lt.two_j)
    return _clebsch_gordan_doubled(la.two_j, la.two_m, lb.two_j, lb.two_m, lt.two_j, lt.two_m)


def coupled_state(shape: LatticeShape, j, m) -> AmplitudeField:
    """Total-spin eigenstate ``|j, m>`` on the Fock lattice.

    Supported on the antidiagonal ``k + l = m + N/2`` with amplitudes given by
    Clebsch-Gordan coefficients.
    """
    two_j, two_m = twice(j), twice(m)
    SpinLabel(two_j, two_m)
    _check_triangle(shape.n_a, shape.n_b, two_j)
    c = np.zeros(shape.grid_shape)
    s = (two_m + shape.n_total) // 2
    for k in range(max(0, s - shape.n_b), min(shape.n_a, s) + 1):
        l = s - k
        c[k, l] = _clebsch_gordan_doubled(
            shape.n_a, 2 * k - shape.n_a, shape.n_b, 2 * l - shape.n_b, two_j, two_m
        )
    return AmplitudeField(shape, c.ravel())


def coupled_labels(shape: LatticeShape) -> list[SpinLabel]:
    """All ``(j, m)`` allowed on the lattice, ordered by ``j`` then ``m``."""
    return [
        SpinLabel(tj, tm)
        for tj in range(abs(shape.n_a - shape.n_b), shape.n_total + 1, 2)
        for tm in range(-tj, tj + 1, 2)
    ]


def coupled_basis(shape: LatticeShape) -> tuple[list[SpinLabel], np.ndarray]:
    """Labels and the real orthogonal matrix whose columns are ``|j, m>``."""
    labels = coupled_labels(shape)
    cols = [coupled_state(shape, Fraction(s.two_j, 2), Fraction(s.two_m, 2)).amplitudes.real for s in labels]
    return labels, np.column_stack(cols)


def jz_moment(field: AmplitudeField, order: int) -> float:
    """``<J_z^order>`` evaluated through the coupled basis."""
    labels, basis = coupled_basis(field.shape)
    weights = np.abs(basis.T @ field.amplitudes) ** 2
    ms = np.array([s.two_m / 2 for s in labels])
    return float(np.sum(weights * ms**order))


def _require_free(params: ModelParams):
    if params.is_interacting:
        raise DomainError("closed-form propagator requires u_a = u_b = u_ab = 0")


def analytic_amplitude(
    shape: LatticeShape, params: ModelParams, initial: FockLabel, final: FockLabel, t: float
) -> complex:
    """``<final| exp(i M t) |initial>`` for the non-interacting lattice.

    Product of one Wigner d-function per species, rotation angles
    ``omega_a t`` and ``omega_b t``, times ``exp[i (m_0 - m) pi/2]``.
    """
    _require_free(params)
    for lab in (initial, final):
        if not shape.contains(lab.k, lab.l):
            raise IndexError(f"label ({lab.k}, {lab.l}) outside lattice {shape.grid_shape}")
    d_a = _wigner_d_doubled(shape.n_a, final.two_m_a(shape), initial.two_m_a(shape), params.omega_a * t)
    d_b = _wigner_d_doubled(shape.n_b, final.two_m_b(shape), initial.two_m_b(shape), params.omega_b * t)
    two_dm = initial.two_m(shape) - final.two_m(shape)
    return d_a * d_b * np.exp(1j * two_dm * np.pi / 4)


def analytic_probability(
    shape: LatticeShape, params: ModelParams, initial: FockLabel, final: FockLabel, t: float
) -> float:
    _require_free(params)
    d_a = _wigner_d_doubled(shape.n_a, final.two_m_a(shape), initial.two_m_a(shape), params.omega_a * t)
    d_b = _wigner_d_doubled(shape.n_b, final.two_m_b(shape), initial.two_m_b(shape), params.omega_b * t)
    return (d_a * d_b) ** 2


def species_distribution(n: int, start: int, angle: float) -> np.ndarray:
    """Single-species imbalance distribution ``|d^{n/2}_{m, m0}(angle)|^2``.

    ``start`` is the initial left-well count; the result is indexed by the
    final left-well count ``0..n``.
    """
    d = wigner_d_matrix(Fraction(n, 2), angle)
    return d[:, start] ** 2


def imbalance_convolution(dist_a, dist_b) -> ImbalanceDistribution:
    """Distribution of ``m_a + m_b`` for independent species imbalances."""
    pa = np.asarray(getattr(dist_a, "probs", dist_a), dtype=float)
    pb = np.asarray(getattr(dist_b, "probs", dist_b), dtype=float)
    for p in (pa, pb):
        if p.ndim != 1 or p.size == 0:
            raise DomainError("distributions must be non-empty vectors")
        if np.any(p < 0) or abs(math.fsum(p) - 1.0) > 1e-12:
            raise DomainError("input distribution is not normalized")
    return ImbalanceDistribution(LatticeShape(pa.size - 1, pb.size - 1), np.convolve(pa, pb))


def analytic_imbalance(
    shape: LatticeShape, params: ModelParams, initial: FockLabel, t: float
) -> ImbalanceDistribution:
    """Non-interacting imbalance distribution from a Fock input."""
    _require_free(params)
    pa = species_distribution(shape.n_a, initial.k, params.omega_a * t)
    pb = species_distribution(shape.n_b, initial.l, params.omega_b * t)
    return imbalance_convolution(pa, pb)
