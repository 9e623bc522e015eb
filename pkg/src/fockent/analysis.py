"""Moment inequalities, eigen-equation residuals and Wigner grids.

Phase-space convention: ``[x, p] = i`` and ``alpha = (x + i p)/sqrt(2)``, so
a coherent state ``|alpha>`` is centred at ``(sqrt(2) Re alpha, sqrt(2) Im alpha)``
and ``W(x, p) = (1/2pi) ∫ dy psi*(x + y/2) psi(x - y/2) e^{i p y}``.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from .fock import FockVector, check_normalized, lower_array, raise_array, rotate

SATURATION_TOL = 1e-8
WIGNER_VERSION = 1


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    gap: float
    relative_gap: float
    saturated: bool


def _padded(state: FockVector, extra: int) -> np.ndarray:
    return np.concatenate([state.amps, np.zeros(extra, dtype=complex)])


def _lowered_norm2(state: FockVector, k: int) -> float:
    """``<a†^k a^k>``."""
    return float(np.sum(np.abs(lower_array(state.amps, k)) ** 2)) if k else 1.0


def _raised_norm2(state: FockVector, l: int) -> float:
    """``<a^l a†^l>``, exact via zero padding."""
    if l == 0:
        return 1.0
    out, _ = raise_array(state.amps, l, pad=True)
    return float(np.sum(np.abs(out) ** 2))


def _report(lhs: float, rhs: float) -> InequalityReport:
    gap = rhs - lhs
    rel = gap / rhs if rhs > 0 else 0.0
    return InequalityReport(lhs, rhs, gap, rel, abs(rel) < SATURATION_TOL)


def check_inequality(state: FockVector, kind: str, *, n: int | None = None, k: int | None = None, l: int | None = None) -> InequalityReport:
    """Cauchy-Schwarz bounds on ``|<a^n>|^2``.

    ``kind="cat"`` compares against ``<a†^n a^n>``; ``kind="squeeze"``
    against ``<a†^k a^k><a^l a†^l>`` with ``n = k + l``.
    """
    check_normalized(state)
    if kind == "cat":
        if n is None or n < 1:
            raise ValueError("cat inequality needs n >= 1")
        lhs = abs(np.sum(np.conj(state.amps) * lower_array(state.amps, n))) ** 2
        return _report(float(lhs), _lowered_norm2(state, n))
    if kind == "squeeze":
        if k is None or l is None or k < 1 or l < 0 or k < l:
            raise ValueError(f"squeeze inequality needs k >= l >= 0 and k >= 1, got k={k}, l={l}")
        lhs = abs(np.sum(np.conj(state.amps) * lower_array(state.amps, k + l))) ** 2
        return _report(float(lhs), _lowered_norm2(state, k) * _raised_norm2(state, l))
    raise ValueError(f"unknown inequality kind {kind!r}")


def _eigen_sides(state: FockVector, k: int, l: int):
    v = _padded(state, l)
    lhs = lower_array(v, k)
    rhs, _ = raise_array(v, l, pad=False) if l else (v, 0.0)
    # a^k is only exact up to index cutoff - k
    keep = max(state.cutoff + 1 - k, 0)
    return lhs[:keep], rhs[:keep]


def eigen_residual(state: FockVector, k: int, l: int, eta: complex) -> float:
    """Relative residual of ``a^k|psi> = eta a†^l |psi>``.

    The top ``k`` Fock levels are left out of both norms: ``a^k`` would need
    amplitudes beyond the cutoff there.
    """
    check_normalized(state)
    lhs, rhs = _eigen_sides(state, k, l)
    rhs = eta * rhs
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(lhs - rhs) / scale)


def fit_eta(state: FockVector, k: int, l: int) -> complex:
    """Least-squares ``eta`` for ``a^k|psi> ≈ eta a†^l|psi>``."""
    lhs, rhs = _eigen_sides(state, k, l)
    den = np.vdot(rhs, rhs).real
    if den == 0.0:
        return 0j
    return complex(np.vdot(rhs, lhs) / den)


# ---------------------------------------------------------------------------
# Wigner function


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """``values[i, j] = W(x_values[j], p_values[i])`` (rows follow p)."""

    x_values: np.ndarray
    p_values: np.ndarray
    values: np.ndarray
    undersampled: bool = False

    @property
    def integral(self) -> float:
        return float(trapezoid(trapezoid(self.values, self.x_values, axis=1), self.p_values))

    def value_at_origin(self) -> float:
        j = int(np.argmin(np.abs(self.x_values)))
        i = int(np.argmin(np.abs(self.p_values)))
        return float(self.values[i, j])

    def to_csv(self, path) -> None:
        xx, pp = np.meshgrid(self.x_values, self.p_values)
        data = np.column_stack([xx.ravel(), pp.ravel(), self.values.ravel()])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,p,W", comments="")

    def to_binary(self, path) -> None:
        """Header ``(nx, ny, version)`` as little-endian int32, then row-major float64."""
        ny, nx = self.values.shape
        with open(path, "wb") as fh:
            fh.write(struct.pack("<3i", nx, ny, WIGNER_VERSION))
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @staticmethod
    def read_binary(path) -> np.ndarray:
        raw = Path(path).read_bytes()
        nx, ny, version = struct.unpack("<3i", raw[:12])
        if version != WIGNER_VERSION:
            raise ValueError(f"unsupported Wigner grid version {version}")
        return np.frombuffer(raw[12:], dtype="<f8").reshape(ny, nx)


def _laguerre_functions(k: int, count: int, x: np.ndarray):
    """Orthonormal ``sqrt(m!/(m+k)!) x^{k/2} e^{-x/2} L_m^{(k)}(x)`` for ``m < count``.

    Each function is bounded by 1, so the forward recurrence stays well
    scaled where the raw Laguerre recurrence overflows.
    """
    if k == 0:
        start = np.exp(-0.5 * x)
    else:
        with np.errstate(divide="ignore"):
            start = np.exp(0.5 * k * np.log(x) - 0.5 * x - 0.5 * math.lgamma(k + 1.0))
    prev, cur = None, start
    yield cur
    for m in range(count - 1):
        nxt = (2 * m + k + 1 - x) * cur
        if prev is not None:
            nxt = nxt - math.sqrt(m * (m + k)) * prev
        nxt = nxt / math.sqrt((m + 1) * (m + k + 1))
        prev, cur = cur, nxt
        yield cur


def wigner_values(state: FockVector, x, p) -> np.ndarray:
    """``W`` at matching arrays of points ``x``, ``p``.

    Uses the closed form of ``(1/pi) <psi| D(alpha) P D(alpha)† |psi>`` (``P``
    the parity): the Wigner function of ``|m><m+k|`` is
    ``(-1)^m e^{i k arg(alpha)} l_m^{(k)}(4|alpha|^2) / pi`` with ``l`` the
    orthonormal Laguerre functions.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    alpha = (x + 1j * p) / math.sqrt(2.0)
    radial = 4.0 * np.abs(alpha) ** 2
    phase = np.exp(1j * np.angle(alpha))
    c = state.amps
    dim = c.size
    total = np.zeros(radial.shape)
    twist = np.ones(radial.shape, dtype=complex)
    for k in range(dim):
        s = np.zeros(radial.shape, dtype=complex) if k else np.zeros(radial.shape)
        for m, ell in enumerate(_laguerre_functions(k, dim - k, radial)):
            coeff = c[m] * np.conj(c[m + k])
            if coeff != 0:
                s = s + ((-1) ** m * coeff) * ell
        if k == 0:
            total += np.real(s)
        else:
            total += 2.0 * np.real(twist * s)
        twist = twist * phase
    return total / np.pi


def default_extent(state: FockVector, quantile: float = 1e-12) -> float:
    """Half-width covering the state's phase-space support with a margin."""
    prob = state.probabilities()
    tail = np.cumsum(prob[::-1])[::-1]
    above = np.nonzero(tail > quantile)[0]
    n_hi = int(above[-1]) if above.size else 0
    return math.sqrt(2.0 * n_hi + 1.0) + 3.0


def wigner(state: FockVector, extent: float | None = None, points: int = 201, *, x=None, p=None) -> WignerGrid:
    """Wigner function on a square grid (or on given ``x``/``p`` axes).

    The grid is flagged ``undersampled`` when its integral misses 1 by more
    than 1e-3 or the boundary still carries noticeable values.
    """
    check_normalized(state)
    if x is None or p is None:
        if extent is None:
            extent = default_extent(state)
        if points < 3 or extent <= 0:
            raise ValueError("grid needs at least 3 points and positive extent")
        axis = np.linspace(-extent, extent, points)
        x = axis if x is None else x
        p = axis if p is None else p
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    xx, pp = np.meshgrid(x, p)
    vals = wigner_values(state, xx, pp)
    grid = WignerGrid(x, p, vals)
    peak = np.max(np.abs(vals))
    edge = max(np.abs(vals[[0, -1], :]).max(), np.abs(vals[:, [0, -1]]).max())
    bad = abs(grid.integral - 1.0) > 1e-3 or edge > 1e-4 * peak
    return WignerGrid(x, p, vals, bool(bad))


def hermite_functions(nmax: int, x) -> np.ndarray:
    """Normalized Hermite functions ``phi_0..phi_nmax`` at ``x`` (rows = n)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((nmax + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x**2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def wigner_quadrature(state: FockVector, x: float, p: float, *, half_width: float | None = None, step: float = 0.01) -> float:
    """``W(x, p)`` straight from the position-space integral.

    The integrand is smooth and decays like a Gaussian, so the trapezoid rule
    on a wide uniform grid converges exponentially fast.
    """
    if half_width is None:
        half_width = 2.0 * (default_extent(state) + abs(x)) + 10.0
    y = np.arange(-half_width, half_width + step / 2, step)
    phi_plus = hermite_functions(state.cutoff, x + y / 2)
    phi_minus = hermite_functions(state.cutoff, x - y / 2)
    c = state.amps
    psi_plus = c @ phi_plus
    psi_minus = c @ phi_minus
    integrand = np.conj(psi_plus) * psi_minus * np.exp(1j * p * y)
    return float(trapezoid(integrand, y).real / (2.0 * np.pi))


def symmetry_scan(state: FockVector, n: int, extent: float | None = None, points: int = 101) -> float:
    """Max ``|W(R x) - W(x)|`` over a grid for the rotation ``R`` by ``2pi/n``.

    The rotated Wigner function is evaluated from the Fock-rotated state, so
    no interpolation is involved.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if extent is None:
        extent = default_extent(state)
    g0 = wigner(state, extent, points)
    g1 = wigner(rotate(state, 2.0 * math.pi / n), extent, points)
    return float(np.max(np.abs(g1.values - g0.values)))
