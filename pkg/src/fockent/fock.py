"""Truncated Fock-space vectors and ladder-operator algebra.

Single-mode states are stored as :class:`FockVector` (amplitudes over
``n = 0..cutoff``), two-mode states as :class:`TwoModeVector` with a flat
mode-a-major layout, ``index = n_a * (cutoff_b + 1) + n_b``.

Ladder operators act exactly inside the truncated space. Lowering never leaves
the space; raising drops whatever would land above the cutoff and reports the
dropped weight. Nothing here renormalizes behind the caller's back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError

NORM_TOL = 1e-9
LEAK_TOL = 1e-8


def _frozen_complex(values) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FockVector:
    """Single-mode state over photon numbers ``0..cutoff``."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen_complex(self.amps)
        if amps.size == 0:
            raise ValueError("a FockVector needs at least one amplitude")
        object.__setattr__(self, "amps", amps)

    @property
    def cutoff(self) -> int:
        return self.amps.size - 1

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> FockVector:
        nrm = self.norm()
        if nrm == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return FockVector(self.amps / nrm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def mean_photon_number(self) -> float:
        p = self.probabilities()
        return float(np.dot(np.arange(p.size), p) / p.sum())

    def resized(self, cutoff: int) -> FockVector:
        """Zero-pad (or cut) to a new cutoff. Cutting does not renormalize."""
        out = np.zeros(cutoff + 1, dtype=complex)
        keep = min(cutoff, self.cutoff) + 1
        out[:keep] = self.amps[:keep]
        return FockVector(out)

    @classmethod
    def basis(cls, n: int, cutoff: int) -> FockVector:
        if not 0 <= n <= cutoff:
            raise ValueError(f"Fock index {n} outside 0..{cutoff}")
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[n] = 1.0
        return cls(amps)

    def __repr__(self):
        return f"FockVector(cutoff={self.cutoff}, norm={self.norm():.6g})"


@dataclass(frozen=True, eq=False)
class TwoModeVector:
    """Two-mode state over ``|n_a> (x) |n_b>`` in mode-a-major order."""

    amps: np.ndarray
    cutoff_a: int
    cutoff_b: int

    def __post_init__(self):
        amps = _frozen_complex(self.amps)
        expected = (self.cutoff_a + 1) * (self.cutoff_b + 1)
        if amps.size != expected:
            raise ValueError(
                f"expected {expected} amplitudes for cutoffs "
                f"({self.cutoff_a}, {self.cutoff_b}), got {amps.size}"
            )
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_matrix(cls, mat) -> TwoModeVector:
        mat = np.asarray(mat, dtype=complex)
        return cls(mat.reshape(-1), mat.shape[0] - 1, mat.shape[1] - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.cutoff_a + 1, self.cutoff_b + 1)

    @property
    def matrix(self) -> np.ndarray:
        """Amplitudes as a ``(cutoff_a+1, cutoff_b+1)`` array (read-only view)."""
        return self.amps.reshape(self.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> TwoModeVector:
        nrm = self.norm()
        if nrm == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return TwoModeVector(self.amps / nrm, self.cutoff_a, self.cutoff_b)

    def __repr__(self):
        return (
            f"TwoModeVector(cutoffs=({self.cutoff_a}, {self.cutoff_b}), "
            f"norm={self.norm():.6g})"
        )


@dataclass(frozen=True)
class MonomialSpec:
    """Powers of the normally ordered monomial ``a†^p a^q b†^r b^s``."""

    p: int = 0
    q: int = 0
    r: int = 0
    s: int = 0

    def __post_init__(self):
        if min(self.p, self.q, self.r, self.s) < 0:
            raise ValueError("monomial powers must be non-negative")


@dataclass(frozen=True)
class TruncationReport:
    """Probability weight removed by the cutoff during one operation."""

    leaked_weight: float = 0.0
    tolerance: float = LEAK_TOL

    def __post_init__(self):
        w = min(max(float(self.leaked_weight), 0.0), 1.0)
        object.__setattr__(self, "leaked_weight", w)

    @property
    def flagged(self) -> bool:
        return self.leaked_weight > self.tolerance

    def combine(self, other: TruncationReport) -> TruncationReport:
        # weights this small add; the clamp in __post_init__ keeps it in [0, 1]
        return TruncationReport(
            self.leaked_weight + other.leaked_weight,
            min(self.tolerance, other.tolerance),
        )


# ---------------------------------------------------------------------------
# ladder kernels on raw arrays


def ladder_factors(n: np.ndarray, power: int) -> np.ndarray:
    """``sqrt((n+1)(n+2)...(n+power))`` elementwise."""
    n = np.asarray(n, dtype=float)
    out = np.ones_like(n)
    for i in range(1, power + 1):
        out = out * (n + i)
    return np.sqrt(out)


def lower_array(arr: np.ndarray, power: int, axis: int = 0) -> np.ndarray:
    """Apply ``a^power`` along ``axis``; exact in the truncated space."""
    arr = np.asarray(arr, dtype=complex)
    arr = np.moveaxis(arr, axis, 0)
    out = np.zeros_like(arr)
    dim = arr.shape[0]
    if power < dim:
        n = np.arange(dim - power)
        fac = ladder_factors(n, power).reshape((-1,) + (1,) * (arr.ndim - 1))
        out[: dim - power] = arr[power:] * fac
    return np.moveaxis(out, 0, axis)


def raise_array(arr: np.ndarray, power: int, axis: int = 0, pad: bool = False):
    """Apply ``a†^power`` along ``axis``.

    Returns ``(result, dropped)`` where ``dropped`` is the squared norm of the
    part pushed above the cutoff. With ``pad=True`` the axis grows by
    ``power`` instead, so nothing is dropped.
    """
    arr = np.asarray(arr, dtype=complex)
    arr = np.moveaxis(arr, axis, 0)
    dim = arr.shape[0]
    n = np.arange(dim)
    fac = ladder_factors(n, power).reshape((-1,) + (1,) * (arr.ndim - 1))
    raised = arr * fac
    if pad:
        out = np.zeros((dim + power,) + arr.shape[1:], dtype=complex)
        out[power:] = raised
        dropped = 0.0
    else:
        out = np.zeros_like(arr)
        keep = max(dim - power, 0)
        out[power:] = raised[:keep]
        dropped = float(np.sum(np.abs(raised[keep:]) ** 2))
    return np.moveaxis(out, 0, axis), dropped


# ---------------------------------------------------------------------------
# public operations


def _axis_for(state, mode: str) -> int:
    if mode not in ("a", "b"):
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    if isinstance(state, FockVector):
        if mode != "a":
            raise ValueError("a single-mode FockVector only has mode 'a'")
        return 0
    return 0 if mode == "a" else 1


def _as_array(state) -> np.ndarray:
    if isinstance(state, FockVector):
        return state.amps
    if isinstance(state, TwoModeVector):
        return state.matrix
    raise TypeError(f"expected FockVector or TwoModeVector, got {type(state).__name__}")


def _wrap(state, arr: np.ndarray):
    if isinstance(state, FockVector):
        return FockVector(arr)
    return TwoModeVector(arr.reshape(-1), state.cutoff_a, state.cutoff_b)


def apply_ladder(state, mode: str = "a", kind: str = "lower", power: int = 1):
    """Apply ``a^power`` / ``a†^power`` (or the mode-b versions) to a state.

    Args:
        state: a :class:`FockVector` or :class:`TwoModeVector`.
        mode: ``"a"`` or ``"b"``; single-mode vectors only accept ``"a"``.
        kind: ``"lower"`` or ``"raise"``.
        power: positive integer.

    Returns:
        ``(new_state, TruncationReport)``. The result is not renormalized; the
        report's weight is the fraction of the raised vector's squared norm
        that fell above the cutoff.
    """
    if power < 1:
        raise ValueError("power must be >= 1")
    axis = _axis_for(state, mode)
    arr = _as_array(state)
    if kind == "lower":
        return _wrap(state, lower_array(arr, power, axis)), TruncationReport(0.0)
    if kind == "raise":
        out, dropped = raise_array(arr, power, axis)
        total = dropped + float(np.sum(np.abs(out) ** 2))
        frac = dropped / total if total > 0 else 0.0
        return _wrap(state, out), TruncationReport(frac)
    raise ValueError(f"kind must be 'lower' or 'raise', got {kind!r}")


def check_normalized(state, tol: float = NORM_TOL) -> None:
    nrm2 = float(np.sum(np.abs(_as_array(state)) ** 2))
    if abs(nrm2 - 1.0) > tol:
        raise NormalizationError(f"state has squared norm {nrm2!r}, expected 1")


def expectation(state, spec: MonomialSpec) -> complex:
    """``<psi| a†^p a^q b†^r b^s |psi>``, exact for the stored vector.

    Only lowering operators are applied (to bra and ket separately), so the
    cutoff never truncates anything.
    """
    check_normalized(state)
    arr = _as_array(state)
    if isinstance(state, FockVector) and (spec.r or spec.s):
        raise ValueError("mode-b powers given for a single-mode state")
    bra, ket = arr, arr
    if spec.p:
        bra = lower_array(bra, spec.p, 0)
    if spec.q:
        ket = lower_array(ket, spec.q, 0)
    if isinstance(state, TwoModeVector):
        if spec.r:
            bra = lower_array(bra, spec.r, 1)
        if spec.s:
            ket = lower_array(ket, spec.s, 1)
    return complex(np.vdot(bra, ket))


def variance(state, mode: str = "a", which: str = "op") -> complex:
    """Complex variance ``<X^2> - <X>^2`` for ``X`` in {a, a†, b, b†}."""
    _axis_for(state, mode)
    if which not in ("op", "op_dagger"):
        raise ValueError(f"which must be 'op' or 'op_dagger', got {which!r}")
    if mode == "a":
        m1, m2 = expectation(state, MonomialSpec(q=1)), expectation(state, MonomialSpec(q=2))
    else:
        m1, m2 = expectation(state, MonomialSpec(s=1)), expectation(state, MonomialSpec(s=2))
    var = m2 - m1 * m1
    return var.conjugate() if which == "op_dagger" else var


def tensor_product(psi_a: FockVector, psi_b: FockVector) -> TwoModeVector:
    """Product state ``|psi_a> (x) |psi_b>`` in mode-a-major layout."""
    check_normalized(psi_a)
    check_normalized(psi_b)
    return TwoModeVector(np.kron(psi_a.amps, psi_b.amps), psi_a.cutoff, psi_b.cutoff)


def inner(phi, psi) -> complex:
    """``<phi|psi>`` for vectors of the same kind and shape."""
    return complex(np.vdot(_as_array(phi).reshape(-1), _as_array(psi).reshape(-1)))


def fidelity(phi, psi) -> float:
    """``|<phi|psi>|^2 / (|phi|^2 |psi|^2)``; vectors are zero-padded to match."""
    a, b = _as_array(phi), _as_array(psi)
    if a.shape != b.shape:
        shape = tuple(max(x, y) for x, y in zip(a.shape, b.shape))
        a = _pad_to(a, shape)
        b = _pad_to(b, shape)
    num = abs(np.vdot(a.reshape(-1), b.reshape(-1))) ** 2
    return float(num / (np.vdot(a, a).real * np.vdot(b, b).real))


def _pad_to(arr, shape):
    out = np.zeros(shape, dtype=complex)
    out[tuple(slice(0, s) for s in arr.shape)] = arr
    return out


def rotate(state: FockVector, angle: float) -> FockVector:
    """Phase-space rotation ``exp(i angle n)``; sends ``|alpha>`` to ``|alpha e^{i angle}>``."""
    n = np.arange(state.dim)
    return FockVector(state.amps * np.exp(1j * angle * n))


def log_factorial(n) -> np.ndarray:
    from scipy.special import gammaln

    return gammaln(np.asarray(n, dtype=float) + 1.0)


def default_cutoff(mean_n: float) -> int:
    """Cutoff heuristic ``ceil(<n> + 8 sqrt(<n>+1) + 10)``."""
    return int(math.ceil(mean_n + 8.0 * math.sqrt(mean_n + 1.0) + 10.0))
