"""Two-mode unitaries: beam splitter, two-mode squeezer, general bilinear device.

Every device is ``exp(K)`` for an anti-Hermitian generator of the form

    K = (r/2) (e^{-i psi} O_a† O_b - e^{i psi} O_a O_b†)

with ``O_a`` in {a^m, a†^m} and ``O_b = b^n``. Truncation is symmetric: ``K``
is assembled from truncated ladder matrices and their exact adjoints, so
``K† = -K`` holds to the last bit and ``exp(K)`` is unitary on the truncated
space.

Beam-splitter phase convention
------------------------------
``BeamSplitter(theta, phi, psi)`` acts on creation operators exactly as the
SU(2) matrix

    M = [[e^{-i(phi+psi)/2} cos(theta/2), -e^{-i(phi-psi)/2} sin(theta/2)],
         [ e^{ i(phi-psi)/2} sin(theta/2),  e^{ i(phi+psi)/2} cos(theta/2)]]

i.e. ``U† (a†, b†)^T U = M (a†, b†)^T``. It factors as a local output phase
``exp(i (phi+psi)(n_a - n_b)/2)`` times ``exp(K)`` with
``K = (theta/2)(e^{i psi} a b† - e^{-i psi} a† b)``, the general form with
``O_a = a``, ``O_b = b``, ``r = theta`` and phase ``psi + pi``. In this
convention squeezed pairs with ``phi_b = phi_a + 2 psi`` stay separable and
``phi`` never changes the generated entanglement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import TruncationError
from .fock import TruncationReport, TwoModeVector, check_normalized

EVOLVE_LOSS_TOL = 1e-6


@dataclass(frozen=True)
class BeamSplitter:
    theta: float
    phi: float = 0.0
    psi: float = 0.0
    kind = "beam_splitter"

    @property
    def strength(self) -> float:
        return self.theta

    def with_strength(self, value: float) -> BeamSplitter:
        return replace(self, theta=value)

    def to_dict(self):
        return {"kind": self.kind, "theta": self.theta, "phi": self.phi, "psi": self.psi}


@dataclass(frozen=True)
class TwoModeSqueezer:
    r: float
    psi: float = 0.0
    kind = "two_mode_squeezer"

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("two-mode squeezing strength must be non-negative")

    @property
    def strength(self) -> float:
        return self.r

    def with_strength(self, value: float) -> TwoModeSqueezer:
        return replace(self, r=value)

    def to_dict(self):
        return {"kind": self.kind, "r": self.r, "psi": self.psi}


@dataclass(frozen=True)
class GeneralBilinear:
    """``O_a = a^m`` (or ``a†^m`` when ``dagger_a``), ``O_b = b^n``."""

    m: int
    n: int
    r: float
    psi: float = 0.0
    dagger_a: bool = False
    kind = "general_bilinear"

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("monomial powers m, n must be positive")
        if self.r < 0:
            raise ValueError("device strength r must be non-negative")

    @property
    def strength(self) -> float:
        return self.r

    def with_strength(self, value: float) -> GeneralBilinear:
        return replace(self, r=value)

    def to_dict(self):
        return {
            "kind": self.kind, "m": self.m, "n": self.n, "r": self.r,
            "psi": self.psi, "dagger_a": self.dagger_a,
        }


DeviceSpec = BeamSplitter | TwoModeSqueezer | GeneralBilinear


def as_bilinear(device: DeviceSpec) -> GeneralBilinear:
    """Express any device as the general bilinear form (dropping local phases)."""
    if isinstance(device, GeneralBilinear):
        return device
    if isinstance(device, TwoModeSqueezer):
        return GeneralBilinear(1, 1, device.r, device.psi, dagger_a=True)
    if isinstance(device, BeamSplitter):
        # sign of theta folds into the phase so r stays non-negative
        psi = device.psi + math.pi if device.theta >= 0 else device.psi
        return GeneralBilinear(1, 1, abs(device.theta), psi, dagger_a=False)
    raise TypeError(f"unknown device {device!r}")


def mode_powers(device: DeviceSpec) -> tuple[int, int]:
    b = as_bilinear(device)
    return b.m, b.n


def device_from_dict(data: dict) -> DeviceSpec:
    """Parse the JSON form of a device (``{"kind": ..., ...}``)."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError("device spec must be an object with a 'kind' field")
    kind = data["kind"]
    try:
        if kind == "beam_splitter":
            return BeamSplitter(float(data["theta"]), float(data.get("phi", 0.0)), float(data.get("psi", 0.0)))
        if kind == "two_mode_squeezer":
            return TwoModeSqueezer(float(data["r"]), float(data.get("psi", 0.0)))
        if kind == "general_bilinear":
            return GeneralBilinear(
                int(data["m"]), int(data["n"]), float(data["r"]),
                float(data.get("psi", 0.0)), bool(data.get("dagger_a", False)),
            )
    except KeyError as exc:
        raise ValueError(f"device spec of kind {kind!r} is missing field {exc}") from None
    raise ValueError(f"unknown device kind {kind!r}")


# ---------------------------------------------------------------------------


def lowering_matrix(cutoff: int, power: int = 1) -> sp.csr_matrix:
    """Truncated ``a^power`` as a sparse matrix."""
    a = sp.diags(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1, shape=(cutoff + 1, cutoff + 1))
    out = sp.identity(cutoff + 1, format="csr")
    for _ in range(power):
        out = out @ a
    return sp.csr_matrix(out, dtype=complex)


def _mode_ops(device: GeneralBilinear, cutoff_a: int, cutoff_b: int):
    la = lowering_matrix(cutoff_a, device.m)
    o_a = la.conj().T.tocsr() if device.dagger_a else la
    o_b = lowering_matrix(cutoff_b, device.n)
    return o_a, o_b


@lru_cache(maxsize=64)
def build_generator(device: DeviceSpec, cutoff_a: int, cutoff_b: int) -> sp.csr_matrix:
    """Sparse anti-Hermitian generator ``K`` with ``U = exp(K)`` (up to local phases).

    The returned matrix is shared through a cache; treat it as read-only.
    """
    bil = as_bilinear(device)
    o_a, o_b = _mode_ops(bil, cutoff_a, cutoff_b)
    first = sp.kron(o_a.conj().T, o_b, format="csr") * np.exp(-1j * bil.psi)
    k = 0.5 * bil.r * (first - first.conj().T)
    return sp.csr_matrix(k)


def _output_phase(device: DeviceSpec, cutoff_a: int, cutoff_b: int):
    if not isinstance(device, BeamSplitter):
        return None
    gamma = device.phi + device.psi
    if gamma == 0.0:
        return None
    na = np.arange(cutoff_a + 1)[:, None]
    nb = np.arange(cutoff_b + 1)[None, :]
    return np.exp(0.5j * gamma * (na - nb)).reshape(-1)


def edge_weight(state: TwoModeVector, powers: tuple[int, int]) -> float:
    """Weight in the outermost ``powers`` Fock levels of either mode."""
    mat = np.abs(state.matrix) ** 2
    pa, pb = powers
    inner = mat[: max(state.cutoff_a + 1 - pa, 0), : max(state.cutoff_b + 1 - pb, 0)].sum()
    return float(max(mat.sum() - inner, 0.0))


def evolve(state: TwoModeVector, device: DeviceSpec, *, loss_tol: float = EVOLVE_LOSS_TOL):
    """Apply the device unitary to a two-mode state.

    The action ``exp(K) v`` is computed with scipy's truncated-Taylor
    ``expm_multiply`` (scaling-and-squaring error control at double
    precision); no dense exponential is formed.

    Returns:
        ``(output, TruncationReport)``. The report's weight is the larger of
        the output's weight in the boundary Fock levels (where the truncated
        generator stops matching the true one) and any norm deficit. The
        output is renormalized.

    Raises:
        TruncationError: if that weight exceeds ``loss_tol``.
    """
    check_normalized(state)
    k = build_generator(device, state.cutoff_a, state.cutoff_b)
    out = expm_multiply(k, np.asarray(state.amps))
    phase = _output_phase(device, state.cutoff_a, state.cutoff_b)
    if phase is not None:
        out = out * phase
    result = TwoModeVector(out, state.cutoff_a, state.cutoff_b)
    deficit = abs(1.0 - result.norm() ** 2)
    leak = max(edge_weight(result, mode_powers(device)), deficit)
    if leak > loss_tol:
        raise TruncationError(
            f"{device.kind}: weight {leak:.3g} reached the cutoff "
            f"({state.cutoff_a}, {state.cutoff_b}); increase the cutoff"
        )
    return result.normalize(), TruncationReport(leak)


def unitary(device: DeviceSpec, cutoff_a: int, cutoff_b: int) -> np.ndarray:
    """Dense device unitary; meant for small truncations and checks."""
    k = build_generator(device, cutoff_a, cutoff_b).toarray()
    u = scipy.linalg.expm(k)
    phase = _output_phase(device, cutoff_a, cutoff_b)
    if phase is not None:
        u = phase[:, None] * u
    return u


def beamsplitter_matrix(theta: float, phi: float, psi: float) -> np.ndarray:
    """The 2x2 SU(2) matrix ``M`` acting on ``(a†, b†)``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [np.exp(-0.5j * (phi + psi)) * c, -np.exp(-0.5j * (phi - psi)) * s],
            [np.exp(0.5j * (phi - psi)) * s, np.exp(0.5j * (phi + psi)) * c],
        ]
    )


def heisenberg_check(device: BeamSplitter, cutoff_a: int, cutoff_b: int | None = None) -> float:
    """Max deviation of ``U† a U``, ``U† b U`` from the SU(2) prediction.

    With ``U† (a†, b†)^T U = M (a†, b†)^T`` the annihilators transform with
    ``conj(M)``. The comparison keeps only matrix elements between states
    whose total photon number is at most ``min(cutoff) - 2``; the beam
    splitter conserves total number, so those sectors are represented
    exactly by the truncation.
    """
    if cutoff_b is None:
        cutoff_b = cutoff_a
    if min(cutoff_a, cutoff_b) < 3:
        raise ValueError("heisenberg_check needs cutoffs >= 3")
    u = unitary(device, cutoff_a, cutoff_b)
    la = lowering_matrix(cutoff_a).toarray()
    lb = lowering_matrix(cutoff_b).toarray()
    a = np.kron(la, np.eye(cutoff_b + 1))
    b = np.kron(np.eye(cutoff_a + 1), lb)
    mc = np.conj(beamsplitter_matrix(device.theta, device.phi, device.psi))
    got_a = u.conj().T @ a @ u
    got_b = u.conj().T @ b @ u
    want_a = mc[0, 0] * a + mc[0, 1] * b
    want_b = mc[1, 0] * a + mc[1, 1] * b
    na, nb = np.divmod(np.arange((cutoff_a + 1) * (cutoff_b + 1)), cutoff_b + 1)
    interior = (na + nb) <= min(cutoff_a, cutoff_b) - 2
    sel = np.ix_(interior, interior)
    return float(max(np.abs(got_a - want_a)[sel].max(), np.abs(got_b - want_b)[sel].max()))
