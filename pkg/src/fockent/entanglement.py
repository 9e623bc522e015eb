"""Linear entropy of two-mode pure states and its second-order predictors.

``H = 1 - Tr[rho_a^2]`` is computed from the amplitude matrix ``Psi``
(``Psi[n_a, n_b]``): ``rho_a = Psi Psi†`` and ``rho_b = Psi^T conj(Psi)``, so
the purity is a squared Frobenius norm and no eigendecomposition is needed.

The predictors evaluate the small-strength expansion of ``H`` for a product
input ``|psi_a>|psi_b>`` passed through ``exp(K)`` with
``K = (r/2)(e^{-i psi} O_a† O_b - e^{i psi} O_a O_b†)``:

    2H/r^2 = (<O_a O_a†> - |<O_a>|^2)(<O_b† O_b> - |<O_b>|^2)
           + (<O_a† O_a> - |<O_a>|^2)(<O_b O_b†> - |<O_b>|^2)
           - 2 Re[e^{-2i psi} Var(O_a†) Var(O_b)]

Beam splitters and two-mode squeezers are special cases (see
:func:`fockent.devices.as_bilinear`).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .devices import (
    BeamSplitter,
    DeviceSpec,
    GeneralBilinear,
    TwoModeSqueezer,
    as_bilinear,
    evolve,
)
from .fock import FockVector, TwoModeVector, check_normalized, lower_array, raise_array, tensor_product

COMPARE_LOSS_TOL = 1e-9


def reduced_density(state: TwoModeVector, keep: str = "a") -> np.ndarray:
    """Reduced density matrix of mode ``keep`` (the other mode is traced out)."""
    check_normalized(state)
    psi = state.matrix
    if keep == "a":
        return psi @ psi.conj().T
    if keep == "b":
        return psi.T @ psi.conj()
    raise ValueError(f"keep must be 'a' or 'b', got {keep!r}")


def purity(state: TwoModeVector, via: str = "a") -> float:
    rho = reduced_density(state, via)
    return float(np.sum(np.abs(rho) ** 2))


def linear_entropy(state: TwoModeVector, via: str = "a") -> float:
    """``1 - Tr[rho^2]`` of either reduced state (they agree for pure states)."""
    return float(min(max(1.0 - purity(state, via), 0.0), 1.0))


# ---------------------------------------------------------------------------
# single-mode moments of monomials O = a^m or a†^m


@dataclass(frozen=True)
class _MonomialMoments:
    """Moments of ``O`` (a^m or a†^m) in one mode."""

    mean: complex          # <O>
    mean_sq: complex       # <O^2>
    o_odag: float          # <O O†>
    odag_o: float          # <O† O>

    @property
    def var(self) -> complex:
        return self.mean_sq - self.mean * self.mean

    @property
    def var_dagger(self) -> complex:
        return self.var.conjugate()


def moments_from_amps(c: np.ndarray, power: int, dagger: bool) -> _MonomialMoments:
    """Moments of ``a^power`` (or ``a†^power``) for raw normalized amplitudes."""
    low = lower_array(c, power)
    low2 = lower_array(c, 2 * power)
    up, _ = raise_array(c, power, pad=True)
    mean = complex(np.vdot(c, low))
    mean_sq = complex(np.vdot(c, low2))
    n_low = float(np.vdot(low, low).real)   # <a†^m a^m>
    n_up = float(np.vdot(up, up).real)      # <a^m a†^m>
    if dagger:
        return _MonomialMoments(mean.conjugate(), mean_sq.conjugate(), n_low, n_up)
    return _MonomialMoments(mean, mean_sq, n_up, n_low)


def _monomial_moments(psi: FockVector, power: int, dagger: bool) -> _MonomialMoments:
    check_normalized(psi)
    return moments_from_amps(psi.amps, power, dagger)


def bracket_from_moments(ma: _MonomialMoments, mb: _MonomialMoments, psi: float) -> float:
    """``2H/r^2`` at leading order from the moments of ``O_a`` and ``O_b``."""
    ca, cb = abs(ma.mean) ** 2, abs(mb.mean) ** 2
    first = (ma.o_odag - ca) * (mb.odag_o - cb)
    second = (ma.odag_o - ca) * (mb.o_odag - cb)
    cross = (np.exp(-2j * psi) * ma.var_dagger * mb.var).real
    return float(first + second - 2.0 * cross)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictorTerms:
    """Ingredients of the beam-splitter predictor for one product input.

    ``f = (A+B)/2 + AB`` and ``g = |Var(a†) Var(b)|``; ``Theta`` is the phase
    of ``Var(b) / Var(a†)`` less ``2 psi`` (0 when either variance vanishes).
    """

    A: float
    B: float
    var_a_dag: complex
    var_a: complex
    var_b: complex
    psi: float
    f: float
    g: float
    Theta: float
    N: float

    @property
    def phase_term(self) -> float:
        return float((np.exp(-2j * self.psi) * self.var_a_dag * self.var_b).real)


def _theta_phase(var_b: complex, var_a_dag: complex, psi: float) -> float:
    if var_b == 0 or var_a_dag == 0:
        return 0.0
    th = np.angle(var_b) - np.angle(var_a_dag) - 2.0 * psi
    return float(math.remainder(th, 2.0 * math.pi))


def beamsplitter_terms(psi_a: FockVector, psi_b: FockVector, psi: float = 0.0) -> PredictorTerms:
    ma = _monomial_moments(psi_a, 1, False)
    mb = _monomial_moments(psi_b, 1, False)
    A = max(ma.odag_o - abs(ma.mean) ** 2, 0.0)
    B = max(mb.odag_o - abs(mb.mean) ** 2, 0.0)
    return PredictorTerms(
        A=A,
        B=B,
        var_a_dag=ma.var_dagger,
        var_a=ma.var,
        var_b=mb.var,
        psi=psi,
        f=(A + B) / 2 + A * B,
        g=abs(ma.var_dagger * mb.var),
        Theta=_theta_phase(mb.var, ma.var_dagger, psi),
        N=ma.odag_o + mb.odag_o,
    )


def predict_H_beamsplitter(psi_a: FockVector, psi_b: FockVector, theta: float, psi: float = 0.0) -> float:
    """Second-order beam-splitter entropy ``theta^2 (f - Re[e^{-2i psi} Var(a†)Var(b)])``."""
    t = beamsplitter_terms(psi_a, psi_b, psi)
    return theta**2 * (t.f - t.phase_term)


def predict_H_two_mode_squeezer(psi_a: FockVector, psi_b: FockVector, r: float, psi: float = 0.0) -> float:
    """Second-order two-mode-squeezer entropy ``(r^2/2)(2AB + A + B + 1 - 2Re[e^{-2i psi}Var(a)Var(b)])``."""
    t = beamsplitter_terms(psi_a, psi_b, psi)
    phase = (np.exp(-2j * psi) * t.var_a * t.var_b).real
    return 0.5 * r**2 * (2 * t.A * t.B + t.A + t.B + 1.0 - 2.0 * phase)


def general_bracket(psi_a: FockVector, psi_b: FockVector, device: DeviceSpec) -> float:
    """``2H/r^2`` at leading order for the general bilinear form of ``device``."""
    bil = as_bilinear(device)
    ma = _monomial_moments(psi_a, bil.m, bil.dagger_a)
    mb = _monomial_moments(psi_b, bil.n, False)
    return bracket_from_moments(ma, mb, bil.psi)


def predict_H_general(psi_a: FockVector, psi_b: FockVector, device: DeviceSpec) -> float:
    """Second-order entropy for any device, via its general bilinear form."""
    return 0.5 * as_bilinear(device).r ** 2 * general_bracket(psi_a, psi_b, device)


def predict_H_compact(psi_a: FockVector, psi_b: FockVector, device: DeviceSpec) -> float:
    """Compact form ``(r^2/2)|sqrt(<O_a O_a†><O_b† O_b>) - e^{i Theta} sqrt(<O_a† O_a><O_b O_b†>)|^2``.

    Equals :func:`predict_H_general` only for inputs with ``<O_a> = <O_b> = 0``
    that satisfy ``O|psi> ∝ O†|psi>`` in each mode.
    """
    bil = as_bilinear(device)
    ma = _monomial_moments(psi_a, bil.m, bil.dagger_a)
    mb = _monomial_moments(psi_b, bil.n, False)
    theta = _theta_phase(mb.var, ma.var_dagger, bil.psi)
    x = math.sqrt(max(ma.o_odag * mb.odag_o, 0.0))
    y = math.sqrt(max(ma.odag_o * mb.o_odag, 0.0))
    return 0.5 * bil.r**2 * abs(x - np.exp(1j * theta) * y) ** 2


def extremal_values(N: float) -> tuple[float, float, float]:
    """``(f_max, g_max, H_max / theta^2)`` at total mean photon number ``N``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    half = N / 2.0
    fmax = half * (half + 1.0)
    return fmax, fmax, N * (half + 1.0)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyComparison:
    exact: float
    predicted_second_order: float
    device_strength: float
    ratio_exact_over_strength_sq: float
    leaked_weight: float = 0.0

    @property
    def abs_error(self) -> float:
        return abs(self.exact - self.predicted_second_order)

    def csv_row(self, **params) -> dict:
        """Flat row: caller-supplied parameters first, then the numbers."""
        row = dict(params)
        row.update(
            exact=self.exact,
            predicted=self.predicted_second_order,
            ratio=self.ratio_exact_over_strength_sq,
        )
        return row

    def to_dict(self) -> dict:
        return asdict(self)


def exact_H(psi_a: FockVector, psi_b: FockVector, device: DeviceSpec, *, loss_tol: float = COMPARE_LOSS_TOL):
    """Exact output entropy; returns ``(H, TruncationReport)``."""
    out, report = evolve(tensor_product(psi_a, psi_b), device, loss_tol=loss_tol)
    return linear_entropy(out), report


def compare(psi_a: FockVector, psi_b: FockVector, device: DeviceSpec, *, loss_tol: float = COMPARE_LOSS_TOL) -> EntropyComparison:
    """Exact output entropy next to the matching second-order prediction."""
    h, report = exact_H(psi_a, psi_b, device, loss_tol=loss_tol)
    if isinstance(device, BeamSplitter):
        pred = predict_H_beamsplitter(psi_a, psi_b, device.theta, device.psi)
    elif isinstance(device, TwoModeSqueezer):
        pred = predict_H_two_mode_squeezer(psi_a, psi_b, device.r, device.psi)
    elif isinstance(device, GeneralBilinear):
        pred = predict_H_general(psi_a, psi_b, device)
    else:
        raise TypeError(f"unknown device {device!r}")
    s = device.strength
    ratio = h / s**2 if s != 0 else float("nan")
    return EntropyComparison(h, pred, s, ratio, report.leaked_weight)
