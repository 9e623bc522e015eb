"""Numerical extremization of the second-order entropy over product inputs.

Each candidate is a pair of amplitude vectors. Before the objective is
evaluated the pair is mapped onto the feasible set: both modes are
normalized, then reweighted by a common ``t^n`` factor (``t`` found by root
bracketing) so that ``<n_a> + <n_b> = N`` holds exactly. The optimizer only
ever sees feasible points, so no Lagrange multipliers are needed.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .devices import BeamSplitter, DeviceSpec, as_bilinear, device_from_dict
from .entanglement import bracket_from_moments, moments_from_amps
from .fock import FockVector

GRAD_STEP = 1e-5


@dataclass(frozen=True)
class SearchConfig:
    N: float
    cutoff: int
    device: DeviceSpec = field(default_factory=lambda: BeamSplitter(0.01))
    restarts: int = 16
    max_iters: int = 500
    step_tolerance: float = 1e-12
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be non-negative")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.cutoff < math.ceil(self.N) + 8:
            raise ValueError(f"cutoff must be at least ceil(N) + 8 = {math.ceil(self.N) + 8}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> SearchConfig:
        data = dict(data)
        if "device" in data:
            data["device"] = device_from_dict(data["device"])
        return cls(**data)

    def to_dict(self) -> dict:
        return {
            "N": self.N, "cutoff": self.cutoff, "device": self.device.to_dict(),
            "restarts": self.restarts, "max_iters": self.max_iters,
            "step_tolerance": self.step_tolerance, "seed": self.seed, "threads": self.threads,
        }


@dataclass(frozen=True)
class SearchResult:
    best_value: float
    best_state_a: FockVector
    best_state_b: FockVector
    constraint_violation: float
    iterations_used: int
    converged: bool
    restart_index: int
    values: tuple = ()

    def to_dict(self) -> dict:
        def dump(v):
            return [[float(z.real), float(z.imag)] for z in v.amps]

        return {
            "best_value": self.best_value,
            "constraint_violation": self.constraint_violation,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "restart_index": self.restart_index,
            "restart_values": list(self.values),
            "best_state_a": dump(self.best_state_a),
            "best_state_b": dump(self.best_state_b),
        }


# ---------------------------------------------------------------------------


def _batch_project(ca: np.ndarray, cb: np.ndarray, N: float):
    """Row-wise energy projection for stacks of amplitude vectors.

    ``<n_a> + <n_b>`` under the reweighting ``|c_n|^2 t^{2n}`` is increasing
    in ``s = log t``; bisection on ``s`` runs all rows at once.
    """
    na = np.arange(ca.shape[1])
    nb = np.arange(cb.shape[1])
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(ca) ** 2)
        lb = np.log(np.abs(cb) ** 2)

    def mean_n(logw, n, s):
        z = logw + 2.0 * s[:, None] * n
        w = np.exp(z - z.max(axis=1, keepdims=True))
        return (w @ n) / w.sum(axis=1)

    def excess(s):
        return mean_n(la, na, s) + mean_n(lb, nb, s) - N

    rows = ca.shape[0]
    lo = np.full(rows, -60.0)
    hi = np.full(rows, 60.0)
    if np.any(excess(lo) > 0) or np.any(excess(hi) < 0):
        raise ValueError(f"mean photon number {N} unreachable with these amplitudes")
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        up = excess(mid) > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    s = 0.5 * (lo + hi)
    va = ca * np.exp(s[:, None] * na)
    vb = cb * np.exp(s[:, None] * nb)
    va /= np.linalg.norm(va, axis=1, keepdims=True)
    vb /= np.linalg.norm(vb, axis=1, keepdims=True)
    return va, vb


def project_energy(ca: np.ndarray, cb: np.ndarray, N: float):
    """Normalize both modes and rescale by ``t^n`` so that ``<n_a> + <n_b> = N``.

    ``N = 0`` returns the vacuum pair. The first nonzero amplitude of each
    mode is made real and positive.
    """
    ca = np.asarray(ca, dtype=complex)
    cb = np.asarray(cb, dtype=complex)
    if N == 0:
        va = np.zeros(ca.size, complex)
        vb = np.zeros(cb.size, complex)
        va[0] = vb[0] = 1.0
        return va, vb
    va, vb = _batch_project(ca[None, :], cb[None, :], N)
    return _gauge(va[0]), _gauge(vb[0])


def _gauge(v: np.ndarray) -> np.ndarray:
    nz = np.nonzero(np.abs(v) > 0)[0]
    if nz.size == 0:
        return v
    z = v[nz[0]]
    out = v * (abs(z) / z)
    out[nz[0]] = abs(z)
    return out


def _unpack(x: np.ndarray, dim: int):
    """Split real parameters (last axis) into the two complex amplitude vectors."""
    ca = x[..., :dim] + 1j * x[..., dim : 2 * dim]
    cb = x[..., 2 * dim : 3 * dim] + 1j * x[..., 3 * dim :]
    return ca, cb


def _pack(ca: np.ndarray, cb: np.ndarray) -> np.ndarray:
    return np.concatenate([ca.real, ca.imag, cb.real, cb.imag])


def _batch_moments(c: np.ndarray, power: int, dagger: bool):
    """Row-wise ``<O>, <O^2>, <O O†>, <O† O>`` for ``O = a^power`` or its adjoint."""
    dim = c.shape[1]
    n = np.arange(dim, dtype=float)

    def fac(k):
        out = np.ones(max(dim - k, 0))
        for i in range(1, k + 1):
            out = out * (n[: dim - k] + i)
        return np.sqrt(out)

    def shifted(k):
        if k >= dim:
            return np.zeros(c.shape[0], complex)
        return np.sum(np.conj(c[:, : dim - k]) * c[:, k:] * fac(k), axis=1)

    prob = np.abs(c) ** 2
    m1, m2 = shifted(power), shifted(2 * power)
    # <a†^m a^m> = sum |c_n|^2 n!/(n-m)!, <a^m a†^m> = sum |c_n|^2 (n+m)!/n!
    falling = np.ones(dim)
    rising = np.ones(dim)
    for i in range(power):
        falling = falling * np.clip(n - i, 0, None)
        rising = rising * (n + 1 + i)
    n_low = prob @ falling
    n_up = prob @ rising
    if dagger:
        return np.conj(m1), np.conj(m2), n_low, n_up
    return m1, m2, n_up, n_low


class _Objective:
    """``2H/r^2`` evaluated on the projected pair."""

    def __init__(self, config: SearchConfig):
        self.config = config
        self.bil = as_bilinear(config.device)
        self.dim = config.cutoff + 1

    def value_of_pair(self, ca, cb) -> float:
        ma = moments_from_amps(ca, self.bil.m, self.bil.dagger_a)
        mb = moments_from_amps(cb, self.bil.n, False)
        return bracket_from_moments(ma, mb, self.bil.psi)

    def batch(self, xs: np.ndarray) -> np.ndarray:
        ca, cb = _batch_project(*_unpack(xs, self.dim), self.config.N)
        a1, a2, a_oo, a_dd = _batch_moments(ca, self.bil.m, self.bil.dagger_a)
        b1, b2, b_oo, b_dd = _batch_moments(cb, self.bil.n, False)
        ca2, cb2 = np.abs(a1) ** 2, np.abs(b1) ** 2
        var_a_dag = np.conj(a2 - a1 * a1)
        var_b = b2 - b1 * b1
        cross = np.real(np.exp(-2j * self.bil.psi) * var_a_dag * var_b)
        return (a_oo - ca2) * (b_dd - cb2) + (a_dd - ca2) * (b_oo - cb2) - 2.0 * cross

    def __call__(self, x) -> float:
        return float(self.batch(np.asarray(x)[None, :])[0])

    def gradient(self, x) -> np.ndarray:
        """Central differences with step ``GRAD_STEP``, all directions in one batch."""
        eye = GRAD_STEP * np.eye(x.size)
        vals = self.batch(np.vstack([x + eye, x - eye]))
        return (vals[: x.size] - vals[x.size :]) / (2 * GRAD_STEP)


def _run_restart(config: SearchConfig, objective: _Objective, rng_seed, sign: float):
    rng = np.random.default_rng(rng_seed)
    dim = objective.dim
    # decaying random amplitudes keep the starting points away from the cutoff
    scale = np.exp(-0.5 * np.arange(dim) / max(config.N, 0.5))
    ca = (rng.normal(size=dim) + 1j * rng.normal(size=dim)) * scale
    cb = (rng.normal(size=dim) + 1j * rng.normal(size=dim)) * scale
    ca, cb = project_energy(ca, cb, config.N)
    x0 = _pack(ca, cb)
    # scipy minimizes; flip the sign to ascend when maximizing
    res = minimize(
        lambda x: -sign * objective(x),
        x0,
        jac=lambda x: -sign * objective.gradient(x),
        method="L-BFGS-B",
        options={"maxiter": config.max_iters, "ftol": config.step_tolerance, "gtol": 1e-9},
    )
    ca, cb = project_energy(*_unpack(res.x, dim), config.N)
    value = objective.value_of_pair(ca, cb)
    return value, ca, cb, int(res.nit), bool(res.success)


def _search(config: SearchConfig, sign: float) -> SearchResult:
    objective = _Objective(config)
    r2 = 0.5 * objective.bil.r**2
    if config.N == 0:
        ca, cb = project_energy(np.ones(objective.dim), np.ones(objective.dim), 0.0)
        val = objective.value_of_pair(ca, cb)
        return SearchResult(r2 * val, FockVector(ca), FockVector(cb), 0.0, 0, True, 0, (r2 * val,))
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    def job(i):
        return _run_restart(config, objective, seeds[i], sign)

    if config.threads > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            runs = list(pool.map(job, range(config.restarts)))
    else:
        runs = [job(i) for i in range(config.restarts)]
    # ties go to the lowest restart index
    best = 0
    for i, run in enumerate(runs):
        if sign * run[0] > sign * runs[best][0]:
            best = i
    value, ca, cb, nit, ok = runs[best]
    a, b = FockVector(ca), FockVector(cb)
    violation = abs(a.mean_photon_number() + b.mean_photon_number() - config.N)
    return SearchResult(
        best_value=r2 * value,
        best_state_a=a,
        best_state_b=b,
        constraint_violation=violation,
        iterations_used=sum(r[3] for r in runs),
        converged=ok,
        restart_index=best,
        values=tuple(r2 * r[0] for r in runs),
    )


def maximize_generated_entropy(config: SearchConfig) -> SearchResult:
    """Largest second-order entropy over product inputs with ``<n_a + n_b> = N``."""
    return _search(config, +1.0)


def minimize_generated_entropy(config: SearchConfig) -> SearchResult:
    """Smallest second-order entropy over product inputs with ``<n_a + n_b> = N``."""
    return _search(config, -1.0)
