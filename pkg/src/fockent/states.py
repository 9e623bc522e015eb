"""Constructors for the single-mode state families.

Every constructor returns a normalized :class:`~fockent.fock.FockVector`.
When ``cutoff`` is omitted it is chosen from the state's own Fock tail: at
least ``default_cutoff(<n>)`` and large enough that the discarded weight is
below ``1e-14``. Heavy-tailed states (strong squeezing, ``k == l``
generalized states) therefore get larger cutoffs than the heuristic alone.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DegenerateStateError, DivergentSeriesError, TruncationError
from .fock import FockVector, TruncationReport, default_cutoff

TAIL_TARGET = 1e-14
STATE_LEAK_TOL = 1e-10
KL_LEAK_TOL = 1e-8
MAX_AUTO_CUTOFF = 600


def _cutoff_from_logw(logw: np.ndarray, base: int, target: float = TAIL_TARGET) -> int:
    """Smallest cutoff >= base whose discarded weight fraction is <= target."""
    w = np.exp(logw - logw.max())
    tail = np.cumsum(w[::-1])[::-1] / w.sum()  # tail[i] = weight at indices >= i
    ok = np.nonzero(tail <= target)[0]
    first = int(ok[0]) - 1 if ok.size else logw.size - 1
    return max(base, first, 0)


def _tail_fraction(logw: np.ndarray, cutoff: int) -> float:
    if cutoff + 1 >= logw.size:
        return 0.0
    return float(np.exp(logsumexp(logw[cutoff + 1 :]) - logsumexp(logw)))


def _finish(amps: np.ndarray, logw: np.ndarray, cutoff: int | None, base: int, leak_tol):
    """Cut the extended amplitude list to the chosen cutoff and normalize."""
    if cutoff is None:
        cutoff = _cutoff_from_logw(logw, base)
    leak = _tail_fraction(logw, cutoff)
    if leak_tol is not None and leak > leak_tol:
        raise TruncationError(
            f"cutoff {cutoff} discards weight {leak:.3g} (> {leak_tol:.1g})"
        )
    out = np.zeros(cutoff + 1, dtype=complex)
    keep = min(cutoff + 1, amps.size)
    out[:keep] = amps[:keep]
    return FockVector(out).normalize(), TruncationReport(leak, leak_tol or KL_LEAK_TOL)


def _coherent_log_amps(alpha: complex, size: int):
    n = np.arange(size)
    if alpha == 0:
        logmag = np.full(size, -np.inf)
        logmag[0] = 0.0
        return logmag, np.zeros(size)
    logmag = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1.0) - 0.5 * abs(alpha) ** 2
    return logmag, n * cmath.phase(alpha)


def _poisson_span(mean: float) -> int:
    return int(mean + 40.0 * math.sqrt(mean + 1.0) + 60)


# ---------------------------------------------------------------------------


def make_coherent(alpha: complex, cutoff: int | None = None, *, leak_tol=STATE_LEAK_TOL) -> FockVector:
    """Coherent state ``|alpha>`` with amplitudes ``e^{-|alpha|^2/2} alpha^n / sqrt(n!)``."""
    alpha = complex(alpha)
    size = max(_poisson_span(abs(alpha) ** 2), (cutoff or 0) + 1)
    logmag, phase = _coherent_log_amps(alpha, size)
    amps = np.exp(logmag + 1j * phase)
    base = default_cutoff(abs(alpha) ** 2)
    return _finish(amps, 2 * logmag, cutoff, base, leak_tol)[0]


def make_fock(n: int, cutoff: int | None = None) -> FockVector:
    if n < 0:
        raise ValueError("photon number must be non-negative")
    if cutoff is None:
        cutoff = default_cutoff(n)
    return FockVector.basis(n, cutoff)


def make_squeezed_vacuum(r: float, phi: float = 0.0, cutoff: int | None = None, *, leak_tol=STATE_LEAK_TOL) -> FockVector:
    """``S(r, phi)|0>`` with ``S = exp(r (e^{-i phi} a^2 - e^{i phi} a†^2) / 2)``.

    Even-Fock amplitudes ``(-e^{i phi} tanh r)^j sqrt((2j)!) / (2^j j! sqrt(cosh r))``.
    The state obeys ``a|psi> = eta a†|psi>`` with ``eta = -e^{i phi} tanh r``.
    """
    if r < 0:
        raise ValueError("squeezing strength r must be non-negative")
    mean = math.sinh(r) ** 2
    base = default_cutoff(mean)
    if r == 0:
        return make_fock(0, base if cutoff is None else cutoff)
    t2 = math.tanh(r) ** 2
    jmax = int(base / 2 + 60.0 / -math.log(t2)) + 2
    jmax = max(jmax, ((cutoff or 0) // 2) + 1)
    j = np.arange(jmax)
    logmag = (
        -0.5 * math.log(math.cosh(r))
        + j * math.log(math.tanh(r))
        + 0.5 * gammaln(2 * j + 1.0)
        - j * math.log(2.0)
        - gammaln(j + 1.0)
    )
    size = 2 * jmax
    amps = np.zeros(size, dtype=complex)
    amps[0::2] = np.exp(logmag) * (-cmath.exp(1j * phi)) ** j
    logw = np.full(size, -np.inf)
    logw[0::2] = 2 * logmag
    return _finish(amps, logw, cutoff, base, leak_tol)[0]


def make_higher_cat(alpha: complex, n: int, relative_phases=None, cutoff: int | None = None, *, leak_tol=STATE_LEAK_TOL) -> FockVector:
    """Compass state ``sum_k e^{i theta_k} |alpha e^{2 pi i k / n}>``, ``k = 0..n-1``.

    The norm is taken from the exact coherent-state Gram matrix, so the
    reported leakage is relative to the untruncated superposition.
    """
    if n < 1:
        raise ValueError("number of components n must be >= 1")
    phases = np.zeros(n) if relative_phases is None else np.asarray(relative_phases, dtype=float)
    if phases.shape != (n,):
        raise ValueError(f"expected {n} relative phases, got {phases.size}")
    alpha = complex(alpha)
    points = alpha * np.exp(2j * np.pi * np.arange(n) / n)
    weights = np.exp(1j * phases)

    gram = np.exp(
        -0.5 * np.abs(points)[:, None] ** 2
        - 0.5 * np.abs(points)[None, :] ** 2
        + np.conj(points)[:, None] * points[None, :]
    )
    norm2 = float(np.real(np.conj(weights) @ gram @ weights))
    if norm2 < 1e-12:
        raise DegenerateStateError(
            f"superposition norm^2 {norm2:.3g} underflows; increase |alpha| or change phases"
        )

    size = max(_poisson_span(abs(alpha) ** 2), (cutoff or 0) + 1)
    amps = np.zeros(size, dtype=complex)
    for w, pt in zip(weights, points):
        logmag, ph = _coherent_log_amps(pt, size)
        amps += w * np.exp(logmag + 1j * ph)

    base = default_cutoff(abs(alpha) ** 2)
    with np.errstate(divide="ignore"):
        logw = np.log(np.abs(amps) ** 2)
    if cutoff is None:
        cutoff = _cutoff_from_logw(logw, base)
    kept = float(np.sum(np.abs(amps[: cutoff + 1]) ** 2))
    leak = max(0.0, 1.0 - kept / norm2)
    if leak_tol is not None and leak > leak_tol:
        raise TruncationError(f"cutoff {cutoff} discards weight {leak:.3g} (> {leak_tol:.1g})")
    return FockVector(amps[: cutoff + 1]).normalize()


# ---------------------------------------------------------------------------
# generalized (k, l, eta) eigenstates of a^k |psi> = eta a†^l |psi>


def _validate_kl(k: int, l: int, eta: complex, seed: int) -> None:
    if l < 0 or k < 1:
        raise ValueError("need k >= 1 and l >= 0")
    if k < l:
        raise ValueError(f"need k >= l, got k={k}, l={l}")
    if k == l and abs(eta) > 1.0:
        raise DivergentSeriesError(f"series diverges for k == l and |eta| = {abs(eta):.6g} > 1")
    if not 0 <= seed < k:
        raise ValueError(f"seed must lie in [0, {k - 1}], got {seed}")


def _kl_log_chain(k: int, l: int, eta: complex, seed: int, jcount: int) -> np.ndarray:
    """log|Psi_{seed + j n}| for j < jcount from the coefficient recursion.

    Psi_{m+k} sqrt((m+k)!/m!) = eta Psi_{m-l} sqrt(m!/(m-l)!), stepping from
    index m - l = seed + j n to m + k = seed + (j+1) n.
    """
    n = k + l
    j = np.arange(jcount - 1)
    m = seed + j * n + l
    step = (
        math.log(abs(eta))
        + gammaln(m + 1.0)
        - 0.5 * gammaln(m - l + 1.0)
        - 0.5 * gammaln(m + k + 1.0)
    )
    return np.concatenate(([0.0], np.cumsum(step)))


def _kl_extended(k, l, eta, seed, min_index):
    """Log-magnitudes along the chain far enough to bound the tail."""
    n = k + l
    jcount = max(64, min_index // n + 2)
    while True:
        chain = _kl_log_chain(k, l, eta, seed, jcount)
        past_peak = chain[-1] < chain.max() - 80.0
        if past_peak or jcount >= 2_000_000:
            return chain
        jcount *= 4


def _last_needed(idx: np.ndarray, logw: np.ndarray) -> int:
    """Largest index to keep so the discarded fraction of ``exp(logw)`` is <= TAIL_TARGET."""
    w = np.exp(logw - logw.max())
    tail = np.cumsum(w[::-1])[::-1] / w.sum()
    ok = np.nonzero(tail <= TAIL_TARGET)[0]
    return int(idx[ok[0]] - 1 if ok.size else idx[-1])


def generalized_kl_with_report(k: int, l: int, eta: complex, seed: int = 0, cutoff: int | None = None, *, leak_tol=KL_LEAK_TOL):
    """Build the (k, l, eta) state and report the weight beyond the cutoff.

    For ``k == l`` and ``|eta| == 1`` the chain decays only polynomially; the
    leakage is then measured against a very long partial sum and is a lower
    bound on the true (possibly infinite) tail.
    """
    eta = complex(eta)
    _validate_kl(k, l, eta, seed)
    n = k + l
    if eta == 0:
        size = (cutoff if cutoff is not None else default_cutoff(seed)) + 1
        out = np.zeros(size, dtype=complex)
        out[seed] = 1.0
        return FockVector(out), TruncationReport(0.0, leak_tol or KL_LEAK_TOL)

    chain = _kl_extended(k, l, eta, seed, (cutoff or 0) + 1)
    idx = seed + n * np.arange(chain.size)
    w = np.exp(2 * (chain - chain.max()))
    mean = float(np.dot(idx, w) / w.sum())

    if cutoff is None:
        base = default_cutoff(mean)
        # also bound the tail of |psi_n|^2 (n+1)...(n+k+l), so moments up to
        # order k+l (and the eigen equation) are not spoiled by the cut
        moment_logw = 2 * chain + gammaln(idx + n + 1.0) - gammaln(idx + 1.0)
        last_idx = max(_last_needed(idx, 2 * chain), _last_needed(idx, moment_logw))
        cutoff = int(min(max(base, last_idx, seed), MAX_AUTO_CUTOFF))

    inside = idx <= cutoff
    leak = float(np.exp(logsumexp(2 * chain[~inside]) - logsumexp(2 * chain))) if (~inside).any() else 0.0
    if leak_tol is not None and leak > leak_tol:
        raise TruncationError(
            f"(k, l, eta) = ({k}, {l}, {eta:.4g}): cutoff {cutoff} discards weight {leak:.3g}"
        )
    amps = np.zeros(cutoff + 1, dtype=complex)
    j = np.arange(chain.size)[inside]
    keep = chain[inside]
    amps[idx[inside]] = np.exp(keep - keep.max()) * np.exp(1j * j * cmath.phase(eta))
    return FockVector(amps).normalize(), TruncationReport(leak, leak_tol or KL_LEAK_TOL)


def make_generalized_kl(k: int, l: int, eta: complex, seed: int = 0, cutoff: int | None = None, *, leak_tol=KL_LEAK_TOL) -> FockVector:
    """Normalizable solution of ``a^k |psi> = eta a†^l |psi>``.

    The seed picks the residue class: the state lives on Fock indices
    ``seed mod (k + l)``. ``k`` independent seeds ``0..k-1`` exist.
    ``(k, l) = (1, 1)`` reproduces the squeezed vacuum with ``tanh r = |eta|``
    and ``phi = arg(-eta)``; ``l = 0`` gives the k-component compass states.
    """
    return generalized_kl_with_report(k, l, eta, seed, cutoff, leak_tol=leak_tol)[0]


def generalized_kl_closed_form(k: int, l: int, eta: complex, cutoff: int) -> FockVector:
    """Seed-0 state from the explicit product formula.

    Psi_{jn} ∝ eta^j sqrt((jn)!) prod_{i=0}^{j-1} (in + l)! / (in + n)!
    """
    eta = complex(eta)
    _validate_kl(k, l, eta, 0)
    n = k + l
    amps = np.zeros(cutoff + 1, dtype=complex)
    if eta == 0:
        amps[0] = 1.0
        return FockVector(amps)
    jmax = cutoff // n
    logs = np.empty(jmax + 1)
    acc = 0.0
    for j in range(jmax + 1):
        logs[j] = j * math.log(abs(eta)) + 0.5 * math.lgamma(j * n + 1) + acc
        acc += math.lgamma(j * n + l + 1) - math.lgamma(j * n + n + 1)
    js = np.arange(jmax + 1)
    amps[js * n] = np.exp(logs - logs.max()) * np.exp(1j * js * cmath.phase(eta))
    return FockVector(amps).normalize()


# ---------------------------------------------------------------------------
# declarative specs (JSON-facing)


def _complex_from_json(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex numbers are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    return complex(float(value))


def _complex_to_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


@dataclass(frozen=True)
class Coherent:
    alpha: complex
    cutoff: int | None = None
    kind = "coherent"

    def build(self, cutoff=None) -> FockVector:
        return make_coherent(self.alpha, cutoff if cutoff is not None else self.cutoff)

    def to_dict(self):
        return _with_cutoff({"kind": self.kind, "alpha": _complex_to_json(self.alpha)}, self.cutoff)


@dataclass(frozen=True)
class Fock:
    n: int
    cutoff: int | None = None
    kind = "fock"

    def build(self, cutoff=None) -> FockVector:
        return make_fock(self.n, cutoff if cutoff is not None else self.cutoff)

    def to_dict(self):
        return _with_cutoff({"kind": self.kind, "n": int(self.n)}, self.cutoff)


@dataclass(frozen=True)
class SqueezedVacuum:
    r: float
    phi: float = 0.0
    cutoff: int | None = None
    kind = "squeezed_vacuum"

    def build(self, cutoff=None) -> FockVector:
        return make_squeezed_vacuum(self.r, self.phi, cutoff if cutoff is not None else self.cutoff)

    def to_dict(self):
        return _with_cutoff({"kind": self.kind, "r": self.r, "phi": self.phi}, self.cutoff)


@dataclass(frozen=True)
class HigherCat:
    alpha: complex
    n: int
    relative_phases: tuple = field(default=None)
    cutoff: int | None = None
    kind = "higher_cat"

    def build(self, cutoff=None) -> FockVector:
        return make_higher_cat(
            self.alpha, self.n, self.relative_phases, cutoff if cutoff is not None else self.cutoff
        )

    def to_dict(self):
        d = {"kind": self.kind, "alpha": _complex_to_json(self.alpha), "n": int(self.n)}
        if self.relative_phases is not None:
            d["relative_phases"] = [float(x) for x in self.relative_phases]
        return _with_cutoff(d, self.cutoff)


@dataclass(frozen=True)
class GeneralizedKL:
    k: int
    l: int
    eta: complex
    seed: int = 0
    cutoff: int | None = None
    kind = "generalized_kl"

    def build(self, cutoff=None, *, leak_tol=KL_LEAK_TOL) -> FockVector:
        return make_generalized_kl(
            self.k, self.l, self.eta, self.seed,
            cutoff if cutoff is not None else self.cutoff, leak_tol=leak_tol,
        )

    def to_dict(self):
        d = {"kind": self.kind, "k": self.k, "l": self.l, "eta": _complex_to_json(self.eta), "seed": self.seed}
        return _with_cutoff(d, self.cutoff)


StateSpec = Coherent | Fock | SqueezedVacuum | HigherCat | GeneralizedKL


def _with_cutoff(d, cutoff):
    if cutoff is not None:
        d["cutoff"] = int(cutoff)
    return d


def state_from_dict(data: dict) -> StateSpec:
    """Parse the JSON form of a state spec (``{"kind": ..., ...}``)."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError("state spec must be an object with a 'kind' field")
    kind = data["kind"]
    cutoff = data.get("cutoff")
    cutoff = None if cutoff is None else int(cutoff)
    try:
        if kind == "coherent":
            return Coherent(_complex_from_json(data["alpha"]), cutoff)
        if kind == "fock":
            return Fock(int(data["n"]), cutoff)
        if kind == "squeezed_vacuum":
            r = float(data["r"])
            if r < 0:
                raise ValueError("squeezing strength r must be non-negative")
            return SqueezedVacuum(r, float(data.get("phi", 0.0)), cutoff)
        if kind == "higher_cat":
            phases = data.get("relative_phases")
            return HigherCat(
                _complex_from_json(data["alpha"]), int(data["n"]),
                None if phases is None else tuple(float(x) for x in phases), cutoff,
            )
        if kind == "generalized_kl":
            spec = GeneralizedKL(
                int(data["k"]), int(data["l"]), _complex_from_json(data["eta"]),
                int(data.get("seed", 0)), cutoff,
            )
            _validate_kl(spec.k, spec.l, spec.eta, spec.seed)
            return spec
    except KeyError as exc:
        raise ValueError(f"state spec of kind {kind!r} is missing field {exc}") from None
    raise ValueError(f"unknown state kind {kind!r}")
