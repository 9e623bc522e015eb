import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockent.errors import NormalizationError
from fockent.fock import (
    FockVector,
    MonomialSpec,
    TwoModeVector,
    apply_ladder,
    expectation,
    fidelity,
    inner,
    rotate,
    tensor_product,
    variance,
)
from fockent.states import make_coherent, make_fock, make_squeezed_vacuum


def test_lower_one_photon_gives_vacuum():
    out, rep = apply_ladder(make_fock(1, 3), "a", "lower")
    assert np.allclose(out.amps, [1, 0, 0, 0])
    assert rep.leaked_weight == 0.0


def test_lower_vacuum_is_zero():
    out, rep = apply_ladder(make_fock(0, 3), "a", "lower")
    assert np.allclose(out.amps, 0)
    assert rep.leaked_weight == 0.0


def test_raise_coherent_norm():
    out, _ = apply_ladder(make_coherent(1.0, 30), "a", "raise")
    assert abs(out.norm() ** 2 - 2.0) < 1e-8


def test_mode_b_on_single_mode_rejected():
    with pytest.raises(ValueError):
        apply_ladder(make_fock(1, 3), "b", "lower")


def test_expectation_examples():
    assert abs(expectation(make_coherent(2.0), MonomialSpec(1, 1, 0, 0)) - 4.0) < 1e-8
    sq = make_squeezed_vacuum(1.0, 0.0)
    assert abs(expectation(sq, MonomialSpec(0, 2, 0, 0)) + math.sinh(1) * math.cosh(1)) < 1e-6
    assert abs(expectation(make_fock(3, 6), MonomialSpec(0, 1, 0, 0))) < 1e-15


def test_expectation_rejects_unnormalized():
    with pytest.raises(NormalizationError):
        expectation(FockVector([1.0, 1.0]), MonomialSpec(1, 1))


def test_variance_examples():
    assert abs(variance(make_coherent(1.3 - 0.4j))) < 1e-9
    assert abs(variance(make_squeezed_vacuum(0.5, 0.0)) + math.sinh(0.5) * math.cosh(0.5)) < 1e-6
    assert abs(variance(make_fock(0, 4))) == 0.0


def test_tensor_product_indexing():
    v = tensor_product(make_fock(0, 2), make_fock(0, 2))
    assert v.amps[0] == 1
    v = tensor_product(make_fock(1, 3), make_fock(2, 4))
    assert v.amps[7] == 1 and abs(v.norm() - 1) < 1e-15


def test_tensor_product_mean_photon_number():
    v = tensor_product(make_coherent(1.0), make_coherent(1.0))
    total = expectation(v, MonomialSpec(p=1, q=1)) + expectation(v, MonomialSpec(r=1, s=1))
    assert abs(total - 2.0) < 1e-8


def test_two_mode_shape_validation():
    with pytest.raises(ValueError):
        TwoModeVector(np.ones(5), 1, 1)


def test_fidelity_pads_different_cutoffs():
    assert abs(fidelity(make_fock(2, 3), make_fock(2, 8)) - 1.0) < 1e-15


def test_rotate_moves_coherent_amplitude():
    r = rotate(make_coherent(1.5, 30), 0.3)
    assert fidelity(r, make_coherent(1.5 * np.exp(0.3j), 30)) > 1 - 1e-12


amp = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(st.lists(amp, min_size=3, max_size=10), st.integers(0, 2), st.integers(0, 2))
def test_expectation_matches_ladder_composition(coeffs, p, q):
    c = np.array(coeffs, dtype=complex)
    if np.linalg.norm(c) < 1e-3:
        c[0] = 1.0
    psi = FockVector(np.concatenate([c, np.zeros(p + q + 2)])).normalize()
    ket = psi
    if q:
        ket, _ = apply_ladder(ket, "a", "lower", q)
    bra = psi
    if p:
        bra, _ = apply_ladder(bra, "a", "lower", p)
    assert abs(expectation(psi, MonomialSpec(p, q)) - inner(bra, ket)) < 1e-10
