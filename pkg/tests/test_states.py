import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockent.analysis import check_inequality, eigen_residual
from fockent.errors import DegenerateStateError, DivergentSeriesError, TruncationError
from fockent.fock import apply_ladder, fidelity
from fockent.states import (
    GeneralizedKL,
    HigherCat,
    generalized_kl_closed_form,
    make_coherent,
    make_fock,
    make_generalized_kl,
    make_higher_cat,
    make_squeezed_vacuum,
    state_from_dict,
)


def test_coherent_examples():
    assert np.allclose(make_coherent(0.0).amps[0], 1.0)
    assert abs(make_coherent(1.0).amps[0] - math.exp(-0.5)) < 1e-9
    psi = make_coherent(2.0)
    low, _ = apply_ladder(psi, "a", "lower")
    keep = psi.cutoff
    assert np.linalg.norm(low.amps[:keep] - 2.0 * psi.amps[:keep]) < 1e-8


def test_coherent_cutoff_too_small():
    with pytest.raises(TruncationError):
        make_coherent(3.0, cutoff=4)


def test_fock_state():
    psi = make_fock(3, 5)
    assert psi.amps[3] == 1 and psi.cutoff == 5


def test_squeezed_vacuum_examples():
    assert np.allclose(make_squeezed_vacuum(0.0).amps[0], 1.0)
    assert abs(make_squeezed_vacuum(1.0).mean_photon_number() - math.sinh(1) ** 2) < 1e-6
    psi = make_squeezed_vacuum(0.8, math.pi / 3, cutoff=80)
    low, _ = apply_ladder(psi, "a", "lower")
    up, _ = apply_ladder(psi, "a", "raise")
    n = psi.cutoff - 1
    res = low.amps[:n] + np.exp(1j * math.pi / 3) * math.tanh(0.8) * up.amps[:n]
    assert np.linalg.norm(res) / low.norm() < 1e-7


def test_squeezed_vacuum_negative_r():
    with pytest.raises(ValueError):
        make_squeezed_vacuum(-0.1)


def test_higher_cat_n1_is_coherent():
    assert fidelity(make_higher_cat(1.2, 1, cutoff=40), make_coherent(1.2, 40)) > 1 - 1e-12


def test_odd_two_cat_support_and_eigen():
    psi = make_higher_cat(2.0, 2, (0.0, math.pi))
    assert np.allclose(psi.amps[::2], 0)
    assert eigen_residual(psi, 2, 0, 4.0) < 1e-8


def test_four_cat_support_and_saturation():
    psi = make_higher_cat(3.0, 4, (0.0,) * 4)
    nz = np.nonzero(np.abs(psi.amps) > 1e-14)[0]
    assert np.all(nz % 4 == 0)
    assert check_inequality(psi, "cat", n=4).relative_gap < 1e-8


def test_higher_cat_degenerate():
    with pytest.raises(DegenerateStateError):
        make_higher_cat(1e-7, 2, (0.0, math.pi))


def test_kl_matches_squeezed_vacuum():
    psi = make_generalized_kl(1, 1, -math.tanh(0.7), 0)
    assert fidelity(psi, make_squeezed_vacuum(0.7, 0.0)) >= 1 - 1e-9


def test_kl_l0_is_even_cat():
    alpha = 1.3
    psi = make_generalized_kl(2, 0, alpha**2, 0)
    cat = make_higher_cat(alpha, 2, (0.0, 0.0), cutoff=psi.cutoff)
    assert fidelity(psi, cat) >= 1 - 1e-9


def test_kl_3_1_support_and_residual():
    psi = make_generalized_kl(3, 1, 1.0, 0)
    nz = np.nonzero(np.abs(psi.amps) > 0)[0]
    assert np.all(nz % 4 == 0)
    assert eigen_residual(psi, 3, 1, 1.0) < 1e-7


def test_kl_errors():
    with pytest.raises(ValueError):
        make_generalized_kl(1, 2, 0.5)
    with pytest.raises(DivergentSeriesError):
        make_generalized_kl(2, 2, 1.5)
    with pytest.raises(TruncationError):
        make_generalized_kl(1, 1, 0.9, cutoff=6)


@pytest.mark.parametrize("k,l,eta", [(2, 1, 0.5), (3, 1, -0.8 + 0.3j), (4, 2, 2.0), (3, 3, 0.4j)])
def test_closed_form_matches_recursion(k, l, eta):
    psi = make_generalized_kl(k, l, eta, 0)
    ref = generalized_kl_closed_form(k, l, eta, psi.cutoff)
    assert fidelity(psi, ref) > 1 - 1e-12


@settings(max_examples=25, deadline=None)
@given(
    st.integers(1, 4),
    st.integers(0, 3),
    st.floats(-2.0, 2.0).filter(lambda x: abs(x) > 1e-3),
    st.integers(0, 3),
)
def test_kl_eigen_residual_property(k, l, eta, seed):
    if l > k or seed >= k:
        return
    if k == l and abs(eta) >= 0.95:
        return
    psi = make_generalized_kl(k, l, eta, seed)
    assert eigen_residual(psi, k, l, eta) < 1e-7


def test_state_spec_roundtrip():
    for spec in (HigherCat(2.0, 3, (0.0, 1.0, 2.0)), GeneralizedKL(3, 1, 0.5 + 0.1j, 1)):
        again = state_from_dict(spec.to_dict())
        assert again == spec
        assert fidelity(again.build(), spec.build()) > 1 - 1e-15


def test_state_from_dict_rejects_unknown():
    with pytest.raises(ValueError):
        state_from_dict({"kind": "thermal"})
