import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockent.devices import (
    BeamSplitter,
    GeneralBilinear,
    TwoModeSqueezer,
    build_generator,
    device_from_dict,
    evolve,
    heisenberg_check,
    lowering_matrix,
    unitary,
)
from fockent.entanglement import linear_entropy, reduced_density
from fockent.errors import TruncationError
from fockent.fock import FockVector, fidelity, tensor_product
from fockent.states import make_coherent, make_fock


def _coupled_pairs(k, cutoff_a, cutoff_b):
    dense = k.toarray()
    rows, cols = np.nonzero(np.abs(dense) > 1e-15)
    na, nb = np.divmod(rows, cutoff_b + 1)
    ma, mb = np.divmod(cols, cutoff_b + 1)
    return set(zip(na - ma, nb - mb))


def test_beamsplitter_generator_two_level_block():
    theta = 0.37
    k = build_generator(BeamSplitter(theta, 0.4, 1.1), 1, 1).toarray()
    mask = np.zeros((4, 4), bool)
    mask[1, 2] = mask[2, 1] = True
    assert np.allclose(k[~mask], 0)
    assert np.allclose(np.abs(k[mask]), theta / 2)


def test_generator_anti_hermitian():
    for dev in (BeamSplitter(0.3, 0.1, 0.7), TwoModeSqueezer(0.2, 0.5), GeneralBilinear(2, 1, 0.1, 0.3, True)):
        k = build_generator(dev, 5, 6).toarray()
        assert np.allclose(k, -k.conj().T)


def test_squeezer_generator_structure():
    assert _coupled_pairs(build_generator(TwoModeSqueezer(0.2), 4, 4), 4, 4) == {(1, 1), (-1, -1)}


def test_general_bilinear_generator_structure():
    pairs = _coupled_pairs(build_generator(GeneralBilinear(2, 2, 0.2), 5, 5), 5, 5)
    assert pairs == {(-2, 2), (2, -2)}


def test_zero_angle_is_identity():
    psi = tensor_product(make_coherent(0.7), make_fock(2, 10))
    out, rep = evolve(psi, BeamSplitter(0.0))
    assert np.array_equal(out.amps, psi.amps)
    assert rep.leaked_weight < 1e-15


def test_balanced_splitter_on_coherent():
    psi = tensor_product(make_coherent(1.0, 25), make_coherent(0.0, 25))
    out, _ = evolve(psi, BeamSplitter(math.pi / 2))
    s = math.sqrt(0.5)
    want = tensor_product(make_coherent(s, 25), make_coherent(s, 25))
    assert fidelity(out, want) >= 1 - 1e-8
    assert linear_entropy(out) < 1e-10


def test_two_mode_squeezer_on_vacuum():
    psi = tensor_product(make_fock(0, 12), make_fock(0, 12))
    out, _ = evolve(psi, TwoModeSqueezer(0.2))
    rho = reduced_density(out, "a")
    n = np.arange(rho.shape[0])
    assert abs(np.sum(n * np.diag(rho).real) - math.sinh(0.1) ** 2) < 1e-7


def test_truncation_error_on_small_cutoff():
    psi = tensor_product(make_coherent(2.0, 24), make_coherent(2.0, 24))
    with pytest.raises(TruncationError):
        evolve(psi, TwoModeSqueezer(4.0))


def test_heisenberg_identity_and_reflection():
    assert heisenberg_check(BeamSplitter(0.0), 6) < 1e-15
    # with this generator a full reflection sends a to -b
    cut = 6
    u = unitary(BeamSplitter(math.pi), cut, cut)
    la = lowering_matrix(cut).toarray()
    a = np.kron(la, np.eye(cut + 1))
    b = np.kron(np.eye(cut + 1), la)
    na, nb = np.divmod(np.arange((cut + 1) ** 2), cut + 1)
    sel = np.ix_((na + nb) <= cut - 2, (na + nb) <= cut - 2)
    assert np.abs((u.conj().T @ a @ u + b)[sel]).max() < 1e-9


@settings(max_examples=10, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_heisenberg_random(theta, phi, psi):
    assert heisenberg_check(BeamSplitter(theta, phi, psi), 12) < 1e-9


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(-3.0, 3.0))
def test_evolution_preserves_norm(theta, psi):
    rng = np.random.default_rng(0)
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    a = FockVector(np.concatenate([c, np.zeros(10)])).normalize()
    out, _ = evolve(tensor_product(a, a), BeamSplitter(theta, 0.0, psi))
    assert abs(out.norm() - 1) < 1e-12


def test_device_dict_roundtrip():
    for dev in (BeamSplitter(0.1, 0.2, 0.3), TwoModeSqueezer(0.4, 0.5), GeneralBilinear(2, 3, 0.1, 0.2, True)):
        assert device_from_dict(dev.to_dict()) == dev
    with pytest.raises(ValueError):
        device_from_dict({"kind": "mirror"})
    with pytest.raises(ValueError):
        device_from_dict({"kind": "beam_splitter"})
