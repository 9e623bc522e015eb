import math

import numpy as np
import pytest

from fockent.analysis import (
    WignerGrid,
    check_inequality,
    eigen_residual,
    fit_eta,
    symmetry_scan,
    wigner,
    wigner_quadrature,
    wigner_values,
)
from fockent.fock import FockVector
from fockent.states import make_coherent, make_fock, make_generalized_kl, make_higher_cat, make_squeezed_vacuum


def test_squeeze_inequality_saturated_by_squeezed_vacuum():
    rep = check_inequality(make_squeezed_vacuum(1.0), "squeeze", k=1, l=1)
    s2, c2 = math.sinh(1) ** 2, math.cosh(1) ** 2
    assert abs(rep.lhs - s2 * c2) < 1e-6
    assert abs(rep.rhs - s2 * (s2 + 1)) < 1e-6
    assert rep.saturated


def test_cat_inequality_saturated():
    rep = check_inequality(make_higher_cat(1.7, 2, (0.0, 0.0)), "cat", n=2)
    assert rep.saturated and abs(rep.relative_gap) < 1e-8


def test_fock_state_not_saturated():
    rep = check_inequality(make_fock(3, 8), "squeeze", k=1, l=1)
    assert rep.lhs == 0 and abs(rep.rhs - 12) < 1e-12 and not rep.saturated


def test_inequality_argument_errors():
    psi = make_fock(1, 4)
    with pytest.raises(ValueError):
        check_inequality(psi, "squeeze", k=1, l=2)
    with pytest.raises(ValueError):
        check_inequality(psi, "cat", n=0)
    with pytest.raises(ValueError):
        check_inequality(psi, "bogus")


def test_random_states_obey_inequalities():
    rng = np.random.default_rng(1)
    for _ in range(50):
        c = rng.normal(size=12) + 1j * rng.normal(size=12)
        psi = FockVector(c).normalize()
        for k, l in ((1, 1), (2, 1), (3, 0), (2, 2)):
            assert check_inequality(psi, "squeeze", k=k, l=l).gap >= -1e-12


def test_eigen_residual_examples():
    assert eigen_residual(make_coherent(1.4 - 0.3j), 1, 0, 1.4 - 0.3j) < 1e-9
    assert eigen_residual(make_generalized_kl(2, 1, 0.5, 0), 2, 1, 0.5) < 1e-7
    assert abs(eigen_residual(make_fock(0, 4), 1, 1, 0.3) - 1.0) < 1e-15


def test_fit_eta_recovers_parameter():
    eta = 0.3 - 0.6j
    assert abs(fit_eta(make_generalized_kl(3, 1, eta, 1), 3, 1) - eta) < 1e-8


def test_wigner_vacuum_and_odd_cat():
    assert abs(wigner_values(make_fock(0, 0), 0.0, 0.0) - 1 / math.pi) < 1e-9
    odd = make_higher_cat(2.0, 2, (0.0, math.pi))
    assert abs(wigner_values(odd, 0.0, 0.0) + 1 / math.pi) < 1e-8


def test_wigner_coherent_centre():
    alpha = 1.0 + 0.5j
    x0, p0 = math.sqrt(2) * alpha.real, math.sqrt(2) * alpha.imag
    assert abs(wigner_values(make_coherent(alpha), x0, p0) - 1 / math.pi) < 1e-9


def test_wigner_matches_quadrature():
    psi = make_higher_cat(2.5, 3, (0.0, 0.7, 1.9))
    for x, p in ((0.3, -0.8), (1.7, 2.1), (-2.2, 0.4)):
        assert abs(wigner_values(psi, x, p) - wigner_quadrature(psi, x, p)) < 1e-10


def test_wigner_grid_integral_and_flag():
    grid = wigner(make_coherent(1.0), points=121)
    assert abs(grid.integral - 1) < 1e-6 and not grid.undersampled
    assert wigner(make_coherent(3.0), extent=1.0, points=21).undersampled


@pytest.mark.parametrize("n", [2, 5, 8])
def test_fig1_cat_symmetry(n):
    psi = make_higher_cat(5.0, n, (0.0,) * n)
    assert symmetry_scan(psi, n, points=61) < 1e-6


def test_symmetry_examples():
    assert symmetry_scan(make_generalized_kl(3, 1, 0.7, 0), 4, points=41) < 1e-9
    assert symmetry_scan(make_coherent(2.0), 2, points=41) > 0.1
    assert symmetry_scan(make_squeezed_vacuum(0.6), 2, points=41) < 1e-9


def test_wigner_files_roundtrip(tmp_path):
    grid = wigner(make_fock(1, 3), extent=3.0, points=11)
    grid.to_binary(tmp_path / "w.bin")
    assert np.array_equal(WignerGrid.read_binary(tmp_path / "w.bin"), grid.values)
    grid.to_csv(tmp_path / "w.csv")
    data = np.loadtxt(tmp_path / "w.csv", delimiter=",", skiprows=1)
    assert data.shape == (121, 3)
    assert np.array_equal(data[:, 2], grid.values.ravel())
