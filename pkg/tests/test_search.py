import math

import numpy as np
import pytest

from fockent.devices import BeamSplitter, TwoModeSqueezer
from fockent.entanglement import extremal_values
from fockent.search import SearchConfig, maximize_generated_entropy, minimize_generated_entropy, project_energy


def test_projection_hits_energy():
    rng = np.random.default_rng(0)
    ca = rng.normal(size=10) + 1j * rng.normal(size=10)
    cb = rng.normal(size=10) + 1j * rng.normal(size=10)
    va, vb = project_energy(ca, cb, 1.7)
    n = np.arange(10)
    total = np.sum(n * np.abs(va) ** 2) + np.sum(n * np.abs(vb) ** 2)
    assert abs(total - 1.7) < 1e-10
    assert abs(np.linalg.norm(va) - 1) < 1e-14
    assert va[0].imag == 0 and va[0].real > 0


def test_projection_zero_energy_is_vacuum():
    va, vb = project_energy(np.ones(5), np.ones(5), 0.0)
    assert va[0] == 1 and vb[0] == 1 and np.count_nonzero(va) == 1


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(N=4.0, cutoff=10)
    with pytest.raises(ValueError):
        SearchConfig(N=-1.0, cutoff=12)
    cfg = SearchConfig(N=1.0, cutoff=10, restarts=2)
    assert SearchConfig.from_dict(cfg.to_dict()) == cfg


def test_maximum_at_one_photon():
    cfg = SearchConfig(N=1.0, cutoff=10, restarts=3, seed=1)
    res = maximize_generated_entropy(cfg)
    theta = cfg.device.strength
    assert abs(res.best_value / theta**2 - extremal_values(1.0)[2]) < 0.02 * extremal_values(1.0)[2]
    assert res.constraint_violation < 1e-8


def test_search_is_reproducible_across_threads():
    cfg = SearchConfig(N=1.0, cutoff=10, restarts=3, seed=4)
    one = maximize_generated_entropy(cfg)
    many = maximize_generated_entropy(SearchConfig(N=1.0, cutoff=10, restarts=3, seed=4, threads=3))
    assert one.values == many.values and one.restart_index == many.restart_index


def test_two_mode_squeezer_minimum_and_vacuum():
    dev = TwoModeSqueezer(0.01)
    res = minimize_generated_entropy(SearchConfig(N=1.0, cutoff=10, device=dev, restarts=2))
    assert res.best_value / 0.01**2 == pytest.approx(0.5, abs=1e-6)
    res = maximize_generated_entropy(SearchConfig(N=0.0, cutoff=8, device=dev, restarts=2))
    assert res.best_value / 0.01**2 == pytest.approx(0.5, abs=1e-12)
