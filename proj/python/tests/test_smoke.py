import json
import math

import numpy as np
import pytest

import qww


def test_coin_is_unitary():
    u = qww.coin(0.4)
    assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-14)


def test_dispersion_relation():
    for theta in (0.0, 0.3, 1.1):
        for k in np.linspace(-3.0, 3.0, 13):
            assert math.cos(qww.omega(theta, k)) == pytest.approx(math.cos(theta) * math.cos(k), abs=1e-12)


def test_evolution_preserves_norm():
    h = qww.evolve(qww.random_state(32, 5), 0.7, 50)
    assert h.shape == (50, 32, 2)
    norms = np.sum(np.abs(h) ** 2, axis=(1, 2))
    assert np.max(np.abs(norms - 1.0)) < 1e-12


def test_step_matches_update_rule():
    s = qww.random_state(8, 1)
    u = qww.coin(0.3)
    shifted = np.stack([np.roll(s[:, 0], -1), np.roll(s[:, 1], 1)], axis=1)
    assert np.allclose(qww.step(s, 0.3), shifted @ u.T, atol=1e-15)


def test_wigner_is_hermitian():
    h = qww.evolve(qww.random_state(10, 3), 0.5, 16)
    w, kj, kp = qww.wigner(h, 8, 5)
    assert w.shape == (10, 11, 10, 2, 2)
    assert len(kj) == 11 and len(kp) == 10
    assert np.max(np.abs(w - np.conj(np.swapaxes(w, -1, -2)))) < 1e-12


def test_transport_audit_is_unique():
    h = qww.evolve(qww.plane_wave(16, 2, 0.3), 0.3, 20)
    a = qww.transport_audit(h, 10, 6, 0.3)
    assert a["unique"]
    assert a["exact"] == ["k_sign=-1,mass=2,cross=1"]


def test_errors_map_to_python():
    h = qww.evolve(qww.random_state(8, 3), 0.3, 10)
    with pytest.raises(ValueError):
        qww.wigner(h, 2, 4)
    with pytest.raises(ValueError):
        qww.convergence_order([(0.1, 1.0)])


def test_run_identities(tmp_path):
    code, log, err = qww.run("identities", out=str(tmp_path), fields=3, n_sites=16, steps=8)
    assert code == 0, err
    data = json.loads((tmp_path / "identities.json").read_text())
    assert data["exit_code"] == 0
    code, _, err = qww.run("identities", out=str(tmp_path), bogus=1)
    assert code == 1 and "bogus" in err
