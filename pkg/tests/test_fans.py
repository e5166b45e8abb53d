import json
import math

import numpy as np
import pytest

from arrlab.errors import BadParam, BestEffort, DegenerateProjection, ImproperMeasure
from arrlab.fans import (
    Fan,
    FanFrame,
    MeasureCloud,
    SolverConfig,
    dihedral_act_on_config,
    equipartition_fan,
    mixed_cloud,
    residual_arrangement,
    residual_fan,
    sector_angle,
    sector_masses,
    solve,
    test_map_F,
    test_map_H,
    verify,
    vmf_cloud,
)
from arrlab.ration import Ration

E = np.eye(3)
FRAME = FanFrame(E[0], E[1])


def circle_cloud(angles, weights=None, d=3):
    pts = np.zeros((len(angles), d))
    pts[:, 0] = np.cos(angles)
    pts[:, 1] = np.sin(angles)
    return MeasureCloud.from_arrays(pts, weights)


def random_frame(rng, d):
    return FanFrame.from_vectors(*rng.standard_normal((2, d)))


@pytest.fixture(scope="module")
def clouds():
    return [vmf_cloud([1, 0, 0], 4, 2000, 1), vmf_cloud([0, 1, 1], 2, 2000, 2), vmf_cloud([-1, 1, 0], 6, 2000, 3)]


def test_sector_angle():
    assert sector_angle(E[0], FRAME) == 0
    assert sector_angle(E[1], FRAME) == pytest.approx(math.pi / 2)
    assert sector_angle(E[2], FRAME) is None


def test_measure_validation(tmp_path):
    with pytest.raises(BadParam):
        MeasureCloud(np.array([[1.0, 0, 0]]), np.array([0.5]))
    with pytest.raises(BadParam):
        MeasureCloud(np.array([[2.0, 0, 0]]), np.array([1.0]))
    with pytest.raises(BadParam):
        MeasureCloud.from_arrays([[1.0, 0]])
    mu = vmf_cloud([0, 0, 1], 3, 50, 0)
    path = tmp_path / "m.csv"
    mu.to_csv(path)
    back = MeasureCloud.from_csv(path)
    assert np.allclose(back.points, mu.points, atol=1e-15) and np.allclose(back.weights, mu.weights, atol=1e-15)
    path.write_text("2,1,0,0\n2,0,1,0\n")
    assert MeasureCloud.from_csv(path).weights.tolist() == [0.5, 0.5]


def test_uniform_circle_quartiles():
    mu = circle_cloud(2 * np.pi * (np.arange(4000) + 0.5) / 4000)
    for sigma in (0.0, 0.05):
        fan = equipartition_fan(FRAME, mu, 4, sigma)
        assert np.allclose(fan.psi, [0, np.pi / 2, np.pi, 3 * np.pi / 2], atol=2e-3)
    assert np.allclose(sector_masses(equipartition_fan(FRAME, mu, 2), mu), [0.5, 0.5])


def test_single_atom_is_improper():
    mu = MeasureCloud(np.array([[0.0, 1.0, 0.0]]), np.array([1.0]))
    with pytest.raises(ImproperMeasure):
        equipartition_fan(FRAME, mu, 3, 0.0)


def test_degenerate_projection():
    mu = MeasureCloud.from_arrays([[0, 0, 1.0], [1.0, 0, 0], [0, 1.0, 0]])
    with pytest.raises(DegenerateProjection):
        equipartition_fan(FRAME, mu, 2, 0.05)


def test_smoothed_equipartition_is_exact(clouds):
    rng = np.random.default_rng(0)
    for mu in clouds:
        for n in (2, 3, 5, 8):
            for sigma in (0.02, 0.05, 0.2):
                fan = equipartition_fan(random_frame(rng, 3), mu, n, sigma)
                assert np.max(np.abs(sector_masses(fan, mu, sigma) - 1 / n)) < 1e-9


def test_sector_masses_sum(clouds):
    rng = np.random.default_rng(1)
    mu = clouds[1]
    fan = equipartition_fan(random_frame(rng, 3), clouds[0], 6, 0.05)
    for sigma in (0.0, 0.05):
        assert abs(sector_masses(fan, mu, sigma).sum() - 1) < 1e-9
    one = Fan(fan.frame, 1, [0.0])
    assert sector_masses(one, mu)[0] == pytest.approx(1.0)


def test_test_map_F_examples(clouds):
    mu1 = circle_cloud([np.pi / 2, 3 * np.pi / 2], [0.5, 0.5])
    mu2 = circle_cloud([1.0, 4.0], [0.3, 0.7])
    assert np.allclose(test_map_F(FRAME, [mu1, mu2], 2), [-0.2, 0.2])
    assert test_map_F(FRAME, [mu1], 2).size == 0
    rng = np.random.default_rng(2)
    fr = random_frame(rng, 3)
    assert np.max(np.abs(test_map_F(fr, [clouds[0], clouds[0]], 5, 0.05))) < 1e-9


def test_test_map_H_examples(clouds):
    mu1 = circle_cloud([np.pi / 4, 3 * np.pi / 4], [0.5, 0.5])
    assert np.allclose(test_map_H(FRAME, [mu1], 2), [-np.pi / 2, np.pi / 2])
    even = circle_cloud(2 * np.pi * (np.arange(600) + 0.5) / 600)
    assert np.allclose(test_map_H(FRAME, [even], 3)[:3], 0, atol=1e-12)


def test_blocks_lie_in_W_n(clouds):
    rng = np.random.default_rng(3)
    for _ in range(20):
        fr = random_frame(rng, 3)
        n = int(rng.integers(2, 7))
        F = test_map_F(fr, clouds, n, 0.05).reshape(-1, n)
        assert np.all(np.abs(F.sum(axis=1)) < 1e-12)
        H = test_map_H(fr, clouds, n, 0.05).reshape(-1, n)
        assert np.all(np.abs(H.sum(axis=1)) < 1e-12)


def test_residual_fan(clouds):
    rng = np.random.default_rng(4)
    r = Ration((1, 2, 1, 2))
    for _ in range(10):
        fr = random_frame(rng, 3)
        assert np.max(np.abs(residual_fan(fr, [clouds[0]] * 3, r, 0.05))) < 1e-9
    fr = random_frame(rng, 3)
    (entry,) = residual_fan(fr, clouds[:2], Ration((1, 1)), 0.05)
    m = sector_masses(equipartition_fan(fr, clouds[0], 2, 0.05), clouds[1], 0.05)
    assert entry == pytest.approx(m[0] - m[1], abs=1e-12)
    # continuity under small frame perturbations
    base = residual_fan(fr, clouds, r, 0.05)
    near = FanFrame.from_vectors(fr.u + 1e-7 * rng.standard_normal(3), fr.w + 1e-7 * rng.standard_normal(3))
    assert np.max(np.abs(residual_fan(near, clouds, r, 0.05) - base)) < 1e-4
    assert np.max(np.abs(base)) > 1e-6


def test_residual_arrangement():
    mu = circle_cloud(2 * np.pi * (np.arange(400) + 0.5) / 400)
    assert np.allclose(residual_arrangement(FRAME, [mu], Ration((1, 1, 1, 1)), 0.05), 0, atol=1e-9)
    lop = circle_cloud([np.pi / 4, 3 * np.pi / 4], [0.5, 0.5])
    res = residual_arrangement(FRAME, [lop], Ration((1, 1)))
    assert res.shape == (1,) and res[0] == pytest.approx(-np.pi / 2)


def test_dihedral_action_is_equivariant():
    # proper measures: the mixtures put mass on every arc, so smoothed cuts are well conditioned
    clouds = [mixed_cloud([1, 0, 0], 4, 2000, 1), mixed_cloud([0, 1, 1], 2, 2000, 2)]
    rng = np.random.default_rng(5)
    n = 6
    for _ in range(10):
        fr = random_frame(rng, 3)
        x = test_map_F(fr, clouds, n, 0.05).reshape(-1, n)
        assert dihedral_act_on_config((0, 0), fr, clouds[0], n, 0.05) == fr
        eps = dihedral_act_on_config((1, 0), fr, clouds[0], n, 0.05)
        assert np.max(np.abs(test_map_F(eps, clouds, n, 0.05).reshape(-1, n) - np.roll(x, 1, axis=1))) < 1e-6
        sig = dihedral_act_on_config((0, 1), fr, clouds[0], n, 0.05)
        assert np.max(np.abs(test_map_F(sig, clouds, n, 0.05).reshape(-1, n) - x[:, ::-1])) < 1e-6
        full = dihedral_act_on_config((n, 0), fr, clouds[0], n, 0.05)
        assert np.allclose(full.u, fr.u, atol=1e-9) and np.allclose(full.w, fr.w, atol=1e-9)


def test_solve_trivial_fan(clouds):
    fan, rep = solve("fan", clouds[:1], Ration((1, 2, 1, 2)), SolverConfig(seed=3))
    assert rep.passed and rep.residual == []
    assert verify(fan, clouds[:1], Ration((1, 2, 1, 2))).passed


def test_solve_and_verify(clouds):
    r = Ration((1, 1))
    fan, rep = solve("fan", clouds[:2], r, SolverConfig(seed=7, restarts=8))
    assert rep.passed and rep.residual_max <= 1e-3
    again = verify(fan, clouds[:2], r)
    assert again.passed and again.to_json() == rep.to_json()
    moved = fan.psi.copy()
    moved[1] += 0.2
    assert not verify(Fan(fan.frame, 2, moved), clouds[:2], r).passed


def test_solver_determinism(clouds):
    r = Ration((1, 1))
    runs = [solve("fan", clouds[:2], r, SolverConfig(seed=11, restarts=6, threads=t)) for t in (1, 3, 1)]
    blobs = [json.dumps([f.to_json(), rep.to_json()]) for f, rep in runs]
    assert blobs[0] == blobs[1] == blobs[2]


def test_best_effort_and_warning(clouds):
    # three equal atoms: the two halves always differ by at least 1/3
    atoms = MeasureCloud.from_arrays([[1.0, 0.2, 0.1], [-0.3, 1.0, 0.2], [0.1, -0.5, 1.0]])
    cfg = SolverConfig(seed=0, restarts=2, max_evals=400)
    with pytest.raises(BestEffort) as info:
        solve("fan", [clouds[0], atoms], Ration((1, 1)), cfg)
    assert info.value.fan is not None and not info.value.report.passed
    assert info.value.report.residual_max >= 1 / 3 - 1e-9
    with pytest.warns(UserWarning, match="not guaranteed"):
        with pytest.raises(BestEffort):
            solve("fan", clouds + [atoms], Ration((1, 1)), cfg)


def test_designated_measure(clouds):
    fan, rep = solve("fan", clouds[:2], Ration((1, 1)), SolverConfig(seed=2, restarts=8, designated=1))
    assert rep.passed
    m = sector_masses(fan, clouds[1])
    assert abs(m[0] - 0.5) <= 1e-3


def test_fan_json_round_trip(clouds):
    fan = equipartition_fan(FRAME, clouds[0], 4, 0.05)
    back = Fan.from_json(json.loads(json.dumps(fan.to_json())))
    assert np.array_equal(back.psi, fan.psi) and np.array_equal(back.frame.u, fan.frame.u)
    with pytest.raises(BadParam):
        Fan.from_json({"u": [1, 0, 0]})
    with pytest.raises(BadParam):
        Fan(FRAME, 2, [0.0, 7.0])
