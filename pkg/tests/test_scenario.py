import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from annulus_bem.coupling_io import fem_data_from_values, fixture_text, read_reference_table
from annulus_bem.errors import ConfigError, ScenarioError
from annulus_bem.oracle import HarmonicReference
from annulus_bem.scenario import (
    DISTURBED,
    ConvergenceRecord,
    PlatePose,
    ScenarioConfig,
    coil_current,
    convergence_study,
    plate_pose,
    run_scenario,
)


def _synthetic(cfg):
    """u = ln(r / r_in) / ln(r_out / r_in): 0 on the inner circle, 1 on the outer."""
    mesh = cfg.mesh()
    r = np.hypot(*mesh.midpoints.T)
    vals = np.log(r / cfg.inner_radius) / math.log(cfg.outer_radius / cfg.inner_radius)
    return fem_data_from_values(mesh, vals)


@pytest.mark.parametrize("t, amps", [(0.0, 0.0), (0.005, 200.0), (1 / 600, 100.0)])
def test_coil_current(t, amps):
    assert coil_current(t) == pytest.approx(amps, abs=1e-12)


@settings(max_examples=50)
@given(st.floats(0, 1))
def test_coil_current_periodic(t):
    assert coil_current(t + 1 / 50) == pytest.approx(coil_current(t), abs=1e-10)


def test_poses():
    cfg = ScenarioConfig()
    assert plate_pose("initial") == PlatePose()
    assert plate_pose("Disturbed") is DISTURBED
    centroid_moved = DISTURBED.apply(cfg.plate_centroid, [[0.0, 0.0]])[0]
    assert centroid_moved == pytest.approx([-0.002, 0.020], abs=1e-15)
    assert DISTURBED.angle_deg == 10.0
    with pytest.raises(ConfigError):
        plate_pose("sideways")


@settings(max_examples=50)
@given(
    dx=st.floats(-0.01, 0.01), dy=st.floats(-0.01, 0.01), ang=st.floats(-180, 180),
)
def test_pose_is_rigid(dx, dy, ang):
    cfg = ScenarioConfig()
    local = cfg.local_plate_points()
    moved = PlatePose(dx, dy, ang).apply(cfg.plate_centroid, local)
    d0 = np.linalg.norm(local[:, None] - local[None], axis=-1)
    d1 = np.linalg.norm(moved[:, None] - moved[None], axis=-1)
    assert np.allclose(d0, d1, atol=1e-12, rtol=0)


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        ScenarioConfig(inner_radius=0.2)
    with pytest.raises(ConfigError):
        ScenarioConfig(n_outer=2)
    with pytest.raises(ConfigError):
        ScenarioConfig(coil_frequency=0.0)
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"outer_radius": 0.1, "colour": "red"})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n_outer": 12, "pose": {"dx": 0.001, "dy": 0.0, "angle_deg": 5}}))
    cfg = ScenarioConfig.load(path)
    assert cfg.n_outer == 12 and cfg.resolved_pose() == PlatePose(0.001, 0.0, 5.0)
    assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        ScenarioConfig.load(path)


@pytest.mark.parametrize("pose", ["initial", "disturbed"])
def test_synthetic_run_between_circles(pose):
    cfg = ScenarioConfig(pose=pose)
    res = run_scenario(cfg, _synthetic(cfg))
    # midpoints sit at r cos(pi/40), slightly inside each circle
    assert np.allclose(res.solution.a_bar[40:], 0.0, atol=2e-3)
    assert np.allclose(res.solution.a_bar[:40], 1.0, atol=2e-3)
    assert np.all((res.potentials > 0) & (res.potentials < 1))
    r = np.hypot(*res.sample_points.T)
    exact = np.log(r / 0.015) / math.log(0.1 / 0.015)
    assert np.allclose(res.potentials, exact, atol=0.01)
    assert res.report is None


def test_run_is_deterministic():
    cfg = ScenarioConfig(pose="disturbed")
    a = run_scenario(cfg, _synthetic(cfg))
    b = run_scenario(cfg, _synthetic(cfg))
    assert a.potentials.tobytes() == b.potentials.tobytes()
    assert a.solution.p_bar.tobytes() == b.solution.p_bar.tobytes()


def test_stand_in_report():
    cfg = ScenarioConfig(reference_fixture="table1", reference_stand_in=True)
    res = run_scenario(cfg, _synthetic(cfg))
    assert res.report.average == pytest.approx(7.47, abs=0.01)


def test_computed_report_uses_potentials():
    cfg = ScenarioConfig()
    ref = read_reference_table(fixture_text("table1"))
    res = run_scenario(cfg, _synthetic(cfg), reference=ref)
    assert [c for _, c in res.report.table.rows] == res.potentials.tolist()


def test_sample_in_hole():
    cfg = ScenarioConfig(plate_points=[[0.0, -0.018], [0.0, 0.0]])
    with pytest.raises(ScenarioError) as info:
        run_scenario(cfg, _synthetic(cfg))
    assert info.value.offending[0][0] == pytest.approx((0.0, 0.0))


def test_fem_size_mismatch():
    cfg = ScenarioConfig()
    small = ScenarioConfig(n_outer=10, n_inner=10)
    with pytest.raises(ConfigError):
        run_scenario(cfg, _synthetic(small))


def test_convergence_study():
    rec = convergence_study(HarmonicReference.log_r(), [20, 40, 80, 160])
    avgs = [r[2] for r in rec.rows]
    assert all(a > b for a, b in zip(avgs, avgs[1:]))
    assert len(convergence_study(HarmonicReference.log_r(), [40]).rows) == 1
    with pytest.raises(ConfigError):
        convergence_study(HarmonicReference.log_r(), [80, 40])
    with pytest.raises(ConfigError):
        convergence_study(HarmonicReference.log_r(), [21])
    with pytest.raises(ConfigError):
        ConvergenceRecord(((40, 0.1, 0.1), (40, 0.1, 0.1)))
