import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diagcat import collective, meanfield, semiclassical as sc
from diagcat.models import Schedule, pspin_sector

S_GRID = np.linspace(0.0, 1.0, 101)
FEATURE_TOL = 0.02


@given(st.floats(0.0, 1.0))
@settings(max_examples=20, deadline=None)
def test_free_spin_closed_form(s):
    # p=1, c=1, lam=0: one unit vector in the field (1-s, s)
    density = lambda cfg, s_: sc.density_pspin(cfg, s_, 1, 1.0, 0.0)
    x, val, ok = sc.minimize_density(density, s, 2, np.random.default_rng(0))
    assert val == pytest.approx(-np.hypot(1.0 - s, s), abs=1e-9)


def test_density_accepts_components():
    cfg = sc.SpinConfig.from_mz([0.3, -0.2])
    a = sc.density_pspin(cfg, 0.4, 3, 0.8, 1.0)
    b = sc.density_pspin((cfg.mx, cfg.mz), 0.4, 3, 0.8, 1.0)
    assert a == b
    assert np.allclose(np.hypot(cfg.mx, cfg.mz), 1.0)


def test_pspin_jump_matches_meanfield():
    traj = sc.track_pspin(3, 0.8, 0.0, np.linspace(0.0, 1.0, 201))
    assert not traj.continuous
    s0, s1, _, size = traj.jumps[0]
    s_mf = meanfield.detect_transition_pspin(3, 0.8, 0.0).s_star
    assert s0 <= s_mf + 0.01 and s1 >= s_mf - 0.01
    assert size > 0.5


def test_weak_strong_limit_all_up():
    traj = sc.track_ws(0.6, 1.0, np.linspace(0.9, 1.0, 11))
    assert np.allclose(traj.mz[-1], 1.0, atol=1e-4)


def test_warm_start_determinism():
    a = sc.track_pspin(3, 0.8, 1.0, S_GRID[::4], seed=3)
    b = sc.track_pspin(3, 0.8, 1.0, S_GRID[::4], seed=3)
    assert np.array_equal(a.thetas, b.thetas)


def test_reflection_symmetry_even_p():
    s = 0.7
    cfg = sc.SpinConfig.from_mz([0.6, -0.3])
    flipped = sc.SpinConfig.from_mz([-0.6, 0.3])
    assert sc.density_pspin(cfg, s, 2, 0.5, 0.0) == pytest.approx(sc.density_pspin(flipped, s, 2, 0.5, 0.0))


def test_sector_expectations_converge():
    model = pspin_sector(3, 0.8)
    sch = Schedule.catalyst(1.0)
    s_pts = np.array([0.2, 0.5, 0.8])
    traj = sc.track_pspin(3, 0.8, 1.0, s_pts)
    devs = []
    for n in (20, 40, 80):
        system = collective.sector_system(model, n, sch, reduce=False)
        _, _, Z = collective.dicke_ops(system.sizes)
        dev = 0.0
        for i, s in enumerate(s_pts):
            _, V = system.lowest(s, sch, 1, vectors=True)
            prob = V[:, 0] ** 2
            mz = np.array([prob @ z / N for z, N in zip(Z, system.sizes)])
            dev = max(dev, float(np.max(np.abs(mz - traj.mz[i]))))
        devs.append(dev)
    assert devs[0] > devs[1] > devs[2]


def test_unconstrained_leaves_unit_sphere():
    density = lambda m: sc.density_pspin(m, 0.5, 3, 1.0, 0.0)
    mx, mz, val = sc.minimize_unconstrained(density, 2)
    assert sc.unit_norm_deviation(mx, mz) > 0.1


def test_trajectory_csv(tmp_path):
    traj = sc.Trajectory.from_mz([0.0, 0.5, 1.0], [[0.0, 0.0], [0.5, -0.1], [1.0, 1.0]])
    traj.write_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "s,m1x,m1z,m2x,m2z,energy"


def test_feature_linear_tie_break():
    s = np.linspace(0.0, 1.0, 11)
    traj = sc.Trajectory.from_mz(s, 0.02 * s)
    assert sc.locate_min_gap_feature(traj) == 0.0


def test_feature_constant_rejected():
    traj = sc.Trajectory.from_mz(S_GRID, np.full(S_GRID.size, 0.3))
    with pytest.raises(ValueError, match="noise"):
        sc.locate_min_gap_feature(traj)


def test_feature_discontinuous_rejected():
    traj = sc.Trajectory.from_mz(S_GRID, np.where(S_GRID < 0.5, 0.0, 1.0))
    with pytest.raises(ValueError, match="jumps"):
        sc.locate_min_gap_feature(traj)


def test_feature_tanh():
    traj = sc.Trajectory.from_mz(S_GRID, np.tanh((S_GRID - 0.63) / 0.2))
    assert sc.locate_min_gap_feature(traj) == pytest.approx(0.63, abs=0.006)


def test_feature_aligns_with_gap_minimum_at_lambda_star():
    # c=0.99 at the n=100 optimum lambda* = 2.251
    lam = 2.251
    traj = sc.track_pspin(3, 0.99, lam, np.linspace(0.0, 1.0, 201))
    s_feature = sc.locate_min_gap_feature(traj)
    res = collective.sector_gap_trace(pspin_sector(3, 0.99), 100, Schedule.catalyst(lam), 129)
    assert abs(s_feature - res.s_min) <= FEATURE_TOL, (s_feature, res.trace.minima)
