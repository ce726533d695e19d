import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diagcat import meanfield
from diagcat.models import ModelError

S_CRIT_P2 = 1.0 / 3.0


def curie_weiss_m(s):
    # transverse-field p=2: m^2 = 1 - (1-s)^2 / (2s)^2 above s = 1/3
    return np.sqrt(max(0.0, 1.0 - (1.0 - s) ** 2 / (2.0 * s) ** 2))


@pytest.mark.parametrize("s", [0.2, 0.3, 0.4, 0.6, 0.9])
def test_p2_closed_form_magnetization(s):
    land = meanfield.pspin_landscape(2, 1.0, 0.0)(s)
    assert land.location[0] == pytest.approx(curie_weiss_m(s), abs=1e-6)


def test_p2_is_continuous():
    v = meanfield.detect_transition_pspin(2, 1.0, 0.0)
    assert not v.present
    assert v.max_step < meanfield.JUMP_THRESHOLD


def test_p3_first_order():
    v = meanfield.detect_transition_pspin(3, 1.0, 0.0)
    assert v.present
    assert v.jump > 0.5
    assert 0.3 < v.s_star < 0.5


def test_degenerate_snapshot_has_two_wells():
    snap = meanfield.degenerate_snapshot(3, 0.8, 0.0)
    assert snap is not None and snap.n_minima == 2
    (m_a, f_a), (m_b, f_b) = snap.minima
    assert abs(f_a - f_b) < 1e-5
    assert abs(m_a[0] - m_b[0]) > 0.5


def test_flat_landscape_at_s0():
    land = meanfield.pspin_landscape(3, 0.8, 1.0)(0.0)
    assert land.flat


@given(st.floats(0.05, 0.95), st.floats(0.0, 3.0))
@settings(max_examples=25, deadline=None)
def test_global_minimum_beats_grid(s, lam):
    f = lambda m: meanfield.free_energy_pspin(m, s, 3, 0.8, lam)
    land = meanfield.minimize_landscape(f, s, 1, 401, [meanfield.pspin_domain(3)])
    assert land.global_min[1] <= land.f.min() + 1e-12
    assert land.global_min[1] == pytest.approx(float(f(land.location[0])))


def test_two_dimensional_landscape():
    land = meanfield.ws_landscape(0.6, 1.0)(0.5)
    (m1, m2), fmin = land.global_min
    assert fmin <= land.f.min() + 1e-12
    assert -1 <= m1 <= 1 and -1 <= m2 <= 1


def test_coarse_grids_rejected():
    f = lambda m: m**2
    with pytest.raises(ModelError):
        meanfield.minimize_landscape(f, 0.5, 1, 100)
    with pytest.raises(ModelError):
        meanfield.detect_transition(meanfield.pspin_landscape(3, 1.0, 0.0), 100)


def test_detect_transition_synthetic_step():
    # location jumps from 0 to 0.8 at s = 0.4321; the refined s* resolves it
    def landscape(s):
        loc = 0.0 if s < 0.4321 else 0.8
        return meanfield.minimize_landscape(lambda x: (x - loc) ** 2, s, 1, 401)

    v = meanfield.detect_transition(landscape, 513)
    assert v.present
    assert v.s_star == pytest.approx(0.4321, abs=1e-5)
    assert v.jump == pytest.approx(0.8, abs=1e-6)


def test_phase_diagram_windows(tmp_path):
    pd = meanfield.phase_diagram(3, [0.8], [0.0, 1.5, 2.0])
    assert [pt.present for pt in pd.points] == [True, False, False]
    assert pd.windows(0.8) == [(1.5, 2.0)]
    pd.write_csv(tmp_path / "pd.csv")
    assert (tmp_path / "pd.csv").read_text().splitlines()[0] == "c,lambda,present,s_star,jump,uncertain"
