import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from diagcat.exact_spectrum import (
    driver_matrix,
    full_matrix,
    full_system,
    gap_trace,
    golden_section,
    ground_state,
    local_minima,
    lowest_eigenpairs,
    overlap_with,
)
from diagcat.models import LoopVariant, NamedState, Schedule, build_loop_gadget, build_pspin

S_VALUES = [0.0, 0.1, 0.37, 0.5, 0.83, 1.0]


def free_spin_gap(s, lam=0.0):
    # one qubit: -(1-s) x - (s + lam s(1-s)) z
    return 2.0 * np.hypot(1.0 - s, s + lam * s * (1.0 - s))


@pytest.mark.parametrize("s", S_VALUES)
@pytest.mark.parametrize("lam", [0.0, 1.5])
def test_independent_spins_closed_form(s, lam):
    n = 4
    sys = full_system(build_pspin(n, 1), Schedule.catalyst(lam, (1,) * n))
    w = sys.lowest(s, Schedule.catalyst(lam, (1,) * n), 2)
    assert w[1] - w[0] == pytest.approx(free_spin_gap(s, lam), abs=1e-10)
    assert w[0] == pytest.approx(-n * free_spin_gap(s, lam) / 2, abs=1e-10)


def test_driver_ground_energy():
    d = driver_matrix(5)
    w = np.linalg.eigvalsh(d.toarray())
    assert w[0] == pytest.approx(-5)
    assert w[1] == pytest.approx(-3)


@given(st.floats(0.0, 1.0), st.integers(3, 6))
@settings(max_examples=20, deadline=None)
def test_full_matrix_hermitian_and_sparse_matches_dense(s, n):
    H = full_matrix(build_pspin(n, 3), Schedule.standard(), s)
    assert sp.issparse(H)
    assert abs(H - H.T).max() < 1e-14
    dense = np.linalg.eigvalsh(H.toarray())[:2]
    assert np.allclose(lowest_eigenpairs(H, 2, dense_threshold=1), dense, atol=1e-9)


def test_lowest_eigenpairs_arpack_path():
    H = full_matrix(build_loop_gadget(10, 4.0), Schedule.standard(), 0.6)
    w_arpack = lowest_eigenpairs(H, 2, dense_threshold=1)
    w_dense = np.linalg.eigvalsh(H.toarray())[:2]
    assert np.allclose(w_arpack, w_dense, atol=1e-10)


def test_golden_section_parabola():
    x, fx = golden_section(lambda x: (x - 0.3) ** 2 + 1.0, 0.0, 1.0, xtol=1e-8)
    assert x == pytest.approx(0.3, abs=1e-6)
    assert fx == pytest.approx(1.0)


def test_golden_section_narrow_dip():
    # an avoided crossing much narrower than xtol
    def f(x):
        return np.hypot(x - 0.61803, 1e-7)

    x, fx = golden_section(f, 0.5, 0.7, xtol=1e-4)
    assert fx < 1e-6


def test_local_minima_includes_endpoints():
    assert local_minima(np.array([0.0, 1.0, 0.5, 1.0, 2.0])) == [0, 2]


def test_gap_trace_loop_dc_scale():
    prob = build_loop_gadget(6, 4.0, LoopVariant.FIELD_CROSSING)
    trace = gap_trace(prob, Schedule.catalyst(1.0, (-1,) * 6), 129)
    assert 0.95 < trace.s_min < 0.97
    assert trace.gap_min < 1e-6


def test_gap_trace_outputs(tmp_path):
    trace = gap_trace(build_pspin(4, 1), Schedule.standard(), 65)
    trace.write_csv(tmp_path / "g.csv")
    rows = (tmp_path / "g.csv").read_text().splitlines()
    assert rows[0] == "s,gap" and len(rows) == 66
    trace.write_json(tmp_path / "g.json")
    data = json.loads((tmp_path / "g.json").read_text())
    assert data["global"]["s_min"] == pytest.approx(0.5, abs=1e-5)
    assert data["global"]["gap_min"] == pytest.approx(np.sqrt(2), abs=1e-8)


def test_gap_trace_rejects_coarse_grid():
    with pytest.raises(ValueError):
        gap_trace(build_pspin(3, 1), Schedule.standard(), 10)


def test_ground_state_overlap():
    prob = build_loop_gadget(6, 4.0)
    e, v = ground_state(prob, Schedule.standard(), 1.0)
    assert overlap_with(NamedState.all_zero(6), v) == pytest.approx(1.0)
