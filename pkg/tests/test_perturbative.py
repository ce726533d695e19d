import json

import numpy as np
import pytest

from diagcat import perturbative as pt
from diagcat.models import IsingProblem, LoopVariant, NamedState, Schedule, build_loop_gadget, build_pspin, loop_named_states

FIELD_CROSSING_BLOCK = np.array([[-1.25, -1.0], [-1.0, 0.75]])


def test_classical_levels_pspin():
    lv = pt.classical_levels(build_pspin(4, 1))
    assert lv.E0 == -4 and lv.delta0 == 2
    assert len(lv.excited) == 4


def test_classical_gap_checks_named_states():
    prob = build_loop_gadget(6, 4.0)
    ground, manifold = loop_named_states(6, "field_crossing")
    assert pt.classical_gap(prob, ground, manifold) == pytest.approx(0.5)
    with pytest.raises(pt.PTError):
        pt.classical_gap(prob, NamedState.all_one(6), ())


def test_v1_block_field_crossing():
    prob = build_loop_gadget(6, 4.0)
    ground, manifold = loop_named_states(6, "field_crossing")
    rep = pt.pt_report(prob, Schedule.catalyst(1.0, (-1,) * 6), ground, manifold)
    assert np.allclose(rep.block.matrix, FIELD_CROSSING_BLOCK)
    assert (rep.eps0, rep.eps1) == (-6.0, -5.0)


def test_standard_crossing_two_thirds():
    prob = build_loop_gadget(6, 4.0)
    ground, manifold = loop_named_states(6, "field_crossing")
    rep = pt.pt_report(prob, Schedule.standard(), ground, manifold)
    assert rep.s_star == pytest.approx(2 / 3, abs=1e-12)
    # first-order gap closes at the predicted Gamma*
    assert rep.gap(rep.gamma_star) == pytest.approx(0.0, abs=1e-12)


def test_no_crossing_when_rate_nonpositive():
    blk = pt.V1Block((0, 1), np.array([[0.0]]), 0, -1.0, {})
    assert pt.predict_crossing(blk, 0.5) is None


def test_induced_family_strict_coupling():
    prob, sched, ground, manifold = pt.family_instance("induced_dc", 6)
    rep = pt.pt_report(prob, sched, ground, manifold)
    assert rep.block.ground_couplings
    with pytest.raises(pt.PTError):
        pt.pt_report(prob, sched, ground, manifold, strict=True)
    assert rep.s_star == pytest.approx(0.96, abs=1e-12)


def test_induced_family_standard_no_crossing():
    prob, _, ground, manifold = pt.family_instance("induced_dc", 6)
    assert pt.pt_report(prob, Schedule.standard(), ground, manifold).s_star is None


def test_enumeration_limit():
    big = IsingProblem(21, (1.0,) * 21)
    with pytest.raises(pt.PTError):
        pt.classical_levels(big)


@pytest.mark.parametrize(
    "family, klass",
    [
        ("loop_standard", "exponential, c^-n"),
        ("induced_dc", "factorial, n^-n"),
        ("loop_dc", "factorial, n^-n"),
        ("ring_dc", "n^{-n/2}"),
    ],
)
def test_scaling_classes(family, klass):
    pred = pt.scaling_prediction(family, [6, 8, 10])
    assert pred.klass == klass
    assert all(v is None or v < 0 for v in pred.log_gap_estimates())


def test_compare_to_exact_and_outputs(tmp_path):
    prob, sched, ground, manifold = pt.family_instance("loop_dc", 6)
    rep = pt.pt_report(prob, sched, ground, manifold)
    cmp = pt.compare_to_exact(prob, sched, rep)
    assert not cmp.mismatch
    assert cmp.discrepancy < 0.01
    pt.write_comparison_csv(tmp_path / "c.csv", [cmp])
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == "n,s_star_pt,s_min_exact,gap_min_exact"
    rep.write_json(tmp_path / "r.json")
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["s_star"] == pytest.approx(rep.s_star)
