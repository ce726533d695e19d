import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diagcat.models import (
    HammingInteraction,
    LargePVariant,
    LoopVariant,
    ModelError,
    NamedState,
    ProblemSpec,
    Schedule,
    assemble,
    bits_to_index,
    build_loop_gadget,
    build_pspin,
    build_weak_strong,
    check_s,
    index_to_bits,
    loop_named_states,
    pspin_sector,
    pspin_values,
    ring_epsilon,
    ring_ground_state,
    spins_of,
)


def test_bit_zero_is_spin_up():
    z = spins_of(3)
    assert z.shape == (8, 3)
    assert np.all(z[0] == 1)
    assert list(z[1]) == [-1, 1, 1]


@given(st.integers(0, 2**10 - 1))
def test_bits_roundtrip(x):
    assert bits_to_index(index_to_bits(x, 10)) == x


@given(st.integers(1, 9), st.integers(1, 5))
@settings(max_examples=30)
def test_pspin_diagonal_matches_magnetization(n, p):
    prob = build_pspin(n, p)
    m = spins_of(n).mean(axis=1)
    assert np.allclose(prob.diagonal(), -n * m**p)


def test_pspin_values_endpoints():
    vals = pspin_values(4, 3)
    assert vals[0] == -4 and vals[-1] == 4


def test_schedule_weights_sum():
    sch = Schedule.catalyst(2.0)
    wd, wc, wp = sch.weights(0.25)
    assert (wd, wc, wp) == (0.75, 2.0 * 0.25 * 0.75, 0.25)
    assert Schedule.standard().weights(0.5)[1] == 0.0


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_check_s_rejects(bad):
    with pytest.raises(ModelError):
        check_s(bad)


def test_schedule_rejects_bad_input():
    with pytest.raises(ModelError):
        Schedule.catalyst(-1.0)
    with pytest.raises(ModelError):
        Schedule.catalyst(1.0, (2, 0))
    with pytest.raises(ModelError):
        Schedule.catalyst(1.0, (1, 1)).bias_vector(3)


def test_assemble_catalyst_diagonal():
    prob = build_pspin(2, 1)
    a = assemble(0.5, prob, Schedule.catalyst(1.0, (1, -1)))
    # catalyst: -lam s(1-s) sum_i eps_i z_i
    z = spins_of(2)
    expected = -0.25 * (z[:, 0] - z[:, 1]) + 0.5 * prob.diagonal()
    assert np.allclose(a.diagonal(), expected)


def test_loop_gadget_levels_field_crossing():
    prob = build_loop_gadget(6, 4.0, LoopVariant.FIELD_CROSSING)
    ground, manifold = loop_named_states(6, "field_crossing")
    diag = prob.diagonal()
    order = np.argsort(diag)
    assert order[0] == ground.index
    e1 = diag[order[1]]
    assert {int(i) for i in np.flatnonzero(np.isclose(diag, e1))} == {st.index for st in manifold}


def test_loop_gadget_rejects_odd():
    with pytest.raises(ModelError):
        build_loop_gadget(7, 4.0)
    with pytest.raises(ModelError):
        build_loop_gadget(4, 4.0)


@pytest.mark.parametrize("n", [6, 8, 10, 12])
def test_ring_family_ground(n):
    prob = build_loop_gadget(n, variant=LoopVariant.RING_FAMILY)
    assert int(np.argmin(prob.diagonal())) == ring_ground_state(n).index
    assert ring_epsilon(n) == (2.0 if n % 4 == 0 else 0.0)


def test_eta_state():
    eta = NamedState.eta(6)
    assert eta.bits == (1, 1, 1, 0, 1, 1)
    assert eta.hamming(NamedState.all_one(6)) == 1


def test_truncated_large_p_values():
    vals = HammingInteraction(LargePVariant.TRUNCATED, 3).values(4)
    assert vals == (-4.0, 0.0, 0.0, 0.0, 4.0)
    even = HammingInteraction(LargePVariant.TRUNCATED, 2).values(4)
    assert even[-1] == -4.0


def test_sector_model_expand_matches_pspin():
    model = pspin_sector(3, 0.5)
    prob, bias = model.expand(6)
    assert np.allclose(prob.diagonal(), build_pspin(6, 3).diagonal())
    assert bias == (1, 1, 1, -1, -1, -1)


def test_cluster_sizes_must_be_integral():
    with pytest.raises(ModelError):
        pspin_sector(3, 0.3).cluster_sizes(4)


def test_weak_strong_problem_vs_sector():
    ws = build_weak_strong(8)
    model = ws.sector_model(0.5)
    prob, _ = model.expand(8)
    assert np.allclose(np.sort(prob.diagonal()), np.sort(ws.problem.diagonal()))


def test_problem_spec_roundtrip():
    spec = ProblemSpec("loop_gadget", 6, R=4.0, variant="field_crossing", lam=1.0, schedule="catalyst", bias=(-1,) * 6)
    back = ProblemSpec.from_text(spec.to_text())
    assert back == spec
    assert np.allclose(back.build().diagonal(), build_loop_gadget(6, 4.0).diagonal())
    assert back.schedule_obj().bias == (-1,) * 6


def test_problem_spec_errors():
    with pytest.raises(ModelError):
        ProblemSpec.from_text("model = pspin\n")
    with pytest.raises(ModelError):
        ProblemSpec.from_text("model = pspin\nn = 4\ncolour = red\n")
