import cmath
import math
from dataclasses import replace

import numpy as np
import pytest

from app.utils.errors import ClearanceError, NumericsError
from app.utils.numerics import (
    Arc,
    BranchTracker,
    PathSpec,
    SqrtBranch,
    check_turning_integrals,
    closed_form_phase,
    continue_branch,
    default_t,
    eval_scalar,
    loop_monodromy,
    merging_relation,
    path_integral,
    period_normalized,
    phase_from_tau1,
    phase_renormalization,
    quad_complex,
    ray_asymptotics,
    ray_parameter,
    ray_state,
    residue_loop_r0,
    s0_residue_loop,
    s_odd_big_loop,
    sl2_turning_points,
    sqrt_q0_half_loop,
    state_at,
    turning_point_roots,
    turning_points,
    voros_numeric_VU,
    voros_numeric_W,
)
from app.utils.voros import voros_coefficient

C_VALUES = [1j, cmath.exp(3j * math.pi / 5)]


def test_turning_points_are_zeros_of_delta():
    c = 0.7 + 0.4j
    for star, tau in zip(turning_point_roots(c), turning_points(c)):
        assert 4 * star ** 3 == pytest.approx(c)
        assert -2 * star ** 2 - c / star == pytest.approx(tau)
        assert 6 * star ** 2 + tau == pytest.approx(0, abs=1e-12)
    with pytest.raises(NumericsError):
        turning_points(0)


def test_ray_state_is_consistent():
    state = ray_state(1j, 0.5)
    assert max(state.relation_residuals().values()) < 1e-12
    far = ray_state(1j, ray_parameter(1j, 1e4))
    assert abs(far.t) == pytest.approx(1e4)
    assert far.w / far.l0 == pytest.approx(2, rel=1e-3)


def test_sqrt_branch_is_continuous_around_zero():
    # sqrt(e^(i theta)) continued once around the origin changes sign
    branch = SqrtBranch(lambda s: cmath.exp(2j * math.pi * s), 1.0)
    assert branch.end() == pytest.approx(-1.0)


def test_one_loop_around_tau1_swaps_the_merging_roots():
    start, end = loop_monodromy(1j, turns=1)
    others = sorted((complex(r) for r in np.roots([2.0, 0.0, start.t, start.c])), key=lambda r: abs(r - start.l0))[1:]
    assert end.t == pytest.approx(start.t)
    assert end.l0 == pytest.approx(others[0], rel=1e-9)
    assert max(end.relation_residuals().values()) < 1e-10


@pytest.mark.parametrize("c", C_VALUES)
def test_two_loops_around_tau1(c):
    start, end = loop_monodromy(c, turns=2)
    assert end.l0 == pytest.approx(start.l0, rel=1e-9)
    assert end.w == pytest.approx(-start.w, rel=1e-9)
    assert end.q == pytest.approx(1j * start.q, rel=1e-9)


def test_loop_monodromy_does_not_depend_on_the_step():
    for turns in (1, 2):
        _, coarse = loop_monodromy(1j, turns=turns, n_checkpoints=32)
        _, fine = loop_monodromy(1j, turns=turns, n_checkpoints=64)
        for name in ("l0", "w", "q"):
            assert getattr(fine, name) == pytest.approx(getattr(coarse, name), rel=1e-9)


def test_loop_around_no_turning_point_is_trivial():
    c = 1j
    tau = turning_points(c)[0]
    start = state_at(c, default_t(c))
    rho = 0.1 * abs(tau)
    center = start.t + rho * tau / abs(tau)
    theta0 = cmath.phase(start.t - center)
    end = continue_branch(start, PathSpec("t", (Arc(center, rho, theta0, theta0 + 2 * math.pi),)))
    for name in ("l0", "w", "q"):
        assert getattr(end, name) == pytest.approx(getattr(start, name), rel=1e-9)


def test_quad_complex():
    value = quad_complex(lambda u: cmath.exp(1j * u), 0.0, math.pi, 1e-12)
    assert value == pytest.approx(2j, abs=1e-10)


def test_state_at_tracks_every_generator():
    c = 1j
    state = state_at(c, default_t(c) + 0.3)
    assert max(state.relation_residuals().values()) < 1e-10
    assert state_at(c, ray_state(c, 1.0).t) == ray_state(c, 1.0)


def test_state_at_refuses_paths_through_turning_points():
    c = 1j
    reference = ray_state(c, 1.0).t
    tau = turning_points(c)[0]
    with pytest.raises(ClearanceError):
        state_at(c, tau + 2 * (tau - reference))


def test_sl2_turning_points_are_zeros_of_s():
    state = state_at(1j, default_t(1j))
    l0, a1, a2 = sl2_turning_points(state)
    for a in (a1, a2):
        assert a * a + 2 * l0 * a + 3 * l0 * l0 + state.t == pytest.approx(0, abs=1e-10)
    assert a1 + a2 == pytest.approx(-2 * l0)


def test_closed_form_phase():
    for r in (0.3, 1.0):
        assert phase_from_tau1(1j, r) == pytest.approx(closed_form_phase(ray_state(1j, r)), rel=1e-8)


def test_contour_integral_around_circle():
    state = ray_state(1j, 0.5)
    path = PathSpec("x", (Arc(0j, 1.0, 0.0, 2 * math.pi),))
    tracker = BranchTracker(path, replace(state, q=None, x=1.0 + 0j, s=None))
    assert path_integral(lambda st: 1 / st.x, tracker, 1e-12) == pytest.approx(2j * math.pi)


@pytest.mark.parametrize("c", C_VALUES)
def test_period(c):
    assert period_normalized(c) == pytest.approx(-2j * math.pi * c, rel=1e-8)


@pytest.mark.parametrize("j", [1, 2])
def test_merging_relations(j):
    state = state_at(1j, default_t(1j))
    lhs, rhs = merging_relation(state, j)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_residues():
    c = 1j
    assert residue_loop_r0(c) == pytest.approx(-0.5j * math.pi, abs=1e-10)
    state = state_at(c, default_t(c))
    assert s0_residue_loop(state) == pytest.approx(-0.5j * math.pi, abs=1e-10)
    assert sqrt_q0_half_loop(state) == pytest.approx(1j * math.pi * c, rel=1e-8)


def test_ray_asymptotics():
    for name, value, approx, bound in ray_asymptotics(1j):
        assert abs(value - approx) <= bound, name


@pytest.mark.slow
@pytest.mark.parametrize("c", C_VALUES)
def test_voros_contour_values(c):
    values = voros_numeric_W(c, 2)
    for n, value in enumerate(values, start=1):
        expected = float(voros_coefficient(n)) * c ** (1 - 2 * n)
        assert value == pytest.approx(expected, rel=1e-8 if n == 1 else 1e-6)


@pytest.mark.slow
def test_phase_renormalization_is_the_voros_constant():
    c = 1j
    p_tau1, p_inf = phase_renormalization(c, default_t(c), 1)
    assert p_tau1 - p_inf == pytest.approx(float(voros_coefficient(1)) / c, rel=1e-6)


@pytest.mark.slow
def test_two_v_minus_u_is_t_independent():
    c = 1j
    first = voros_numeric_VU(c, default_t(c), 2)[2]
    second = voros_numeric_VU(c, ray_state(c, 1.5).t, 2)[2]
    for n, (a, b) in enumerate(zip(first, second), start=1):
        assert a == pytest.approx(float(voros_coefficient(n)) * c ** (1 - 2 * n), rel=1e-6)
        assert a == pytest.approx(b, rel=1e-8)


@pytest.mark.slow
def test_odd_part_has_no_period():
    state = state_at(1j, default_t(1j))
    for n in (1, 2):
        assert s_odd_big_loop(state, n) == pytest.approx(0, abs=1e-8)


def test_turning_point_integrals():
    c = 1j
    for name, value, expected in check_turning_integrals(c, default_t(c)):
        assert value == pytest.approx(expected, rel=1e-8), name


def test_evaluation_refuses_points_at_turning_points(tower):
    c = 1j
    w = tower.gen("w")
    with pytest.raises(ClearanceError):
        eval_scalar(w, ray_state(c, 0.0))
    near = ray_state(c, 1e-4)
    with pytest.raises(ClearanceError):
        eval_scalar(w, near)
    assert eval_scalar(w, near, clearance=0.0) == pytest.approx(near.w)
    state = state_at(c, default_t(c))
    assert eval_scalar(w, state) == pytest.approx(state.w)


def test_evaluation_refuses_x_at_turning_points_of_q0(tower):
    state = state_at(1j, default_t(1j))
    l0, a1, _ = sl2_turning_points(state)
    for x in (l0, a1 + 1e-6):
        with pytest.raises(ClearanceError):
            eval_scalar(tower.gen("x"), replace(state, q=None, x=x, s=0j))
    far = replace(state, q=None, x=l0 + 3.0, s=cmath.sqrt((l0 + 3) ** 2 + 2 * l0 * (l0 + 3) + 3 * l0 ** 2 + state.t))
    assert eval_scalar(tower.gen("x"), far) == pytest.approx(l0 + 3.0)
