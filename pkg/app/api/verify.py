"""
The acceptance suite behind `verify-all`.

Each group returns CheckResult rows; a toolkit error inside a group becomes a
single failed row and the remaining groups still run.
"""

import cmath
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np

from app.api.checks import complex_param, guarded, zero_check
from app.api.geometry import topology_checks, trace_both
from app.api.multipliers import numeric_checks, symbolic_checks
from app.api.series import series_checks
from app.api.voros import contour_comparison, exact_checks
from app.context import get_tower
from app.models.report import CheckResult, VerificationReport
from app.models.run_config import RunConfig
from app.utils.borel import borel_voros_w, voros_closed_form, voros_jump, voros_pole_clustering
from app.utils.export import write_report_csv, write_report_json
from app.utils.geometry import detect_degeneration
from app.utils.numerics import (
    check_turning_integrals,
    closed_form_phase,
    default_t,
    eval_scalar,
    loop_monodromy,
    phase_from_tau1,
    ray_asymptotics,
    ray_state,
    residue_loop_r0,
    s0_residue_loop,
    s_odd_big_loop,
    state_at,
    voros_numeric_VU,
    voros_numeric_W,
)
from app.utils.pii_series import (
    even_part_residual,
    first_sector_nu_residual,
    one_param_solution,
    riccati_difference_residual,
    riccati_residual,
    riccati_series,
    verify_backlund_identity,
)
from app.utils.sl2_series import (
    asymptotic_expand_x_infinity,
    homogeneity_table,
    log_u_residual,
    odd_part_residues,
    pii_data,
    q_potential_series,
    schlesinger_difference_residual,
    sl2_compat_residual,
    sl2_riccati_residual,
    sl2_riccati_series,
    u_residual,
    u_series,
)
from app.utils.series import Transseries
from app.utils.voros import voros_coefficient
from config import settings

logger = logging.getLogger(__name__)

ACCEPTANCE_C = (1j, cmath.exp(3j * math.pi / 5))
HALF_PI_I = -0.5j * math.pi


# Exact identities

def identity_checks() -> List[CheckResult]:
    tower = get_tower()
    nb, ns = settings.BACKLUND_ORDER, settings.SCHLESINGER_ORDER
    K, N = settings.COMPAT_K, settings.COMPAT_N
    lam_diff, nu_diff = verify_backlund_identity(tower, nb)
    R, R_odd, R_even = riccati_series(tower, nb)
    checks = [
        zero_check("backlund_lambda", lam_diff, {"N": nb}),
        zero_check("backlund_nu", nu_diff, {"N": nb}),
        zero_check("riccati_equation", riccati_residual(tower, R, nb), {"N": nb}),
        zero_check("riccati_even_part", even_part_residual(R_odd, R_even, nb), {"N": nb}),
        zero_check("riccati_difference", riccati_difference_residual(tower, nb), {"N": nb}),
        CheckResult.exact("riccati_difference_needs_shift_factor",
                          not riccati_difference_residual(tower, nb, drop_shift_factor=True).is_zero(),
                          {"N": nb}, expected="nonzero", computed="nonzero"),
        zero_check("nu_first_sector", first_sector_nu_residual(tower, nb), {"N": nb}),
        zero_check("schlesinger_difference", schlesinger_difference_residual(tower, ns), {"N": ns}),
        zero_check("sl2_riccati", sl2_riccati_residual(tower, K, N), {"K": K, "N": N}),
        zero_check("sl2_compatibility", sl2_compat_residual(tower, K, N), {"K": K, "N": N}),
        zero_check("u_equation", u_residual(tower, K, N), {"K": K, "N": N}),
        zero_check("log_u_identity", log_u_residual(tower, K, N), {"K": K, "N": N}),
    ]
    _, nu = one_param_solution(tower, 1, 2)
    checks.append(CheckResult.exact("nu_first_sector_leading", nu.coeff(1, 0) == tower.gen("q"),
                                    expected="Delta^(1/4)", computed=repr(nu.coeff(1, 0))))
    lam, nu = pii_data(tower, 0, 2)
    checks.append(CheckResult.exact("q_potential_order_one_vanishes",
                                    q_potential_series(lam, nu).coeff(0, 1).is_zero()))
    residues = odd_part_residues(tower, K, N)
    nonzero = [key for key, value in residues.items() if not value.is_zero()]
    checks.append(CheckResult.exact("s_odd_residues_at_lambda0", not nonzero, {"K": K, "N": N},
                                    computed=str(nonzero) if nonzero else "0"))
    return checks


def schlesinger_asymptotics() -> List[CheckResult]:
    """S^(0) = eta x^2 + t eta/2 + (c eta - 1)/x + O(x^-2) at x = infinity."""
    tower = get_tower()
    S, _ = sl2_riccati_series(tower, 0, 1)
    table = asymptotic_expand_x_infinity(S, 1, sectors=0)
    lead, first = table[(0, -1)], table[(0, 0)]
    expected = {
        (-1, -2): tower.one, (-1, -1): tower.zero, (-1, 0): tower.gen("t") * Fraction(1, 2), (-1, 1): tower.gen("c"),
        (0, -2): tower.zero, (0, -1): tower.zero, (0, 0): tower.zero, (0, 1): tower.const(-1),
    }
    mismatched = [key for key, value in expected.items()
                  if not ((lead if key[0] == -1 else first).coeff(key[1]) - value).is_zero()]
    return [CheckResult.exact("schlesinger_factor_at_infinity", not mismatched, computed=str(mismatched) if mismatched else "0")]


# Homogeneity

def _degree_mismatches(table: Dict[Tuple[int, int], Fraction], base: Fraction) -> List[Tuple[int, int]]:
    return [(k, ell) for (k, ell), degree in table.items() if degree != base + Fraction(k, 2) + ell]


def homogeneity_checks() -> List[CheckResult]:
    tower = get_tower()
    K, N = settings.COMPAT_K, settings.COMPAT_N
    lam, nu = one_param_solution(tower, K, N)
    R, _, _ = riccati_series(tower, N)
    S, S_odd = sl2_riccati_series(tower, K, N)
    lam_sl2, nu_sl2 = pii_data(tower, K, N)
    families = [
        ("lambda", homogeneity_table(lam), Fraction(-1, 3)),
        ("nu", homogeneity_table(nu), Fraction(-2, 3)),
        ("R", homogeneity_table(Transseries.from_series(R)), Fraction(2, 3)),
        ("Q", homogeneity_table(q_potential_series(lam_sl2, nu_sl2)), Fraction(-4, 3)),
        ("S", homogeneity_table(S), Fraction(1, 3)),
        ("S_odd", homogeneity_table(S_odd), Fraction(1, 3)),
        ("U", homogeneity_table(u_series(tower, K, N)), Fraction(0)),
    ]
    checks = []
    for name, table, base in families:
        mismatched = _degree_mismatches(table, base)
        checks.append(CheckResult.exact(f"homogeneity_{name}", not mismatched, {"K": K, "N": N},
                                        expected=f"{base} + k/2 + l", computed=str(mismatched) if mismatched else "ok"))
    return checks


# Numerics

def voros_checks(n_max: int, tol: float) -> List[CheckResult]:
    checks = []
    for c in ACCEPTANCE_C:
        for n, _, expected, value in contour_comparison(c, n_max, tol):
            checks.append(CheckResult.numeric(f"voros_W{n}_contour", expected, value, 1e-8 if n == 1 else 1e-6,
                                              params={"c": complex_param(c), "n": n}))
    return checks


def schlesinger_voros_checks(c: complex, n_max: int, tol: float) -> List[CheckResult]:
    """2V - U matches W_n c^(1-2n) at two t, which agree with each other."""
    times = (default_t(c), ray_state(c, 1.5).t)
    results = [voros_numeric_VU(c, t, n_max, tol)[2] for t in times]
    checks = []
    for t, combined in zip(times, results):
        for n, value in enumerate(combined, start=1):
            expected = float(voros_coefficient(n)) * c ** (1 - 2 * n)
            checks.append(CheckResult.numeric(f"two_v_minus_u_{n}", expected, value, 1e-6,
                                              params={"c": complex_param(c), "t": complex_param(t), "n": n}))
    for n, (a, b) in enumerate(zip(*results), start=1):
        checks.append(CheckResult.numeric(f"two_v_minus_u_{n}_t_independent", a, b, 1e-8,
                                          params={"c": complex_param(c), "n": n}))
    # homotopy invariance: a tighter loop around a1 gives the same values
    tighter = voros_numeric_VU(c, times[0], n_max, tol, radius=0.15)[2]
    for n, (a, b) in enumerate(zip(results[0], tighter), start=1):
        checks.append(CheckResult.numeric(f"two_v_minus_u_{n}_loop_radius", a, b, 1e-8,
                                          params={"c": complex_param(c), "n": n}))
    return checks


def step_checks(c: complex, tol: float) -> List[CheckResult]:
    """Halving the quadrature tolerance or the continuation step does not move the results."""
    params = {"c": complex_param(c)}
    coarse = voros_numeric_W(c, 1, tol, radius_sweep=False)[0]
    fine = voros_numeric_W(c, 1, tol * 1e-2, radius_sweep=False)[0]
    checks = [CheckResult.numeric("voros_W1_tolerance_refinement", fine, coarse, 1e3 * tol, params=params)]
    for turns in (1, 2):
        start, coarse_end = loop_monodromy(c, turns=turns, n_checkpoints=32)
        _, fine_end = loop_monodromy(c, turns=turns, n_checkpoints=64)
        for name in ("l0", "w", "q"):
            checks.append(CheckResult.numeric(f"tau1_loop_{turns}_{name}_checkpoint_refinement", getattr(fine_end, name),
                                              getattr(coarse_end, name), 1e-9, params=params))
    # two turns around tau_1: w -> -w, q -> i q
    checks.append(CheckResult.numeric("tau1_two_loops_w", -start.w, fine_end.w, 1e-9, params=params))
    checks.append(CheckResult.numeric("tau1_two_loops_q", 1j * start.q, fine_end.q, 1e-9, params=params))
    return checks


def residue_and_period_checks(c: complex, t: complex, tol: float) -> List[CheckResult]:
    state = state_at(c, t)
    scale = max(1.0, abs(c))
    params = {"c": complex_param(c), "t": complex_param(t)}
    checks = [
        CheckResult.numeric("residue_R0_tau1", HALF_PI_I, residue_loop_r0(c, tol=tol), 1e-10 * scale,
                            relative=False, params={"c": complex_param(c)}),
        CheckResult.numeric("residue_S0_a1", HALF_PI_I, s0_residue_loop(state, tol=tol), 1e-10 * scale,
                            relative=False, params=params),
    ]
    for n in (1, 2, 3):
        checks.append(CheckResult.numeric(f"s_odd_{n}_big_loop", 0j, s_odd_big_loop(state, n, tol), 1e-8,
                                          relative=False, params=params))
    checks += [CheckResult.numeric(name, expected, value, 1e-8, params=params)
               for name, value, expected in check_turning_integrals(c, t, tol)]
    return checks


def phase_checks(c: complex, seed: int, tol: float) -> List[CheckResult]:
    """Closed-form phase against quadrature at seeded points of the ray through tau_1."""
    rng = np.random.default_rng(seed)
    checks = []
    for r in rng.uniform(0.2, 2.0, size=3):
        state = ray_state(c, float(r))
        checks.append(CheckResult.numeric("closed_form_phase", closed_form_phase(state), phase_from_tau1(c, float(r), tol),
                                          1e-8, params={"c": complex_param(c), "r": round(float(r), 12)}))
    return checks


def local_r0_check(c: complex) -> List[CheckResult]:
    """R_0 ~ -(1/8)(t - tau_1)^-1 near tau_1."""
    _, _, R_even = riccati_series(get_tower(), 0)
    state = ray_state(c, 1e-4)
    tau = ray_state(c, 0.0).t
    value = eval_scalar(R_even.coeff(0), state, clearance=0.0) * (state.t - tau)
    return [CheckResult.numeric("R0_pole_at_tau1", -0.125, value, 1e-3, params={"c": complex_param(c)})]


def asymptotic_checks(c: complex) -> List[CheckResult]:
    checks = []
    for name, value, approx, bound in ray_asymptotics(c):
        error = abs(value - approx)
        checks.append(CheckResult(check=f"asymptotics_{name}", params={"c": complex_param(c), "abs_t": 1e4},
                                  expected=complex_param(approx), computed=complex_param(value),
                                  error=error, tol=bound, passed=error <= bound))
    return checks


# Geometry and Borel summation

def geometry_checks(c: complex, options) -> List[CheckResult]:
    checks = []
    roots = detect_degeneration(abs(c), (0.1, math.pi - 0.1))
    checks.append(CheckResult.exact("degeneration_sweep_single_root", len(roots) == 1, {"abs_c": abs(c)},
                                    expected=1, computed=len(roots)))
    if roots:
        checks.append(CheckResult.numeric("degeneration_critical_arg", math.pi / 2, roots[0], 1e-9,
                                          relative=False, params={"abs_c": abs(c)}))
    for offset in (-0.1, 0.0, 0.1):
        c_arg = abs(c) * cmath.exp(1j * (math.pi / 2 + offset))
        p_graph, sl2_graph = trace_both(c_arg, None, options)
        params = {"c": complex_param(c_arg), "offset": offset}
        checks += topology_checks(p_graph, offset == 0.0, params)
        checks += topology_checks(sl2_graph, offset == 0.0, params)
    return checks


def borel_checks(orders: List[int]) -> List[CheckResult]:
    checks = []
    for order, poles in voros_pole_clustering(orders).items():
        for pole, target in zip(poles, (-2j * math.pi, 2j * math.pi)):
            checks.append(CheckResult.numeric("borel_pole_W", target, pole, 0.03, params={"order": order}))
    y = 1j * settings.BOREL_ABS_Y
    ratio, expected = voros_jump(y)
    checks.append(CheckResult.numeric("borel_jump_W", expected, ratio, 1e-3, params={"y": complex_param(y)}))
    y_off = complex(settings.BOREL_ABS_Y)
    checks.append(CheckResult.numeric("borel_sum_W_binet", voros_closed_form(y_off), borel_voros_w(y_off),
                                      settings.BOREL_TOL * 1e2, params={"y": complex_param(y_off)}))
    return checks


def connection_checks() -> List[CheckResult]:
    tables = {"inf": {}, "tau1": {}}
    return symbolic_checks(tables) + numeric_checks(1j * settings.BOREL_ABS_Y, tables)


def build_report(config: RunConfig) -> VerificationReport:
    """Run every acceptance check; deterministic given the config and its seed."""
    K, N, n_max = config.orders.K, config.orders.N, config.orders.n_max
    c, tol = config.effective_c, config.tol
    t = config.t if config.t is not None else default_t(c)
    params = {"c": complex_param(c), "t": complex_param(t)}
    groups: List[Tuple[str, Callable[[], List[CheckResult]], Dict]] = [
        ("pii_residual", lambda: series_checks(K, N), {"K": K, "N": N}),
        ("exact_identities", identity_checks, {}),
        ("schlesinger_asymptotics", schlesinger_asymptotics, {}),
        ("voros_exact", lambda: exact_checks(settings.Z_ORDER), {"z_order": settings.Z_ORDER}),
        ("voros_W_contour", lambda: voros_checks(n_max, tol), {"n_max": n_max}),
        ("two_v_minus_u", lambda: schlesinger_voros_checks(c, n_max, tol), params),
        ("step_refinement", lambda: step_checks(c, tol), params),
        ("residues_periods", lambda: residue_and_period_checks(c, t, tol), params),
        ("closed_form_phase", lambda: phase_checks(c, config.seed, tol), {"seed": config.seed}),
        ("local_R0", lambda: local_r0_check(c), params),
        ("asymptotics", lambda: asymptotic_checks(c), params),
        ("homogeneity", homogeneity_checks, {}),
        ("geometry", lambda: geometry_checks(c, config.trace), params),
        ("borel", lambda: borel_checks(config.pade_orders), {"orders": config.pade_orders}),
        ("connection", connection_checks, {}),
    ]
    report = VerificationReport()
    for name, fn, group_params in groups:
        logger.info(f"verify-all: {name}")
        report.extend(guarded(name, fn, group_params))
    logger.info(f"verify-all: {len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    return report


def run_verify(config: RunConfig) -> Tuple[List[Path], List[CheckResult]]:
    report = build_report(config)
    json_path = write_report_json(report, config.output_dir / "report.json")
    csv_path = write_report_csv(report.checks, config.output_dir / "report.csv")
    return [json_path, csv_path], report.checks
