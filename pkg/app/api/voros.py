import csv
import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import List, Tuple

from app.api.checks import complex_param, guarded, zero_check
from app.models.report import CheckResult
from app.models.run_config import RunConfig
from app.utils.numerics import voros_numeric_W
from app.utils.voros import (
    difference_equation_residual,
    p_voros_series,
    solve_difference_equation,
    v_infinity_series,
    voros_coefficient,
    weber_relation_residual,
)
from config import settings

logger = logging.getLogger(__name__)

CSV_HEADER = ["n", "coefficient", "c", "expected", "contour_re", "contour_im", "relative_error"]


def exact_checks(z_order: int) -> List[CheckResult]:
    params = {"z_order": z_order}
    W = p_voros_series(z_order)
    solved = solve_difference_equation(z_order)
    checks = [
        zero_check("bernoulli_difference_equation", difference_equation_residual(W), params),
        CheckResult.exact("difference_equation_solve", solved == W, params,
                          expected=repr(W), computed=repr(solved)),
        zero_check("weber_relation", weber_relation_residual(z_order), params),
    ]
    for n, expected in ((1, Fraction(1, 24)), (2, Fraction(0)), (3, Fraction(-7, 2880))):
        checks.append(CheckResult.exact(f"difference_solution_z{n}", solved[n] == expected, {"n": n},
                                        expected=expected, computed=solved[n]))
    return checks


def contour_comparison(c: complex, n_max: int, tol: float) -> List[Tuple[int, Fraction, complex, complex]]:
    """(n, W_n, W_n c^(1-2n), contour value) for n = 1..n_max."""
    values = voros_numeric_W(c, n_max, tol)
    out = []
    for n, value in enumerate(values, start=1):
        coefficient = voros_coefficient(n)
        out.append((n, coefficient, float(coefficient) * c ** (1 - 2 * n), value))
    return out


def run_voros(config: RunConfig) -> Tuple[List[Path], List[CheckResult]]:
    """Exact Voros series to JSON and a CSV comparing them with contour values."""
    c, n_max = config.effective_c, config.orders.n_max
    os.makedirs(config.output_dir, exist_ok=True)
    series_path = config.output_dir / "voros.json"
    series_path.write_text(json.dumps({
        "W": p_voros_series(settings.Z_ORDER).to_json(),
        "V_infinity": v_infinity_series(settings.Z_ORDER).to_json(),
    }, indent=2), encoding="utf-8")
    checks = guarded("voros_exact", lambda: exact_checks(settings.Z_ORDER), {"z_order": settings.Z_ORDER})

    comparison = []

    def numeric() -> List[CheckResult]:
        comparison.extend(contour_comparison(c, n_max, config.tol))
        return [CheckResult.numeric(f"voros_W{n}_contour", expected, value, 1e-8 if n == 1 else 1e-6,
                                    params={"c": complex_param(c), "n": n})
                for n, _, expected, value in comparison]

    checks += guarded("voros_W_contour", numeric, {"c": complex_param(c)})
    csv_path = config.output_dir / "voros.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for n, coefficient, expected, value in comparison:
            error = abs(value - expected) / abs(expected)
            writer.writerow([n, str(coefficient), complex_param(c), complex_param(expected),
                             repr(value.real), repr(value.imag), repr(error)])
    logger.info(f"Voros comparison for n <= {n_max} at c={c} written to {csv_path}")
    return [series_path, csv_path], checks
