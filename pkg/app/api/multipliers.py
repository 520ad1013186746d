import cmath
import json
import logging
import os
from pathlib import Path
from typing import Dict, List, Tuple

import sympy

from app.api.checks import complex_param, guarded
from app.models.multiplier import E_TOKEN
from app.models.report import CheckResult
from app.models.run_config import RunConfig
from app.utils.borel import numeric_multipliers
from app.utils.voros import connection_ratio, stokes_multiplier_table
from config import settings

logger = logging.getLogger(__name__)

EXPECTED_RATIO = {"inf": sympy.Integer(1), "tau1": 1 + E_TOKEN}


def symbolic_checks(tables: Dict) -> List[CheckResult]:
    checks = []
    for normalization, expected in EXPECTED_RATIO.items():
        ratio = connection_ratio(normalization)
        tables[normalization]["ratio"] = sympy.sstr(ratio)
        holds = sympy.simplify(ratio - expected) == 0
        checks.append(CheckResult.exact(f"connection_ratio_{normalization}", holds, {"normalization": normalization},
                                        expected=sympy.sstr(expected), computed=sympy.sstr(ratio)))
    return checks


def numeric_checks(y: complex, tables: Dict) -> List[CheckResult]:
    E = cmath.exp(2j * cmath.pi * y)
    checks = []
    for normalization, expected in EXPECTED_RATIO.items():
        minus, plus, ratio = numeric_multipliers(normalization, y)
        tables[normalization]["numeric"] = {
            "y": complex_param(y),
            "minus": {f"s{j}": complex_param(v) for j, v in sorted(minus.items())},
            "plus": {f"s{j}": complex_param(v) for j, v in sorted(plus.items())},
            "ratio": complex_param(ratio),
        }
        target = complex(expected.subs(E_TOKEN, E))
        checks.append(CheckResult.numeric(f"connection_ratio_numeric_{normalization}", target, ratio, 1e-3,
                                          params={"normalization": normalization, "y": complex_param(y)}))
        mismatch = max(abs(minus[j] - plus[j]) for j in minus)
        checks.append(CheckResult.numeric(f"multipliers_continuous_{normalization}", 0j, mismatch, 1e-3,
                                          relative=False, params={"normalization": normalization, "y": complex_param(y)}))
    return checks


def run_multipliers(config: RunConfig) -> Tuple[List[Path], List[CheckResult]]:
    """Token tables on both sides of arg c = pi/2, their numeric instantiation and alpha_tilde/alpha."""
    tables: Dict = {}
    for normalization in ("inf", "tau1"):
        tables[normalization] = {side: stokes_multiplier_table(normalization, side).to_strings()
                                 for side in ("minus", "plus")}
    checks = guarded("connection_ratio", lambda: symbolic_checks(tables))
    y = 1j * settings.BOREL_ABS_Y
    checks += guarded("connection_ratio_numeric", lambda: numeric_checks(y, tables), {"y": complex_param(y)})
    os.makedirs(config.output_dir, exist_ok=True)
    path = config.output_dir / "multipliers.json"
    path.write_text(json.dumps(tables, indent=2), encoding="utf-8")
    logger.info(f"multiplier tables written to {path}")
    return [path], checks
