import logging
import os
from pathlib import Path
from typing import List, Tuple

from app.api.checks import guarded, zero_check
from app.context import get_tower
from app.models.report import CheckResult
from app.models.run_config import RunConfig
from app.models.series_dump import SeriesDump
from app.utils.pii_series import one_param_solution, pii_residual, riccati_series, zero_param_solution
from app.utils.series import Transseries

logger = logging.getLogger(__name__)


def build_dump(K: int, N: int, normalization: str = "tau1") -> SeriesDump:
    tower = get_tower()
    lam0, nu0 = zero_param_solution(tower, N)
    R, _, _ = riccati_series(tower, N)
    dump = SeriesDump(K=K, N=N, normalization=normalization,
                      lambda0=lam0.to_json(), nu0=nu0.to_json(), riccati=R.to_json())
    if K >= 1:
        lam, _ = one_param_solution(tower, K, N, normalization)
        dump.transseries = lam.to_json()
    return dump


def series_checks(K: int, N: int) -> List[CheckResult]:
    tower = get_tower()
    params = {"K": K, "N": N}
    lam0, _ = zero_param_solution(tower, N)
    checks = [zero_check("pii_residual_zero_param", pii_residual(Transseries.from_series(lam0)), {"N": N})]
    if K >= 1:
        for normalization in ("tau1", "inf"):
            lam, _ = one_param_solution(tower, K, N, normalization)
            checks.append(zero_check(f"pii_residual_one_param_{normalization}", pii_residual(lam), params))
    return checks


def run_series(config: RunConfig) -> Tuple[List[Path], List[CheckResult]]:
    """Dump lambda^(0), nu^(0), R and the 1-parameter transseries to JSON."""
    K, N = config.orders.K, config.orders.N
    os.makedirs(config.output_dir, exist_ok=True)
    path = config.output_dir / "series.json"
    path.write_text(build_dump(K, N).model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"series through K={K}, N={N} written to {path}")
    checks = guarded("pii_residual", lambda: series_checks(K, N), {"K": K, "N": N})
    return [path], checks
