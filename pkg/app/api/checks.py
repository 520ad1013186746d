import logging
from typing import Any, Callable, Dict, List, Optional

from app.models.report import CheckResult
from app.utils.errors import ExactWKBError

logger = logging.getLogger(__name__)


def complex_param(value: complex) -> str:
    return f"{value.real:.12g}{value.imag:+.12g}i"


def guarded(check: str, fn: Callable[[], List[CheckResult]], params: Optional[Dict[str, Any]] = None) -> List[CheckResult]:
    """
    Run one group of checks, turning toolkit errors into a failed check.

    Unexpected exceptions propagate.
    """
    try:
        results = fn()
    except ExactWKBError as e:
        logger.error(f"{check} failed: {type(e).__name__}: {e}")
        return [CheckResult.failure(check, e, params)]
    for result in results:
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, f"{result.check}: {'pass' if result.passed else 'FAIL'} (error={result.error})")
    return results


def zero_check(check: str, residual, params: Optional[Dict[str, Any]] = None) -> CheckResult:
    """An exact residual that must vanish identically."""
    holds = residual.is_zero()
    return CheckResult.exact(check, holds, params, computed="0" if holds else repr(residual))
