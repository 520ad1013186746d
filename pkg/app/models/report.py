from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


def _fmt(value: Any) -> Optional[str]:
    if value is None:
        return None
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return str(value)


class CheckResult(BaseModel):
    """One row of the verification report."""

    model_config = ConfigDict(populate_by_name=True)

    check: str
    params: Dict[str, Any] = Field(default_factory=dict)
    expected: Optional[str] = None
    computed: Optional[str] = None
    error: Optional[float] = None
    tol: Optional[float] = None
    passed: bool = Field(..., alias="pass")
    detail: Optional[str] = None

    @classmethod
    def numeric(cls, check: str, expected: complex, computed: complex, tol: float, relative: bool = True,
                params: Optional[Dict[str, Any]] = None) -> "CheckResult":
        """
        Compare two numbers; a relative error is |computed - expected| / |expected|.

        Raises:
            ValueError: if a relative comparison is asked against zero
        """
        error = abs(computed - expected)
        if relative:
            if expected == 0:
                raise ValueError(f"{check}: relative comparison against zero")
            error /= abs(expected)
        return cls(check=check, params=params or {}, expected=_fmt(expected), computed=_fmt(computed),
                   error=float(error), tol=tol, passed=bool(error <= tol))

    @classmethod
    def exact(cls, check: str, holds: bool, params: Optional[Dict[str, Any]] = None,
              expected: Any = "0", computed: Any = None, detail: Optional[str] = None) -> "CheckResult":
        return cls(check=check, params=params or {}, expected=_fmt(expected),
                   computed=_fmt(computed if computed is not None else ("0" if holds else "nonzero")),
                   error=0.0 if holds else None, tol=0.0, passed=holds, detail=detail)

    @classmethod
    def failure(cls, check: str, error: Exception, params: Optional[Dict[str, Any]] = None) -> "CheckResult":
        return cls(check=check, params=params or {}, passed=False, detail=f"{type(error).__name__}: {error}")

    def to_record(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, exclude={"detail"} if self.detail is None else set())


class VerificationReport(BaseModel):
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def extend(self, checks: List[CheckResult]) -> None:
        self.checks.extend(checks)

    def to_records(self) -> List[Dict[str, Any]]:
        return [check.to_record() for check in self.checks]
