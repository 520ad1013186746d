from typing import Any, Dict, Literal

from pydantic import BaseModel, Field


class SeriesDump(BaseModel):
    """Snapshot of the formal series, coefficients as tower JSON."""

    K: int
    N: int
    normalization: Literal["tau1", "inf"] = "tau1"
    lambda0: Dict[str, Any] = Field(default_factory=dict, description="lambda^(0) as eta-series")
    nu0: Dict[str, Any] = Field(default_factory=dict)
    riccati: Dict[str, Any] = Field(default_factory=dict, description="R = sum R_k eta^-k")
    transseries: Dict[str, Any] = Field(default_factory=dict, description="sector -> eta-series of lambda^(k)")
