import cmath
import json
from pathlib import Path
from tokenize import TokenError
from typing import Annotated, Any, Dict, List, Literal, Optional

import sympy
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, ValidationError, field_validator
from sympy.parsing.sympy_parser import implicit_multiplication_application, parse_expr, standard_transformations

from app.models.stokes import TraceOptions
from app.utils.errors import ConfigError
from config import settings

_TRANSFORMS = standard_transformations + (implicit_multiplication_application,)
_LOCALS = {"i": sympy.I, "j": sympy.I, "I": sympy.I, "pi": sympy.pi, "exp": sympy.exp, "e": sympy.E}


def parse_complex(value: Any) -> complex:
    """
    Parse "i", "0.9i", "1+2i", "exp(3i*pi/5)" or a number into a complex.

    Raises:
        ConfigError: if the text is not a complex constant
    """
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if not isinstance(value, str) or not value.strip():
        raise ConfigError(f"expected a complex number, got {value!r}")
    try:
        expr = parse_expr(value.strip(), local_dict=_LOCALS, transformations=_TRANSFORMS)
        result = complex(sympy.N(expr))
    except (SyntaxError, TokenError, TypeError, ValueError, sympy.SympifyError) as e:
        raise ConfigError(f"cannot parse complex number {value!r}: {e}") from e
    return result


def format_complex(value: complex) -> str:
    return f"{value.real:.17g}{value.imag:+.17g}i"


ComplexValue = Annotated[Any, BeforeValidator(parse_complex), PlainSerializer(format_complex, return_type=str)]
OptionalComplex = Annotated[
    Any,
    BeforeValidator(lambda v: None if v in (None, "") else parse_complex(v)),
    PlainSerializer(lambda v: None if v is None else format_complex(v), return_type=Optional[str]),
]


class Orders(BaseModel):
    K: int = Field(default_factory=lambda: settings.SECTORS_K, ge=0)
    N: int = Field(default_factory=lambda: settings.ORDER_N, ge=0)
    n_max: int = Field(default_factory=lambda: settings.VOROS_N_MAX, ge=1)


class RunConfig(BaseModel):
    """Validated parameters of one CLI run; defaults come from settings."""

    model_config = ConfigDict(validate_default=True)

    c: ComplexValue = Field(default_factory=lambda: settings.DEFAULT_C)
    t: OptionalComplex = Field(default_factory=lambda: settings.DEFAULT_T or None)
    orders: Orders = Field(default_factory=Orders)
    tol: float = Field(default_factory=lambda: settings.QUAD_TOL, gt=0)
    borel_tol: float = Field(default_factory=lambda: settings.BOREL_TOL, gt=0)
    pade_orders: List[int] = Field(default_factory=settings.pade_orders)
    out: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    format: Literal["svg", "csv", "json"] = "svg"
    seed: int = Field(default_factory=lambda: settings.SEED)
    arg_c: Optional[float] = Field(None, description="Overrides arg c, keeping |c|")
    trace: TraceOptions = Field(default_factory=lambda: TraceOptions.from_settings(settings))

    @field_validator("pade_orders", mode="before")
    @classmethod
    def _split_orders(cls, value):
        if isinstance(value, str):
            return [int(part) for part in value.split(",") if part.strip()]
        return value

    @field_validator("c")
    @classmethod
    def _nonzero(cls, value):
        if value == 0:
            raise ConfigError("c must be nonzero")
        return value

    @property
    def effective_c(self) -> complex:
        if self.arg_c is None:
            return self.c
        return abs(self.c) * cmath.exp(1j * self.arg_c)

    @property
    def output_dir(self) -> Path:
        return Path(self.out)

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """
        Build a config from an optional JSON file and command-line overrides.

        Raises:
            ConfigError: on unreadable files or invalid values
        """
        data: Dict[str, Any] = {}
        if path:
            try:
                data = json.loads(Path(path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read config file {path}: {e}") from e
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key == "orders" and isinstance(value, str):
                value = _parse_orders(value)
            if key == "orders" and isinstance(data.get("orders"), dict):
                value = {**data["orders"], **value}
            data[key] = value
        if isinstance(data.get("orders"), str):
            data["orders"] = _parse_orders(data["orders"])
        if "n_max" in data:
            data["orders"] = {**data.get("orders", {}), "n_max": data.pop("n_max")}
        try:
            return cls(**data)
        except ValidationError as e:
            raise ConfigError(f"invalid configuration: {e}") from e


def _parse_orders(text: str) -> Dict[str, int]:
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 3 or not all(part.lstrip("-").isdigit() for part in parts):
        raise ConfigError(f"--orders expects K,N,n_max, got {text!r}")
    return dict(zip(("K", "N", "n_max"), (int(part) for part in parts)))
