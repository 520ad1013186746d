from typing import Any, Dict, Literal

import sympy
from pydantic import BaseModel, ConfigDict, Field

Side = Literal["minus", "plus"]
MultiplierNormalization = Literal["inf", "tau1"]

# Tokens of the multiplier expressions
E_TOKEN = sympy.Symbol("E")            # e^{2 pi i c eta}
X_MINUS = sympy.Symbol("X_minus")      # e^{2V - U} = e^{W} on the side arg c = pi/2 - eps
X_PLUS = sympy.Symbol("X_plus")        # the same on arg c = pi/2 + eps
W_MINUS = sympy.Symbol("W_minus")      # e^{W}, the tau_1 normalization factor, on arg c = pi/2 - eps
W_PLUS = sympy.Symbol("W_plus")        # the same on arg c = pi/2 + eps
ALPHA = sympy.Symbol("alpha")
ALPHA_TILDE = sympy.Symbol("alpha_tilde")

_c, _eta, _V, _U, _W = sympy.symbols("c eta V U W")
READABLE = {
    E_TOKEN: sympy.exp(2 * sympy.pi * sympy.I * _c * _eta),
    X_MINUS: sympy.exp(2 * _V - _U),
    X_PLUS: sympy.exp(2 * _V - _U),
    W_MINUS: sympy.exp(_W),
    W_PLUS: sympy.exp(_W),
}


class MultiplierTable(BaseModel):
    """The six Stokes multipliers of the linear system around x = infinity on one side of arg c = pi/2."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    side: Side
    normalization: MultiplierNormalization
    entries: Dict[int, Any] = Field(default_factory=dict, description="j -> sympy expression")

    @property
    def x_token(self) -> sympy.Symbol:
        return X_MINUS if self.side == "minus" else X_PLUS

    @property
    def w_token(self) -> sympy.Symbol:
        return W_MINUS if self.side == "minus" else W_PLUS

    @property
    def alpha_token(self) -> sympy.Symbol:
        return ALPHA if self.side == "minus" else ALPHA_TILDE

    def to_strings(self) -> Dict[str, str]:
        return {f"s{j}": sympy.sstr(expr.xreplace(READABLE)) for j, expr in sorted(self.entries.items())}

    def evaluate(self, values: Dict[str, complex]) -> Dict[int, complex]:
        """Numeric entries for token values keyed by symbol name."""
        subs = {sympy.Symbol(name): value for name, value in values.items()}
        return {j: complex(sympy.N(expr.subs(subs))) for j, expr in self.entries.items()}
