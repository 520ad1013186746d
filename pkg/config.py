from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Parameters of the equation
    DEFAULT_C: str = "i"  # complex literal, e.g. "i", "0.5+1j"
    DEFAULT_T: str = ""   # empty: take t on the real ray just beyond tau1

    # Formal series truncation
    SECTORS_K: int = 3
    ORDER_N: int = 8
    VOROS_N_MAX: int = 2
    BACKLUND_ORDER: int = 6
    SCHLESINGER_ORDER: int = 4
    COMPAT_K: int = 2
    COMPAT_N: int = 4
    Z_ORDER: int = 20
    # Number of primitive slots P_{2j-1}, I_{2j} declared in the tower
    PRIMITIVE_DEPTH: int = 6

    # Numerics
    QUAD_TOL: float = 1e-10
    BOREL_TOL: float = 1e-8
    PADE_ORDERS: str = "10,20"
    DPS: int = 30  # mpmath working precision for Borel-Pade-Laplace
    BOREL_ABS_Y: float = 3.0  # |c eta| at which lateral Borel sums are compared

    # Stokes geometry
    TRACE_STEP: float = 1e-3
    BOX_RADIUS: float = 4.0
    CLEARANCE: float = 1e-2
    MAX_TRACE_STEPS: int = 20000

    # Output
    OUTPUT_DIR: str = "out"
    SEED: int = 20240229

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = Field(default="", description="Optional log file appended to besides stdout")

    def pade_orders(self) -> list[int]:
        return [int(part) for part in self.PADE_ORDERS.split(",") if part.strip()]


settings = Settings()
