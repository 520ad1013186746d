from typing import List, Optional

from app.utils.tower import GeneratorSpec, Tower, make_context
from config import settings

_tower: Optional[Tower] = None

DELTA = "(6*l0**2 + t)"


def primitive_name(prefix: str, index: int, basepoint: str) -> str:
    """Name of a primitive slot, e.g. ('P', 3, 'tau1') -> 'P3_tau1'."""
    return f"{prefix}{index}_{basepoint}"


def default_generator_specs(depth: Optional[int] = None) -> List[GeneratorSpec]:
    """Generators l0, w, q, s over Q(t, c, x) followed by the primitive slots."""
    depth = depth if depth is not None else settings.PRIMITIVE_DEPTH
    specs = [
        GeneratorSpec(
            name="l0",
            relation="2*l0**3 + t*l0 + c",
            derivatives={"t": f"-l0/{DELTA}", "c": f"-1/{DELTA}", "x": "0"},
            weight="-1/3",
        ),
        GeneratorSpec(
            name="w",
            relation=f"w**2 - {DELTA}",
            derivatives={
                "t": f"(t - 6*l0**2)/(2*{DELTA}*w)",
                "c": f"-6*l0/({DELTA}*w)",
                "x": "0",
            },
            weight="-1/3",
        ),
        GeneratorSpec(
            name="q",
            relation="q**2 - w",
            derivatives={
                "t": f"(t - 6*l0**2)/(4*{DELTA}*w*q)",
                "c": f"-3*l0/({DELTA}*w*q)",
                "x": "0",
            },
            weight="-1/6",
        ),
        GeneratorSpec(
            name="s",
            relation="s**2 - x**2 - 2*l0*x - 3*l0**2 - t",
            derivatives={
                "x": "(x + l0)/s",
                "t": f"((x + 3*l0)*(-l0/{DELTA}) + 1/2)/s",
                "c": f"-(x + 3*l0)/({DELTA}*s)",
            },
            weight="-1/3",
        ),
    ]
    # t-primitives of R_{2j-1} (both normalizations) and of lambda^(0)_{2j}
    for j in range(1, depth + 1):
        for basepoint in ("tau1", "inf"):
            specs.append(GeneratorSpec(
                name=primitive_name("P", 2 * j - 1, basepoint),
                kind="transcendental",
                derivatives={"x": "0"},
            ))
        specs.append(GeneratorSpec(
            name=primitive_name("I", 2 * j, "inf"),
            kind="transcendental",
            derivatives={"x": "0"},
        ))
    return specs


def init_tower(depth: Optional[int] = None) -> Tower:
    """Build the process-wide tower (idempotent)."""
    global _tower
    if _tower is None:
        _tower = make_context(default_generator_specs(depth))
    return _tower


def reset_tower() -> None:
    global _tower
    _tower = None


def get_tower() -> Tower:
    """Return the initialized tower."""
    if _tower is None:
        raise RuntimeError("Tower not initialized. Call init_tower() first.")
    return _tower
