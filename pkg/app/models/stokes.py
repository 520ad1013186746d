from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

Multiplicity = Literal["simple", "double"]
Sign = Literal["+", "-"]


class TurningPoint(BaseModel):
    name: str
    re: float
    im: float
    multiplicity: Multiplicity = "simple"

    @property
    def point(self) -> complex:
        return complex(self.re, self.im)


class StokesCurve(BaseModel):
    """Polyline sampled along one Stokes curve, in the plane the graph is drawn in."""

    curve_id: str
    source: str
    direction: int = Field(..., description="Index of the outgoing direction at the source")
    sign: Sign
    points: List[Tuple[float, float]] = Field(default_factory=list)
    visible: bool = Field(True, description="False for curves on the hidden sheet")
    target: Optional[str] = Field(None, description="Turning point reached, if any")
    duplicate_of: Optional[str] = Field(None, description="Connection already traced from the other end")
    stop_reason: str = "box"

    @property
    def is_connection(self) -> bool:
        return self.target is not None


class TraceOptions(BaseModel):
    """Tracer settings; lengths are relative to the turning-point scale."""

    step: float = Field(1e-3, gt=0)
    box_radius: float = Field(4.0, gt=0)
    clearance: float = Field(1e-2, gt=0)
    max_steps: int = Field(20000, gt=0)

    @classmethod
    def from_settings(cls, settings) -> "TraceOptions":
        return cls(
            step=settings.TRACE_STEP,
            box_radius=settings.BOX_RADIUS,
            clearance=settings.CLEARANCE,
            max_steps=settings.MAX_TRACE_STEPS,
        )


class Cut(BaseModel):
    source: str
    points: List[Tuple[float, float]]


class StokesGraph(BaseModel):
    kind: Literal["p", "sl2"]
    c: Tuple[float, float]
    t: Optional[Tuple[float, float]] = None
    plane: Literal["t", "x"]
    turning_points: List[TurningPoint] = Field(default_factory=list)
    curves: List[StokesCurve] = Field(default_factory=list)
    cuts: List[Cut] = Field(default_factory=list)
    box_radius: float = 0.0

    @property
    def connections(self) -> List[StokesCurve]:
        return [curve for curve in self.curves if curve.is_connection and curve.duplicate_of is None]

    @property
    def degenerate(self) -> bool:
        return bool(self.connections)

    def visible_curves(self) -> List[StokesCurve]:
        return [curve for curve in self.curves if curve.visible]

    def curve_count(self, source: str) -> int:
        """Curves emitted from source on the drawn sheet."""
        return sum(1 for curve in self.visible_curves() if curve.source == source)
