"""
Stokes geometry: P-Stokes curves of P_II in the t-plane, Stokes curves of the
linear system in the x-plane, and detection of the degeneration at arg c = pi/2.

P-Stokes curves are traced in the lambda_0-plane, where
Phi(l0) = int w (-Delta/l0) dl0 is single-valued up to the sign of w, and then
mapped to t = -2 l0^2 - c/l0. A connection is a curve that reaches another
turning point within the clearance radius.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from app.models.stokes import Cut, StokesCurve, StokesGraph, TraceOptions, TurningPoint
from app.utils.errors import GeometryError, NumericsError
from app.utils.numerics import (
    BranchState,
    period_p,
    sl2_turning_points,
    state_at,
    turning_point_roots,
    turning_points,
)
from config import settings

logger = logging.getLogger(__name__)


@dataclass
class _Source:
    name: str
    point: complex               # in the tracing plane
    exponent: float              # G ~ K (z - point)^exponent
    directions: List[float]      # outgoing angles
    visible: List[bool]
    branch_at: Callable[[complex], complex]  # branch value at a start point


@dataclass
class _Field:
    """G(z, b) = dPhi/dz given the branch value b with b^2 = radicand(z)."""

    G: Callable[[complex, complex], complex]
    radicand: Callable[[complex], complex]
    to_plane: Callable[[complex], complex]   # tracing plane -> drawn plane
    outside: Callable[[complex], bool]


def _nearest_root(radicand: complex, previous: complex) -> complex:
    root = cmath.sqrt(radicand)
    return root if abs(root - previous) <= abs(root + previous) else -root


def _trace(field: _Field, source: _Source, k: int, targets: Dict[str, complex], scale: float,
           options: TraceOptions) -> StokesCurve:
    theta = source.directions[k]
    h = options.step * scale
    z = source.point + 20 * h * cmath.exp(1j * theta)
    b = source.branch_at(z)
    g = field.G(z, b)
    if g == 0:
        raise GeometryError(f"zero direction field at the start of {source.name}/{k}")
    phi = (z - source.point) * g / (source.exponent + 1)
    # orientation: move away from the source
    sigma = 1.0 if (g.conjugate() / abs(g) * cmath.exp(-1j * theta)).real > 0 else -1.0

    def velocity(point, branch):
        value = field.G(point, branch)
        if value == 0:
            raise GeometryError(f"zero direction field at {point}")
        return sigma * value.conjugate() / abs(value)

    def branch_near(point, branch):
        return _nearest_root(field.radicand(point), branch)

    points = [field.to_plane(z)]
    target, reason = None, "max_steps"
    for _ in range(options.max_steps):
        k1 = velocity(z, b)
        z2 = z + 0.5 * h * k1
        k2 = velocity(z2, branch_near(z2, b))
        z3 = z + 0.5 * h * k2
        k3 = velocity(z3, branch_near(z3, b))
        z4 = z + h * k3
        k4 = velocity(z4, branch_near(z4, b))
        z_new = z + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        b_new = branch_near(z_new, b)
        mid = 0.5 * (z + z_new)
        phi += (field.G(z, b) + 4 * field.G(mid, branch_near(mid, b)) + field.G(z_new, b_new)) / 6 * (z_new - z)
        # project back onto Im Phi = 0
        g_new = field.G(z_new, b_new)
        if g_new != 0:
            z_new -= 1j * phi.imag / g_new
            b_new = branch_near(z_new, b_new)
            phi = complex(phi.real, 0.0)
        z, b = z_new, b_new
        points.append(field.to_plane(z))
        if field.outside(z):
            reason = "box"
            break
        hit = next((name for name, p in targets.items() if name != source.name and abs(z - p) < options.clearance * scale), None)
        if hit is not None:
            target, reason = hit, "turning_point"
            points.append(field.to_plane(targets[hit]))
            break
    return StokesCurve(
        curve_id=f"{source.name}-{k}",
        source=source.name,
        direction=k,
        sign="+" if phi.real > 0 else "-",
        points=[(p.real, p.imag) for p in points],
        visible=source.visible[k],
        target=target,
        stop_reason=reason,
    )


def _mark_duplicates(curves: List[StokesCurve]) -> None:
    seen: Dict[frozenset, str] = {}
    for curve in curves:
        if curve.target is None:
            continue
        pair = frozenset((curve.source, curve.target))
        if pair in seen:
            curve.duplicate_of = seen[pair]
        else:
            seen[pair] = curve.curve_id


def _angle_gap(a: float, b: float) -> float:
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


def _p_directions(star: complex) -> Tuple[List[float], List[bool], float]:
    """
    The five zero-phase directions at l0* (Phi ~ K (l0 - l0*)^(5/2), K ~ l0*^(1/2)),
    the three drawn ones (consecutive, middle nearest the outward ray) and the
    drawn half-plane's bisector angle.
    """
    base = cmath.phase(star)
    directions = [((2 / 5) * (math.pi * k - base / 2)) % (2 * math.pi) for k in range(5)]
    order = sorted(range(5), key=lambda k: directions[k])
    best, best_gap = 0, None
    for position, k in enumerate(order):
        gap = _angle_gap(directions[k], base)
        if best_gap is None or gap < best_gap - 1e-9:
            best, best_gap = position, gap
    middle = order[best]
    drawn = {order[(best - 1) % 5], middle, order[(best + 1) % 5]}
    return directions, [k in drawn for k in range(5)], directions[middle]


def trace_p_stokes(c: complex, options: Optional[TraceOptions] = None) -> StokesGraph:
    """
    P-Stokes curves Im int_{tau_j}^t sqrt(Delta) dt = 0 from the three P-turning points.

    Each l0*_j carries five curves on the lambda_0-surface; three lie on the drawn
    sheet, the other two are kept with visible=False. Cuts are straight t-rays
    from tau_j, the image of the boundary of the drawn half-plane.
    """
    options = options or TraceOptions.from_settings(settings)
    stars = turning_point_roots(c)
    taus = turning_points(c)
    scale = abs(stars[0])
    box = options.box_radius * abs(taus[0])
    names = [f"tau{j}" for j in (1, 2, 3)]

    field = _Field(
        G=lambda l, w: w * (-(4 * l ** 3 - c) / l ** 2),
        radicand=lambda l: (4 * l ** 3 - c) / l,
        to_plane=lambda l: -2 * l ** 2 - c / l,
        outside=lambda l: abs(l) < 1e-6 * scale or abs(-2 * l ** 2 - c / l) > box,
    )

    graph = StokesGraph(kind="p", c=(c.real, c.imag), plane="t", box_radius=box)
    curves: List[StokesCurve] = []
    targets = dict(zip(names, stars))
    for name, star, tau in zip(names, stars, taus):
        graph.turning_points.append(TurningPoint(name=name, re=tau.real, im=tau.imag, multiplicity="simple"))
        directions, visible, bisector = _p_directions(star)
        gamma = bisector - cmath.phase(star)

        # drawn-sheet w ~ 2 sqrt(3) l0* sqrt(u/l0*), the branch with w ~ 2 l0 on the outward ray
        def branch_at(l, star=star, gamma=gamma):
            v = (l - star) / star
            return 2 * math.sqrt(3) * star * cmath.exp(0.5j * gamma) * cmath.sqrt(v * cmath.exp(-1j * gamma))

        source = _Source(name, star, 1.5, directions, visible, branch_at)
        for k in range(5):
            curves.append(_trace(field, source, k, targets, scale, options))
        cut_direction = cmath.exp(2j * bisector)
        graph.cuts.append(Cut(source=name, points=[(tau.real, tau.imag),
                                                   ((tau + 2 * box * cut_direction).real, (tau + 2 * box * cut_direction).imag)]))
    _mark_duplicates(curves)
    graph.curves = curves
    logger.info(f"traced {len(curves)} P-Stokes curves at c={c}; connections: {[cv.curve_id for cv in graph.connections]}")
    return graph


def _sheet_s(l0: complex, a1: complex, a2: complex) -> Callable[[complex], complex]:
    """s ~ x at infinity with its cut on the segment [a1, a2]."""
    half = 0.5 * (a1 - a2)

    def s(x):
        y = x + l0
        return y * cmath.sqrt(1 - half * half / (y * y))

    return s


def trace_sl2_stokes(t: complex, c: complex, options: Optional[TraceOptions] = None) -> StokesGraph:
    """
    Stokes curves Im int_a^x sqrt(Q_0) dx = 0 from a1, a2 (three each) and from the
    double turning point l0 (four), with s on the sheet s ~ x at infinity.
    """
    options = options or TraceOptions.from_settings(settings)
    state = state_at(c, t)
    if abs(state.delta) < 1e-12:
        raise NumericsError("Delta(t, c) = 0: the turning points of Q_0 are not separated")
    l0, a1, a2 = sl2_turning_points(state)
    scale = min(abs(a1 - l0), abs(a2 - l0), abs(a1 - a2))
    box = options.box_radius * max(abs(l0), abs(a1), abs(a2), scale)
    sheet = _sheet_s(l0, a1, a2)

    field = _Field(
        G=lambda x, s: (x - l0) * s,
        radicand=lambda x: x * x + 2 * l0 * x + 3 * l0 * l0 + t,
        to_plane=lambda x: x,
        outside=lambda x: abs(x) > box,
    )

    sources = []
    for name, a, other in (("a1", a1, a2), ("a2", a2, a1)):
        arg_k = cmath.phase((a - l0) * cmath.sqrt(a - other))
        directions = [((2 / 3) * (math.pi * k - arg_k)) % (2 * math.pi) for k in range(3)]
        sources.append(_Source(name, a, 0.5, directions, [True] * 3, sheet))
    s0 = sheet(l0)
    directions = [((math.pi * k - cmath.phase(s0)) / 2) % (2 * math.pi) for k in range(4)]
    sources.append(_Source("lambda0", l0, 1.0, directions, [True] * 4, sheet))

    graph = StokesGraph(kind="sl2", c=(c.real, c.imag), t=(state.t.real, state.t.imag), plane="x", box_radius=box)
    graph.turning_points = [
        TurningPoint(name="a1", re=a1.real, im=a1.imag, multiplicity="simple"),
        TurningPoint(name="a2", re=a2.real, im=a2.imag, multiplicity="simple"),
        TurningPoint(name="lambda0", re=l0.real, im=l0.imag, multiplicity="double"),
    ]
    targets = {"a1": a1, "a2": a2, "lambda0": l0}
    curves = []
    for source in sources:
        for k in range(len(source.directions)):
            curves.append(_trace(field, source, k, targets, scale, options))
    _mark_duplicates(curves)
    graph.curves = curves
    graph.cuts.append(Cut(source="a1", points=[(a1.real, a1.imag), (a2.real, a2.imag)]))
    logger.info(f"traced {len(curves)} Stokes curves of Q_0 at t={t}, c={c}; connections: {[cv.curve_id for cv in graph.connections]}")
    return graph


def detect_degeneration(c_magnitude: float, arg_range: Tuple[float, float], tol: float = 1e-12,
                        samples: int = 41) -> List[float]:
    """
    Values of arg c in arg_range where int_{tau_1}^{tau_2} sqrt(Delta) dt is real.

    The period is followed in arg c with its sign made continuous, then the
    sign changes of its imaginary part are refined with brentq.
    """
    if c_magnitude <= 0:
        raise NumericsError("c = 0 is excluded from the sweep")
    lo, hi = arg_range
    grid = np.linspace(lo, hi, samples)
    values = []
    for theta in grid:
        value = period_p(c_magnitude * cmath.exp(1j * theta))
        if values and abs(value + values[-1]) < abs(value - values[-1]):
            value = -value
        values.append(value)

    def aligned(theta, reference):
        value = period_p(c_magnitude * cmath.exp(1j * theta))
        return value if abs(value - reference) <= abs(value + reference) else -value

    roots = []
    for i in range(samples - 1):
        left, right = values[i].imag, values[i + 1].imag
        if left == 0:
            roots.append(float(grid[i]))
            continue
        if left * right < 0:
            reference = values[i]
            root = brentq(lambda th: aligned(th, reference).imag, grid[i], grid[i + 1], xtol=tol)
            roots.append(float(root))
    if values and values[-1].imag == 0:
        roots.append(float(grid[-1]))
    logger.info(f"critical arg c in ({lo:.6g}, {hi:.6g}) at |c|={c_magnitude}: {roots}")
    return roots
