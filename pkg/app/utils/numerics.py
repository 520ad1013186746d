"""
Branch-tracked numerics on the Riemann surfaces of lambda_0(t) and of s(x).

P_II quantities are handled in the lambda_0-plane, which uniformizes the cubic:

    t = -2 l0^2 - c/l0,   Delta = (4 l0^3 - c)/l0,   dt = -(Delta/l0) d l0

so P-turning points become the square-root points l0* = (c/4)^(1/3) omega^(2j)
of w = sqrt(Delta), and one loop around l0* in the lambda_0-plane is a closed
loop through both sheets around tau_j in the t-plane.
"""

import cmath
import logging
import math
import warnings
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad_vec
from scipy.optimize import brentq

from app.context import get_tower
from app.utils.errors import BranchError, ClearanceError, NumericsError, QuadratureError
from app.utils.pii_series import riccati_series, zero_param_solution
from app.utils.sl2_series import sl2_riccati_series
from app.utils.tower import TowerElement
from config import settings

logger = logging.getLogger(__name__)

OMEGA = cmath.exp(2j * cmath.pi / 3)
TWO_PI = 2 * math.pi
# upper end of the ray parameter; beyond it integrands are below double precision
RAY_U_MAX = 1 - 1e-9

Plane = Literal["t", "l0", "x"]


@dataclass(frozen=True)
class BranchState:
    """A point of the Riemann surface with consistent values of the algebraic generators."""

    c: complex
    t: complex
    l0: complex
    w: Optional[complex] = None
    q: Optional[complex] = None
    x: Optional[complex] = None
    s: Optional[complex] = None

    @property
    def delta(self) -> complex:
        return 6 * self.l0 ** 2 + self.t

    def values(self, primitives: Optional[Dict[str, complex]] = None) -> Dict[str, complex]:
        out = {"t": self.t, "c": self.c, "l0": self.l0}
        for name in ("w", "q", "x", "s"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        if primitives:
            out.update(primitives)
        return out

    def relation_residuals(self) -> Dict[str, float]:
        out = {"l0": abs(2 * self.l0 ** 3 + self.t * self.l0 + self.c)}
        if self.w is not None:
            out["w"] = abs(self.w ** 2 - self.delta)
        if self.q is not None and self.w is not None:
            out["q"] = abs(self.q ** 2 - self.w)
        if self.s is not None and self.x is not None:
            out["s"] = abs(self.s ** 2 - (self.x ** 2 + 2 * self.l0 * self.x + 3 * self.l0 ** 2 + self.t))
        return out


# Paths

@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def point(self, u: float) -> complex:
        return self.start + u * (self.end - self.start)

    def derivative(self, u: float) -> complex:
        return self.end - self.start


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, u: float) -> complex:
        theta = self.theta0 + u * (self.theta1 - self.theta0)
        return self.center + self.radius * cmath.exp(1j * theta)

    def derivative(self, u: float) -> complex:
        theta = self.theta0 + u * (self.theta1 - self.theta0)
        return 1j * (self.theta1 - self.theta0) * self.radius * cmath.exp(1j * theta)


@dataclass(frozen=True)
class Ray:
    """start + direction * scale * u/(1 - u), reaching infinity as u -> 1."""

    start: complex
    direction: complex
    scale: float

    def point(self, u: float) -> complex:
        u = min(u, RAY_U_MAX)
        return self.start + self.direction * self.scale * u / (1 - u)

    def derivative(self, u: float) -> complex:
        u = min(u, RAY_U_MAX)
        return self.direction * self.scale / (1 - u) ** 2


Segment = Union[Line, Arc, Ray]


@dataclass(frozen=True)
class PathSpec:
    """Consecutive segments in one plane, parametrized by s in [0, len(segments)]."""

    plane: Plane
    segments: Tuple[Segment, ...]

    @property
    def length(self) -> int:
        return len(self.segments)

    def _locate(self, s: float) -> Tuple[Segment, float]:
        k = min(int(s), self.length - 1)
        return self.segments[k], s - k

    def point(self, s: float) -> complex:
        segment, u = self._locate(s)
        return segment.point(u)

    def derivative(self, s: float) -> complex:
        segment, u = self._locate(s)
        return segment.derivative(u)

    def min_distance(self, points: Sequence[complex], samples: int = 400) -> float:
        grid = np.linspace(0.0, self.length * (1 - 1e-3), samples)
        return min(abs(self.point(s) - p) for s in grid for p in points)

    def check_clearance(self, points: Sequence[complex], radius: float) -> None:
        distance = self.min_distance(points)
        if distance < radius:
            raise ClearanceError(f"path comes within {distance:.3g} of a singular point (clearance {radius:.3g})")


# Continuation

class Continuation:
    """
    One branch of a multivalued function followed along s in [0, length].

    Values are cached at evenly spaced checkpoints; a step is accepted when the
    nearest candidate is unambiguous, otherwise it is halved.
    """

    def __init__(self, length: float, start_value: complex, n_checkpoints: int = 32, max_depth: int = 60):
        self.length = length
        self.max_depth = max_depth
        self._grid = np.linspace(0.0, length, n_checkpoints * max(1, math.ceil(length)) + 1)
        self._values = [complex(start_value)]
        for a, b in zip(self._grid[:-1], self._grid[1:]):
            self._values.append(self._step(a, self._values[-1], b, 0))

    def candidates(self, s: float) -> Sequence[complex]:
        raise NotImplementedError

    def _step(self, s_a: float, v_a: complex, s_b: float, depth: int) -> complex:
        if s_b == s_a:
            return v_a
        ranked = sorted(self.candidates(s_b), key=lambda v: abs(v - v_a))
        best = ranked[0]
        if len(ranked) == 1 or abs(best - v_a) < 0.5 * abs(ranked[1] - v_a):
            return best
        if depth >= self.max_depth:
            raise BranchError(f"branch continuation failed near s = {s_b:.6g}")
        mid = 0.5 * (s_a + s_b)
        return self._step(mid, self._step(s_a, v_a, mid, depth + 1), s_b, depth + 1)

    def value(self, s: float) -> complex:
        i = int(np.searchsorted(self._grid, s, side="right")) - 1
        i = min(max(i, 0), len(self._grid) - 1)
        return self._step(float(self._grid[i]), self._values[i], s, 0)

    def end(self) -> complex:
        return self._values[-1]


class SqrtBranch(Continuation):
    def __init__(self, radicand: Callable[[float], complex], start_value: complex, length: float = 1.0, **kwargs):
        self.radicand = radicand
        super().__init__(length, start_value, **kwargs)

    def candidates(self, s: float) -> Sequence[complex]:
        root = cmath.sqrt(self.radicand(s))
        return (root, -root)


class CubicRootBranch(Continuation):
    """A root of 2 l^3 + t l + c followed along t(s)."""

    def __init__(self, t_of: Callable[[float], complex], c: complex, start_value: complex, length: float,
                 collision_tol: float = 1e-9, **kwargs):
        self.t_of = t_of
        self.c = c
        self.collision_tol = collision_tol
        super().__init__(length, start_value, **kwargs)

    def candidates(self, s: float) -> Sequence[complex]:
        roots = [complex(r) for r in np.roots([2.0, 0.0, self.t_of(s), self.c])]
        scale = max(1.0, max(abs(r) for r in roots))
        gap = min(abs(a - b) for a, b in combinations(roots, 2))
        if gap < self.collision_tol * scale:
            raise BranchError(f"root collision (gap {gap:.3g}) near a P-turning point at s = {s:.6g}")
        return roots


class BranchTracker:
    """
    Continuation of a BranchState along a path.

    Only the generators present in the starting state are followed.
    """

    def __init__(self, path: PathSpec, start: BranchState, n_checkpoints: int = 32):
        self.path = path
        self.start = start
        c, L = start.c, path.length
        if path.plane == "t":
            self._l0 = CubicRootBranch(path.point, c, start.l0, L, n_checkpoints=n_checkpoints)
            self.l0_of = self._l0.value
            self.t_of = path.point
        elif path.plane == "l0":
            self.l0_of = path.point
            self.t_of = lambda s: -2 * path.point(s) ** 2 - c / path.point(s)
        else:
            self.l0_of = lambda s: start.l0
            self.t_of = lambda s: start.t
        self.x_of = path.point if path.plane == "x" else (lambda s: start.x)

        self._w = self._q = self._s = None
        if start.w is not None:
            self._w = SqrtBranch(lambda s: 6 * self.l0_of(s) ** 2 + self.t_of(s), start.w, L, n_checkpoints=n_checkpoints)
            if start.q is not None:
                self._q = SqrtBranch(self._w.value, start.q, L, n_checkpoints=n_checkpoints)
        if start.s is not None:
            def s_radicand(s):
                x, l0 = self.x_of(s), self.l0_of(s)
                return x * x + 2 * l0 * x + 3 * l0 * l0 + self.t_of(s)
            self._s = SqrtBranch(s_radicand, start.s, L, n_checkpoints=n_checkpoints)

    def state(self, s: float) -> BranchState:
        return BranchState(
            c=self.start.c,
            t=self.t_of(s),
            l0=self.l0_of(s),
            w=self._w.value(s) if self._w else None,
            q=self._q.value(s) if self._q else None,
            x=self.x_of(s),
            s=self._s.value(s) if self._s else None,
        )

    def end(self) -> BranchState:
        return self.state(float(self.path.length))


def continue_branch(state: BranchState, path: PathSpec, n_checkpoints: int = 32) -> BranchState:
    """Terminal state after continuing state along path."""
    return BranchTracker(path, state, n_checkpoints=n_checkpoints).end()


# Evaluation and quadrature

Integrand = Union[TowerElement, Callable[[BranchState], complex]]


def check_point_clearance(state: BranchState, radius: float) -> None:
    """
    Refuse points within radius x (turning-point scale) of a singular point:
    the P-turning points in t, and l0, a1, a2 in x when x is set.

    Raises:
        ClearanceError: if the state lies inside the clearance disk
    """
    if state.c != 0:
        taus = turning_points(state.c)
        distance = min(abs(state.t - tau) for tau in taus)
        if distance < radius * abs(taus[0]):
            raise ClearanceError(f"t = {state.t} lies within {distance:.3g} of a P-turning point")
    if state.x is not None:
        root = cmath.sqrt(-2 * state.l0 ** 2 - state.t)
        points = (state.l0, -state.l0 + root, -state.l0 - root)
        scale = max(abs(a - b) for a, b in combinations(points, 2))
        distance = min(abs(state.x - p) for p in points)
        if distance < radius * scale:
            raise ClearanceError(f"x = {state.x} lies within {distance:.3g} of a turning point of Q_0")


def eval_scalar(e: TowerElement, state: BranchState, primitives: Optional[Dict[str, complex]] = None,
                clearance: Optional[float] = None) -> complex:
    """
    Numeric value of a tower element at a branch state.

    Raises:
        ClearanceError: if the state is within clearance (default settings.CLEARANCE)
            of a singular point; clearance=0 disables the check
    """
    radius = settings.CLEARANCE if clearance is None else clearance
    if radius > 0:
        check_point_clearance(state, radius)
    return complex(e.evaluate(state.values(primitives)))


def _as_callable(integrand: Integrand, primitives=None) -> Callable[[BranchState], complex]:
    if isinstance(integrand, TowerElement):
        # paths are cleared as a whole; integrable endpoints may touch turning points
        return lambda state: eval_scalar(integrand, state, primitives, clearance=0.0)
    return integrand


def quad_complex(f: Callable[[float], complex], a: float, b: float, tol: float) -> complex:
    """Adaptive Gauss-Kronrod quadrature of a complex function on [a, b]."""
    def pair(u):
        v = f(u)
        return np.array([v.real, v.imag])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result, error, info = quad_vec(pair, a, b, epsabs=tol, epsrel=tol, limit=2000, full_output=True)
    value = complex(result[0], result[1])
    if not info.success or error > 1e3 * tol * max(1.0, abs(value)):
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge (error estimate {error:.3g})")
    return value


def path_integral(integrand: Integrand, tracker: BranchTracker, tol: Optional[float] = None,
                  differential: Optional[Plane] = None, primitives=None) -> complex:
    """
    Integral of integrand d(differential) along the tracker's path.

    differential defaults to the path's own plane; 't' is also allowed on
    lambda_0-plane paths through dt = -(Delta/l0) dl0.
    """
    tol = settings.QUAD_TOL if tol is None else tol
    path = tracker.path
    differential = differential or path.plane
    if differential != path.plane and not (path.plane == "l0" and differential == "t"):
        raise NumericsError(f"cannot integrate d{differential} along a path in the {path.plane}-plane")
    fn = _as_callable(integrand, primitives)

    def f(s):
        state = tracker.state(s)
        value = fn(state) * path.derivative(s)
        if differential != path.plane:
            value *= -state.delta / state.l0
        return value

    return sum((quad_complex(f, k, k + 1, tol) for k in range(path.length)), 0j)


# Turning points and the branch on the ray through tau_1

def turning_point_roots(c: complex) -> List[complex]:
    """l0* of tau_1, tau_2, tau_3: (c/4)^(1/3) omega^(2j), principal cube root."""
    if c == 0:
        raise NumericsError("c = 0: the three P-turning points merge at t = 0")
    base = (c / 4) ** (1 / 3)
    return [base * OMEGA ** (2 * j) for j in (1, 2, 3)]


def turning_points(c: complex) -> List[complex]:
    """tau_j = -6 (c/4)^(2/3) omega^j for j = 1, 2, 3."""
    if c == 0:
        raise NumericsError("c = 0: the three P-turning points merge at t = 0")
    base = (c / 4) ** (2 / 3)
    return [-6 * base * OMEGA ** j for j in (1, 2, 3)]


def ray_state(c: complex, r: float) -> BranchState:
    """
    The point l0 = l0*_1 (1 + r) of the ray through tau_1 to infinity, on the
    sheet with w ~ 2 l0 (and l0 ~ -(i/sqrt 2) t^(1/2)) at infinity.
    """
    star = turning_point_roots(c)[0]
    l0 = star * (1 + r)
    w = 2 * l0 * cmath.sqrt(1 - (star / l0) ** 3)
    return BranchState(c=c, t=-2 * l0 ** 2 - c / l0, l0=l0, w=w, q=cmath.sqrt(w))


def ray_parameter(c: complex, t_abs: float) -> float:
    """r >= 0 with |t(r)| = t_abs on the ray t = (tau_1/3)((1 + r)^2 + 2/(1 + r))."""
    tau = abs(turning_points(c)[0])
    if t_abs <= tau:
        raise NumericsError(f"|t| = {t_abs} does not lie beyond |tau_1| = {tau:.6g}")
    g = lambda r: tau / 3 * ((1 + r) ** 2 + 2 / (1 + r)) - t_abs
    return brentq(g, 0.0, math.sqrt(3 * t_abs / tau) + 1)


def default_t(c: complex) -> complex:
    return ray_state(c, 0.5).t


def state_at(c: complex, t: complex) -> BranchState:
    """
    The branch state at t reached from the ray through tau_1 by a straight t-segment.

    Raises:
        ClearanceError: if the segment passes too close to a P-turning point
    """
    reference = ray_state(c, 1.0)
    taus = turning_points(c)
    if abs(t - reference.t) < 1e-14 * abs(reference.t):
        return reference
    path = PathSpec("t", (Line(reference.t, t),))
    path.check_clearance(taus, settings.CLEARANCE * abs(taus[0]))
    return continue_branch(reference, path)


def loop_monodromy(c: complex, turns: int = 1, radius: float = 0.3,
                   n_checkpoints: int = 32) -> Tuple[BranchState, BranchState]:
    """
    (start, end) of a counterclockwise t-loop around tau_1 alone, run `turns` times.

    The loop starts on the ray through tau_1; its radius is `radius` times the
    distance to tau_2. l0 is a double root at tau_1, so Delta ~ (t - tau_1)^(1/2):
    one turn swaps l0 with its merging partner, two turns send w -> -w and q -> i q.
    """
    taus = turning_points(c)
    tau = taus[0]
    rho = radius * abs(tau - taus[1])
    theta0 = cmath.phase(tau)
    start = state_at(c, tau + rho * cmath.exp(1j * theta0))
    path = PathSpec("t", tuple(Arc(tau, rho, theta0 + k * TWO_PI, theta0 + (k + 1) * TWO_PI) for k in range(turns)))
    end = continue_branch(start, path, n_checkpoints=n_checkpoints)
    logger.debug(f"monodromy around tau_1 x{turns} at c={c}: w {start.w} -> {end.w}, q {start.q} -> {end.q}")
    return start, end


def merging_partner(state: BranchState, j: int) -> complex:
    """
    The simple turning point a of Q_0 that merges with l0 as t -> tau_j.

    a = -l0 + zeta with zeta^2 = c/l0, continued from zeta = 2 l0*_j along
    the straight lambda_0-segment from l0*_j to l0.
    """
    star = turning_point_roots(state.c)[j - 1]
    segment = lambda u: star + u * (state.l0 - star)
    zeta = SqrtBranch(lambda u: state.c / segment(u), 2 * star).end()
    return -state.l0 + zeta


def sl2_turning_points(state: BranchState) -> Tuple[complex, complex, complex]:
    """(l0, a1, a2): the double turning point and the two simple ones, a1 merging at tau_1."""
    a1 = merging_partner(state, 1)
    a2 = -2 * state.l0 - a1
    return state.l0, a1, a2


def s_at_infinity(state: BranchState, x: complex) -> complex:
    """s on the sheet with s ~ x, valid for |x| large compared to the turning points."""
    l0, t = state.l0, state.t
    return x * cmath.sqrt(1 + 2 * l0 / x + (3 * l0 * l0 + t) / (x * x))


# Contours

def _lambda0_loop(state: BranchState, star: complex, rho: float) -> PathSpec:
    theta = cmath.phase(state.l0 - star)
    return PathSpec("l0", (Arc(star, rho, theta, theta + TWO_PI),))


def gamma_infinity_integral(e: TowerElement, c: complex, rho: float = 0.3, tol: Optional[float] = None) -> complex:
    """
    (1/2) of the integral of e dt along Gamma_infinity: in from infinity on the
    second sheet, around tau_1, out to infinity on the first.

    e must be odd in w. The two open legs add up to twice the first-sheet ray
    integral; the remaining loop is one lambda_0-circle around l0*_1.
    """
    star = turning_point_roots(c)[0]
    p = replace(ray_state(c, rho), q=None)
    ray = PathSpec("l0", (Ray(p.l0, star / abs(star), abs(star)),))
    open_part = path_integral(e, BranchTracker(ray, p), tol, "t")
    tracker = BranchTracker(_lambda0_loop(p, star, rho * abs(star)), replace(p, w=-p.w))
    if abs(tracker.end().w - p.w) > 1e-6 * abs(p.w):
        raise BranchError("loop around l0*_1 did not return on the first sheet")
    return open_part + 0.5 * path_integral(e, tracker, tol, "t")


def voros_numeric_W(c: complex, n_max: int, tol: Optional[float] = None, rho: float = 0.3,
                    radius_sweep: bool = True) -> List[complex]:
    """
    Contour values (1/2) int_{Gamma_inf} R_(2n-1) dt for n = 1..n_max.

    The n-th value equals W_n c^(1-2n). With radius_sweep the loop radius is
    also doubled and halved and the results must agree.
    """
    tol = settings.QUAD_TOL if tol is None else tol
    _, R_odd, _ = riccati_series(get_tower(), 2 * n_max - 1)
    values = []
    for n in range(1, n_max + 1):
        e = R_odd.coeff(2 * n - 1)
        value = gamma_infinity_integral(e, c, rho, tol)
        if radius_sweep:
            for factor in (2.0, 0.5):
                other = gamma_infinity_integral(e, c, rho * factor, tol)
                if abs(other - value) > 1e3 * tol * max(1.0, abs(value)):
                    raise NumericsError(f"W_{n}: loop radius dependence {abs(other - value):.3g} (branch tracking)")
        logger.info(f"W_{n} contour value at c={c}: {value}")
        values.append(value)
    return values


def residue_loop_r0(c: complex, rho: float = 0.3, tol: Optional[float] = None) -> complex:
    """Integral of R_0 dt over a closed loop around tau_1 through both sheets (-pi i/2)."""
    _, _, R_even = riccati_series(get_tower(), 0)
    star = turning_point_roots(c)[0]
    p = replace(ray_state(c, rho), q=None)
    return path_integral(R_even.coeff(0), BranchTracker(_lambda0_loop(p, star, rho * abs(star)), p), tol, "t")


def phase_renormalization(c: complex, t: complex, n: int, rho: float = 0.3, tol: Optional[float] = None) -> Tuple[complex, complex]:
    """
    P_(2n-1) at t normalized at tau_1 and at infinity.

    Their difference is the constant W_n c^(1-2n), i.e. lambda_tau1(alpha) = lambda_inf(alpha e^W).
    """
    _, R_odd, _ = riccati_series(get_tower(), 2 * n - 1)
    e = R_odd.coeff(2 * n - 1)
    star = turning_point_roots(c)[0]
    target = state_at(c, t)
    p = replace(ray_state(c, rho), q=None)
    leg = BranchTracker(PathSpec("l0", (Line(p.l0, target.l0),)), p)
    loop = BranchTracker(_lambda0_loop(p, star, rho * abs(star)), replace(p, w=-p.w))
    p_tau1 = path_integral(e, leg, tol, "t") + 0.5 * path_integral(e, loop, tol, "t")
    end = leg.end()
    ray = PathSpec("l0", (Ray(end.l0, end.l0 / abs(end.l0), abs(end.l0)),))
    p_inf = -path_integral(e, BranchTracker(ray, end), tol, "t")
    return p_tau1, p_inf


def _v_loop_and_ray(e: Integrand, state: BranchState, a1: complex, a2: complex, radius: float,
                    tol: float) -> complex:
    l0 = state.l0
    mid = 0.5 * (l0 + a2)
    d = (a1 - mid) / abs(a1 - mid)
    rho = radius * min(abs(a1 - l0), abs(a1 - a2))
    p = a1 + rho * d
    # s = sqrt((x - a1)(x - a2)) on the ray, continuous and ~ x at infinity
    s_p = d * cmath.sqrt(rho) * cmath.sqrt(rho + (a1 - a2) / d)
    base = replace(state, q=None, x=p, s=s_p)
    ray = PathSpec("x", (Ray(p, d, rho),))
    ray.check_clearance([l0, a2], 0.5 * rho)
    open_part = path_integral(e, BranchTracker(ray, base), tol)
    theta = cmath.phase(d)
    tracker = BranchTracker(PathSpec("x", (Arc(a1, rho, theta, theta + TWO_PI),)), replace(base, s=-s_p))
    if abs(tracker.end().s - s_p) > 1e-6 * abs(s_p):
        raise BranchError("loop around a1 did not return on the first sheet")
    return open_part + 0.5 * path_integral(e, tracker, tol)


def voros_numeric_VU(c: complex, t: complex, n_max: int, tol: Optional[float] = None,
                     radius: float = 0.3) -> Tuple[List[complex], List[complex], List[complex]]:
    """
    V^(0)_(2n-1), U^(0)_(2n-1) and 2V - U at (t, c) for n = 1..n_max.

    V is the integral of S_odd from a1 to infinity (first sheet, s ~ x), realized
    as a ray from near a1 plus half a loop; U is minus the integral of
    lambda^(0)_2n dt from t to infinity along the radial lambda_0-ray.
    """
    tol = settings.QUAD_TOL if tol is None else tol
    tower = get_tower()
    state = state_at(c, t)
    l0, a1, a2 = sl2_turning_points(state)
    _, S_odd = sl2_riccati_series(tower, 0, 2 * n_max - 1)
    lam0, _ = zero_param_solution(tower, 2 * n_max)
    stars = turning_point_roots(c)
    V, U = [], []
    for n in range(1, n_max + 1):
        V.append(_v_loop_and_ray(S_odd.coeff(0, 2 * n - 1), state, a1, a2, radius, tol))
        ray = PathSpec("l0", (Ray(l0, l0 / abs(l0), abs(l0)),))
        ray.check_clearance(stars, settings.CLEARANCE * abs(stars[0]))
        plain = BranchState(c=c, t=state.t, l0=l0)
        U.append(-path_integral(lam0.coeff(2 * n), BranchTracker(ray, plain), tol, "t"))
    combined = [2 * v - u for v, u in zip(V, U)]
    logger.info(f"2V - U at t={t}: {combined}")
    return V, U, combined


def big_circle(state: BranchState, points: Sequence[complex], factor: float = 3.0) -> Tuple[PathSpec, BranchState]:
    """A counterclockwise x-circle enclosing all turning points, with s ~ x on it."""
    radius = factor * max(abs(p) for p in points) + 1.0
    start = replace(state, q=None, x=complex(radius), s=s_at_infinity(state, complex(radius)))
    return PathSpec("x", (Arc(0j, radius, 0.0, TWO_PI),)), start


def period_p(c: complex, tol: Optional[float] = None) -> complex:
    """
    int_{tau_1}^{tau_2} sqrt(Delta) dt along the straight lambda_0-segment, on the
    continuous branch that starts principal near l0*_1 (sign not normalized).
    """
    tol = settings.QUAD_TOL if tol is None else tol
    l1, l2, l3 = turning_point_roots(c)
    D = l2 - l1
    segment = lambda u: l1 + u * D
    # Delta = -4 u (1 - u) D^2 (l - l3)/l on the segment
    h = SqrtBranch(lambda u: -4 * (segment(u) - l3) / segment(u), cmath.sqrt(-4 * (l1 - l3) / l1))

    def integrand(u):
        lam = segment(u)
        w = D * math.sqrt(u * (1 - u)) * h.value(u)
        return w * (-(4 * lam ** 3 - c) / lam ** 2) * D

    return quad_complex(integrand, 0.0, 1.0, tol)


def period_normalized(c: complex, tol: Optional[float] = None) -> complex:
    """The period with the sign for which it equals -2 pi i c."""
    value = period_p(c, tol)
    return value if (value * (-2j * math.pi * c).conjugate()).real > 0 else -value


def merging_relation(state: BranchState, j: int, tol: Optional[float] = None) -> Tuple[complex, complex]:
    """
    (int_{a_j}^{l0} sqrt(Q_0) dx, (1/2) int_{tau_j}^{t} sqrt(Delta) dt), normalized by s(l0) = w.
    """
    tol = settings.QUAD_TOL if tol is None else tol
    c, l0, w = state.c, state.l0, state.w
    stars = turning_point_roots(c)
    star = stars[j - 1]
    sk, sl = [s for i, s in enumerate(stars) if i != j - 1]
    D = l0 - star
    segment = lambda u: star + u * D
    G = lambda u: 4 * (segment(u) - sk) * (segment(u) - sl) / segment(u)
    # sqrt(Delta) = sqrt(u) sqrt(D G(u)), continued back from w at l0
    g = SqrtBranch(lambda v: D * G(1 - v), w)

    def rhs_integrand(u):
        lam = segment(u)
        return math.sqrt(u) * g.value(1 - u) * (-(4 * lam ** 3 - c) / lam ** 2) * D

    rhs = 0.5 * quad_complex(rhs_integrand, 0.0, 1.0, tol)

    a = merging_partner(state, j)
    b = -2 * l0 - a
    E = l0 - a
    # s = sqrt(u) sqrt(E (x - b)) on x = a + u E, continued back from w at l0
    s_branch = SqrtBranch(lambda v: E * (a + (1 - v) * E - b), w)

    def lhs_integrand(u):
        x = a + u * E
        return (x - l0) * math.sqrt(u) * s_branch.value(1 - u) * E

    lhs = quad_complex(lhs_integrand, 0.0, 1.0, tol)
    return lhs, rhs


def sqrt_q0_half_loop(state: BranchState, tol: Optional[float] = None) -> complex:
    """(1/2) of the integral of sqrt(Q_0) = (x - l0) s over a big circle (pi i c)."""
    l0, a1, a2 = sl2_turning_points(state)
    path, start = big_circle(state, (l0, a1, a2))
    return 0.5 * path_integral(lambda st: (st.x - st.l0) * st.s, BranchTracker(path, start), tol)


def s_odd_big_loop(state: BranchState, n: int, tol: Optional[float] = None) -> complex:
    """Integral of S^(0)_odd,n over a big circle; zero for n >= 1."""
    _, S_odd = sl2_riccati_series(get_tower(), 0, n)
    l0, a1, a2 = sl2_turning_points(state)
    path, start = big_circle(state, (l0, a1, a2))
    return path_integral(S_odd.coeff(0, n), BranchTracker(path, start), tol)


def check_turning_integrals(c: complex, t: complex, tol: Optional[float] = None) -> List[Tuple[str, complex, complex]]:
    """
    (name, computed, expected) for the turning-point integrals at (t, c): half the
    big loop of sqrt(Q_0), the P period and the merging relations for j = 1, 2.
    """
    state = state_at(c, t)
    rows = [
        ("sqrt_q0_period", sqrt_q0_half_loop(state, tol), 1j * math.pi * c),
        ("p_period", period_normalized(c, tol), -2j * math.pi * c),
    ]
    for j in (1, 2):
        lhs, rhs = merging_relation(state, j, tol)
        rows.append((f"merging_relation_{j}", lhs, rhs))
    logger.info(f"turning-point integrals at t={t}, c={c}: {[(name, value) for name, value, _ in rows]}")
    return rows


def s0_residue_loop(state: BranchState, radius: float = 0.3, tol: Optional[float] = None) -> complex:
    """Integral of S^(0)_0 dx around a1 alone (-pi i/2)."""
    S, _ = sl2_riccati_series(get_tower(), 0, 0)
    l0, a1, a2 = sl2_turning_points(state)
    rho = radius * min(abs(a1 - l0), abs(a1 - a2))
    start_x = a1 + rho
    start = replace(state, q=None, x=start_x, s=cmath.sqrt(start_x * start_x + 2 * l0 * start_x + 3 * l0 * l0 + state.t))
    path = PathSpec("x", (Arc(a1, rho, 0.0, TWO_PI),))
    return path_integral(S.coeff(0, 0), BranchTracker(path, start), tol)


def closed_form_phase(state: BranchState) -> complex:
    """int_{tau_1}^{t} w dt = (2/3) t w - c log((2 l0 - w)/(2 l0 + w)) on the ray through tau_1."""
    l0, w = state.l0, state.w
    return 2 / 3 * state.t * w - state.c * cmath.log((2 * l0 - w) / (2 * l0 + w))


def phase_from_tau1(c: complex, r: float, tol: Optional[float] = None) -> complex:
    """int_{tau_1}^{t} w dt along the ray, t = t(r), by quadrature in lambda_0."""
    tol = settings.QUAD_TOL if tol is None else tol
    star = turning_point_roots(c)[0]

    def integrand(u):
        lam = star * (1 + u * r)
        w = 2 * lam * cmath.sqrt(1 - (star / lam) ** 3)
        return w * (-(4 * lam ** 3 - c) / lam ** 2) * star * r

    return quad_complex(integrand, 0.0, 1.0, tol)


# Asymptotics at t -> infinity along the ray through tau_1

def ray_asymptotics(c: complex, t_abs: float = 1e4) -> List[Tuple[str, complex, complex, float]]:
    """
    (name, value, leading terms, remainder bound) for l0, lambda^(0)_2, nu^(0)_1,
    nu^(0)_3, R_-1, R_0 and R_1 at |t| = t_abs on the ray through tau_1.
    """
    tower = get_tower()
    state = ray_state(c, ray_parameter(c, t_abs))
    t = state.t
    rt = cmath.sqrt(t)
    s2 = math.sqrt(2)
    lam, nu = zero_param_solution(tower, 3)
    R, _, _ = riccati_series(tower, 1)
    table = [
        ("lambda0", tower.gen("l0"), -1j / s2 * rt + c / (2 * t) - 3 * s2 * 1j / 8 * c ** 2 * t ** -2.5, -4),
        ("lambda^(0)_2", lam.coeff(2), -s2 * 1j / 16 * t ** -2.5, -4),
        ("nu^(0)_1", nu.coeff(1), -1j / (2 * s2) / rt - c / 2 * t ** -2 + 15 * s2 * 1j / 16 * c ** 2 * t ** -3.5, -5),
        ("nu^(0)_3", nu.coeff(3), 5 * s2 * 1j / 32 * t ** -3.5, -5),
        ("R_-1", R.coeff(-1), -s2 * 1j * rt + 1.5 * c / t - 21 * s2 * 1j / 16 * c ** 2 * t ** -2.5, -4),
        ("R_0", R.coeff(0), -0.25 / t + 9 * s2 * 1j / 16 * c * t ** -2.5, -4),
        ("R_1", R.coeff(1), -17 * s2 * 1j / 64 * t ** -2.5, -4),
    ]
    out = []
    for name, element, approx, order in table:
        value = eval_scalar(element, state)
        bound = 10 * (1 + abs(c)) ** 4 * abs(t) ** order + 64 * np.finfo(float).eps * (1 + abs(value))
        out.append((name, value, approx, bound))
    return out
