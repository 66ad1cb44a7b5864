"""Adaptive Dormand-Prince 5(4) integration for complex-valued states,
plus polyline paths in the complex time plane.

The stepper works on arbitrary complex ndarrays (vectors or fundamental
matrices).  Error control is mixed relative/absolute with scale
rtol*(1+|y|) per component; steps are clamped so requested checkpoints
are hit exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Polyline", "IntegrationError", "StepUnderflowError", "NonFiniteStateError",
    "BlowUpError", "PathProximityError", "solve_complex_ode", "propagate_linear",
    "point_segment_distance",
]


class IntegrationError(Exception):
    pass


class StepUnderflowError(IntegrationError):
    pass


class NonFiniteStateError(IntegrationError):
    pass


class BlowUpError(IntegrationError):
    pass


class PathProximityError(IntegrationError):
    pass


@dataclass(frozen=True)
class Polyline:
    """Piecewise-linear path in the complex plane."""

    waypoints: tuple[complex, ...]
    closed: bool = False

    def __init__(self, waypoints, closed: bool = False):
        pts = tuple(complex(w) for w in waypoints)
        if not pts:
            raise ValueError("a polyline needs at least one waypoint")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")
        if closed and pts[0] != pts[-1]:
            raise ValueError("a closed polyline must end at its start")
        object.__setattr__(self, "waypoints", pts)
        object.__setattr__(self, "closed", closed)

    @property
    def start(self) -> complex:
        return self.waypoints[0]

    @property
    def end(self) -> complex:
        return self.waypoints[-1]

    def segments(self):
        return tuple(zip(self.waypoints, self.waypoints[1:]))

    def length(self) -> float:
        return sum(abs(b - a) for a, b in self.segments())

    def reversed(self) -> "Polyline":
        return Polyline(tuple(reversed(self.waypoints)), self.closed)

    def concat(self, other: "Polyline") -> "Polyline":
        if self.end != other.start:
            raise ValueError("paths do not join: endpoint differs from start")
        pts = self.waypoints + other.waypoints[1:]
        return Polyline(pts, closed=pts[0] == pts[-1])

    def point_at(self, fraction: float) -> complex:
        """Point at the given arclength fraction in [0, 1]."""
        segs = self.segments()
        if not segs:
            return self.start
        target = fraction * self.length()
        acc = 0.0
        for a, b in segs:
            seg = abs(b - a)
            if acc + seg >= target - 1e-15:
                local = 0.0 if seg == 0 else min(1.0, max(0.0, (target - acc) / seg))
                return a + local * (b - a)
            acc += seg
        return self.end


def point_segment_distance(p: complex, a: complex, b: complex) -> float:
    d = b - a
    denom = abs(d) ** 2
    if denom == 0.0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


# Dormand-Prince 5(4) tableau (FSAL)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_MIN_STEP = 1e-14
_MAX_STEPS = 1_000_000


def solve_complex_ode(f, y0: np.ndarray, *, rtol: float = 1e-10,
                      checkpoints=(), max_norm: float | None = None) -> list[np.ndarray]:
    """Integrate y' = f(t, y) for t in [0, 1] from y0.

    Returns the states at the given checkpoint times (strictly increasing,
    in (0, 1]); with no checkpoints, returns [y(1)].
    """
    stops = sorted(set(float(c) for c in checkpoints)) or [1.0]
    if stops[0] <= 0.0 or stops[-1] > 1.0 + 1e-12:
        raise ValueError("checkpoints must lie in (0, 1]")
    y = np.asarray(y0, dtype=complex).copy()
    t = 0.0
    k1 = np.asarray(f(t, y), dtype=complex)
    h_nominal = min(0.1, stops[0])
    out: list[np.ndarray] = []
    si = 0
    steps = 0
    while si < len(stops):
        target = stops[si]
        if target - t <= _MIN_STEP:
            out.append(y.copy())
            si += 1
            continue
        clipped = h_nominal >= target - t
        h = target - t if clipped else h_nominal

        ks = [k1]
        for i in range(1, 7):
            yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(np.asarray(f(t + _C[i] * h, yi), dtype=complex))
        y_new = y + h * sum(b * k for b, k in zip(_B5, ks))
        err = h * sum(e * k for e, k in zip(_E, ks))

        finite = bool(np.all(np.isfinite(y_new.view(float))))
        if finite:
            scale = rtol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
            err_norm = float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))
        else:
            err_norm = np.inf

        if err_norm <= 1.0:
            y = y_new
            k1 = ks[6]
            t = target if clipped else t + h
            if max_norm is not None and float(np.max(np.abs(y))) > max_norm:
                raise BlowUpError(f"state norm exceeded {max_norm:g}")
            if clipped:
                out.append(y.copy())
                si += 1
            else:
                factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
                h_nominal = min(h * factor, 1.0)
        else:
            shrink = 0.2 if not np.isfinite(err_norm) else max(0.2, 0.9 * err_norm ** -0.2)
            h_next = h * min(shrink, 0.9)
            if h_next < _MIN_STEP:
                raise StepUnderflowError(f"step size underflow at t={t}")
            h_nominal = h_next
        steps += 1
        if steps > _MAX_STEPS:
            raise IntegrationError("step budget exhausted")
    return out


def propagate_linear(matrix_at, path: Polyline, y0: np.ndarray, *,
                     rtol: float = 1e-10, fractions=None,
                     singularities=(), min_distance: float = 1e-6):
    """Continue Y' = A(t)·Y along a polyline.

    ``matrix_at`` maps a complex time to the coefficient matrix.  When
    ``fractions`` (arclength fractions in (0, 1]) is given, returns the
    list of states at those fractions in the given order; otherwise
    returns the final state.  Raises PathProximityError if the path comes
    within ``min_distance`` of a listed singularity.
    """
    for sigma in singularities:
        for a, b in path.segments():
            if point_segment_distance(complex(sigma), a, b) < min_distance:
                raise PathProximityError(
                    f"path passes within {min_distance:g} of singularity {sigma}")

    y = np.asarray(y0, dtype=complex).copy()
    segments = path.segments()
    if not segments:
        if fractions is not None:
            return [y.copy() for _ in fractions]
        return y

    lengths = [abs(b - a) for a, b in segments]
    total = sum(lengths)

    if fractions is None:
        for (a, b) in segments:
            delta = b - a

            def rhs(tau, Y, a=a, delta=delta):
                return delta * (matrix_at(a + tau * delta) @ Y)

            y = solve_complex_ode(rhs, y, rtol=rtol)[-1]
        return y

    fracs = [float(fr) for fr in fractions]
    for fr in fracs:
        if fr <= 0.0 or fr > 1.0 + 1e-12:
            raise ValueError("fractions must lie in (0, 1]")
    order = sorted(range(len(fracs)), key=lambda i: fracs[i])
    results: list[np.ndarray | None] = [None] * len(fracs)

    acc = 0.0
    ti = 0
    for (a, b), seg_len in zip(segments, lengths):
        delta = b - a

        def rhs(tau, Y, a=a, delta=delta):
            return delta * (matrix_at(a + tau * delta) @ Y)

        # group fraction targets landing on this segment by local tau
        stop_taus: list[float] = []
        stop_tags: list[list[int]] = []
        while ti < len(order):
            idx = order[ti]
            target = fracs[idx] * total
            if target > acc + seg_len + 1e-12 * max(total, 1.0):
                break
            tau = min(1.0, max(0.0, (target - acc) / seg_len))
            if tau <= 1e-15:
                results[idx] = y.copy()
            elif stop_taus and abs(tau - stop_taus[-1]) <= 1e-15:
                stop_tags[-1].append(idx)
            else:
                stop_taus.append(tau)
                stop_tags.append([idx])
            ti += 1

        run = list(stop_taus)
        if not run or run[-1] < 1.0 - 1e-15:
            run.append(1.0)
        states = solve_complex_ode(rhs, y, rtol=rtol, checkpoints=run)
        for taus_idx, tags in enumerate(stop_tags):
            for idx in tags:
                results[idx] = states[taus_idx]
        y = states[-1]
        acc += seg_len

    return [r.copy() for r in results]
