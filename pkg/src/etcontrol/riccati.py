"""First-crossing times of the scalar comparison ODE.

The inter-transmission analysis reduces to the scalar Riccati initial
value problem ``phi' = a0 + a1 phi + a2 phi^2`` with ``phi(0) = 0`` and
non-negative coefficients. The minimum dwell time of a sensor is the time
this solution needs to climb to its error-to-state threshold. Separation
of variables gives the crossing time as ``integral 0..w of
dphi / (a0 + a1 phi + a2 phi^2)``, evaluated here in closed form with an
explicit case split on the discriminant; a forward integrator doubles as
an independent oracle and as a fallback near the branch boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

__all__ = ["RiccatiCoefficients", "crossing_time", "crossing_time_numeric"]

# Relative discriminant size below which the closed form defers to the
# numeric integrator to avoid catastrophic cancellation.
_DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class RiccatiCoefficients:
    """Non-negative coefficients of ``phi' = a0 + a1 phi + a2 phi^2``."""

    a0: float
    a1: float
    a2: float

    def __post_init__(self):
        for name in ("a0", "a1", "a2"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and non-negative, got {value}")
            object.__setattr__(self, name, value)


def _validate_level(level):
    level = float(level)
    if not math.isfinite(level) or level < 0.0:
        raise ValueError(f"crossing level must be finite and non-negative, got {level}")
    return level


def crossing_time(level, coeffs):
    """Time for the comparison ODE solution to reach ``level`` from zero.

    Parameters
    ----------
    level : float
        Target value, finite and non-negative.
    coeffs : RiccatiCoefficients
        ODE coefficients.

    Returns
    -------
    float
        The unique t >= 0 with phi(t) = level; 0 when level is 0, and
        ``math.inf`` when the flow never leaves zero (a0 = 0).
    """
    w = _validate_level(level)
    a0, a1, a2 = coeffs.a0, coeffs.a1, coeffs.a2
    if w == 0.0:
        return 0.0
    if a0 == 0.0:
        return math.inf
    if a2 == 0.0:
        if a1 == 0.0:
            return w / a0
        return math.log1p(a1 * w / a0) / a1
    disc = a1 * a1 - 4.0 * a0 * a2
    if abs(disc) < _DEGENERATE_RTOL * max(a1 * a1, 4.0 * a0 * a2):
        # Both closed-form branches cancel badly here; integrate instead.
        return crossing_time_numeric(w, coeffs)
    if disc > 0.0:
        sd = math.sqrt(disc)
        r1 = (-a1 + sd) / (2.0 * a2)
        r2 = (-a1 - sd) / (2.0 * a2)
        return math.log(((w - r1) * r2) / ((w - r2) * r1)) / sd
    sd = math.sqrt(-disc)
    return 2.0 * (math.atan((2.0 * a2 * w + a1) / sd) - math.atan(a1 / sd)) / sd


def _rk4_trial(phi, h, a0, a1, a2):
    """One RK4 step of the comparison ODE; monotone non-decreasing in phi."""
    k1 = a0 + phi * (a1 + a2 * phi)
    p2 = phi + 0.5 * h * k1
    k2 = a0 + p2 * (a1 + a2 * p2)
    p3 = phi + 0.5 * h * k2
    k3 = a0 + p3 * (a1 + a2 * p3)
    p4 = phi + h * k3
    k4 = a0 + p4 * (a1 + a2 * p4)
    return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate_to_crossing(w, a0, a1, a2, h, horizon):
    """Fixed-step forward integration with step halving at the crossing.

    Returns the crossing time, or None when ``horizon`` is exceeded.
    """
    t, phi = 0.0, 0.0
    while True:
        trial = _rk4_trial(phi, h, a0, a1, a2)
        if trial < w:
            t += h
            phi = trial
            if t > horizon:
                return None
            continue
        if h <= 1e-12 * (t + h):
            return t + h
        h *= 0.5


def crossing_time_numeric(level, coeffs, step=None, horizon=1e7):
    """Crossing time by forward RK4 integration; oracle for crossing_time.

    Integrates ``phi' = a0 + a1 phi + a2 phi^2`` from zero with a fixed
    step, halving the step at the crossing until the bracket collapses.
    The whole integration is repeated at half the step until two
    consecutive results agree to 1e-8 relative.

    Parameters
    ----------
    level : float
        Target value, finite and non-negative.
    coeffs : RiccatiCoefficients
        ODE coefficients.
    step : float, optional
        Initial integration step; derived from the analytic bracket
        ``level / (a0 + a1 level + a2 level^2) <= t <= level / a0`` when
        omitted.
    horizon : float, optional
        Integration time beyond which the search is abandoned and
        ``math.inf`` returned with a warning.

    Returns
    -------
    float
        Crossing time, or ``math.inf`` when unreachable.
    """
    w = _validate_level(level)
    a0, a1, a2 = coeffs.a0, coeffs.a1, coeffs.a2
    if w == 0.0:
        return 0.0
    if a0 == 0.0:
        # phi stays identically zero; no finite horizon helps.
        return math.inf
    if step is not None:
        step = float(step)
        if not step > 0.0:
            raise ValueError(f"step must be positive, got {step}")
        h = step
    else:
        h = 0.25 * w / (a0 + w * (a1 + a2 * w))
    # Coarse pass: exponential step growth brackets the crossing cheaply.
    t, phi = 0.0, 0.0
    hc = h
    while True:
        trial = _rk4_trial(phi, hc, a0, a1, a2)
        if trial >= w:
            coarse = t + hc
            break
        t += hc
        phi = trial
        hc *= 2.0
        if t > horizon:
            warnings.warn(
                f"comparison ODE did not reach level {w} within horizon {horizon}",
                RuntimeWarning,
                stacklevel=2,
            )
            return math.inf
    # Fine passes at h and h/2 until mutually converged.
    h = min(h, coarse / 400.0)
    previous = _integrate_to_crossing(w, a0, a1, a2, h, horizon)
    for _ in range(8):
        h *= 0.5
        current = _integrate_to_crossing(w, a0, a1, a2, h, horizon)
        if previous is not None and current is not None:
            if abs(previous - current) <= 1e-8 * current:
                return current
        previous = current
    if current is None:
        warnings.warn(
            f"comparison ODE did not reach level {w} within horizon {horizon}",
            RuntimeWarning,
            stacklevel=2,
        )
        return math.inf
    return current
