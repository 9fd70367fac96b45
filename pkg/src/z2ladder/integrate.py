"""Adaptive embedded Runge-Kutta integration for linear superoperator ODEs.

Dormand-Prince 5(4) pair with FSAL and standard error-per-step control.
The states here are vectorized density matrices (complex, dimension L^2),
small enough that a dense explicit scheme with tight tolerances is both
robust and cheap. A hand-rolled stepper keeps the per-interval overhead
negligible, which matters for stroboscopic runs with ~1e4 Hamiltonian
switches per history.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, ParameterError

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b - b_hat: weights of the embedded 4th-order error estimate
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
MAX_STEPS = 1_000_000


def _initial_step(f, t0, y0, f0, rtol, atol):
    """Hairer-Norsett-Wanner style h0 heuristic, trimmed to this use case."""
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


class AdaptiveStepper:
    """Integrates y' = f(t, y) with dense stopping at arbitrary targets.

    The instance keeps (t, y, last step size, FSAL stage) between calls to
    :meth:`advance`, so a piecewise-defined right-hand side can be swapped
    via :meth:`set_rhs` at event times without losing step-size history.
    """

    def __init__(self, f, t0, y0, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                 max_steps=MAX_STEPS):
        if rtol <= 0 or atol <= 0:
            raise ParameterError("tolerances must be positive")
        self.f = f
        self.t = float(t0)
        self.y = np.asarray(y0, dtype=complex).copy()
        self.rtol = rtol
        self.atol = atol
        self.max_steps = max_steps
        self.n_steps = 0
        self.n_rejected = 0
        self.h = None
        self._f_now = f(self.t, self.y)

    def set_rhs(self, f):
        """Switch the right-hand side (e.g. after a Hamiltonian update)."""
        self.f = f
        self._f_now = f(self.t, self.y)

    def refresh(self):
        """Re-evaluate the cached stage after in-place changes to rhs data."""
        self._f_now = self.f(self.t, self.y)

    def advance(self, t_end: float) -> np.ndarray:
        """Integrate to exactly ``t_end`` and return the state there."""
        if t_end < self.t:
            raise ParameterError(f"cannot integrate backwards: {t_end} < {self.t}")
        f, y, t = self.f, self.y, self.t
        k = np.empty((7,) + y.shape, dtype=complex)
        k[0] = self._f_now
        if self.h is None:
            self.h = _initial_step(f, t, y, k[0], self.rtol, self.atol)
        h = self.h
        while t < t_end:
            if self.n_steps + self.n_rejected > self.max_steps:
                raise NumericalError(
                    "step budget exhausted before reaching target time",
                    diagnostics={"t": t, "t_end": t_end, "h": h,
                                 "steps": self.n_steps, "rejected": self.n_rejected})
            remaining = t_end - t
            trunc = h >= remaining  # this step lands exactly on the target
            h = min(h, remaining)
            if t + h <= t:
                raise NumericalError(
                    "step size underflow",
                    diagnostics={"t": t, "h": h, "steps": self.n_steps})
            for i in range(1, 7):
                yi = y + h * (k[:i].T @ _A[i])
                k[i] = f(t + _C[i] * h, yi)
            y_new = y + h * (k.T @ _B)
            err = h * (k.T @ _E)
            scale = self.atol + self.rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = np.sqrt(np.mean(np.abs(err / scale) ** 2))
            if err_norm <= 1.0:
                t = t_end if trunc else t + h
                y = y_new
                k[0] = k[6]  # FSAL
                self.n_steps += 1
                factor = _MAX_FACTOR if err_norm == 0.0 else min(
                    _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2))
                # remember the uncapped step for the next interval
                if not trunc or factor * h > self.h:
                    self.h = factor * h
                h = self.h
            else:
                self.n_rejected += 1
                h *= max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
        self.t = t
        self.y = y
        self._f_now = k[0]
        return y.copy()


def solve_at_times(f, y0, times, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Integrate from t=0 and return the state at each requested time.

    ``times`` must be ascending and non-negative; t=0 snapshots return the
    initial state unchanged.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ParameterError("need at least one output time")
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ParameterError("times must be ascending and non-negative")
    stepper = AdaptiveStepper(f, 0.0, y0, rtol=rtol, atol=atol)
    out = np.empty((len(times),) + np.shape(y0), dtype=complex)
    for i, t in enumerate(times):
        out[i] = stepper.advance(t) if t > stepper.t else stepper.y
    return out
