"""Embedded Dormand-Prince 5(4) driver.

One integrator serves the whole package: the eigenvalue shooting batches
hundreds of 2x2 fundamental solutions through it simultaneously (the state
may be any ndarray; the error norm is taken over all entries), the surface
flows attach a post-step projection hook, and the winding computations cap
the step so the tracked argument never advances more than a quarter turn
per step.

Default tolerances are rtol 1e-10 / atol 1e-12 throughout the package.
"""

import numpy as np

from .errors import IntegratorFailure

# Dormand-Prince coefficients (FSAL: the 7th stage is f at the new point).
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
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_ERR = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.max(np.abs(err) / scale))


def _initial_step(fun, t0, y0, f0, direction, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.max(np.abs(y0) / scale))
    d1 = float(np.max(np.abs(f0) / scale))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = fun(t0 + h0 * direction, y1)
    d2 = float(np.max(np.abs(f1 - f0) / scale)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate(fun, t0, t1, y0, rtol=1e-10, atol=1e-12, max_step=np.inf,
              post_step=None, on_step=None, record=False):
    """Integrate y' = fun(t, y) from t0 to t1 (either direction).

    Parameters
    ----------
    fun : callable(t, y) -> dy/dt, with y any ndarray
    post_step : optional callable(t, y) -> y applied after each accepted
        step (e.g. projection back onto a constraint manifold)
    on_step : optional callable(t_prev, y_prev, t, y); called after each
        accepted (and post-processed) step
    record : when True, also return the arrays of accepted times/states

    Returns
    -------
    y_end  (or (y_end, ts, ys) when record=True)
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    t1 = float(t1)
    span = abs(t1 - t0)
    if span == 0.0:
        if record:
            return y, np.array([t0]), y[None].copy()
        return y
    direction = 1.0 if t1 > t0 else -1.0

    f = fun(t, y)
    h = min(_initial_step(fun, t, y, f, direction, rtol, atol, span), max_step)
    ts = [t]
    ys = [y.copy()]
    n_reject = 0

    while direction * (t1 - t) > 0.0:
        h = min(h, abs(t1 - t), max_step)
        if h < 1e-14 * max(span, 1.0):
            raise IntegratorFailure("step size underflow at t=%.6g" % t)

        k = [f]
        for i in range(1, 7):
            dy = h * direction * sum(a * ki for a, ki in zip(_A[i], k))
            k.append(fun(t + _C[i] * h * direction, y + dy))
        y_new = y + h * direction * sum(b * ki for b, ki in zip(_B5, k) if b != 0.0)
        err = h * sum(e * ki for e, ki in zip(_ERR, k) if e != 0.0)
        enorm = _error_norm(err, y, y_new, rtol, atol)

        if enorm <= 1.0:
            t_prev, y_prev = t, y
            t = t1 if abs(t1 - (t + h * direction)) < 1e-15 * span else t + h * direction
            y = y_new
            if post_step is not None:
                y = post_step(t, y)
                f = fun(t, y)
            else:
                f = k[6]  # FSAL
            if on_step is not None:
                on_step(t_prev, y_prev, t, y)
            if record:
                ts.append(t)
                ys.append(y.copy())
            factor = _MAX_FACTOR if enorm == 0.0 else min(
                _MAX_FACTOR, _SAFETY * enorm ** -0.2)
            h *= max(1.0, factor) if n_reject == 0 else 1.0
            n_reject = 0
        else:
            n_reject += 1
            h *= max(_MIN_FACTOR, _SAFETY * enorm ** -0.2)
            if n_reject > 60:
                raise IntegratorFailure("step control failed at t=%.6g" % t)

    if record:
        return y, np.array(ts), np.array(ys)
    return y


def integrate_nodes(fun, t0, y0, nodes, rtol=1e-10, atol=1e-12,
                    max_step=np.inf, post_step=None):
    """Integrate through a sorted sequence of readout times.

    Returns an array of states, one per node (t0 must equal nodes[0]).
    """
    nodes = np.asarray(nodes, dtype=float)
    if abs(nodes[0] - t0) > 1e-14 * max(1.0, abs(t0)):
        raise ValueError("nodes must start at t0")
    y = np.array(y0, dtype=float)
    out = np.empty((len(nodes),) + y.shape)
    out[0] = y
    for i in range(1, len(nodes)):
        y = integrate(fun, nodes[i - 1], nodes[i], y, rtol=rtol, atol=atol,
                      max_step=max_step, post_step=post_step)
        out[i] = y
    return out


class NodeCachedFlow:
    """Dense-in-time access to an ODE solution via cached nodes.

    The solution is stored on a uniform node grid; an evaluation at an
    arbitrary time re-integrates from the nearest node at or before it
    (after, for negative times), so accuracy is that of the integrator
    rather than of an interpolant.
    """

    def __init__(self, fun, y0, t_end, n_nodes=1024, rtol=1e-10, atol=1e-12,
                 post_step=None):
        self.fun = fun
        self.rtol = rtol
        self.atol = atol
        self.post_step = post_step
        self.t_end = float(t_end)
        self.nodes = np.linspace(0.0, t_end, n_nodes + 1)
        self.values = integrate_nodes(fun, 0.0, y0, self.nodes, rtol=rtol,
                                      atol=atol, post_step=post_step)

    def __call__(self, t):
        t = float(t)
        h = self.nodes[1] - self.nodes[0]
        idx = int(np.clip(np.floor(t / h), 0, len(self.nodes) - 1))
        t_node = self.nodes[idx]
        if t < 0.0:
            idx, t_node = 0, 0.0
        if abs(t - t_node) < 1e-14 * max(1.0, abs(self.t_end)):
            return self.values[idx].copy()
        return integrate(self.fun, t_node, t, self.values[idx], rtol=self.rtol,
                         atol=self.atol, post_step=self.post_step)

    def at_nodes(self):
        return self.nodes, self.values
