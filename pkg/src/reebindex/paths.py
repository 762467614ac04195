"""Time-parametrized symplectic matrices and Lagrangian frames.

Paths are evaluators, not sample arrays: the crossing detector bisects to
a 1e-10 time tolerance, so values are needed at arbitrary t.  ODE-defined
paths keep a uniform node cache and re-integrate locally for off-node
times.
"""

import numpy as np

from . import linalg
from .errors import PreconditionViolated, ShapeMismatch, SymmetryViolated
from .integrate import NodeCachedFlow
from .linalg import J2, LagrangianFrame, graph4, involution, std


class SymplecticPath:
    """Psi : [0, T] -> Sp(R^{2n}) with Psi(0) = 1.

    ``symmetry_flag`` asserts Psi(-t) = I Psi(t) I for the conjugation I;
    negative times and times beyond T are reached through the cocycle rule
    Psi(t + T) = Psi(t) Psi(T).
    """

    def __init__(self, dim, T, eval_fn, symmetry_flag=False, scan_hint=None,
                 coeff_loop=None):
        self.dim = int(dim)
        self.T = float(T)
        if self.T <= 0:
            raise PreconditionViolated("final time must be positive")
        self._eval = eval_fn
        self.symmetry_flag = bool(symmetry_flag)
        self.scan_hint = scan_hint
        self.coeff_loop = coeff_loop
        self._monodromy = None
        self._monodromy_inv = None

    # -- evaluation ------------------------------------------------------

    def eval(self, t):
        return self._eval(float(t))

    def eval_many(self, ts):
        return np.array([self._eval(float(t)) for t in ts])

    def monodromy(self):
        if self._monodromy is None:
            self._monodromy = self.eval(self.T)
        return self._monodromy

    def eval_extended(self, t):
        """Evaluate at any real time via the cocycle extension."""
        t = float(t)
        if 0.0 <= t <= self.T:
            return self.eval(t)
        M = self.monodromy()
        if t > self.T:
            k, r = divmod(t, self.T)
            return self.eval(r) @ np.linalg.matrix_power(M, int(k))
        if self._monodromy_inv is None:
            self._monodromy_inv = np.linalg.inv(M)
        k, r = divmod(-t, self.T)
        base = self.eval(self.T - r) if r > 0 else np.eye(self.dim)
        extra = int(k) + (1 if r > 0 else 0)
        return base @ np.linalg.matrix_power(self._monodromy_inv, extra)

    # -- constructions -----------------------------------------------------

    @staticmethod
    def rotation(c, T=1.0):
        """e^{c J0 t}: rotation by angle c*t.  I-symmetric."""
        c = float(c)

        def ev(t):
            a = c * t
            ca, sa = np.cos(a), np.sin(a)
            return np.array([[ca, -sa], [sa, ca]])

        return SymplecticPath(2, T, ev, symmetry_flag=True)

    @staticmethod
    def hyperbolic(a, T=1.0):
        """diag(e^{at}, e^{-at}).  Not I-symmetric."""
        a = float(a)

        def ev(t):
            return np.array([[np.exp(a * t), 0.0], [0.0, np.exp(-a * t)]])

        return SymplecticPath(2, T, ev, symmetry_flag=False)

    @staticmethod
    def from_matrix_function(fn, T, dim=2, symmetry_flag=False):
        return SymplecticPath(dim, T, lambda t: np.asarray(fn(t), dtype=float),
                              symmetry_flag=symmetry_flag)

    @staticmethod
    def from_coefficient_loop(loop, n_nodes=2048, rtol=1e-10, atol=1e-12):
        """Solve Psi' = J0 S(t) Psi, Psi(0) = 1 for a symmetric-matrix loop.

        ``loop`` needs .T, .eval(t) -> 2x2 symmetric, and (optionally)
        .symmetry_flag.  The solution is node-cached over one period.
        """

        def fun(t, Y):
            return J2 @ (loop.eval(t) @ Y)

        flow = NodeCachedFlow(fun, np.eye(2), loop.T, n_nodes=n_nodes,
                              rtol=rtol, atol=atol)
        sym = bool(getattr(loop, "symmetry_flag", False))
        return SymplecticPath(2, loop.T, flow, symmetry_flag=sym,
                              scan_hint=n_nodes, coeff_loop=loop)

    def iterated(self, m):
        """The path on [0, mT] obtained from the cocycle rule."""
        if m < 1:
            raise PreconditionViolated("iteration count must be >= 1")
        return SymplecticPath(self.dim, m * self.T, self.eval_extended,
                              symmetry_flag=self.symmetry_flag,
                              scan_hint=self.scan_hint,
                              coeff_loop=self.coeff_loop)

    def restricted(self, T_new):
        """The same path on the shorter interval [0, T_new]."""
        if not 0.0 < T_new <= self.T + 1e-12:
            raise PreconditionViolated("restriction must stay inside [0, T]")
        return SymplecticPath(self.dim, T_new, self._eval,
                              symmetry_flag=self.symmetry_flag,
                              scan_hint=self.scan_hint,
                              coeff_loop=self.coeff_loop)

    def lagrangian_image(self, frame):
        """t -> Psi(t) F as a Lagrangian path."""
        if frame.dim != self.dim:
            raise ShapeMismatch("frame dimension %d != path dimension %d"
                                % (frame.dim, self.dim))
        cols = frame.columns

        def fr(t):
            return self.eval(t) @ cols

        return LagrangianPath(self.dim, self.T, fr, space=frame.space,
                              scan_hint=self.scan_hint)

    # -- validation --------------------------------------------------------

    def check_invariants(self, n_probes=64, sympl_tol=1e-9, sym_tol=1e-8):
        """Start at 1, stay symplectic, and (if flagged) satisfy the
        conjugation symmetry on a probe grid."""
        space = std(self.dim)
        if np.max(np.abs(self.eval(0.0) - np.eye(self.dim))) > sympl_tol:
            raise PreconditionViolated("path does not start at the identity")
        ts = np.linspace(0.0, self.T, n_probes)
        worst = 0.0
        for t in ts:
            worst = max(worst, linalg.symplectic_residual(self.eval(t), space))
        if worst > sympl_tol:
            raise SymmetryViolated("symplectic residual %.3e on probes" % worst)
        if self.symmetry_flag:
            I = involution(self.dim)
            worst = 0.0
            for t in ts[1:]:
                r = np.max(np.abs(self.eval_extended(-t) - I @ self.eval(t) @ I))
                worst = max(worst, float(r))
            if worst > sym_tol:
                raise SymmetryViolated(
                    "conjugation symmetry residual %.3e on probes" % worst)
        return worst


class LagrangianPath:
    """Lambda : [0, T] -> Lag(R^{2n}), presented by a frame-valued evaluator."""

    def __init__(self, dim, T, frame_fn, space=None, scan_hint=None):
        self.dim = int(dim)
        self.T = float(T)
        if self.T <= 0:
            raise PreconditionViolated("final time must be positive")
        self._frame = frame_fn
        self.space = space if space is not None else std(dim)
        self.scan_hint = scan_hint

    def eval(self, t):
        """Frame columns at time t, shape (2n, n)."""
        cols = np.asarray(self._frame(float(t)), dtype=float)
        if cols.ndim == 1:
            cols = cols[:, None]
        return cols

    def frame(self, t):
        return LagrangianFrame(self.eval(t), self.space, check=False)

    # -- constructions -----------------------------------------------------

    @staticmethod
    def rotation_line(T, rate=1.0, start_angle=0.0):
        """The line e^{(start + rate t) J0} R in R^2."""

        def fr(t):
            a = start_angle + rate * t
            return np.array([np.cos(a), np.sin(a)])

        return LagrangianPath(2, T, fr)

    @staticmethod
    def graph_of(psi):
        """The anti-graph path {(x, -Psi(t) x)} in the product space."""
        if psi.dim != 2:
            raise ShapeMismatch("graphs are built from Sp(R^2) paths")

        def fr(t):
            cols = np.zeros((4, 2))
            cols[:2] = np.eye(2)
            cols[2:] = -psi.eval(t)
            return cols

        return LagrangianPath(4, psi.T, fr, space=graph4(),
                              scan_hint=psi.scan_hint)

    def reversed(self):
        T = self.T
        return LagrangianPath(self.dim, T, lambda t: self._frame(T - t),
                              space=self.space, scan_hint=self.scan_hint)

    def reparametrized(self, phi, T_new):
        """Precompose with a monotone time change phi : [0, T_new] -> [0, T]."""
        return LagrangianPath(self.dim, T_new,
                              lambda t: self._frame(phi(t)),
                              space=self.space, scan_hint=self.scan_hint)

    def concatenated(self, other, tol=1e-9):
        """other # self: run self on [0, T1], then other on [T1, T1+T2]."""
        if self.dim != other.dim:
            raise ShapeMismatch("cannot concatenate paths of different dims")
        F1 = LagrangianFrame(self.eval(self.T), self.space, check=False)
        F2 = LagrangianFrame(other.eval(0.0), other.space, check=False)
        if linalg.lagrangian_intersection_dim(F1, F2) < self.dim // 2:
            raise PreconditionViolated("paths do not match at the junction")
        T1 = self.T

        def fr(t):
            if t <= T1:
                return self._frame(t)
            return other._frame(t - T1)

        return LagrangianPath(self.dim, T1 + other.T, fr, space=self.space)

    def check_invariants(self, n_probes=32, tol=1e-9):
        for t in np.linspace(0.0, self.T, n_probes):
            LagrangianFrame(self.eval(t), self.space, check=True, tol=tol)


def path_from_spec(spec):
    """Build a symplectic path from a declarative description.

    Supported kinds: ``rotation`` (c, T), ``hyperbolic`` (a, T), ``ode``
    (a coefficient-loop spec under "loop"), ``sampled`` (ts, matrices,
    cubic interpolation in between).
    """
    kind = spec.get("kind")
    if kind == "rotation":
        return SymplecticPath.rotation(float(spec["c"]), float(spec.get("T", 1.0)))
    if kind == "hyperbolic":
        return SymplecticPath.hyperbolic(float(spec["a"]), float(spec.get("T", 1.0)))
    if kind == "ode":
        from .spectral import loop_from_spec

        loop = loop_from_spec(spec["loop"])
        return SymplecticPath.from_coefficient_loop(loop)
    if kind == "sampled":
        from scipy.interpolate import CubicSpline

        ts = np.asarray(spec["ts"], dtype=float)
        mats = np.asarray(spec["matrices"], dtype=float)
        if ts.ndim != 1 or mats.shape != (len(ts), 2, 2):
            raise ShapeMismatch("sampled path needs ts (m,) and matrices (m,2,2)")
        spline = CubicSpline(ts, mats, axis=0)
        return SymplecticPath(2, float(ts[-1]), lambda t: spline(t),
                              symmetry_flag=bool(spec.get("symmetric", False)))
    raise PreconditionViolated("unknown path kind %r" % (kind,))
