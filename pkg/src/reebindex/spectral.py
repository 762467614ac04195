"""Spectra and winding numbers of the first-order operators -J0 d/dt - S(t).

Eigenvalues are found by shooting: the fundamental solution of

    gamma' = J0 (S(t) + lambda) gamma

is integrated over one period (periodic problem) or half period (axis
boundary problems), and eigenvalues are the roots of

    periodic:   g(lambda)  = tr Phi_lambda(T) - 2
    real axis:  g(lambda)  = second component of Phi_lambda(T/2) e1
    imag axis:  g(lambda)  = first  component of Phi_lambda(T/2) e2

(in Sp(R^2), det(M - 1) = 2 - tr M, so the periodic condition is a trace
condition).  The integration is batched over a whole window of lambda
values at once.  Winding numbers of eigenfunctions are accumulated per
integration step, each step small enough that the argument advances less
than a quarter turn, so no principal-value aliasing can occur.

Boundary conditions: eigenfunctions of the "+" problem start and end on
the real axis, those of the "-" problem on the imaginary axis.
"""

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (DegenerateSpectrum, IntegratorFailure, KernelNonTrivial,
                     NonSymplecticDrift, PreconditionViolated,
                     SymmetryViolated, WindowTooCoarse, ZeroEigenfunction)
from .halfint import HalfInt
from .integrate import integrate
from .linalg import I2, J2, LagrangianFrame, lagrangian_intersection_dim
from .paths import LagrangianPath, SymplecticPath

RTOL = 1e-10
ATOL = 1e-12
ROOT_TOL = 1e-10
CELLS_PER_SPACING = 512
DOUBLE_ROOT_NORM = 1e-6
MERGE_TOL = 1e-6  # pairs closer than this are one geometric double
ZERO_EIG_GUARD = 1e-8

PROBLEMS = ("periodic", "bc_I", "bc_minus_I")


# ---------------------------------------------------------------------------
# coefficient paths
# ---------------------------------------------------------------------------

class SymmetricLoop:
    """A T-periodic loop of symmetric 2x2 matrices.

    ``symmetry_flag`` asserts S(-t) = I S(t) I, i.e. even diagonal and odd
    off-diagonal entries.
    """

    def __init__(self, T, eval_fn, symmetry_flag=False, sup_bound=None):
        self.T = float(T)
        self._eval = eval_fn
        self.symmetry_flag = bool(symmetry_flag)
        self._sup = sup_bound

    def eval(self, t):
        return self._eval(float(t))

    def sup_norm(self, n_probes=64):
        """Estimated sup of the spectral norm over one period."""
        if self._sup is None:
            ts = np.linspace(0.0, self.T, n_probes, endpoint=False)
            self._sup = max(
                float(np.linalg.norm(self.eval(t), 2)) for t in ts)
        return self._sup

    def check_invariants(self, n_probes=32, per_tol=1e-10, sym_tol=1e-8):
        ts = np.linspace(0.0, self.T, n_probes, endpoint=False)
        for t in ts:
            S = self.eval(t)
            if np.max(np.abs(S - S.T)) > 1e-12:
                raise SymmetryViolated("coefficient matrix is not symmetric")
            if np.max(np.abs(self.eval(t + self.T) - S)) > per_tol:
                raise SymmetryViolated("coefficient loop is not periodic")
            if self.symmetry_flag:
                if np.max(np.abs(self.eval(-t) - I2 @ S @ I2)) > sym_tol:
                    raise SymmetryViolated(
                        "conjugation symmetry fails at t=%.6g" % t)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def constant(c, T=1.0):
        """c * identity (scalar c) or a fixed symmetric matrix."""
        M = np.asarray(c, dtype=float)
        if M.ndim == 0:
            M = float(M) * np.eye(2)
        M = 0.5 * (M + M.T)
        sym = abs(M[0, 1]) < 1e-14
        return SymmetricLoop(T, lambda t: M.copy(), symmetry_flag=sym,
                             sup_bound=float(np.linalg.norm(M, 2)))

    @staticmethod
    def trig(T, diag_cos, off_sin, diag_sin=None, off_cos=None):
        """Trigonometric polynomial loop.

        diag_cos = (a_j, c_j): cosine coefficients of the two diagonal
        entries, j = 0..deg; off_sin = b_j, j = 1..deg: sine coefficients
        of the off-diagonal entry.  With only these terms the loop has
        the exact conjugation symmetry.  diag_sin / off_cos break it.
        """
        a = np.asarray(diag_cos[0], dtype=float)
        c = np.asarray(diag_cos[1], dtype=float)
        b = np.asarray(off_sin, dtype=float)
        a_s = None if diag_sin is None else np.asarray(diag_sin[0], float)
        c_s = None if diag_sin is None else np.asarray(diag_sin[1], float)
        b_c = None if off_cos is None else np.asarray(off_cos, float)
        w = 2.0 * np.pi / T

        def ev(t):
            ja = np.arange(len(a))
            cos_a = np.cos(w * ja * t)
            jb = np.arange(1, len(b) + 1)
            sin_b = np.sin(w * jb * t)
            s11 = float(a @ cos_a)
            s22 = float(c @ np.cos(w * np.arange(len(c)) * t))
            s12 = float(b @ sin_b)
            if a_s is not None:
                js = np.arange(1, len(a_s) + 1)
                s11 += float(a_s @ np.sin(w * js * t))
                s22 += float(c_s @ np.sin(w * np.arange(1, len(c_s) + 1) * t))
            if b_c is not None:
                s12 += float(b_c @ np.cos(w * np.arange(len(b_c)) * t))
            return np.array([[s11, s12], [s12, s22]])

        sym = diag_sin is None and off_cos is None
        return SymmetricLoop(T, ev, symmetry_flag=sym)

    @staticmethod
    def from_samples(T, samples, symmetrize=False):
        """Trigonometric interpolation of uniform samples over [0, T).

        samples has shape (m, 2, 2).  With symmetrize=True the loop is
        projected onto the conjugation-symmetric class (even diagonal,
        odd off-diagonal); the size of the removed part is returned as
        the second element.
        """
        samples = np.asarray(samples, dtype=float)
        m = samples.shape[0]
        coef = np.fft.rfft(samples, axis=0) / m
        removed = 0.0
        if symmetrize:
            orig = coef.copy()
            coef[:, 0, 0] = coef[:, 0, 0].real
            coef[:, 1, 1] = coef[:, 1, 1].real
            coef[:, 0, 1] = 1j * coef[:, 0, 1].imag
            coef[:, 1, 0] = 1j * coef[:, 1, 0].imag
            removed = float(np.max(np.abs(coef - orig)))
        k = np.arange(coef.shape[0])
        # rfft halves: double the interior modes for the real series
        weights = np.where((k == 0) | ((m % 2 == 0) & (k == m // 2)), 1.0, 2.0)
        w = 2.0 * np.pi / T

        def ev(t):
            phase = np.exp(1j * w * k * t) * weights
            S = np.real(np.tensordot(phase, coef, axes=(0, 0)))
            return 0.5 * (S + S.T)

        loop = SymmetricLoop(T, ev, symmetry_flag=symmetrize)
        if symmetrize:
            return loop, removed
        return loop

    def restrict_half(self):
        return BoundarySymmetricPath(0.5 * self.T, self._eval)


class BoundarySymmetricPath:
    """Symmetric coefficients on [0, T/2] with diagonal endpoint values."""

    def __init__(self, half_T, eval_fn, check=True, end_tol=1e-10):
        self.half_T = float(half_T)
        self._eval = eval_fn
        if check:
            for t in (0.0, self.half_T):
                D = self.eval(t)
                if abs(D[0, 1]) > end_tol or abs(D[1, 0]) > end_tol:
                    raise SymmetryViolated(
                        "endpoint coefficient at t=%.6g is not diagonal "
                        "(off-diagonal %.3e)" % (t, abs(D[0, 1])))

    def eval(self, t):
        D = self._eval(float(t))
        return 0.5 * (D + D.T)

    @property
    def T(self):
        """Full period of the underlying loop (= 2 * half_T)."""
        return 2.0 * self.half_T

    def sup_norm(self, n_probes=64):
        ts = np.linspace(0.0, self.half_T, n_probes)
        return max(float(np.linalg.norm(self.eval(t), 2)) for t in ts)

    @staticmethod
    def constant(c, T=1.0):
        M = np.asarray(c, dtype=float)
        if M.ndim == 0:
            M = float(M) * np.eye(2)
        return BoundarySymmetricPath(0.5 * T, lambda t: M.copy())

    @staticmethod
    def from_loop(loop):
        return BoundarySymmetricPath(0.5 * loop.T, loop.eval)

    def extended_loop(self):
        """The T-periodic conjugation-symmetric extension."""
        L = self.half_T

        def ev(t):
            r = t % (2.0 * L)
            if r <= L:
                return self._eval(r)
            return I2 @ self._eval(2.0 * L - r) @ I2

        return SymmetricLoop(2.0 * L, ev, symmetry_flag=True)

    def iterate(self, m, junction_tol=1e-8):
        """Coefficients of the m-fold iterated chord on [0, m*T/2].

        Alternates this path with its conjugated time reversal on
        successive half-period blocks.
        """
        if m < 1:
            raise PreconditionViolated("iteration count must be >= 1")
        for t in (0.0, self.half_T):
            D = self._eval(t)
            if abs(D[0, 1]) > junction_tol:
                raise SymmetryViolated(
                    "reflected blocks mismatch at junctions: off-diagonal "
                    "%.3e at t=%.6g" % (abs(D[0, 1]), t))
        ext = self.extended_loop()
        return BoundarySymmetricPath(m * self.half_T, ext.eval, check=False)


def iterate_chord_data(D, m):
    """Module-level alias for BoundarySymmetricPath.iterate."""
    return D.iterate(m)


def random_symmetric_loop(rng, T=1.0, degree=3, amp=2.0):
    """Conjugation-symmetric trigonometric loop with uniform coefficients."""
    a = rng.uniform(-amp, amp, size=degree + 1)
    c = rng.uniform(-amp, amp, size=degree + 1)
    b = rng.uniform(-amp, amp, size=degree)
    return SymmetricLoop.trig(T, (a, c), b)


def loop_from_spec(spec):
    """Coefficient loop from a declarative description (constant | trig |
    samples)."""
    kind = spec.get("kind")
    if kind == "constant":
        if "matrix" in spec:
            return SymmetricLoop.constant(np.asarray(spec["matrix"], float),
                                          float(spec.get("T", 1.0)))
        return SymmetricLoop.constant(float(spec["c"]), float(spec.get("T", 1.0)))
    if kind == "trig":
        return SymmetricLoop.trig(
            float(spec.get("T", 1.0)),
            (spec["diag_cos"][0], spec["diag_cos"][1]),
            spec.get("off_sin", []),
            diag_sin=spec.get("diag_sin"),
            off_cos=spec.get("off_cos"))
    if kind == "samples":
        return SymmetricLoop.from_samples(
            float(spec.get("T", 1.0)), np.asarray(spec["samples"], float),
            symmetrize=bool(spec.get("symmetrize", False)))
    raise PreconditionViolated("unknown loop kind %r" % (kind,))


# ---------------------------------------------------------------------------
# shooting
# ---------------------------------------------------------------------------

def _end_matrices(coeff, lams, t_end, rtol=RTOL, atol=ATOL):
    """Phi_lambda(t_end) for a whole batch of lambda values.

    All batch members share one adaptive step sequence, which also makes
    the computed monodromy a smooth function of lambda.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    lam_col = lams[:, None, None]

    def fun(t, Y):
        S = coeff.eval(t)
        SY = S @ Y + lam_col * Y          # (S + lam) Y
        return np.stack([-SY[..., 1, :], SY[..., 0, :]], axis=-2)  # J0 @ .

    Y0 = np.broadcast_to(np.eye(2), (len(lams), 2, 2)).copy()
    return integrate(fun, 0.0, t_end, Y0, rtol=rtol, atol=atol)


def fundamental_solution(coeff, lam, t_end=None, rtol=RTOL, atol=ATOL,
                         n_nodes=512, drift_tol=1e-8):
    """The matrix solution Phi_lambda with Phi(0) = 1, as a symplectic path.

    Symplecticity along the way is monitored as an integrator health
    check.
    """
    if t_end is None:
        t_end = coeff.T if hasattr(coeff, "T") else coeff.half_T
    if not 0.0 < t_end:
        raise PreconditionViolated("t_end must be positive")
    lam = float(lam)

    def fun(t, Y):
        return J2 @ ((coeff.eval(t) + lam * np.eye(2)) @ Y)

    from .integrate import NodeCachedFlow

    flow = NodeCachedFlow(fun, np.eye(2), t_end, n_nodes=n_nodes,
                          rtol=rtol, atol=atol)
    path = SymplecticPath(2, t_end, flow, scan_hint=n_nodes)
    worst = 0.0
    from .linalg import symplectic_residual

    for idx in range(0, n_nodes + 1, max(1, n_nodes // 16)):
        worst = max(worst, symplectic_residual(flow.values[idx]))
    if worst > drift_tol:
        raise NonSymplecticDrift(
            "fundamental solution drifted off Sp(R^2): residual %.3e" % worst)
    return path


def _root_values(problem, mats):
    if problem == "periodic":
        return np.trace(mats, axis1=-2, axis2=-1) - 2.0
    if problem == "bc_I":
        return mats[..., 1, 0]
    if problem == "bc_minus_I":
        return mats[..., 0, 1]
    raise PreconditionViolated("unknown problem %r" % (problem,))


class _MonodromyProxy:
    """Chebyshev interpolant of lambda -> Phi_lambda(L) over a window.

    The monodromy entries are entire in lambda with effective bandwidth
    L (the problem length), so a modest-degree interpolant built from one
    batched integration reproduces them to near machine precision; all
    scanning and bracketing then run on the interpolant.  The tail of the
    coefficient sequence is checked and the degree doubled until it is
    negligible.
    """

    def __init__(self, coeff, problem, window, rtol=RTOL, atol=ATOL):
        from numpy.polynomial import chebyshev as C

        self.window = (float(window[0]), float(window[1]))
        self.problem = problem
        a, b = self.window
        L = _problem_length(coeff, problem)
        half = 0.5 * (b - a)
        n = int(1.4 * half * L) + 48
        for _ in range(4):
            x = np.cos(np.pi * np.arange(n + 1) / n)  # extrema nodes
            lams = 0.5 * (a + b) + half * x
            mats = _end_matrices(coeff, lams, L, rtol, atol)
            scale = max(1.0, float(np.max(np.abs(mats))))
            self.coef = np.empty((n + 1, 2, 2))
            ok = True
            for i in range(2):
                for j in range(2):
                    cf = C.chebfit(x, mats[:, i, j], n)
                    self.coef[:, i, j] = cf
                    tail = np.max(np.abs(cf[-4:]))
                    ok = ok and tail <= 1e-11 * scale
            if ok:
                break
            n *= 2
        else:
            raise WindowTooCoarse("monodromy interpolation did not converge")
        self._mid = 0.5 * (a + b)
        self._half = half

    def mats(self, lams):
        from numpy.polynomial import chebyshev as C

        x = (np.asarray(lams, dtype=float) - self._mid) / self._half
        out = np.empty(np.shape(x) + (2, 2))
        for i in range(2):
            for j in range(2):
                out[..., i, j] = C.chebval(x, self.coef[:, i, j])
        return out

    def g(self, lams):
        return _root_values(self.problem, self.mats(lams))

    def g_scalar(self, lam):
        return float(self.g(np.array([lam]))[0])

    def dg(self, lams):
        from numpy.polynomial import chebyshev as C

        x = (np.asarray(lams, dtype=float) - self._mid) / self._half
        out = np.zeros(np.shape(x))
        if self.problem == "periodic":
            pairs = [(0, 0), (1, 1)]
        elif self.problem == "bc_I":
            pairs = [(1, 0)]
        else:
            pairs = [(0, 1)]
        for i, j in pairs:
            d = C.chebder(self.coef[:, i, j])
            out = out + C.chebval(x, d) / self._half
        return out

    def mat_gap(self, lam):
        return float(np.linalg.norm(self.mats(np.array([lam]))[0] - np.eye(2)))


def _problem_length(coeff, problem):
    if problem == "periodic":
        return coeff.T
    return coeff.half_T


def _g_batch(coeff, problem, lams, rtol=RTOL, atol=ATOL):
    mats = _end_matrices(coeff, lams, _problem_length(coeff, problem),
                         rtol, atol)
    return _root_values(problem, mats), mats


def eigenvalues_in(coeff, window, problem, cells=None, rtol=RTOL, atol=ATOL,
                   proxy=None):
    """Sorted eigenvalues of the stated problem inside a finite window.

    A Chebyshev interpolant of the monodromy carries the scan and the
    bracket refinement; simple roots are then polished with one Newton
    step against the directly integrated root function.
    """
    a, b = float(window[0]), float(window[1])
    if not np.isfinite([a, b]).all() or b <= a:
        raise PreconditionViolated("window must be finite with a < b")
    L = _problem_length(coeff, problem)
    spacing = 2.0 * np.pi / coeff.T if problem == "periodic" else np.pi / L
    if cells is None:
        cells = int(np.ceil((b - a) / (2.0 * spacing) * CELLS_PER_SPACING))
    cells = max(cells, 8)
    if proxy is None:
        proxy = _MonodromyProxy(coeff, problem, (a, b), rtol, atol)

    grid = np.linspace(a, b, cells + 1)
    g = proxy.g(grid)

    from scipy.optimize import brentq

    roots = []
    doubles = []
    sgn = np.sign(g)
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        roots.append(brentq(proxy.g_scalar, grid[i], grid[i + 1], xtol=1e-13))
    for i in np.nonzero(sgn == 0)[0]:
        roots.append(grid[i])

    # touching (even-order) zeros appear as dips of |g|
    absg = np.abs(g)
    for i in range(1, cells):
        if not (absg[i] < 1.0 and absg[i] <= absg[i - 1]
                and absg[i] <= absg[i + 1]):
            continue
        if sgn[i] == 0 or sgn[i - 1] * sgn[i] < 0 or sgn[i] * sgn[i + 1] < 0:
            continue
        res = minimize_scalar(lambda x: abs(proxy.g_scalar(x)),
                              bounds=(grid[i - 1], grid[i + 1]),
                              method="bounded", options={"xatol": 1e-12})
        x0 = float(res.x)
        g0 = proxy.g_scalar(x0)
        if abs(g0) <= 1e-8:
            roots.append(x0)
        elif np.sign(g0) != sgn[i - 1]:
            # a pair of simple roots hidden inside one scan cell
            roots.append(brentq(proxy.g_scalar, grid[i - 1], x0, xtol=1e-13))
            roots.append(brentq(proxy.g_scalar, x0, grid[i + 1], xtol=1e-13))

    if problem == "periodic":
        # where the monodromy is near the identity the root is a geometric
        # double and |g| is quadratically flat; the matrix distance is
        # linear in lambda and pins the location sharply
        for j, r in enumerate(roots):
            if proxy.mat_gap(r) <= 1e-4:
                res = minimize_scalar(
                    proxy.mat_gap,
                    bounds=(max(a, r - 2 * MERGE_TOL), min(b, r + 2 * MERGE_TOL)),
                    method="bounded", options={"xatol": 1e-12})
                roots[j] = float(res.x)
                doubles.append(roots[j])

    roots.sort()
    merged = []
    for r in roots:
        if merged and abs(r - merged[-1]) <= MERGE_TOL:
            continue
        merged.append(r)
    if not merged:
        return np.array([])

    # Newton polish of simple roots against the true root function
    merged = np.array(merged)
    simple = np.array([all(abs(r - d) > MERGE_TOL for d in doubles)
                       for r in merged])
    if np.any(simple):
        lams = merged[simple]
        g_true, _ = _g_batch(coeff, problem, lams, rtol, atol)
        slope = proxy.dg(lams)
        safe = np.abs(slope) > 1e-9
        step = np.where(safe, g_true / np.where(safe, slope, 1.0), 0.0)
        step = np.clip(step, -MERGE_TOL, MERGE_TOL)
        merged[simple] = lams - step
    return merged


# ---------------------------------------------------------------------------
# windings
# ---------------------------------------------------------------------------

def _eigenfunction_start(coeff, lam, problem, rtol=RTOL, atol=ATOL):
    if problem == "bc_I":
        return np.array([1.0, 0.0])
    if problem == "bc_minus_I":
        return np.array([0.0, 1.0])
    M = _end_matrices(coeff, [lam], coeff.T, rtol, atol)[0]
    _, _, vt = np.linalg.svd(M - np.eye(2))
    return vt[-1]


def winding_of(coeff, lam, problem, rtol=RTOL, atol=ATOL):
    """Winding of the eigenfunction of ``lam`` over the problem interval.

    Integer-doubled for the periodic problem, any half-integer for the
    boundary problems.  The argument is accumulated along the
    integration, never read off endpoints alone.
    """
    lam = float(lam)
    L = _problem_length(coeff, problem)
    g, mats = _g_batch(coeff, problem, [lam], rtol, atol)
    scale = max(1.0, float(np.linalg.norm(mats[0])))
    if abs(float(g[0])) > 1e-8 * scale:
        raise PreconditionViolated(
            "lambda=%.9g is not an eigenvalue (root residual %.3e)"
            % (lam, abs(float(g[0]))))

    gamma0 = _eigenfunction_start(coeff, lam, problem, rtol, atol)
    gamma0 = gamma0 / np.linalg.norm(gamma0)
    rate_bound = abs(lam) + coeff.sup_norm() + 1.0
    max_step = 0.45 * np.pi / rate_bound

    total = 0.0
    low = 1.0

    def fun(t, y):
        return J2 @ ((coeff.eval(t) + lam * np.eye(2)) @ y)

    def on_step(t0, y0, t1, y1):
        nonlocal total, low
        cross = y0[0] * y1[1] - y0[1] * y1[0]
        dot = y0[0] * y1[0] + y0[1] * y1[1]
        d = float(np.arctan2(cross, dot))
        if abs(d) > 0.5 * np.pi + 1e-9:
            raise IntegratorFailure("argument step exceeded a quarter turn")
        total += d
        low = min(low, float(np.linalg.norm(y1)))

    integrate(fun, 0.0, L, gamma0, rtol=rtol, atol=atol, max_step=max_step,
              on_step=on_step)
    if low < 1e-12:
        raise ZeroEigenfunction("eigenfunction magnitude fell to %.3e" % low)

    halves = total / np.pi
    twice = int(round(halves))
    if abs(halves - twice) > 0.05:
        raise PreconditionViolated(
            "accumulated winding %.6f is not a half-integer" % (total / (2 * np.pi)))
    if problem == "periodic" and twice % 2 != 0:
        raise PreconditionViolated("periodic winding came out half-integral")
    return HalfInt(twice)


# ---------------------------------------------------------------------------
# spectrum slices
# ---------------------------------------------------------------------------

class SpectrumEntry:
    def __init__(self, lam, winding, multiplicity):
        self.lam = float(lam)
        self.winding = winding
        self.multiplicity = int(multiplicity)

    def __repr__(self):
        return "SpectrumEntry(lam=%.9g, w=%s, mult=%d)" % (
            self.lam, self.winding, self.multiplicity)


class SpectrumSlice:
    """Eigenvalues with windings and multiplicities inside a window."""

    def __init__(self, window, entries, problem):
        self.window = (float(window[0]), float(window[1]))
        self.entries = entries
        self.problem = problem

    def lambdas(self):
        return np.array([e.lam for e in self.entries])

    def check_structure(self):
        """Monotone windings; interior winding classes have the right
        total multiplicity (2 periodic / 1 boundary)."""
        ws = [e.winding for e in self.entries]
        monotone = all(a <= b for a, b in zip(ws, ws[1:]))
        counts = {}
        for e in self.entries:
            counts[e.winding.twice] = counts.get(e.winding.twice, 0) + e.multiplicity
        expected = 2 if self.problem == "periodic" else 1
        interior_ok = True
        if len(ws) >= 2:
            wmin, wmax = ws[0], ws[-1]
            for tw, n in counts.items():
                if wmin.twice < tw < wmax.twice and n != expected:
                    interior_ok = False
        return {"monotone": monotone, "interior_counts_ok": interior_ok,
                "counts": counts}

    def to_csv_rows(self):
        rows = []
        for e in self.entries:
            j = e.winding.to_json()
            rows.append((e.lam, j["num"], j["den"], e.multiplicity))
        return rows


def _slice_for(coeff, window, problem, cells=None, rtol=RTOL, atol=ATOL):
    lams = eigenvalues_in(coeff, window, problem, cells, rtol, atol)
    entries = []
    for lam in lams:
        w = winding_of(coeff, lam, problem, rtol, atol)
        mult = 1
        if problem == "periodic":
            M = _end_matrices(coeff, [lam], coeff.T, rtol, atol)[0]
            if np.linalg.norm(M - np.eye(2)) <= DOUBLE_ROOT_NORM:
                mult = 2
        entries.append(SpectrumEntry(lam, w, mult))
    return SpectrumSlice(window, entries, problem)


def periodic_spectrum(S, window, cells=None, rtol=RTOL, atol=ATOL):
    """Eigenvalues of the periodic problem in a finite window.

    Geometric multiplicity 2 is reported when the monodromy at the
    eigenvalue is the identity (matrix-norm criterion), not from the root
    multiplicity of the trace function.
    """
    return _slice_for(S, window, "periodic", cells, rtol, atol)


def boundary_spectrum(D, bc, window, cells=None, rtol=RTOL, atol=ATOL):
    """Eigenvalues of an axis boundary problem; all multiplicities are 1.

    bc is "I" (real-axis endpoints) or "-I" (imaginary-axis endpoints).
    """
    problem = {"I": "bc_I", "-I": "bc_minus_I",
               "bc_I": "bc_I", "bc_minus_I": "bc_minus_I"}[bc]
    if isinstance(D, SymmetricLoop):
        D = BoundarySymmetricPath.from_loop(D)
    return _slice_for(D, window, problem, cells, rtol, atol)


# ---------------------------------------------------------------------------
# indices from spectra
# ---------------------------------------------------------------------------

def _neighbors_of_zero(coeff, problem, rtol=RTOL, atol=ATOL, max_expand=6):
    """Largest eigenvalue below 0 and smallest at or above 0.

    One window sized from the constant-coefficient spacing plus the
    coefficient sup-norm almost always brackets both; it grows on the
    rare miss.
    """
    L = _problem_length(coeff, problem)
    spacing = 2.0 * np.pi / coeff.T if problem == "periodic" else np.pi / L
    B = 2.0 * (spacing + coeff.sup_norm()) + 0.5

    ev = eigenvalues_in(coeff, (-B, B), problem, rtol=rtol, atol=atol)
    lam_minus = float(ev[ev < 0.0][-1]) if np.any(ev < 0.0) else None
    lam_plus = float(ev[ev >= 0.0][0]) if np.any(ev >= 0.0) else None

    lo = -B
    for _ in range(max_expand):
        if lam_minus is not None:
            break
        ev = eigenvalues_in(coeff, (lo - B, lo), problem, rtol=rtol, atol=atol)
        if len(ev):
            lam_minus = float(ev[-1])
        lo -= B
    hi = B
    for _ in range(max_expand):
        if lam_plus is not None:
            break
        ev = eigenvalues_in(coeff, (hi, hi + B), problem, rtol=rtol, atol=atol)
        if len(ev):
            lam_plus = float(ev[0])
        hi += B
    if lam_minus is None or lam_plus is None:
        raise WindowTooCoarse("window expansion failed to bracket the "
                              "eigenvalues adjacent to zero")
    return lam_minus, lam_plus


def _check_zero_not_eigenvalue(coeff, problem, rtol=RTOL, atol=ATOL):
    g, mats = _g_batch(coeff, problem, [0.0], rtol, atol)
    scale = max(1.0, float(np.linalg.norm(mats[0])))
    if abs(float(g[0])) <= ZERO_EIG_GUARD * scale:
        raise DegenerateSpectrum(
            "0 lies in the spectrum (root residual %.3e)" % abs(float(g[0])))


def mu_spec(S, rtol=RTOL, atol=ATOL):
    """Even-doubled index of a periodic coefficient loop.

    Computed as w(lambda-) + w(lambda+), the windings of the eigenvalues
    adjacent to zero; monotonicity of the winding makes this equal to
    twice the maximal negative-eigenvalue winding plus the parity term.
    The window grows adaptively until both defining eigenvalues are
    bracketed.
    """
    _check_zero_not_eigenvalue(S, "periodic", rtol, atol)
    lam_m, lam_p = _neighbors_of_zero(S, "periodic", rtol, atol)
    w_m = winding_of(S, lam_m, "periodic", rtol, atol)
    w_p = winding_of(S, lam_p, "periodic", rtol, atol)
    return w_m + w_p


def _mu_boundary(D, problem, rtol=RTOL, atol=ATOL):
    if isinstance(D, SymmetricLoop):
        D = BoundarySymmetricPath.from_loop(D)
    _check_zero_not_eigenvalue(D, problem, rtol, atol)
    lam_m, _ = _neighbors_of_zero(D, problem, rtol, atol)
    w_m = winding_of(D, lam_m, problem, rtol, atol)
    return HalfInt(2 * w_m.twice + 1)


def mu_I(D, rtol=RTOL, atol=ATOL):
    """Odd-doubled index of the real-axis boundary problem."""
    return _mu_boundary(D, "bc_I", rtol, atol)


def mu_minus_I(D, rtol=RTOL, atol=ATOL):
    """Odd-doubled index of the imaginary-axis boundary problem."""
    return _mu_boundary(D, "bc_minus_I", rtol, atol)


# ---------------------------------------------------------------------------
# symmetric-path diagnostics
# ---------------------------------------------------------------------------

def _require_loop(psi_or_loop):
    if isinstance(psi_or_loop, SymmetricLoop):
        return psi_or_loop
    loop = getattr(psi_or_loop, "coeff_loop", None)
    if loop is None:
        raise PreconditionViolated(
            "need a coefficient loop (build the path with "
            "SymplecticPath.from_coefficient_loop)")
    return loop


def kernel_test(psi, rtol=RTOL, atol=ATOL):
    """Kernel dimension of the real-axis problem of a symmetric path.

    Equals dim(R cap Psi(T/2)^{-1} R); asserted to match the number of
    real-axis eigenvalues within 1e-6 of zero.
    """
    loop = _require_loop(psi)
    M = psi.eval(0.5 * psi.T) if isinstance(psi, SymplecticPath) else None
    if M is None:
        M = _end_matrices(loop, [0.0], 0.5 * loop.T, rtol, atol)[0]
    e1 = np.array([1.0, 0.0])
    pre = np.linalg.solve(M, e1)
    dim = lagrangian_intersection_dim(LagrangianFrame(e1, check=False),
                                      LagrangianFrame(pre, check=False))
    D = BoundarySymmetricPath.from_loop(loop)
    near = eigenvalues_in(D, (-0.5, 0.5), "bc_I", rtol=rtol, atol=atol)
    n_zero = int(np.sum(np.abs(near) <= 1e-6))
    if n_zero != dim:
        raise KernelNonTrivial(
            "kernel dimension %d does not match %d near-zero eigenvalues"
            % (dim, n_zero))
    return dim


def verify_index_relation(psi_or_loop, rtol=RTOL, atol=ATOL, cross_check=True):
    """Check mu = mu_I + mu_{-I} for a symmetric loop, and cross-check
    every spectral value against the crossing-form computation.

    Returns a report naming any of the four index computations that
    disagree.
    """
    from .linalg import imag_axis_frame, real_axis_frame
    from .maslov import cz_index, rs_index

    loop = _require_loop(psi_or_loop)
    if not loop.symmetry_flag:
        raise PreconditionViolated("coefficient loop is not symmetric")
    D = BoundarySymmetricPath.from_loop(loop)

    mu = mu_spec(loop, rtol, atol)
    m_i = mu_I(D, rtol, atol)
    m_mi = mu_minus_I(D, rtol, atol)
    report = {
        "mu_periodic": mu,
        "mu_bc_plus": m_i,
        "mu_bc_minus": m_mi,
        "identity_ok": mu == m_i + m_mi,
    }
    failures = [] if report["identity_ok"] else ["identity"]

    if cross_check:
        psi = (psi_or_loop if isinstance(psi_or_loop, SymplecticPath)
               else SymplecticPath.from_coefficient_loop(loop))
        half = psi.restricted(0.5 * psi.T)
        cz, _ = cz_index(psi)
        rs_r, _ = rs_index(half.lagrangian_image(real_axis_frame(2)),
                           real_axis_frame(2))
        rs_i, _ = rs_index(half.lagrangian_image(imag_axis_frame(2)),
                           imag_axis_frame(2))
        report["cz_crossing"] = cz
        report["rs_real_crossing"] = rs_r
        report["rs_imag_crossing"] = rs_i
        if cz != mu:
            failures.append("periodic")
        if rs_r != m_i:
            failures.append("bc_plus")
        if rs_i != m_mi:
            failures.append("bc_minus")
    report["failures"] = failures
    report["all_ok"] = not failures
    return report


def verify_nondeg_split(psi, tol=1e-8):
    """Equivalence of full-period nondegeneracy with nondegeneracy of the
    two axis boundary pairs, via the off-diagonal entries of Psi(T/2)."""
    if not psi.symmetry_flag:
        raise PreconditionViolated("path must carry the conjugation symmetry")
    M_half = psi.eval(0.5 * psi.T)
    M_full = psi.eval(psi.T)
    b, c = M_half[0, 1], M_half[1, 0]
    gap = abs(float(np.linalg.det(M_full - np.eye(2))))
    full_nondeg = gap > tol
    real_nondeg = abs(c) > tol
    imag_nondeg = abs(b) > tol
    return {
        "full_nondegenerate": full_nondeg,
        "real_pair_nondegenerate": real_nondeg,
        "imag_pair_nondegenerate": imag_nondeg,
        "monodromy_gap": gap,
        "block_B": float(b),
        "block_C": float(c),
        "equivalent": full_nondeg == (real_nondeg and imag_nondeg),
    }
