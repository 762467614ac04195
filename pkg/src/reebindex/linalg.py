"""Fixed-size symplectic linear algebra on R^2 and R^4.

Conventions. The symplectic form is evaluated as omega(u, v) = u^T W v
where W is the Gram matrix of the form.  Three ambient structures appear:

* ``std(2)``   -- (R^2, dx ^ dy), complex structure J0;
* ``std(4)``   -- (R^4, dx1 ^ dy1 + dx2 ^ dy2), J0 (+) J0; the ambient
  space of the surfaces in C^2;
* ``graph4()`` -- (R^4, (-omega) (+) omega) with complex structure
  (-J0) (+) J0; the home of graphs of 2x2 symplectic maps, where the
  anti-graph {(x, -Mx)} and the anti-diagonal {(x, -x)} are Lagrangian.

All matrices are small dense arrays; nothing here supports n > 2.
"""

import numpy as np

from .errors import NotSymplectic, ShapeMismatch

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
OMEGA2 = np.array([[0.0, 1.0], [-1.0, 0.0]])   # omega(u,v) = u1 v2 - u2 v1
I2 = np.array([[1.0, 0.0], [0.0, -1.0]])       # conjugation on R^2 = C

RANK_TOL = 1e-8


class SymplecticSpace:
    """A symplectic vector space with a compatible complex structure."""

    def __init__(self, omega, jmat, name):
        self.omega = np.asarray(omega, dtype=float)
        self.jmat = np.asarray(jmat, dtype=float)
        self.name = name
        self.dim = self.omega.shape[0]

    def form(self, u, v):
        """omega(u, v), broadcasting over leading axes."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.einsum("...i,ij,...j->...", u, self.omega, v)

    def __repr__(self):
        return "SymplecticSpace(%s)" % self.name


def _blockdiag(a, b):
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]))
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


_STD2 = SymplecticSpace(OMEGA2, J2, "std2")
_STD4 = SymplecticSpace(_blockdiag(OMEGA2, OMEGA2), _blockdiag(J2, J2), "std4")
_GRAPH4 = SymplecticSpace(_blockdiag(-OMEGA2, OMEGA2), _blockdiag(-J2, J2), "graph4")


def std(dim):
    """The standard space of dimension 2 or 4."""
    if dim == 2:
        return _STD2
    if dim == 4:
        return _STD4
    raise ShapeMismatch("only dimensions 2 and 4 are supported, got %d" % dim)


def graph4():
    """The product space carrying graphs of Sp(2) elements."""
    return _GRAPH4


def involution(dim):
    """diag(1,-1) blocks: complex conjugation on R^{2n} = C^n."""
    if dim == 2:
        return I2.copy()
    if dim == 4:
        return _blockdiag(I2, I2)
    raise ShapeMismatch("only dimensions 2 and 4 are supported, got %d" % dim)


def symplectic_residual(M, space=None):
    """max-norm of M^T W M - W."""
    M = np.asarray(M, dtype=float)
    if space is None:
        space = std(M.shape[-1])
    W = space.omega
    return float(np.max(np.abs(M.T @ W @ M - W)))


def check_symplectic(M, space=None, tol=1e-9):
    r = symplectic_residual(M, space)
    if r > tol:
        raise NotSymplectic("symplectic residual %.3e exceeds %.1e" % (r, tol))
    return r


def is_symplectic(M, space=None, tol=1e-9):
    return symplectic_residual(M, space) <= tol


def random_symplectic(rng, dim=2, scale=1.0):
    """exp(J S) for a random symmetric S; exactly symplectic up to expm error."""
    from scipy.linalg import expm

    space = std(dim)
    n = dim
    A = rng.uniform(-scale, scale, size=(n, n))
    S = 0.5 * (A + A.T)
    return expm(space.jmat @ S)


class LagrangianFrame:
    """n linearly independent, mutually omega-orthogonal columns in R^{2n}."""

    def __init__(self, columns, space=None, check=True, tol=1e-9):
        cols = np.asarray(columns, dtype=float)
        if cols.ndim == 1:
            cols = cols[:, None]
        self.columns = cols
        self.dim = cols.shape[0]
        if space is None:
            space = std(self.dim)
        self.space = space
        if cols.shape[1] * 2 != self.dim:
            raise ShapeMismatch(
                "frame must have %d columns in dimension %d, got %d"
                % (self.dim // 2, self.dim, cols.shape[1])
            )
        if check:
            self.check(tol)

    def check(self, tol=1e-9):
        c = self.columns
        sv = np.linalg.svd(c, compute_uv=False)
        if sv[-1] <= RANK_TOL * sv[0]:
            raise ShapeMismatch("frame columns are rank deficient")
        scale = float(np.max(np.sum(c * c, axis=0)))
        iso = np.max(np.abs(c.T @ self.space.omega @ c))
        if iso > tol * max(scale, 1.0):
            raise ShapeMismatch("frame is not isotropic: residual %.3e" % iso)

    def isotropy_defect(self):
        c = self.columns
        return float(np.max(np.abs(c.T @ self.space.omega @ c)))

    def orthonormalized(self):
        q, _ = np.linalg.qr(self.columns)
        return LagrangianFrame(q, self.space, check=False)

    def __repr__(self):
        return "LagrangianFrame(dim=%d, space=%s)" % (self.dim, self.space.name)


def real_axis_frame(dim=2):
    """span(e_1) in R^2, or span(e_1, e_3) in R^4 (the x-axes)."""
    if dim == 2:
        return LagrangianFrame(np.array([1.0, 0.0]), check=False)
    cols = np.zeros((4, 2))
    cols[0, 0] = 1.0
    cols[2, 1] = 1.0
    return LagrangianFrame(cols, std(4), check=False)


def imag_axis_frame(dim=2):
    if dim == 2:
        return LagrangianFrame(np.array([0.0, 1.0]), check=False)
    cols = np.zeros((4, 2))
    cols[1, 0] = 1.0
    cols[3, 1] = 1.0
    return LagrangianFrame(cols, std(4), check=False)


def line_frame(angle):
    """The line e^{angle J0} R in R^2."""
    return LagrangianFrame(np.array([np.cos(angle), np.sin(angle)]), check=False)


def antidiagonal_frame():
    """{(x, -x)} in the graph space."""
    cols = np.zeros((4, 2))
    cols[0, 0] = 1.0
    cols[2, 0] = -1.0
    cols[1, 1] = 1.0
    cols[3, 1] = -1.0
    return LagrangianFrame(cols / np.sqrt(2.0), graph4(), check=False)


def graph_frame(M, tol=1e-9):
    """The anti-graph {(x, -Mx)} of a symplectic 2x2 matrix, as a frame in
    the product space.

    Columns are (e_j, -M e_j).  Raises NotSymplectic when M fails the
    symplectic check.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ShapeMismatch("expected a 2x2 matrix, got %s" % (M.shape,))
    check_symplectic(M, std(2), tol)
    cols = np.zeros((4, 2))
    cols[:2] = np.eye(2)
    cols[2:] = -M
    return LagrangianFrame(cols, graph4(), check=False)


def _stacked(F, G):
    if F.dim != G.dim:
        raise ShapeMismatch("frames live in different dimensions: %d vs %d" % (F.dim, G.dim))
    return np.hstack([F.columns, G.columns])


def lagrangian_intersection_dim(F, G, tol=RANK_TOL):
    """dim(span F cap span G) as the rank deficiency of [F | G].

    Singular values below tol * (largest singular value) count as zero.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = _stacked(F, G)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0:
        return A.shape[1]
    return int(np.sum(sv <= tol * sv[0]))


def intersection_basis(F, G, tol=RANK_TOL):
    """Orthonormal basis of span F cap span G (possibly zero columns)."""
    A = np.hstack([F.columns, -G.columns])
    u, sv, vt = np.linalg.svd(A)
    if sv[0] == 0.0:
        null = vt.T
    else:
        null = vt.T[:, sv <= tol * sv[0]]
    k = null.shape[1]
    if k == 0:
        return np.zeros((F.dim, 0))
    vecs = F.columns @ null[: F.columns.shape[1]]
    q, r = np.linalg.qr(vecs)
    keep = np.abs(np.diag(r)) > 1e-12
    return q[:, keep]
