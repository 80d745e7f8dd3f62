"""Chebyshev collocation of the plate cross-section pencil.

The through-thickness profiles live on a Chebyshev-Gauss-Lobatto grid over
[-h, h] (ascending, exactly antisymmetric node set, so reflection is an
exact discrete symmetry).  Three objects are assembled here:

* FormMatrices -- quadrature realizations of the sesquilinear forms: the
  gradient stiffness form, the mass form, the first-order coupling form
  (Hermitian by construction), and the zero-order compression form;
* DiscretePencil -- rectangular stacks k0, k1, k2 with the interior rows
  collocated at every node and four boundary rows appended, so
  P(mu) = k0 + mu k1 + mu^2 k2 evaluates the full boundary-value pencil;
* DiscreteOperator -- the first-order companion form m acting on stacked
  states (U1, U2) ~ (v, i beta v), with the boundary rows of the second
  block replaced by the traction (or clamping) conditions, a 0/1 row mask
  singling out those constraint rows, and the energy Gram matrix
  (gradient stiffness + plain mass on U1, compression mass on U2).

Boundary conditions enter by row replacement only; no basis recombination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import BCKind, Material, pencil_coefficients

__all__ = [
    "DiscreteOperator",
    "DiscretePencil",
    "FormMatrices",
    "Grid",
    "assemble_linearization",
    "assemble_operator",
    "assemble_pencil",
    "assemble_sh_pencil",
    "chebyshev_grid",
    "pencil_residual",
    "pencil_value",
    "reduced_operator",
    "sesquilinear_forms",
]


@dataclass(frozen=True)
class Grid:
    """Chebyshev-Gauss-Lobatto grid on [-h, h] with spectral calculus.

    nodes are ascending; d1 is the dense differentiation matrix, d2 its
    square; quad_weights are Clenshaw-Curtis weights, exact for
    polynomials up to degree n-1 (the exactness_degree attribute).
    """

    n: int
    h: float
    nodes: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    quad_weights: np.ndarray

    @property
    def exactness_degree(self) -> int:
        return self.n - 1

    def __post_init__(self):
        for arr in (self.nodes, self.d1, self.d2, self.quad_weights):
            arr.flags.writeable = False


def _clenshaw_curtis(n_intervals):
    """Clenshaw-Curtis weights for the n_intervals+1 extrema of T_{n_intervals}."""
    big_n = n_intervals
    theta = np.pi * np.arange(big_n + 1) / big_n
    w = np.zeros(big_n + 1)
    ii = np.arange(1, big_n)
    v = np.ones(big_n - 1)
    if big_n % 2 == 0:
        w[0] = w[big_n] = 1.0 / (big_n * big_n - 1)
        for k in range(1, big_n // 2):
            v -= 2.0 * np.cos(2.0 * k * theta[ii]) / (4.0 * k * k - 1)
        v -= np.cos(big_n * theta[ii]) / (big_n * big_n - 1)
    else:
        w[0] = w[big_n] = 1.0 / (big_n * big_n)
        for k in range(1, (big_n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2.0 * k * theta[ii]) / (4.0 * k * k - 1)
    w[ii] = 2.0 * v / big_n
    return w


def chebyshev_grid(n: int, h: float) -> Grid:
    """Build the n-node Gauss-Lobatto grid on [-h, h].

    Requires n >= 3 (nodes {-h, 0, h} at n = 3) and h > 0.  The diagonal of
    d1 is set by negated row sums, so constants differentiate to exactly
    zero; d2 = d1 @ d1.
    """
    if n < 3:
        raise ValueError("n too small: need at least 3 collocation nodes")
    if h <= 0.0:
        raise ValueError("h ≤ 0")
    big_n = n - 1
    j = np.arange(n)
    x = np.cos(np.pi * j / big_n)
    x = 0.5 * (x - x[::-1])  # enforce exact antisymmetry of the node set
    c = np.ones(n)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** j
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d = np.outer(c, 1.0 / c) / dx
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    w = _clenshaw_curtis(big_n)

    nodes = h * x[::-1]                # ascending -h .. h
    d1 = d[::-1, ::-1] / h
    weights = h * w[::-1]
    return Grid(n=n, h=float(h), nodes=nodes, d1=d1, d2=d1 @ d1, quad_weights=weights)


@dataclass(frozen=True)
class FormMatrices:
    """Quadrature matrices of the four sesquilinear forms on field vectors.

    Fields are stacked component-major: u = (u1 at nodes, u3 at nodes).
    g_a0 is the gradient stiffness form, g_l the rho-weighted mass form,
    g_b the Hermitian first-order coupling form (complex), g_c the
    compression form.  material and grid record the assembly context.
    """

    g_a0: np.ndarray
    g_l: np.ndarray
    g_b: np.ndarray
    g_c: np.ndarray
    material: Material
    grid: Grid

    def __post_init__(self):
        for m in (self.g_a0, self.g_l, self.g_b, self.g_c):
            m.flags.writeable = False


def sesquilinear_forms(material: Material, grid: Grid) -> FormMatrices:
    """Assemble the form matrices for the two-component in-plane problem.

    g_b realizes Integral lam(-i u1' conj(v3) + i u3 conj(v1)') +
    mu(-i u3' conj(v1) + i u1 conj(v3)'); its off-diagonal blocks are exact
    Hermitian transposes of each other, so v^H g_b v is real.
    """
    lam, mu, rho = material.lam, material.mu, material.rho
    w = grid.quad_weights
    wd = w[:, None] * grid.d1          # W @ D1
    stiff = grid.d1.T @ wd             # D1^T W D1
    wmat = np.diag(w)
    zero = np.zeros((grid.n, grid.n))

    g_a0 = np.block([[(lam + 2.0 * mu) * stiff, zero], [zero, mu * stiff]])
    g_l = rho * np.block([[wmat, zero], [zero, wmat]])
    g_c = np.block([[mu * wmat, zero], [zero, (lam + 2.0 * mu) * wmat]])

    x = lam * grid.d1.T @ wmat - mu * wd
    upper = 1j * x
    g_b = np.zeros((2 * grid.n, 2 * grid.n), dtype=complex)
    g_b[: grid.n, grid.n:] = upper
    g_b[grid.n:, : grid.n] = upper.conj().T
    return FormMatrices(g_a0=g_a0, g_l=g_l, g_b=g_b, g_c=g_c,
                        material=material, grid=grid)


@dataclass(frozen=True)
class DiscretePencil:
    """Rectangular collocation of the quadratic pencil.

    k0, k1, k2 are (c n + 2 c) x (c n) for c field components: the first
    c n rows collocate the interior operator at every node, the last 2 c
    rows hold the boundary conditions (order: components at +h, then
    components at -h).  P(mu) = k0 + mu k1 + mu^2 k2.
    """

    k0: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    bc: BCKind
    grid: Grid
    material: Material
    n_channels: int

    def __post_init__(self):
        for m in (self.k0, self.k1, self.k2):
            m.flags.writeable = False


def pencil_value(pencil: DiscretePencil, mu: complex) -> np.ndarray:
    """P(mu) = k0 + mu k1 + mu^2 k2."""
    return pencil.k0 + mu * pencil.k1 + (mu * mu) * pencil.k2


def pencil_residual(pencil: DiscretePencil, mu: complex, v: np.ndarray) -> float:
    """Normwise backward error |P(mu) v| / ((|k0| + |mu||k1| + |mu|^2|k2|) |v|).

    The raw residual |P(mu)v|/|v| scales with the collocation matrix norms
    (which grow like n^4), so the standard pencil-normalized backward error
    is reported instead; it is what the acceptance thresholds refer to.
    """
    scale = (np.linalg.norm(pencil.k0) + abs(mu) * np.linalg.norm(pencil.k1)
             + abs(mu) ** 2 * np.linalg.norm(pencil.k2))
    return float(np.linalg.norm(pencil_value(pencil, mu) @ v) / (scale * np.linalg.norm(v)))


def _channel_pencil(material, grid, bc, a, b, c, d):
    """Collocate the pencil for an arbitrary c-component channel system."""
    nch = a.shape[0]
    n = grid.n
    eye = np.eye(n)
    w2r = material.omega ** 2 * material.rho
    k0 = np.kron(a, grid.d2) + w2r * np.eye(nch * n)
    k1 = np.kron(b, grid.d1)
    k2 = np.kron(c, eye)

    def boundary_rows(node):
        r0 = np.zeros((nch, nch * n))
        r1 = np.zeros((nch, nch * n))
        for i in range(nch):
            for jj in range(nch):
                r0[i, jj * n: (jj + 1) * n] = a[i, jj] * grid.d1[node, :]
                r1[i, jj * n + node] = d[i, jj]
        return r0, r1

    def clamp_rows(node):
        r0 = np.zeros((nch, nch * n))
        for i in range(nch):
            r0[i, i * n + node] = 1.0
        return r0, np.zeros((nch, nch * n))

    top0, top1 = boundary_rows(n - 1)
    if bc is BCKind.FREE_FREE:
        bot0, bot1 = boundary_rows(0)
    elif bc is BCKind.CLAMPED_FREE:
        bot0, bot1 = clamp_rows(0)
    else:
        raise ValueError(f"unsupported boundary condition {bc!r}")

    zeros = np.zeros_like(top0)
    k0 = np.vstack([k0, top0, bot0])
    k1 = np.vstack([k1, top1, bot1])
    k2 = np.vstack([k2, zeros, zeros])
    return DiscretePencil(k0=k0, k1=k1, k2=k2, bc=bc, grid=grid,
                          material=material, n_channels=nch)


def assemble_pencil(material: Material, grid: Grid, bc: BCKind) -> DiscretePencil:
    """The two-component in-plane (Lamb) pencil with traction/clamp rows."""
    coeff = pencil_coefficients(material)
    return _channel_pencil(material, grid, bc, coeff.a, coeff.b, coeff.c, coeff.d)


def assemble_sh_pencil(material: Material, grid: Grid) -> DiscretePencil:
    """The scalar shear-horizontal pencil (traction-free faces).

    Same collocation pipeline with 1x1 coefficient blocks (mu, 0, mu, 0);
    used to validate the solver against the closed-form SH spectrum.
    """
    mu = np.array([[material.mu]])
    zero = np.zeros((1, 1))
    return _channel_pencil(material, grid, BCKind.FREE_FREE, mu, zero, mu, zero)


@dataclass(frozen=True)
class DiscreteOperator:
    """First-order companion form of the pencil with its energy Gram matrix.

    m acts on stacked states (U1, U2); eigenvectors satisfy U2 = z U1 with
    z = i beta.  mask is the diagonal of the right-hand-side selector E:
    one on collocation rows, zero on the 2c replaced boundary rows of the
    second block (their indices are boundary_row_indices), so the spectral
    problem reads m V = z E V and resolvent systems (m - z E) U = E F.
    gram is the block-diagonal energy metric, Hermitian positive definite.
    """

    m: np.ndarray
    gram: np.ndarray
    mask: np.ndarray
    boundary_row_indices: tuple
    pencil: DiscretePencil

    def __post_init__(self):
        for arr in (self.m, self.gram, self.mask):
            arr.flags.writeable = False


def _channel_gram(material, grid, a, c):
    """Energy metric blockdiag(a-stiffness + plain mass, c-mass)."""
    w = grid.quad_weights
    stiff = grid.d1.T @ (w[:, None] * grid.d1)
    wmat = np.diag(w)
    n = grid.n
    nch = a.shape[0]
    g1 = np.kron(a, stiff) + np.kron(np.eye(nch), wmat)
    g2 = np.kron(c, wmat)
    return scipy.linalg.block_diag(g1, g2)


def assemble_linearization(pencil: DiscretePencil) -> DiscreteOperator:
    """Companion form [[0, I], [-C^-1(w^2 rho + A d2), -C^-1 B d1]] with
    boundary rows of the second block replaced by the boundary conditions.

    For traction rows the replacement is [A d1 | D point-evaluation]; for a
    clamped face it is point evaluation of U1.  The Gram matrix couples the
    gradient stiffness plus unweighted mass on U1 with the compression mass
    on U2.
    """
    material, grid, bc = pencil.material, pencil.grid, pencil.bc
    n, nch = grid.n, pencil.n_channels
    if nch == 2:
        coeff = pencil_coefficients(material)
        a, b, c, d = coeff.a, coeff.b, coeff.c, coeff.d
    else:
        a = np.array([[material.mu]])
        b = np.zeros((1, 1))
        c = np.array([[material.mu]])
        d = np.zeros((1, 1))

    dim = nch * n
    cinv = np.linalg.inv(c)
    w2r = material.omega ** 2 * material.rho
    lower_left = -np.kron(cinv @ a, grid.d2) - w2r * np.kron(cinv, np.eye(n))
    lower_right = -np.kron(cinv @ b, grid.d1)
    m = np.block([[np.zeros((dim, dim)), np.eye(dim)],
                  [lower_left, lower_right]])

    boundary = []
    for i in range(nch):
        for node in (0, n - 1):
            boundary.append(dim + i * n + node)
    boundary = tuple(sorted(boundary))

    for row in boundary:
        i, node = divmod(row - dim, n)
        m[row, :] = 0.0
        if bc is BCKind.CLAMPED_FREE and node == 0:
            m[row, i * n + node] = 1.0      # clamp: U1_i(-h) = 0
            continue
        for jj in range(nch):
            m[row, jj * n: (jj + 1) * n] = a[i, jj] * grid.d1[node, :]
            m[row, dim + jj * n + node] = d[i, jj]

    mask = np.ones(2 * dim)
    mask[list(boundary)] = 0.0
    gram = _channel_gram(material, grid, a, c)
    return DiscreteOperator(m=m, gram=gram, mask=mask,
                            boundary_row_indices=boundary, pencil=pencil)


def assemble_operator(material: Material, n: int, bc: BCKind,
                      n_channels: int = 2) -> DiscreteOperator:
    """Grid + pencil + companion form in one call.

    n_channels = 2 is the in-plane problem, 1 the scalar SH channel; the
    pencil and grid ride along as op.pencil and op.pencil.grid.
    """
    grid = chebyshev_grid(n, material.h)
    if n_channels == 1:
        pencil = assemble_sh_pencil(material, grid)
    elif n_channels == 2:
        pencil = assemble_pencil(material, grid, bc)
    else:
        raise ValueError(f"unsupported channel count {n_channels}")
    return assemble_linearization(pencil)


def reduced_operator(op: DiscreteOperator):
    """Eliminate the boundary constraint rows into a square operator.

    Returns (z_basis, t, gram_y): an orthonormal basis Z of the constraint
    null space, the reduced operator T = (S Z)^-1 (S M Z) where S keeps the
    collocation rows, and the reduced Gram Z^T G Z.  Eigenpairs of T are
    exactly the finite eigenpairs of the masked problem m V = z E V.

    Valid whenever no constraint-satisfying state is supported purely on
    the replaced rows' coordinates -- true for the in-plane problem with
    an invertible traction coupling, but not for the scalar SH channel
    (whose boundary rows never reference boundary U2 values); in that case
    S Z is singular and a LinAlgError explains the failure.  The mode
    solver itself avoids this reduction and uses the QZ factorization of
    (m, E) instead.
    """
    rows = list(op.boundary_row_indices)
    constraints = op.m[rows, :]
    z_basis = scipy.linalg.null_space(constraints)
    keep = np.ones(op.m.shape[0], dtype=bool)
    keep[rows] = False
    sz = z_basis[keep, :]
    smz = op.m[keep, :] @ z_basis
    if np.linalg.cond(sz) > 1e10:
        raise np.linalg.LinAlgError(
            "constraint elimination is singular: some constrained state is "
            "supported only on the replaced boundary rows (e.g. the scalar "
            "SH channel); use the masked generalized form instead")
    t = np.linalg.solve(sz, smz)
    gram_y = z_basis.T @ op.gram @ z_basis
    return z_basis, t, gram_y
