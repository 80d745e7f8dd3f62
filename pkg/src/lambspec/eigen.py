"""Mode extraction for the discretized plate pencil.

The masked companion problem m V = z E V is solved with the QZ
factorization; E is singular on the constraint rows, so a generalized
solve is the only uniformly valid route (explicit constraint elimination
breaks down whenever some constrained state is supported purely on the
replaced rows, as happens for the scalar SH channel).  Raw eigenpairs
are filtered by two-resolution agreement, normalized in the energy
metric with a fixed phase convention, and classified by reflection
parity.  On top of that sit the defectiveness machinery (Jordan chains
via bordered least squares) and the left/right biorthogonal systems
used by modal expansions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import BCKind, Material
from .discretize import (
    DiscreteOperator,
    DiscretePencil,
    Grid,
    assemble_linearization,
    assemble_pencil,
    assemble_sh_pencil,
    chebyshev_grid,
    pencil_residual,
    pencil_value,
)

__all__ = [
    "BiorthogonalSystem",
    "JordanChain",
    "Mode",
    "ModeSet",
    "PARITY_ANTISYMMETRIC",
    "PARITY_MIXED",
    "PARITY_SYMMETRIC",
    "biorthogonalize",
    "classify_parity",
    "detect_jordan_chains",
    "solve_modes",
]

PARITY_SYMMETRIC = "symmetric"
PARITY_ANTISYMMETRIC = "antisymmetric"
PARITY_MIXED = "mixed"

#: eigenvalues of the n- and 2n-grid solves must agree to this tolerance
#: (scaled by max(1, |beta|)) for a mode to survive filtering
MATCH_TOL = 1e-6

#: pair separation below which two coarse eigenvalues are treated as one
#: split defective eigenvalue during filtering (their individual values
#: are only sqrt(backward-error) accurate; their mean is fully accurate)
DEFECT_PAIR_TOL = 1e-4

#: relative singular-value cutoff deciding the geometric multiplicity of
#: a cluster of nearby eigenvalues
RANK_TOL = 1e-3


@dataclass(frozen=True)
class Mode:
    """One retained eigenpair of the quadratic pencil.

    mu = i*beta is the companion eigenvalue, v the first-block grid values
    of the displacement profile, big_v the stacked state (v, mu*v) with
    unit energy norm and the largest-magnitude entry of v made real
    positive.  residual is the normwise backward error of (mu, v) against
    the quadratic pencil.
    """

    mu: complex
    beta: complex
    v: np.ndarray
    big_v: np.ndarray
    residual: float
    parity: str

    def __post_init__(self):
        self.v.flags.writeable = False
        self.big_v.flags.writeable = False


@dataclass(frozen=True)
class ModeSet:
    """Retained modes, sorted by |beta| ascending, plus solve context.

    raw_count is the number of finite eigenvalues before two-resolution
    filtering and the residual gate; an empty ModeSet signals accept_tol
    too tight or n too small.
    """

    modes: tuple
    material: Material
    bc: BCKind
    grid: Grid
    n_channels: int
    accept_tol: float
    raw_count: int

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    @property
    def betas(self) -> np.ndarray:
        return np.array([mode.beta for mode in self.modes])


@dataclass(frozen=True)
class JordanChain:
    """A chain v_0 ... v_k at (or near) a defective eigenvalue.

    vectors[0] is an eigenvector; vectors[p] solves
    P(mu) v_p = -P'(mu) v_{p-1} - (P''(mu)/2) v_{p-2} in the bordered
    least-squares sense.  relation_residuals[p] is the normalized size of
    that relation's defect; mode_indices point back into the ModeSet
    cluster the chain was built from.  Scaling is joint: only the head is
    normalized, the tail keeps the scale the relations induce.
    """

    mu: complex
    vectors: tuple
    relation_residuals: tuple
    mode_indices: tuple

    def __post_init__(self):
        for vec in self.vectors:
            vec.flags.writeable = False

    @property
    def length(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class BiorthogonalSystem:
    """Left/right eigenvector system, biorthogonal in the energy metric.

    modes holds the retained modes grouped into eigenvalue clusters
    (blocks), flattened order matching the rows/columns of pairing;
    left_vectors[:, k] is the energy-metric left vector W_k, and
    pairing[m, n] = <V_n, W_m>_gram is block-diagonal with unit diagonal
    blocks after normalization.
    """

    modes: tuple
    left_vectors: np.ndarray
    pairing: np.ndarray

    def __post_init__(self):
        self.left_vectors.flags.writeable = False
        self.pairing.flags.writeable = False

    @property
    def flat_modes(self) -> tuple:
        return tuple(mode for block in self.modes for mode in block)


def _finite_eigenpairs(m: np.ndarray, mask: np.ndarray):
    """Finite eigenpairs of m V = z E V, E = diag(mask), via QZ."""
    w, vr = scipy.linalg.eig(m, np.diag(mask))
    good = np.isfinite(w)
    return w[good], vr[:, good]


def _finite_eigenvalues(m: np.ndarray, mask: np.ndarray) -> np.ndarray:
    w = scipy.linalg.eig(m, np.diag(mask), right=False)
    return w[np.isfinite(w)]


def _reference_eigenvalues(material: Material, grid: Grid, bc: BCKind,
                           n_channels: int) -> np.ndarray:
    """Finite spectrum of the same problem re-assembled at resolution 2n."""
    fine = chebyshev_grid(2 * grid.n, grid.h)
    if n_channels == 1:
        pencil = assemble_sh_pencil(material, fine)
    else:
        pencil = assemble_pencil(material, fine, bc)
    op = assemble_linearization(pencil)
    return _finite_eigenvalues(op.m, op.mask)


def classify_parity(mode, grid: Grid, parity_tol: float = 1e-6) -> str:
    """Reflection parity of a displacement profile on the symmetric grid.

    For the two-component problem, symmetric means (v1 odd, v3 even) and
    antisymmetric the mirrored pattern; a scalar channel is symmetric when
    even.  Accepts a Mode or a bare component-stacked vector.
    """
    v = np.asarray(getattr(mode, "v", mode))
    comps = v.reshape(-1, grid.n)
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return PARITY_MIXED
    flipped = comps[:, ::-1]
    if comps.shape[0] == 1:
        err_sym = np.max(np.abs(comps - flipped))
        err_anti = np.max(np.abs(comps + flipped))
    else:
        err_sym = max(np.max(np.abs(comps[0] + flipped[0])),
                      np.max(np.abs(comps[1] - flipped[1])))
        err_anti = max(np.max(np.abs(comps[0] - flipped[0])),
                       np.max(np.abs(comps[1] + flipped[1])))
    if err_sym <= parity_tol * scale:
        return PARITY_SYMMETRIC
    if err_anti <= parity_tol * scale:
        return PARITY_ANTISYMMETRIC
    return PARITY_MIXED


def solve_modes(op: DiscreteOperator, pencil: DiscretePencil,
                accept_tol: float = 1e-8) -> ModeSet:
    """Solve, filter, normalize, and classify the discrete spectrum.

    Eigenpairs come from the QZ factorization of (m, E).  A pair is kept
    when (a) its eigenvalue reappears within MATCH_TOL * max(1, |beta|)
    in an independent solve at twice the resolution and (b) its pencil
    backward error is at most accept_tol.  A defective eigenvalue splits
    into a pair wandering ~sqrt(backward error) in opposite directions,
    differently on each grid, so individually unmatched eigenvalues are
    rescued when a coarse partner sits within DEFECT_PAIR_TOL and the
    pair mean agrees with the mean of the two nearest fine eigenvalues
    (the means are as accurate as simple eigenvalues).  Retained states
    are rebuilt as exactly (v, mu v), normalized to unit energy norm,
    phase-fixed, and sorted by (|beta|, Re beta, Im beta).
    """
    if op.pencil.grid.n != pencil.grid.n or op.pencil.n_channels != pencil.n_channels:
        raise ValueError("operator and pencil come from different assemblies")
    material, grid, bc = pencil.material, pencil.grid, pencil.bc
    nch = pencil.n_channels
    dim = nch * grid.n

    z_raw, v_raw = _finite_eigenpairs(op.m, op.mask)
    z_ref = _reference_eigenvalues(material, grid, bc, nch)
    if z_ref.size < 2:
        raise ValueError("reference solve returned no usable spectrum")

    matched = np.array([np.min(np.abs(z_ref - z)) <= MATCH_TOL * max(1.0, abs(z))
                        for z in z_raw])
    for k in np.flatnonzero(~matched):
        z = z_raw[k]
        others = np.abs(z_raw - z)
        others[k] = np.inf
        p = int(np.argmin(others))
        if others[p] > DEFECT_PAIR_TOL * max(1.0, abs(z)):
            continue
        mean_c = 0.5 * (z + z_raw[p])
        nearest = np.argsort(np.abs(z_ref - mean_c))[:2]
        mean_f = np.mean(z_ref[nearest])
        if abs(mean_c - mean_f) <= MATCH_TOL * max(1.0, abs(mean_c)):
            matched[k] = True

    modes = []
    for k in range(z_raw.size):
        if not matched[k]:
            continue
        z = complex(z_raw[k])
        u1 = v_raw[:dim, k]
        if np.linalg.norm(u1) == 0.0:
            continue
        res = pencil_residual(pencil, z, u1)
        if res > accept_tol:
            continue
        big_v = np.concatenate([u1, z * u1])
        nrm = np.sqrt(abs(np.vdot(big_v, op.gram @ big_v)))
        big_v = big_v / nrm
        top = big_v[:dim]
        j = int(np.argmax(np.abs(top)))
        big_v = big_v * (abs(top[j]) / top[j])
        v = big_v[:dim].copy()
        modes.append(Mode(mu=z, beta=z / 1j, v=v, big_v=big_v,
                          residual=float(res),
                          parity=classify_parity(v, grid)))

    modes.sort(key=lambda md: (abs(md.beta), md.beta.real, md.beta.imag))
    return ModeSet(modes=tuple(modes), material=material, bc=bc, grid=grid,
                   n_channels=nch, accept_tol=float(accept_tol),
                   raw_count=int(z_raw.size))


def _cluster_indices(zs: np.ndarray, tol: float):
    """Group indices whose eigenvalues coincide within tol * max(1, |z|).

    Single-linkage via union-find; groups are returned sorted internally
    and ordered by their first member, so the output is deterministic.
    """
    m = zs.size
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(zs[i] - zs[j]) <= tol * max(1.0, abs(zs[i]), abs(zs[j])):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return [tuple(sorted(g)) for g in sorted(groups.values(), key=lambda g: g[0])]


def _pencil_scale(pencil: DiscretePencil, mu: complex) -> float:
    return (np.linalg.norm(pencil.k0) + abs(mu) * np.linalg.norm(pencil.k1)
            + abs(mu) ** 2 * np.linalg.norm(pencil.k2))


def _relation_residuals(pencil: DiscretePencil, mu: complex, vectors) -> tuple:
    """Normalized defects of P(mu)v_p + P'(mu)v_{p-1} + (P''/2)v_{p-2} = 0."""
    p_mu = pencil_value(pencil, mu)
    p_d1 = pencil.k1 + 2.0 * mu * pencil.k2
    scale = _pencil_scale(pencil, mu) * max(np.linalg.norm(v) for v in vectors)
    out = []
    for p, v in enumerate(vectors):
        r = p_mu @ v
        if p >= 1:
            r = r + p_d1 @ vectors[p - 1]
        if p >= 2:
            r = r + pencil.k2 @ vectors[p - 2]
        out.append(float(np.linalg.norm(r) / scale))
    return tuple(out)


def _try_extend(pencil: DiscretePencil, mu: complex, chain):
    """Bordered least squares for the next chain vector.

    Solves P(mu) v = -P'(mu) v_last - (P''/2) v_prev subject to v being
    orthogonal to the existing chain, and returns (v, certificate): the
    certificate is the solvability defect |P v - rhs| / |rhs|, which is
    O(1) at a simple eigenvalue (the rhs sticks out of range P) and tiny
    only where an associated vector genuinely exists.
    """
    p_mu = pencil_value(pencil, mu)
    rhs = -(pencil.k1 + 2.0 * mu * pencil.k2) @ chain[-1]
    if len(chain) >= 2:
        rhs = rhs - pencil.k2 @ chain[-2]
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        return None, 1.0
    weight = _pencil_scale(pencil, mu)
    border = np.vstack([weight * v.conj()[None, :] for v in chain])
    aug = np.vstack([p_mu, border])
    b = np.concatenate([rhs, np.zeros(len(chain))])
    v_next, *_ = np.linalg.lstsq(aug, b, rcond=None)
    cert = float(np.linalg.norm(p_mu @ v_next - rhs) / rhs_norm)
    return v_next, cert


def detect_jordan_chains(mode_set: ModeSet, pencil: DiscretePencil,
                         cluster_tol: float = 1e-6,
                         chain_tol: float = 1e-6):
    """Cluster the spectrum, test defectiveness, and build Jordan chains.

    Every cluster yields one chain per independent eigenvector (geometric
    multiplicity via the RANK_TOL singular-value cutoff); extension past
    the eigenvector is attempted up to the cluster's algebraic size (at
    least one probe even for singletons, so near-defective pairs missed
    by clustering are still caught) and kept only when both the
    solvability certificate and the chain-relation residual stay within
    chain_tol.  Simple well-separated eigenvalues therefore come back as
    length-1 chains.
    """
    modes = mode_set.modes
    if not modes:
        return []
    zs = np.array([mode.mu for mode in modes])
    chains = []
    for group in _cluster_indices(zs, cluster_tol):
        mu = complex(np.mean(zs[list(group)]))
        stack = np.column_stack([modes[i].v for i in group])
        stack = stack / np.linalg.norm(stack, axis=0)
        if len(group) == 1:
            heads = [stack[:, 0]]
        else:
            u, s, _ = np.linalg.svd(stack, full_matrices=False)
            geom = max(1, int(np.sum(s > RANK_TOL * s[0])))
            heads = [u[:, k] for k in range(geom)]
        cap = max(len(group), 2)
        for head in heads:
            chain = [head]
            while len(chain) < cap:
                v_next, cert = _try_extend(pencil, mu, chain)
                if v_next is None or cert > chain_tol:
                    break
                if _relation_residuals(pencil, mu, chain + [v_next])[-1] > chain_tol:
                    break
                chain.append(v_next)
            chains.append(JordanChain(
                mu=mu,
                vectors=tuple(np.array(v) for v in chain),
                relation_residuals=_relation_residuals(pencil, mu, chain),
                mode_indices=group))
    return chains


def _left_eigenpairs(m: np.ndarray, mask: np.ndarray):
    w, vl = scipy.linalg.eig(m, np.diag(mask), left=True, right=False)
    good = np.isfinite(w)
    return w[good], vl[:, good]


def biorthogonalize(mode_set: ModeSet, op: DiscreteOperator,
                    cluster_tol: float = 1e-6) -> BiorthogonalSystem:
    """Left vectors and the normalized energy-metric pairing.

    Left eigenvectors w of the pencil (w^H m = z w^H E) are pulled back
    into the energy space as W = G^{-1} E w, so that <V_n, W_m>_gram
    equals w_m^H E V_n and vanishes across distinct eigenvalues.  Modes
    are grouped into clusters; each diagonal pairing block is inverted
    onto the identity (near-defective clusters are handled as blocks),
    and a numerically singular block raises.
    """
    modes = mode_set.modes
    if not modes:
        raise ValueError("empty mode set")
    zs = np.array([mode.mu for mode in modes])
    blocks = _cluster_indices(zs, cluster_tol)
    perm = [i for group in blocks for i in group]

    w_all, vl_all = _left_eigenpairs(op.m, op.mask)
    gram_factor = scipy.linalg.cho_factor(op.gram)
    right = np.column_stack([modes[i].big_v for i in perm])
    left = np.empty_like(right, dtype=complex)
    for col, i in enumerate(perm):
        d = np.abs(w_all - modes[i].mu)
        j = int(np.argmin(d))
        if d[j] > 1e-6 * max(1.0, abs(modes[i].mu)):
            raise ValueError(f"no left eigenvector matches mu = {modes[i].mu:.6g}")
        left[:, col] = scipy.linalg.cho_solve(gram_factor, op.mask * vl_all[:, j])

    pairing = left.conj().T @ op.gram @ right
    start = 0
    for group in blocks:
        stop = start + len(group)
        block = pairing[start:stop, start:stop]
        if np.linalg.cond(block) > 1e12:
            mu = modes[group[0]].mu
            raise ValueError(f"pairing block at mu = {mu:.6g} is numerically "
                             "singular; biorthogonal normalization failed")
        left[:, start:stop] = left[:, start:stop] @ np.linalg.inv(block).conj().T
        start = stop
    pairing = left.conj().T @ op.gram @ right

    grouped = tuple(tuple(modes[i] for i in group) for group in blocks)
    return BiorthogonalSystem(modes=grouped, left_vectors=left, pairing=pairing)
