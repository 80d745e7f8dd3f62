"""Spectrum extraction: filtering, normalization, parity, chains, biorthogonality."""

from __future__ import annotations

import numpy as np
import pytest

from lambspec import (
    BCKind,
    PARITY_ANTISYMMETRIC,
    PARITY_MIXED,
    PARITY_SYMMETRIC,
    assemble_operator,
    biorthogonalize,
    chebyshev_grid,
    classify_parity,
    detect_jordan_chains,
    gram_norm,
    make_material,
    solve_modes,
)
from reference_data import (
    ANTI_REAL,
    BENCH_RAW,
    BENCH_RETAINED,
    CLAMPED_RETAINED,
    SH_BETAS,
    SYM_REAL,
    one_sided_match,
)

# ----------------------------------------------------------------------
# benchmark solve invariants


def test_benchmark_counts(bench_modes):
    assert len(bench_modes) == BENCH_RETAINED
    assert bench_modes.raw_count == BENCH_RAW  # = 4 n - 4 at n = 64
    assert bench_modes.raw_count == 4 * bench_modes.grid.n - 4


def test_benchmark_residual_gate(bench_modes):
    worst = max(mode.residual for mode in bench_modes)
    assert worst <= bench_modes.accept_tol == 1e-8


def test_modes_sorted_by_magnitude(bench_modes):
    mags = np.abs(bench_modes.betas)
    assert np.all(np.diff(mags) >= -1e-12)


def test_real_axis_eigenvalues_match_roots(bench_modes):
    real_roots = [r for pair in ((r, -r) for r in SYM_REAL + ANTI_REAL)
                  for r in pair]
    assert one_sided_match(real_roots, bench_modes.betas) <= 1e-9


def test_spectrum_closed_under_negation_and_conjugation(bench_modes):
    betas = bench_modes.betas
    tol = 1e-6 * np.maximum(1.0, np.abs(betas))
    for transform in (lambda b: -b, np.conj):
        dist = np.array([np.min(np.abs(betas - transform(b))) for b in betas])
        assert np.all(dist <= tol)


def test_mode_normalization_and_phase(bench_op, bench_modes):
    for mode in list(bench_modes)[:20]:
        assert gram_norm(bench_op, mode.big_v) == pytest.approx(1.0, abs=1e-12)
        top = mode.v[np.argmax(np.abs(mode.v))]
        assert abs(top.imag) <= 1e-12
        assert top.real > 0


def test_state_vector_structure(bench_modes):
    dim = bench_modes.grid.n * bench_modes.n_channels
    for mode in list(bench_modes)[:10]:
        np.testing.assert_array_equal(mode.big_v[:dim], mode.v)
        np.testing.assert_allclose(mode.big_v[dim:], mode.mu * mode.v,
                                   rtol=1e-12, atol=1e-12)
        assert mode.mu == pytest.approx(1j * mode.beta, rel=1e-15)


def test_parity_labels_on_real_branches(bench_modes):
    betas = bench_modes.betas
    for root, parity in ((SYM_REAL[0], PARITY_SYMMETRIC),
                         (ANTI_REAL[0], PARITY_ANTISYMMETRIC)):
        k = int(np.argmin(np.abs(betas - root)))
        assert bench_modes.modes[k].parity == parity


def test_no_mixed_parity_in_symmetric_geometry(bench_modes):
    assert all(mode.parity in (PARITY_SYMMETRIC, PARITY_ANTISYMMETRIC)
               for mode in bench_modes)


def test_solver_rejects_mismatched_pencil(bench, bench_op):
    other = assemble_operator(bench, 24, BCKind.FREE_FREE)
    with pytest.raises(ValueError, match="different assemblies"):
        solve_modes(bench_op, other.pencil)


# ----------------------------------------------------------------------
# clamped geometry


def test_clamped_counts_and_residuals(clamped_modes):
    assert len(clamped_modes) == CLAMPED_RETAINED
    worst = max(mode.residual for mode in clamped_modes)
    assert worst <= 1e-8


def test_clamped_modes_are_parity_mixed(clamped_modes):
    assert all(mode.parity == PARITY_MIXED for mode in clamped_modes)


# ----------------------------------------------------------------------
# shear-horizontal channel


def test_sh_counts(sh_modes):
    assert sh_modes.raw_count == 2 * sh_modes.grid.n - 4
    assert len(sh_modes) >= 40


def test_sh_spectrum_matches_closed_form(sh_modes):
    betas = sh_modes.betas
    for beta_n in SH_BETAS:
        for signed in (beta_n, -beta_n):
            assert np.min(np.abs(betas - signed)) <= 1e-10


# ----------------------------------------------------------------------
# parity classification on synthetic profiles


def test_classify_parity_synthetic():
    grid = chebyshev_grid(16, 1.0)
    y = grid.nodes
    odd, even = y, y ** 2
    assert classify_parity(np.concatenate([odd, even]), grid) == PARITY_SYMMETRIC
    assert classify_parity(np.concatenate([even, odd]), grid) == PARITY_ANTISYMMETRIC
    assert classify_parity(np.concatenate([1.0 + y, even]), grid) == PARITY_MIXED
    assert classify_parity(even, grid) == PARITY_SYMMETRIC  # scalar channel


# ----------------------------------------------------------------------
# Jordan chains


def test_benchmark_has_only_simple_chains(bench_modes, bench_op):
    chains = detect_jordan_chains(bench_modes, bench_op.pencil)
    assert len(chains) == len(bench_modes)
    assert all(chain.length == 1 for chain in chains)
    # for singleton chains the certificate is the pencil residual itself
    cert = max(max(chain.relation_residuals) for chain in chains)
    assert cert <= 1e-8


def test_semisimple_double_eigenvalue_at_cutoff_coincidence():
    # at omega = pi two thickness resonances (one per bulk speed) coincide
    # at beta = 0; the eigenvalue is double but has two independent
    # eigenvectors, so no chain extends beyond length one
    material = make_material(2.0, 1.0, 1.0, 1.0, float(np.pi))
    op = assemble_operator(material, 64, BCKind.FREE_FREE)
    modes = solve_modes(op, op.pencil)
    at_zero = [mode for mode in modes if abs(mode.beta) < 1e-6]
    assert len(at_zero) == 2
    chains = detect_jordan_chains(modes, op.pencil)
    near_zero = [chain for chain in chains if abs(chain.mu) < 1e-6]
    assert len(near_zero) == 2
    assert all(chain.length == 1 for chain in near_zero)
    assert all(max(chain.relation_residuals) <= 1e-10 for chain in near_zero)


# ----------------------------------------------------------------------
# biorthogonal system


def test_biorthogonal_pairing_is_identity(bench_system):
    pairing = bench_system.pairing
    k = pairing.shape[0]
    assert k == len(bench_system.flat_modes)
    assert np.max(np.abs(pairing - np.eye(k))) <= 1e-8


def test_left_vectors_live_in_the_masked_range(bench_op, bench_system):
    # left vectors are pulled back as W = G^-1 E w, so G W must vanish on
    # the replaced boundary rows that E masks out
    rows = list(bench_op.boundary_row_indices)
    pulled = bench_op.gram @ bench_system.left_vectors
    scale = np.max(np.abs(pulled))
    assert np.max(np.abs(pulled[rows, :])) <= 1e-12 * scale
