"""Frozen reference values for the benchmark plate (lam=2, mu=1, rho=1, h=1).

Every number in this module was produced by the analytic oracles in
``lambspec.oracle`` (or measured once from the discrete solver where noted)
at double precision and recorded verbatim, so the tests detect behavioural
drift rather than recompute their own expectations.

Dispersion roots are stored one representative per symmetry orbit: the
scaled determinants are even in beta and real on the real axis, so a real
root r stands for {r, -r} and a genuinely complex root z for
{z, -z, conj(z), -conj(z)}.  Imaginary parts of real-axis roots below the
certification noise (~1e-15) are recorded as zero.
"""

from __future__ import annotations

import numpy as np

# ----------------------------------------------------------------------
# dispersion roots at omega = 3 inside the box [-10.3, 10.3]^2
# (traction-free faces, symmetric family: 14 roots)

SYM_REAL = (
    0.25083587473052354,
    1.2553299124773203,
    2.836547550898805,
)
SYM_COMPLEX = (
    1.5772429798110523 + 4.794586190144488j,
    1.792537652059158 + 8.198681946571663j,
)

# traction-free faces, antisymmetric family: 16 roots
ANTI_REAL = (
    1.558013630671095,
    3.3427517910999223,
)
ANTI_COMPLEX = (
    1.4060748329435508 + 2.883396251376937j,
    1.697090848504529 + 6.5290587684227805j,
    1.8723671274293878 + 9.836335544597515j,
)

# clamped lower face, traction-free upper face: 26 roots (no parity split)
CLAMPED_REAL = (
    0.9186649274245925,
    1.766588146428269,
    3.180727128206183,
)
CLAMPED_COMPLEX = (
    1.1958396007744548 + 1.791793668117281j,
    1.3967289682348635 + 3.9105761522982703j,
    1.5259103067325388 + 5.69311386180066j,
    1.6276368539007844 + 7.382491095933044j,
    1.712142231837828 + 9.030348405165739j,
)


def expand_orbits(real_roots, complex_roots) -> tuple:
    """Expand representatives into the full negation/conjugation orbit."""
    roots = []
    for r in real_roots:
        roots.extend([complex(r), complex(-r)])
    for z in complex_roots:
        roots.extend([z, -z, z.conjugate(), -z.conjugate()])
    return tuple(sorted(roots, key=lambda w: (abs(w), w.real, w.imag)))


SYM_ROOTS = expand_orbits(SYM_REAL, SYM_COMPLEX)
ANTI_ROOTS = expand_orbits(ANTI_REAL, ANTI_COMPLEX)
CLAMPED_ROOTS = expand_orbits(CLAMPED_REAL, CLAMPED_COMPLEX)

# ----------------------------------------------------------------------
# shear-horizontal closed-form wavenumbers, branch index 0..10

SH_BETAS = (
    3.0 + 0.0j,
    2.555894931277039 + 0.0j,
    0.9325258179210686j,
    3.6340899689538584j,
    5.520726184512091j,
    7.25844525410287j,
    8.93456432120807j,
    10.578405074175626j,
    12.203018905886761j,
    13.815190520657307j,
    15.418823237433976j,
)

# ----------------------------------------------------------------------
# scalar oracles

RAYLEIGH_SPEED = 0.9325259059311549
PLATE_SPEED = 1.7320508075688772            # equals sqrt(3) here
CUTOFF_FREQUENCIES = (
    1.5707963267948966,
    3.141592653589793,
    4.71238898038469,
    6.283185307179586,
    7.853981633974483,
    9.42477796076938,
    10.995574287564276,
    12.566370614359172,
)

# double root of the symmetric determinant (zero group velocity point),
# bracketed in beta in (0.3, 1.2) and omega in (2.2, 3.1)
ZGV_OMEGA = 2.85175877496009
ZGV_BETA = 0.8042173194552836

# ----------------------------------------------------------------------
# measured invariants of the n = 64 discrete solve (regression pins)

BENCH_RETAINED = 114          # traction-free faces
BENCH_RAW = 252               # finite eigenvalue count = 4 n - 4
CLAMPED_RETAINED = 110
MEASURED_B_FREE = 12.588528429245384
MEASURED_B_CLAMPED = 11.339680204781118
COERCIVITY_CONST_1000 = 0.9723010502330578   # alpha = 0.5, 1000 fields, seed 0
WITNESS_VALUE = 0.8522438834078214
ADJOINT_DEFECT_VALUE = 0.9625700383666813


# ----------------------------------------------------------------------
# matching helpers

def one_sided_match(a, b) -> float:
    """max over a of the distance to the closest element of b."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(max(np.min(np.abs(b - z)) for z in a))


def bijection_defect(a, b) -> float:
    """Worst matching distance in either direction (sets must pair off)."""
    return max(one_sided_match(a, b), one_sided_match(b, a))
