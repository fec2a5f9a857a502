"""Five-level ladder atom: Hamiltonian, Lindblad steady state and transients.

Level ordering is |1> ground, |2> intermediate (probe), |3> Rydberg (coupling),
|4> Rydberg (auxiliary field), |5> Rydberg (RF + comb field).  All frequencies
are angular (rad/s) internally; :meth:`AtomicSystem.from_hz` takes the usual
Omega/2pi values.

The steady-state solver assembles the 25x25 Liouvillian in units of the
intermediate-state decay rate ``gamma_2``; the closed-form coherence is a
rational function in ``omega_z**2`` and is evaluated in the same units.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .constants import EA0, TWO_PI, epsilon_0, hbar
from .errors import DenominatorUnderflow, SingularSystem, StepTooLarge

log = logging.getLogger(__name__)

GROUND_STATE = np.diag([1.0, 0.0, 0.0, 0.0, 0.0]).astype(complex)

# Cs D2 (6S1/2 -> 6P3/2) effective dipole moment and wavelength
CS_D2_DIPOLE = 2.69e-29
CS_D2_WAVELENGTH = 852.347e-9


@dataclass(frozen=True)
class AtomicSystem:
    """Five-level physics parameters.  Rates and detunings in rad/s."""

    omega_p: float
    omega_c: float
    omega_a: float = 0.0
    delta_p: float = 0.0
    delta_c: float = 0.0
    delta_a: float = 0.0
    delta_x: float = 0.0
    gamma_2: float = TWO_PI * 5.2e6
    mu_12: float = CS_D2_DIPOLE
    mu_45: float = 1275.23 * EA0
    n_atoms: float = 4.89e16
    cell_length: float = 0.10
    lambda_p: float = CS_D2_WAVELENGTH

    def __post_init__(self):
        for name in ("omega_p", "omega_c", "omega_a"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.gamma_2 <= 0:
            raise ValueError("gamma_2 must be positive")
        if self.n_atoms < 0:
            raise ValueError("n_atoms must be non-negative")
        if self.cell_length <= 0:
            raise ValueError("cell_length must be positive")

    @classmethod
    def from_hz(cls, omega_p, omega_c, omega_a=0.0, delta_p=0.0, delta_c=0.0,
                delta_a=0.0, delta_x=0.0, gamma_2=5.2e6, **kwargs) -> "AtomicSystem":
        """Build from ordinary frequencies (Omega/2pi, Delta/2pi, gamma/2pi in Hz)."""
        return cls(
            omega_p=TWO_PI * omega_p, omega_c=TWO_PI * omega_c, omega_a=TWO_PI * omega_a,
            delta_p=TWO_PI * delta_p, delta_c=TWO_PI * delta_c, delta_a=TWO_PI * delta_a,
            delta_x=TWO_PI * delta_x, gamma_2=TWO_PI * gamma_2, **kwargs,
        )

    @property
    def probe_resonant(self) -> bool:
        return self.delta_p == 0.0

    @property
    def k_p(self) -> float:
        return TWO_PI / self.lambda_p

    def with_(self, **changes) -> "AtomicSystem":
        return replace(self, **changes)


def _hamiltonian_matrix(omega_p, omega_c, omega_a, omega_z, dp, dc, da, dx):
    a = -2.0 * dp
    b = -2.0 * (dp + dc)
    c = -2.0 * (dp + dc - da)
    d = -2.0 * (dp + dc - da - dx)
    return 0.5 * np.array([
        [0.0, omega_p, 0.0, 0.0, 0.0],
        [omega_p, a, omega_c, 0.0, 0.0],
        [0.0, omega_c, b, omega_a, 0.0],
        [0.0, 0.0, omega_a, c, omega_z],
        [0.0, 0.0, 0.0, omega_z, d],
    ], dtype=complex)


def build_hamiltonian(sys: AtomicSystem, omega_z: float) -> np.ndarray:
    """Rotating-frame Hamiltonian in joules (real symmetric, 5x5)."""
    if omega_z < 0:
        raise ValueError("omega_z must be non-negative")
    return hbar * _hamiltonian_matrix(sys.omega_p, sys.omega_c, sys.omega_a, omega_z,
                                      sys.delta_p, sys.delta_c, sys.delta_a, sys.delta_x)


def lindblad_dissipator(rho: np.ndarray, gamma_2: float) -> np.ndarray:
    """Decay of |2> into |1> with the matching coherence damping of row/column 2."""
    rho = np.asarray(rho)
    out = np.zeros((5, 5), dtype=complex)
    out[0, 0] = gamma_2 * rho[1, 1]
    out[1, 1] = -gamma_2 * rho[1, 1]
    for j in (0, 2, 3, 4):
        out[1, j] = -0.5 * gamma_2 * rho[1, j]
        out[j, 1] = -0.5 * gamma_2 * rho[j, 1]
    return out


def master_rhs(sys: AtomicSystem, omega_z: float, rho: np.ndarray) -> np.ndarray:
    """d(rho)/dt = (i/hbar)[rho, H] + D(rho), in 1/s."""
    h = build_hamiltonian(sys, omega_z) / hbar
    return 1j * (rho @ h - h @ rho) + lindblad_dissipator(rho, sys.gamma_2)


def _natural_split(sys: AtomicSystem):
    """Liouvillian pieces L0, L1 (units of gamma_2) with L = L0 + (omega_z/gamma_2) L1.

    Vectorization is row-major: vec(rho) = rho.ravel().
    """
    g = sys.gamma_2
    m0 = _hamiltonian_matrix(sys.omega_p / g, sys.omega_c / g, sys.omega_a / g, 0.0,
                             sys.delta_p / g, sys.delta_c / g, sys.delta_a / g, sys.delta_x / g)
    m1 = _hamiltonian_matrix(0, 0, 0, 1.0, 0, 0, 0, 0)
    eye = np.eye(5)
    l0 = 1j * (np.kron(eye, m0.T) - np.kron(m0, eye))
    l1 = 1j * (np.kron(eye, m1.T) - np.kron(m1, eye))
    for k in range(25):
        basis = np.zeros(25, dtype=complex)
        basis[k] = 1.0
        l0[:, k] += lindblad_dissipator(basis.reshape(5, 5), 1.0).ravel()
    return l0, l1


def liouvillian(sys: AtomicSystem, omega_z: float) -> np.ndarray:
    """25x25 Liouvillian in units of gamma_2 (row-major vectorization)."""
    l0, l1 = _natural_split(sys)
    return l0 + (omega_z / sys.gamma_2) * l1


def steady_state_numeric(sys: AtomicSystem, omega_z: float, rcond: float = 1e-15,
                         refine: int = 6) -> np.ndarray:
    """Steady state from the null space of the Liouvillian plus the trace condition.

    The ground-population equation is redundant (trace is conserved), so its
    row is replaced by trace(rho) = 1 and the square system is LU-solved.
    Near-decoupled parameter sets make the system badly conditioned; a few
    rounds of iterative refinement with long-double residuals recover full
    double accuracy (matrix entries are exact in double precision).

    A zero Rabi frequency cuts the ladder; levels above the cut are then
    unreachable from |1> and stay empty, so only the connected block is solved.
    """
    lv_full = liouvillian(sys, omega_z)
    couplings = (sys.omega_p, sys.omega_c, sys.omega_a, omega_z)
    n = 1 + next((k for k, w in enumerate(couplings) if w == 0), 4)
    idx = np.array([i * 5 + j for i in range(n) for j in range(n)])
    lv = lv_full[np.ix_(idx, idx)]
    trace_row = np.eye(n).ravel().astype(complex)
    a = lv.copy()
    a[0] = trace_row
    b = np.zeros(n * n, dtype=complex)
    b[0] = 1.0
    lu = scipy.linalg.lu_factor(a, check_finite=False)
    piv_ratio = np.min(np.abs(np.diag(lu[0]))) / np.max(np.abs(np.diag(lu[0])))
    if piv_ratio < rcond:
        raise SingularSystem(f"steady state is not unique (pivot ratio {piv_ratio:.2e})")
    x = scipy.linalg.lu_solve(lu, b).astype(np.clongdouble)
    a_ld = a.astype(np.clongdouble)
    for _ in range(refine):
        r = b - a_ld @ x
        x = x + scipy.linalg.lu_solve(lu, r.astype(complex))
    rho = np.zeros((5, 5), dtype=complex)
    rho[:n, :n] = x.astype(complex).reshape(n, n)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    resid = np.linalg.norm(lv_full @ rho.ravel())
    if resid > 1e-10:
        raise SingularSystem(f"steady-state residual {resid:.2e} exceeds 1e-10")
    return rho


def rho21_coefficients(sys: AtomicSystem):
    """Numerator (o1..o6) and denominator (u1..u3) coefficients in units of gamma_2.

    The polynomials follow the published term lists; ``u3`` carries four
    corrected exponents, one restored term and one de-duplicated term (marked
    inline), found by fitting the exact steady state.
    """
    g = 1.0
    op = sys.omega_p / sys.gamma_2
    oc = sys.omega_c / sys.gamma_2
    oa = sys.omega_a / sys.gamma_2
    dc = sys.delta_c / sys.gamma_2
    da = sys.delta_a / sys.gamma_2
    dx = sys.delta_x / sys.gamma_2
    ds = dx  # the comb-field detuning; appears under a second name in u3

    k = -4 * dc**2 + 4 * da * dc + oa**2
    x = da - dc + dx
    o1 = -2 * dc * oc**2 * op
    o2 = 2 * oc**2 * op * (-8 * dc**2 + 8 * da * dc + oa**2) * x
    o3 = -8 * oc**2 * op * (da - dc) * k * x**2
    o4 = 4 * dc**2 * op * g
    o5 = -8 * dc * op * g * k * x
    o6 = 4 * op * g * k**2 * x**2

    u1 = 8 * dc**2 * op**2 + 4 * dc**2 * g**2 + oc**4 + 2 * oc**2 * op**2 + op**4
    u2 = -2 * (
        32 * da**2 * dc**2 * op**2 + 16 * da**2 * dc**2 * g**2 + 4 * da**2 * oc**4
        + 8 * da**2 * oc**2 * op**2 + 4 * da**2 * op**4 - 64 * da * dc**3 * op**2
        - oa**2 * op**4 - 32 * da * dc**3 * g**2 + 32 * dx * da * dc**2 * op**2
        + 16 * dx * da * dc**2 * g**2 + 8 * da * dc * oa**2 * op**2
        + 4 * da * dc * oa**2 * g**2 - 8 * da * dc * oc**4 - 16 * da * dc * oc**2 * op**2
        - 8 * da * dc * op**4 + 4 * dx * da * oc**4 + 8 * dx * da * oc**2 * op**2
        + 4 * dx * da * op**4 + 32 * dc**4 * op**2 + 16 * dc**4 * g**2
        - 32 * dx * dc**3 * op**2 - 16 * dx * dc**3 * g**2 - 8 * dc**2 * oa**2 * op**2
        - 4 * dc**2 * oa**2 * g**2 + 4 * dc**2 * oc**4 - oa**2 * oc**2 * op**2
        + 8 * dc**2 * oc**2 * op**2 + 8 * dx * dc * oa**2 * op**2
        + 4 * dx * dc * oa**2 * g**2 - 4 * dx * dc * oc**4 - 8 * dx * dc * oc**2 * op**2
        - 4 * dx * dc * op**4
    )
    u3 = (
        128 * da**4 * dc**2 * op**2 + 64 * da**4 * dc**2 * g**2 + 16 * da**4 * oc**4
        + 32 * da**4 * oc**2 * op**2 + 16 * da**4 * op**4 - 512 * da**3 * dc**3 * op**2
        + 256 * da**3 * dc**2 * ds * op**2 + 128 * da**3 * dc**2 * ds * g**2
        + 64 * da**3 * dc * oa**2 * op**2 - 256 * da**3 * dc**3 * g**2
        + 768 * da**2 * dc**4 * op**2
        - 64 * da**3 * dc * oc**4 - 128 * da**3 * dc * oc**2 * op**2
        + 384 * da**2 * dc**4 * g**2
        + 32 * da**3 * ds * oc**4 + 64 * da**3 * ds * oc**2 * op**2 + 32 * da**3 * ds * op**4
        - 384 * da**2 * dc**3 * ds * g**2 + 128 * da**2 * dc**2 * ds**2 * op**2
        + 64 * da**2 * dc**2 * ds**2 * g**2 - 192 * da**2 * dc**2 * oa**2 * op**2
        - 96 * da**2 * dc**2 * oa**2 * g**2 + 96 * da**2 * dc**2 * oc**4 + oa**4 * op**4
        + 192 * da**2 * dc**2 * oc**2 * op**2 + 128 * da**2 * dc**2 * op**4
        + 128 * da**2 * dc * ds * oa**2 * op**2 + 64 * da**2 * dc * ds * oa**2 * g**2
        - 96 * da**2 * dc * ds * oc**4 - 192 * da**2 * dc * ds * oc**2 * op**2
        - 96 * da**2 * dc * ds * op**4 + 16 * da**2 * ds**2 * oc**4
        + 32 * da**2 * ds**2 * oc**2 * op**2
        + 16 * da**2 * ds**2 * op**4 + 8 * da**2 * oa**4 * op**2 + 4 * da**2 * oa**4 * g**2
        + 8 * da**2 * oa**2 * oc**2 * op**2 + 8 * da**2 * oa**2 * op**4
        - 512 * da * dc**5 * op**2        # printed as da*dc**4 (degree 7)
        - 256 * da * dc**5 * g**2         # printed as da*dc**4 (degree 7)
        + 768 * da * dc**4 * ds * op**2
        - 256 * da * dc**3 * ds**2 * op**2 - 128 * da * dc**3 * ds**2 * g**2
        + 192 * da * dc**3 * oa**2 * op**2 + 96 * da * dc**3 * oa**2 * g**2
        - 128 * da * dc**3 * oc**2 * op**2 - 128 * da * dc**3 * op**4
        - 256 * da * dc**2 * ds * oa**2 * op**2 - 128 * da * dc**2 * ds * oa**2 * g**2
        + 96 * da * dc**2 * ds * oc**4 + 192 * da * dc**2 * ds * oc**2 * op**2
        + 128 * da * dc**2 * ds * op**4 + 64 * da * dc * ds**2 * oa**2 * op**2
        + 32 * da * dc * ds**2 * oa**2 * g**2 - 32 * da * dc * ds**2 * oc**4
        - 64 * da * dc * ds**2 * oc**2 * op**2 - 32 * da * dc * ds**2 * op**4
        - 16 * da * dc * oa**4 * op**2 - 8 * da * dc * oa**4 * g**2
        + 384 * da * dc**4 * ds * g**2
        - 8 * da * dc * oa**2 * op**4 + 16 * da * ds * oa**4 * op**2
        + 8 * da * ds * oa**4 * g**2
        + 16 * da * ds * oa**2 * oc**2 * op**2 + 16 * da * ds * oa**2 * op**4
        + 64 * dc**6 * g**2
        - 256 * dc**5 * ds * op**2        # printed as dc**4*ds (degree 7)
        - 128 * dc**5 * ds * g**2         # printed as dc**4*ds (degree 7)
        + 128 * dc**4 * ds**2 * op**2 + 64 * dc**4 * ds**2 * g**2
        - 64 * dc**4 * oa**2 * op**2
        - 32 * dc**4 * oa**2 * g**2 + 16 * dc**4 * oc**4 + 16 * dc**2 * ds**2 * oc**4
        + 128 * dc**3 * ds * oa**2 * op**2 + 64 * dc**3 * ds * oa**2 * g**2
        - 64 * dc**3 * ds * oc**2 * op**2 - 64 * dc**3 * ds * op**4
        - 32 * dc**2 * ds**2 * oa**2 * g**2
        + 32 * dc**2 * ds**2 * op**4 + 8 * dc**2 * oa**4 * op**2 + 4 * dc**2 * oa**4 * g**2
        + 8 * dc**2 * oa**2 * oc**2 * op**2 - 16 * dc * ds * oa**4 * op**2
        - 64 * da * dc**3 * oc**4
        - 16 * dc * ds * oa**2 * oc**2 * op**2 - 16 * dc * ds * oa**2 * op**4
        + 4 * ds**2 * oa**4 * g**2 + 8 * ds**2 * oa**2 * oc**2 * op**2
        + 8 * ds**2 * oa**2 * op**4
        + 32 * da**3 * dc * oa**2 * g**2 - 64 * da**3 * dc * op**4
        + 32 * dc**2 * ds**2 * oc**2 * op**2
        - 16 * da * dc * oa**2 * oc**2 * op**2 + 128 * dc**6 * op**2 + 48 * dc**4 * op**4
        + 32 * dc**4 * oc**2 * op**2      # missing from the printed list
        - 32 * dc**3 * ds * oc**4
        - 64 * dc**2 * ds**2 * oa**2 * op**2  # printed twice
        - 8 * dc * ds * oa**4 * g**2 + 8 * ds**2 * oa**4 * op**2
        - 768 * da**2 * dc**3 * ds * op**2
    )
    return np.array([o1, o2, o3, o4, o5, o6]), np.array([u1, u2, u3])


def _rational_parts(sys: AtomicSystem, omega_z):
    """Return (real num, imag num, den) and their omega_z-derivatives, natural units."""
    num, den = rho21_coefficients(sys)
    z = np.asarray(omega_z, dtype=float) / sys.gamma_2
    z2 = z * z
    z4 = z2 * z2
    re = num[0] * z4 + num[1] * z2 + num[2]
    im = num[3] * z4 + num[4] * z2 + num[5]
    dn = den[0] * z4 + den[1] * z2 + den[2]
    d_re = 4 * num[0] * z**3 + 2 * num[1] * z
    d_im = 4 * num[3] * z**3 + 2 * num[4] * z
    d_dn = 4 * den[0] * z**3 + 2 * den[1] * z
    if np.any(np.abs(dn) < 1e-300):
        raise DenominatorUnderflow("rho21 denominator vanishes for this detuning set")
    return re, im, dn, d_re, d_im, d_dn


def rho21_closed_form(sys: AtomicSystem, omega_z):
    """Steady-state probe coherence rho_21 as a rational function of omega_z.

    The published rational expression evaluates to rho_12 = conj(rho_21) under
    the master-equation convention used here, so the imaginary part is negated.
    Vectorized over ``omega_z``.
    """
    if not sys.probe_resonant:
        raise ValueError("closed form requires a resonant probe (delta_p = 0)")
    re, im, dn, *_ = _rational_parts(sys, omega_z)
    return (re - 1j * im) / dn


def susceptibility_prefactor(sys: AtomicSystem) -> float:
    return -2.0 * sys.n_atoms * sys.mu_12**2 / (epsilon_0 * hbar * sys.omega_p)


@dataclass(frozen=True)
class SusceptibilityPoint:
    chi: complex
    chi_prime: complex  # d(chi)/d(omega_z), in s
    evaluated_at: float


def susceptibility(sys: AtomicSystem, omega_z: float) -> SusceptibilityPoint:
    """chi = C rho_21 and its analytic derivative with respect to omega_z."""
    if sys.omega_p <= 0:
        raise ValueError("omega_p must be positive")
    c = susceptibility_prefactor(sys)
    re, im, dn, d_re, d_im, d_dn = _rational_parts(sys, omega_z)
    chi = c * (re - 1j * im) / dn
    # quotient rule per component; natural units -> divide by gamma_2
    chi_re_prime = c * (d_re / dn - re * d_dn / dn**2)
    chi_im_prime = -c * (d_im / dn - im * d_dn / dn**2)
    chi_prime = (chi_re_prime + 1j * chi_im_prime) / sys.gamma_2
    return SusceptibilityPoint(complex(chi), complex(chi_prime), float(omega_z))


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> None:
    """Raise ValueError unless rho is Hermitian, unit-trace and PSD within tol."""
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise ValueError(f"not Hermitian (max deviation {herm:.2e})")
    tr = abs(np.trace(rho) - 1.0)
    if tr > tol:
        raise ValueError(f"trace deviates from 1 by {tr:.2e}")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if lam[0] < -tol:
        raise ValueError(f"negative eigenvalue {lam[0]:.2e}")


# --------------------------------------------------------------------------
# transient integration


def _apply(rows, cols, v0s, v1s, a, v, out):
    """out = (L0 + a L1) v for coordinate-format L0, L1 sharing one pattern."""
    for q in range(out.shape[0]):
        out[q] = 0.0
    for e in range(rows.shape[0]):
        out[rows[e]] += (v0s[e] + a * v1s[e]) * v[cols[e]]


def _rk4_kernel_py(rows, cols, v0s, v1s, t, oz, v0, h_max, out):
    n_out = t.shape[0]
    v = v0.copy()
    out[0] = v
    k1 = np.empty_like(v)
    k2 = np.empty_like(v)
    k3 = np.empty_like(v)
    k4 = np.empty_like(v)
    y = np.empty_like(v)
    n = v.shape[0]
    max_drift = 0.0
    for k in range(n_out - 1):
        dt = t[k + 1] - t[k]
        n_sub = max(1, int(math.ceil(dt / h_max - 1e-9)))
        h = dt / n_sub
        slope = (oz[k + 1] - oz[k]) / dt
        for s in range(n_sub):
            a0 = oz[k] + slope * (s * h)
            am = a0 + slope * (0.5 * h)
            a1 = a0 + slope * h
            _apply(rows, cols, v0s, v1s, a0, v, k1)
            for q in range(n):
                y[q] = v[q] + 0.5 * h * k1[q]
            _apply(rows, cols, v0s, v1s, am, y, k2)
            for q in range(n):
                y[q] = v[q] + 0.5 * h * k2[q]
            _apply(rows, cols, v0s, v1s, am, y, k3)
            for q in range(n):
                y[q] = v[q] + h * k3[q]
            _apply(rows, cols, v0s, v1s, a1, y, k4)
            for q in range(n):
                v[q] += (h / 6.0) * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q])
            tr = v[0] + v[6] + v[12] + v[18] + v[24]
            drift = abs(tr - 1.0)
            # the trace is an exact RK4 invariant, so also bound |rho_ij| <= 1
            for q in range(n):
                excess = abs(v[q]) - 1.0
                if excess > drift:
                    drift = excess
            if drift > max_drift:
                max_drift = drift
            if drift > 1e-6:
                return -1.0 - drift
            for q in range(n):
                v[q] /= tr
        out[k + 1] = v
    return max_drift


try:
    import numba

    _apply = numba.njit(cache=True)(_apply)
    _rk4_kernel = numba.njit(cache=True)(_rk4_kernel_py)
except ImportError:  # pragma: no cover
    _rk4_kernel = _rk4_kernel_py


def default_step(sys: AtomicSystem, min_period: float | None = None) -> float:
    """Fixed RK4 step: min(period/20, 1/(50 gamma_2)), in seconds."""
    h = 1.0 / (50.0 * sys.gamma_2)
    if min_period is not None:
        h = min(h, min_period / 20.0)
    return h


def transient_integrate(sys: AtomicSystem, omega_z_of_t, t_grid, rho0=None,
                        step: float | None = None, min_period: float | None = None) -> np.ndarray:
    """Integrate the master equation with a sampled omega_z(t) envelope.

    ``omega_z_of_t`` holds rad/s values at the instants of ``t_grid`` (s) and
    is linearly interpolated between them.  Returns an array of shape
    (len(t_grid), 5, 5); the trace is renormalized after every RK4 step.
    """
    t = np.asarray(t_grid, dtype=float)
    oz = np.asarray(omega_z_of_t, dtype=float)
    if t.ndim != 1 or oz.shape != t.shape:
        raise ValueError("envelope and t_grid must be 1-D arrays of equal length")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if min_period is not None and t.size > 1 and np.max(np.diff(t)) > min_period / 20.0 * (1 + 1e-9):
        raise ValueError("envelope must be sampled with >= 20 points per shortest period")
    h = step if step is not None else default_step(sys, min_period)
    g = sys.gamma_2
    l0, l1 = _natural_split(sys)
    v0 = (GROUND_STATE if rho0 is None else np.asarray(rho0, dtype=complex)).ravel().copy()
    out = np.empty((t.size, 25), dtype=complex)
    rows, cols = np.nonzero((l0 != 0) | (l1 != 0))
    status = _rk4_kernel(rows, cols, l0[rows, cols].copy(), l1[rows, cols].copy(),
                         (t - t[0]) * g, oz / g, v0, h * g, out)
    if status < 0:
        raise StepTooLarge(f"per-step trace drift or element overflow {-status - 1.0:.2e} exceeds 1e-6")
    log.debug("transient: max per-step trace drift %.3e", status)
    rho = out.reshape(-1, 5, 5)
    return 0.5 * (rho + np.conj(np.swapaxes(rho, 1, 2)))
