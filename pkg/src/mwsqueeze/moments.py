"""Second-moment propagation of the linear Heisenberg dynamics.

The moment matrix convention is ``V[j, k] = <v_j v_k^dag>`` for the operator
vector ``v = (a1, a1^dag, a2, a2^dag, c, c^dag)``.  Occupations and Wick
terms read off directly: ``n_i = V[2i+1, 2i+1]`` and ``<a_i a_i^dag> =
V[2i, 2i]``, so the canonical commutator reconstructs as
``V[2i, 2i] - V[2i+1, 2i+1] = 1`` along closed trajectories.

This route is exact at arbitrary photon number, which is what makes the
``r -> 1+`` regime (thousands of photons per mode) accessible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp

from .errors import NumericalError, StabilityError
from .fock import FockState
from .params import DecayRates, coupling_pair

__all__ = [
    "MomentMatrix",
    "vacuum_moments",
    "drift_matrix",
    "diffusion_matrix",
    "evolve_moments",
    "steady_state_moments",
    "occupations_from_moments",
    "zeta12_from_moments",
    "commutator_offsets",
    "moments_from_fock_state",
]

# pairing of each component with its dagger in the vector ordering
_SWAP = (1, 0, 3, 2, 5, 4)


@dataclass(frozen=True)
class MomentMatrix:
    """A 6x6 second-moment matrix ``<v v^dag>`` tagged with its time."""

    V: np.ndarray
    t: float

    def __post_init__(self):
        V = np.asarray(self.V, dtype=complex)
        if V.shape != (6, 6):
            raise ValueError("moment matrix must be 6x6")
        object.__setattr__(self, "V", V)

    def validate(self, tol: float = 1e-10):
        """Check Hermiticity and positive semidefiniteness within ``tol``."""
        herm = np.max(np.abs(self.V - self.V.conj().T))
        if herm > tol:
            raise NumericalError(f"moment matrix Hermiticity violated by {herm:.3e}")
        eigs = np.linalg.eigvalsh((self.V + self.V.conj().T) / 2.0)
        if eigs.min() < -tol * max(1.0, eigs.max()):
            raise NumericalError(f"moment matrix not PSD: min eigenvalue {eigs.min():.3e}")


def vacuum_moments() -> MomentMatrix:
    """Moment matrix of the three-mode vacuum: ``<a a^dag> = 1``, all else 0."""
    V = np.zeros((6, 6), dtype=complex)
    V[0, 0] = V[2, 2] = V[4, 4] = 1.0
    return MomentMatrix(V, 0.0)


def drift_matrix(c, d: DecayRates | None = None) -> np.ndarray:
    """Drift matrix M with ``d<v>/dt = M <v>``.

    The closed-dynamics entries follow from the Heisenberg equations
    (``da1/dt = xi1 c^dag``, ``da2/dt = xi2 c``, ``dc/dt = xi1 a1^dag -
    xi2* a2``); damping adds ``-kappa_i/2`` (``-gamma_s/2``) on the diagonal.

    ``c`` may be an :class:`EffectiveCouplings`, a raw ``(xi1, xi2)`` pair
    (no magnitude-ordering constraint, for stability studies), or ``None``
    for the uncoupled case.
    """
    xi1, xi2 = coupling_pair(c)
    if d is None:
        d = DecayRates()
    M = np.zeros((6, 6), dtype=complex)
    M[0, 5] = xi1
    M[1, 4] = np.conj(xi1)
    M[2, 4] = xi2
    M[3, 5] = np.conj(xi2)
    M[4, 1] = xi1
    M[4, 2] = -np.conj(xi2)
    M[5, 0] = np.conj(xi1)
    M[5, 3] = -xi2
    M[0, 0] = M[1, 1] = -d.kappa1 / 2.0
    M[2, 2] = M[3, 3] = -d.kappa2 / 2.0
    M[4, 4] = M[5, 5] = -d.gamma_s / 2.0
    return M


def diffusion_matrix(d: DecayRates) -> np.ndarray:
    """Vacuum-input diffusion matrix D of ``dV/dt = M V + V M^dag + D``."""
    return np.diag([d.kappa1, 0.0, d.kappa2, 0.0, d.gamma_s, 0.0]).astype(complex)


def _propagators(M, times, cond_limit=1e8):
    """exp(M t) for each t, via eigendecomposition when well conditioned."""
    w, P = np.linalg.eig(M)
    if np.linalg.cond(P) < cond_limit:
        Pinv = np.linalg.inv(P)
        return [(P * np.exp(w * t)) @ Pinv for t in times]
    return [sla.expm(M * t) for t in times]


def evolve_moments(M: np.ndarray, V0: MomentMatrix, times, diffusion=None) -> list:
    """Propagate ``dV/dt = M V + V M^dag + D`` from ``V0`` at each sample time.

    The closed case (``diffusion`` None or zero) propagates exactly as
    ``V(t) = e^{Mt} V0 e^{M^dag t}``.  With diffusion, the affine solution
    ``V(t) = Vss + e^{Mt}(V0 - Vss)e^{M^dag t}`` is used when the drift is
    strictly stable; otherwise an adaptive RK integration at relative
    tolerance 1e-10 is the fallback.

    Propagators come from the eigendecomposition of ``M`` when its
    eigenvector matrix is well conditioned (< 1e8), matching the oscillatory
    closed case exactly.
    """
    M = np.asarray(M, dtype=complex)
    times = [float(t) for t in times]
    t0 = V0.t
    rel = [t - t0 for t in times]
    if any(dt < 0 for dt in rel):
        raise ValueError("sample times must not precede the initial time")

    if diffusion is not None and np.any(np.asarray(diffusion) != 0):
        D = np.asarray(diffusion, dtype=complex)
        if np.max(np.linalg.eigvals(M).real) < 0:
            Vss = sla.solve_sylvester(M, M.conj().T, -D)
            out = []
            for dt, E in zip(rel, _propagators(M, rel)):
                V = Vss + E @ (V0.V - Vss) @ E.conj().T
                out.append(MomentMatrix(V, t0 + dt))
        else:
            out = _evolve_moments_ivp(M, V0, rel, D, t0)
    else:
        out = []
        for dt, E in zip(rel, _propagators(M, rel)):
            out.append(MomentMatrix(E @ V0.V @ E.conj().T, t0 + dt))
    for Vm in out:
        Vm.validate(tol=1e-8 * max(1.0, float(np.max(np.abs(Vm.V)))))
    return out


def _evolve_moments_ivp(M, V0, rel, D, t0):
    def rhs(_, y):
        V = y.reshape(6, 6)
        dV = M @ V + V @ M.conj().T + D
        return dV.ravel()

    sol = solve_ivp(
        rhs,
        (0.0, max(rel) if rel else 0.0),
        V0.V.ravel().astype(complex),
        t_eval=sorted(set(rel)),
        rtol=1e-10,
        atol=1e-12,
        method="DOP853",
    )
    if not sol.success:
        raise NumericalError(f"moment integration failed: {sol.message}")
    lookup = {t: sol.y[:, i].reshape(6, 6) for i, t in enumerate(sol.t)}
    return [MomentMatrix(lookup[dt], t0 + dt) for dt in rel]


def steady_state_moments(M: np.ndarray, diffusion: np.ndarray) -> MomentMatrix:
    """Solve ``M V + V M^dag + D = 0`` for the steady-state moment matrix."""
    M = np.asarray(M, dtype=complex)
    abscissa = float(np.max(np.linalg.eigvals(M).real))
    if abscissa >= 0:
        raise StabilityError(
            f"drift matrix is not strictly stable (spectral abscissa {abscissa:.3e})",
            max_real_eigenvalue=abscissa,
        )
    V = sla.solve_sylvester(M, M.conj().T, -np.asarray(diffusion, dtype=complex))
    return MomentMatrix(V, float("inf"))


def occupations_from_moments(V: MomentMatrix):
    """Normally ordered occupations ``(n1, n2, n3)`` read off the moment matrix."""
    n = tuple(float(V.V[k, k].real) for k in (1, 3, 5))
    for val in n:
        if val < -1e-10:
            raise NumericalError(f"negative occupation {val:.3e} from moment matrix")
    return n


def zeta12_from_moments(V: MomentMatrix) -> float:
    """Relative number squeezing from second moments of a zero-mean Gaussian state.

    The fourth moments in ``Var(n1 - n2)`` factorize by Wick's theorem into::

        Var(n1) = n1 (n1 + 1) + |<a1 a1>|^2
        Var(n2) = n2 (n2 + 1) + |<a2 a2>|^2
        Cov(n1, n2) = |<a1 a2>|^2 + |<a1^dag a2>|^2

    so that ``zeta12 = (Var(n1) + Var(n2) - 2 Cov(n1, n2)) / (n1 + n2)``.
    This expansion is unit-tested against a brute-force Fock computation.
    Returns 1 by convention when the denominator is below 1e-14.
    """
    M = V.V
    n1 = M[1, 1].real
    n2 = M[3, 3].real
    m1 = M[0, 1]  # <a1 a1>
    m2 = M[2, 3]  # <a2 a2>
    c12 = M[0, 3]  # <a1 a2>
    d12 = M[1, 3]  # <a1^dag a2>
    den = n1 + n2
    if den < 1e-14:
        return 1.0
    num = (
        n1 * (n1 + 1.0)
        + n2 * (n2 + 1.0)
        + abs(m1) ** 2
        + abs(m2) ** 2
        - 2.0 * abs(c12) ** 2
        - 2.0 * abs(d12) ** 2
    )
    return float(num / den)


def commutator_offsets(V: MomentMatrix):
    """``<[a_i, a_i^dag]>`` reconstructed from the moment matrix, per mode.

    Equals (1, 1, 1) for canonical closed evolution.
    """
    M = V.V
    return tuple(float((M[2 * i, 2 * i] - M[2 * i + 1, 2 * i + 1]).real) for i in range(3))


def moments_from_fock_state(state: FockState) -> MomentMatrix:
    """Extract the 6x6 moment matrix from a three-mode Fock-space state.

    Brute-force expectation values of all ``v_j v_k^dag`` pairs; this is the
    anti-hallucination oracle used to validate the Wick expansion.
    """
    layout = state.layout
    if layout.n_modes != 3:
        raise ValueError("moment extraction expects a three-mode layout")
    from .fock import mode_annihilator

    ops = []
    for m in range(3):
        a = mode_annihilator(layout, m).matrix
        ops.extend([a, a.conj().T.tocsr()])
    psi = state.amplitudes
    # <v_j v_k^dag> = (v_j^dag psi)^dag (v_k^dag psi), and v_j^dag = v_{swap(j)}
    applied = [ops[_SWAP[j]] @ psi for j in range(6)]
    V = np.zeros((6, 6), dtype=complex)
    for j in range(6):
        for k in range(6):
            V[j, k] = np.vdot(applied[j], applied[k])
    return MomentMatrix(V, float("nan"))
