"""Exact truncated-Fock-space evolution under the effective Hamiltonian.

The Hamiltonian is ``H = i xi1 a1^dag c^dag - i xi1* a1 c
+ i xi2 a2^dag c - i xi2* a2 c^dag`` on a (cavity1, cavity2, spin) layout;
the degenerate variant identifies the two cavities.  Evolution uses a dense
scaling-and-squaring exponential for composite dimensions up to 4096 and a
Lanczos (Krylov) stepper above, with a per-step tolerance of 1e-10.

State comparisons across routes are gauged by the phase of the
largest-magnitude amplitude, since the closed-form amplitude table fixes
phases only up to convention (its alphas are real non-negative); exact
phase-faithful agreement therefore holds for real non-negative couplings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import closed_form
from .errors import IntegrationError, TruncationWarning
from .fock import (
    FockOperator,
    FockState,
    ModeLayout,
    mode_annihilator,
    top_level_mask,
    vacuum_state,
)
from .params import EffectiveCouplings, coupling_pair

__all__ = [
    "build_effective_hamiltonian",
    "build_degenerate_hamiltonian",
    "conserved_number_operator",
    "Trajectory",
    "evolve_state",
    "relative_number_squeezing",
    "fidelity_with_target",
    "target_state",
    "analytic_state",
    "gauge_phase",
    "degenerate_mode_evolve",
    "quadrature_variances",
]

_DENSE_DIM_LIMIT = 4096
_NORM_DRIFT_PER_STEP = 1e-8
_LEAKAGE_THRESHOLD = 1e-6


def build_effective_hamiltonian(c, layout: ModeLayout) -> FockOperator:
    """Hermitian three-oscillator Hamiltonian on the truncated space.

    ``<1,0,1| H |0,0,0> = i xi1`` (pair creation in cavity 1 and the spin),
    and ``[H, a2^dag a2 - a1^dag a1 + c^dag c] = 0`` on the whole truncated
    space: every nonzero matrix element conserves that combination, and
    boundary elements are simply absent.  ``c`` may be an
    :class:`EffectiveCouplings` or a raw ``(xi1, xi2)`` pair.
    """
    if layout.n_modes != 3:
        raise ValueError("effective Hamiltonian needs a three-mode layout")
    a1 = mode_annihilator(layout, 0).matrix
    a2 = mode_annihilator(layout, 1).matrix
    cc = mode_annihilator(layout, 2).matrix
    xi1, xi2 = coupling_pair(c)
    pair = a1.conj().T @ cc.conj().T
    swap = a2.conj().T @ cc
    H = 1j * xi1 * pair - 1j * np.conj(xi1) * pair.conj().T
    H = H + 1j * xi2 * swap - 1j * np.conj(xi2) * swap.conj().T
    return FockOperator(H.tocsr(), layout)


def build_degenerate_hamiltonian(c, layout2: ModeLayout) -> FockOperator:
    """Single-cavity variant ``H = i xi1 a^dag c^dag - i xi1* a c + i xi2 a^dag c - i xi2* a c^dag``."""
    if layout2.n_modes != 2:
        raise ValueError("degenerate Hamiltonian needs a two-mode (cavity, spin) layout")
    a = mode_annihilator(layout2, 0).matrix
    cc = mode_annihilator(layout2, 1).matrix
    xi1, xi2 = coupling_pair(c)
    pair = a.conj().T @ cc.conj().T
    swap = a.conj().T @ cc
    H = 1j * xi1 * pair - 1j * np.conj(xi1) * pair.conj().T
    H = H + 1j * xi2 * swap - 1j * np.conj(xi2) * swap.conj().T
    return FockOperator(H.tocsr(), layout2)


def conserved_number_operator(layout: ModeLayout) -> FockOperator:
    """The constant of motion ``a2^dag a2 - a1^dag a1 + c^dag c`` (diagonal)."""
    occ = layout.occupation_arrays()
    diag = occ[1] - occ[0] + occ[2]
    return FockOperator(sp.diags(diag.astype(complex), 0, format="csr"), layout)


@dataclass
class Trajectory:
    """Sampled states of a closed evolution with per-sample diagnostics."""

    times: list
    states: list
    occupations: list  # (n1, n2, n3) per sample
    zeta12: list
    leakage: list  # total population with any mode at its top level
    norms: list
    warnings: list = field(default_factory=list)


def _hermiticity_check(H: sp.spmatrix):
    delta = abs(H - H.conj().T)
    scale = max(1.0, abs(H).max())
    if delta.nnz and delta.max() > 1e-12 * scale:
        raise ValueError("Hamiltonian is not Hermitian")


def _expm_lanczos(H, psi, dt, tol, m_max=90):
    """psi -> exp(-i H dt) psi for Hermitian sparse H, by Lanczos iteration.

    The a-posteriori error estimate is the standard last-component bound; if
    the Krylov space saturates without converging the step is halved.
    """
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        return psi
    V = [psi / nrm]
    alphas, betas = [], []
    w = H @ V[0]
    alphas.append(np.vdot(V[0], w).real)
    w = w - alphas[0] * V[0]
    m = 1
    while True:
        b = np.linalg.norm(w)
        if b < 1e-14:
            break  # invariant subspace: result exact
        if m >= m_max:
            half = _expm_lanczos(H, psi, dt / 2.0, tol / 2.0, m_max)
            return _expm_lanczos(H, half, dt / 2.0, tol / 2.0, m_max)
        betas.append(b)
        V.append(w / b)
        w = H @ V[m]
        alphas.append(np.vdot(V[m], w).real)
        w = w - alphas[m] * V[m] - betas[m - 1] * V[m - 1]
        m += 1
        if m >= 4 and m % 2 == 0:
            T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
            small = sla.expm(-1j * dt * T)[:, 0]
            if b * abs(small[-1]) < tol:
                break
    T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
    small = sla.expm(-1j * dt * T)[:, 0]
    return nrm * (np.column_stack(V) @ small)


class _DensePropagator:
    """Cache of dense exp(-i H dt) blocks keyed by the step length."""

    def __init__(self, H):
        self.H = H.toarray()
        self.cache = {}

    def step(self, psi, dt):
        key = round(dt, 18)
        if key not in self.cache:
            self.cache[key] = sla.expm(-1j * dt * self.H)
        return self.cache[key] @ psi


def evolve_state(
    H: FockOperator,
    psi0: FockState,
    times,
    method: str = "auto",
    substep: float | None = None,
    step_tol: float = 1e-10,
    leakage_threshold: float = _LEAKAGE_THRESHOLD,
) -> Trajectory:
    """Evolve ``|psi(t)> = exp(-i H t) |psi0>`` and record diagnostics per sample.

    Parameters
    ----------
    H : FockOperator
        Hermitian generator.
    psi0 : FockState
        Initial state on the same layout.
    times : sequence of float
        Sorted ascending, starting at 0.
    method : {"auto", "dense", "krylov"}
        "auto" selects dense scaling-and-squaring up to composite dimension
        4096 and the Lanczos stepper above.
    substep : float, optional
        Maximum Krylov step; callers working at oscillation rate ``theta``
        pass ``0.01 / theta``.  Defaults to the sample spacing.
    step_tol : float
        Per-step Krylov tolerance.
    leakage_threshold : float
        Top-level population above which a truncation warning is attached.

    Raises
    ------
    IntegrationError
        If the norm drifts by more than 1e-8 in one step.
    """
    if H.layout != psi0.layout:
        raise ValueError("Hamiltonian and state layouts differ")
    times = [float(t) for t in times]
    if not times or times[0] != 0.0:
        raise ValueError("sample times must start at 0")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("sample times must be strictly ascending")
    _hermiticity_check(H.matrix)

    layout = H.layout
    if method == "auto":
        method = "dense" if layout.dim <= _DENSE_DIM_LIMIT else "krylov"
    if method not in ("dense", "krylov"):
        raise ValueError(f"unknown evolution method {method!r}")

    occ = layout.occupation_arrays()
    boundary = top_level_mask(layout)
    dense = _DensePropagator(H.matrix) if method == "dense" else None

    traj = Trajectory([], [], [], [], [], [])
    psi = psi0.amplitudes.copy()
    prev_t = 0.0
    warned = False
    for t in times:
        gap = t - prev_t
        if gap > 0:
            if dense is not None:
                new = dense.step(psi, gap)
            else:
                h = gap if substep is None else min(substep, gap)
                nsub = max(1, int(np.ceil(gap / h - 1e-12)))
                dt = gap / nsub
                new = psi
                for _ in range(nsub):
                    new = _expm_lanczos(H.matrix, new, dt, step_tol)
            drift = abs(np.linalg.norm(new) - np.linalg.norm(psi))
            if drift > _NORM_DRIFT_PER_STEP:
                raise IntegrationError(
                    f"norm drifted by {drift:.3e} over one step (limit {_NORM_DRIFT_PER_STEP:g})"
                )
            psi = new
        prev_t = t

        p = np.abs(psi) ** 2
        n1 = float(p @ occ[0]) if layout.n_modes >= 1 else 0.0
        n2 = float(p @ occ[1]) if layout.n_modes >= 2 else 0.0
        n3 = float(p @ occ[2]) if layout.n_modes >= 3 else 0.0
        state = FockState(psi.copy(), layout)
        leak = float(p[boundary].sum())
        traj.times.append(t)
        traj.states.append(state)
        traj.occupations.append((n1, n2, n3))
        traj.zeta12.append(relative_number_squeezing(state) if layout.n_modes == 3 else float("nan"))
        traj.leakage.append(leak)
        traj.norms.append(float(np.linalg.norm(psi)))
        if leak > leakage_threshold and not warned:
            msg = (
                f"top-level population {leak:.3e} exceeded {leakage_threshold:g} "
                f"at t={t:.6g}; truncation may bias observables"
            )
            traj.warnings.append(msg)
            warnings.warn(msg, TruncationWarning, stacklevel=2)
            warned = True
    return traj


def relative_number_squeezing(state: FockState) -> float:
    """``Var(n1 - n2) / (n1 + n2)`` for a three-mode state.

    Number operators are diagonal in the Fock basis, so this is a direct
    fourth-moment computation with no Gaussian assumption.  Returns the
    independent-states reference value 1 when the denominator is below 1e-14.
    """
    layout = state.layout
    if layout.n_modes != 3:
        raise ValueError("relative number squeezing expects a three-mode layout")
    occ = layout.occupation_arrays()
    p = np.abs(state.amplitudes) ** 2
    diff = (occ[0] - occ[1]).astype(float)
    n1 = float(p @ occ[0])
    n2 = float(p @ occ[1])
    den = n1 + n2
    if den < 1e-14:
        return 1.0
    mean = float(p @ diff)
    var = float(p @ diff**2) - mean**2
    return var / den


def target_state(layout: ModeLayout, r: float) -> FockState:
    """The two-mode squeezed target over ``|n, n>`` tensored with spin vacuum."""
    if layout.n_modes != 3:
        raise ValueError("target state expects a three-mode layout")
    n_max = min(layout.dims[0], layout.dims[1]) - 1
    amps = closed_form.tmss_amplitudes(r, n_max)
    psi = np.zeros(layout.dim, dtype=complex)
    for n in range(n_max + 1):
        psi[layout.index((n, n, 0))] = amps[n]
    return FockState(psi, layout)


def fidelity_with_target(state: FockState, r: float) -> float:
    """Overlap ``|<target|state>|^2`` with the magnitude-normalized target."""
    if r <= 1:
        raise ValueError("r must exceed 1")
    tgt = target_state(state.layout, r)
    return float(abs(np.vdot(tgt.amplitudes, state.amplitudes)) ** 2)


def analytic_state(c: EffectiveCouplings, t: float, layout: ModeLayout, tail_tol=1e-6) -> FockState:
    """Closed-form evolved state embedded on the given layout.

    The amplitude table entry (m, n) populates the basis state
    ``(m + n, n, m)``; entries outside the layout are dropped, so the result
    is truncated the same way as the dynamical route and renormalized there.
    """
    if layout.n_modes != 3:
        raise ValueError("analytic state expects a three-mode layout")
    d1, d2, d3 = layout.dims
    table = closed_form.evolved_amplitudes(c, t, m_max=d3 - 1, n_max=d2 - 1, tail_tol=tail_tol)
    psi = np.zeros(layout.dim, dtype=complex)
    for m in range(d3):
        for n in range(d2):
            if m + n < d1:
                psi[layout.index((m + n, n, m))] = table[m, n]
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("layout retains none of the analytic state")
    return FockState(psi / nrm, layout)


def gauge_phase(state: FockState) -> FockState:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    amps = state.amplitudes
    k = int(np.argmax(np.abs(amps)))
    ph = amps[k] / abs(amps[k]) if amps[k] != 0 else 1.0
    return FockState(amps / ph, state.layout)


def quadrature_variances(state: FockState, mode: int, phases) -> np.ndarray:
    """``Var((a e^{-i phi} + a^dag e^{i phi}) / sqrt 2)`` on a grid of phases.

    The vacuum reference level is 1/2.
    """
    layout = state.layout
    a = mode_annihilator(layout, mode).matrix
    psi = state.amplitudes
    apsi = a @ psi
    n_exp = float(np.vdot(apsi, apsi).real)
    aa = complex(np.vdot(psi, a @ apsi))
    a_mean = complex(np.vdot(psi, apsi))
    phases = np.asarray(phases, dtype=float)
    second = 0.5 * (1.0 + 2.0 * n_exp + 2.0 * (np.exp(-2j * phases) * aa).real)
    mean = np.sqrt(2.0) * (np.exp(-1j * phases) * a_mean).real
    return second - mean**2


def degenerate_mode_evolve(
    c,
    layout2: ModeLayout,
    t: float,
    phase_samples: int,
    method: str = "auto",
    substep: float | None = None,
) -> float:
    """Minimum cavity quadrature variance of the degenerate evolution from vacuum.

    Evolves the single-cavity variant to time ``t`` and minimizes the
    quadrature variance over a grid of ``phase_samples`` phases in [0, pi).
    """
    if phase_samples < 1:
        raise ValueError("phase_samples must be positive")
    H = build_degenerate_hamiltonian(c, layout2)
    traj = evolve_state(H, vacuum_state(layout2), [0.0, t] if t > 0 else [0.0],
                        method=method, substep=substep)
    state = traj.states[-1]
    phis = np.arange(phase_samples) * np.pi / phase_samples
    return float(np.min(quadrature_variances(state, 0, phis)))
