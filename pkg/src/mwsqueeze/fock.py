"""Operators and state vectors on a truncated multimode Fock space.

Basis ordering is row-major over the per-mode occupation numbers with mode 0
slowest: the composite index of ``(n_0, n_1, ..., n_{k-1})`` is
``((n_0 * d_1 + n_1) * d_2 + n_2) * ...``.  This ordering is fixed so that
amplitude dumps are comparable across computational routes.

Operators are stored sparse (CSR); states are dense complex vectors.
Truncation is silent: a ladder operator simply has no matrix element out of
the top level.  Monitoring boundary population is the caller's job via
:func:`top_level_mask`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "ModeLayout",
    "FockOperator",
    "FockState",
    "mode_annihilator",
    "mode_number",
    "embed_product",
    "expectation",
    "vacuum_state",
    "basis_state",
    "top_level_mask",
]


@dataclass(frozen=True)
class ModeLayout:
    """Truncation dimensions of the bosonic modes spanning the composite space.

    The canonical layout for the three-oscillator model is
    ``ModeLayout((d_cavity1, d_cavity2, d_spin))``; two-mode layouts are used
    for the degenerate (single cavity) variant.
    """

    dims: tuple

    def __init__(self, dims):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1:
            raise ValueError("layout needs at least one mode")
        if any(d < 2 for d in dims):
            raise ValueError(f"every mode dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_modes(self):
        return len(self.dims)

    @property
    def dim(self):
        """Total composite dimension (product of the per-mode dimensions)."""
        out = 1
        for d in self.dims:
            out *= d
        return out

    def index(self, occupations):
        """Composite basis index of the product Fock state ``|n_0, n_1, ...>``."""
        if len(occupations) != self.n_modes:
            raise ValueError("occupation tuple length does not match layout")
        idx = 0
        for n, d in zip(occupations, self.dims):
            if not 0 <= n < d:
                raise ValueError(f"occupation {n} outside [0, {d})")
            idx = idx * d + n
        return idx

    def occupation_arrays(self):
        """Per-mode occupation number of every composite basis state.

        Returns a list of ``n_modes`` integer arrays of length ``dim``; entry
        ``k`` of array ``m`` is the mode-``m`` occupation of basis state ``k``.
        """
        grids = np.unravel_index(np.arange(self.dim), self.dims)
        return [g.astype(np.int64) for g in grids]


@dataclass(frozen=True)
class FockOperator:
    """A sparse operator on the composite space together with its layout."""

    matrix: sp.spmatrix
    layout: ModeLayout

    def __post_init__(self):
        if self.matrix.shape != (self.layout.dim, self.layout.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match layout dimension {self.layout.dim}"
            )

    def dag(self):
        return FockOperator(self.matrix.conj().T.tocsr(), self.layout)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            self._check_layout(other.layout)
            return FockOperator((self.matrix @ other.matrix).tocsr(), self.layout)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, FockOperator):
            self._check_layout(other.layout)
            return FockOperator((self.matrix + other.matrix).tocsr(), self.layout)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, FockOperator):
            self._check_layout(other.layout)
            return FockOperator((self.matrix - other.matrix).tocsr(), self.layout)
        return NotImplemented

    def __rmul__(self, scalar):
        return FockOperator((scalar * self.matrix).tocsr(), self.layout)

    def _check_layout(self, other_layout):
        if other_layout != self.layout:
            raise ValueError("operators act on different layouts")


@dataclass(frozen=True)
class FockState:
    """A dense state vector on the composite space together with its layout."""

    amplitudes: np.ndarray
    layout: ModeLayout

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.layout.dim,):
            raise ValueError(
                f"amplitude vector length {amp.shape} does not match layout dimension {self.layout.dim}"
            )
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


def _ladder(dim):
    # annihilation on a single mode: <n-1| a |n> = sqrt(n)
    return sp.diags(np.sqrt(np.arange(1, dim)), 1, format="csr", dtype=complex)


def _embed(layout, factors):
    """kron-embed {mode: single-mode sparse matrix} with identities elsewhere."""
    out = None
    for mode, d in enumerate(layout.dims):
        mat = factors.get(mode, sp.identity(d, format="csr", dtype=complex))
        out = mat if out is None else sp.kron(out, mat, format="csr")
    return out.tocsr()


def mode_annihilator(layout: ModeLayout, mode: int) -> FockOperator:
    """Annihilation operator of one mode, identity on the others.

    Matrix elements are the standard ``sqrt(n)`` on the first subdiagonal of
    the chosen mode's factor; the top truncation level has no outgoing
    element, so ``[a, a^dag] = 1 - (top-level projector)`` on that mode.
    """
    if not 0 <= mode < layout.n_modes:
        raise ValueError(f"mode index {mode} outside 0..{layout.n_modes - 1}")
    return FockOperator(_embed(layout, {mode: _ladder(layout.dims[mode])}), layout)


def mode_number(layout: ModeLayout, mode: int) -> FockOperator:
    """Number operator of one mode (diagonal), identity on the others."""
    if not 0 <= mode < layout.n_modes:
        raise ValueError(f"mode index {mode} outside 0..{layout.n_modes - 1}")
    n_diag = sp.diags(np.arange(layout.dims[mode], dtype=float), 0, format="csr", dtype=complex)
    return FockOperator(_embed(layout, {mode: n_diag}), layout)


def embed_product(layout: ModeLayout, ops) -> FockOperator:
    """Tensor product of single-mode factors with identity on unspecified modes.

    Parameters
    ----------
    layout : ModeLayout
    ops : iterable of (mode, matrix)
        At most one factor per mode.  Each matrix must be the single-mode
        factor (dimension ``layout.dims[mode]``), dense or sparse.

    The result is independent of the order in which distinct modes are
    listed; an empty list gives the identity.
    """
    factors = {}
    for mode, mat in ops:
        if not 0 <= mode < layout.n_modes:
            raise ValueError(f"mode index {mode} outside 0..{layout.n_modes - 1}")
        if mode in factors:
            raise ValueError(f"duplicate factor for mode {mode}")
        mat = sp.csr_matrix(mat, dtype=complex)
        d = layout.dims[mode]
        if mat.shape != (d, d):
            raise ValueError(f"factor for mode {mode} must be {d}x{d}, got {mat.shape}")
        factors[mode] = mat
    return FockOperator(_embed(layout, factors), layout)


def expectation(state: FockState, op: FockOperator) -> complex:
    """Expectation value <psi|O|psi>.

    Real to within roundoff when ``O`` is Hermitian and the state normalized.
    """
    if state.layout != op.layout:
        raise ValueError("state and operator layouts differ")
    psi = state.amplitudes
    return complex(np.vdot(psi, op.matrix @ psi))


def vacuum_state(layout: ModeLayout) -> FockState:
    psi = np.zeros(layout.dim, dtype=complex)
    psi[0] = 1.0
    return FockState(psi, layout)


def basis_state(layout: ModeLayout, occupations) -> FockState:
    """Product Fock state ``|n_0, n_1, ...>``."""
    psi = np.zeros(layout.dim, dtype=complex)
    psi[layout.index(occupations)] = 1.0
    return FockState(psi, layout)


def top_level_mask(layout: ModeLayout) -> np.ndarray:
    """Boolean mask of basis states with any mode at its top truncation level.

    The probability mass on these states is the truncation-leakage diagnostic
    used by the evolution routines.
    """
    occ = layout.occupation_arrays()
    mask = np.zeros(layout.dim, dtype=bool)
    for m, arr in enumerate(occ):
        mask |= arr == layout.dims[m] - 1
    return mask
