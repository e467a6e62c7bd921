"""Closed-form solution of the three-oscillator dynamics from vacuum.

Everything here is evaluated directly from formulas, with no time stepping:
mode occupations, the factorized-propagator amplitude table of the evolved
state, the two-mode squeezed target state, the squeezing degree, and the
preparation time.  These serve as the reference values for the state-vector
and second-moment routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import CutoffError
from .params import EffectiveCouplings

__all__ = [
    "occupations_closed_form",
    "zeta12_closed_form",
    "PropagatorAmplitudes",
    "propagator_amplitudes",
    "evolved_amplitudes",
    "tmss_amplitudes",
    "squeezing_parameter",
    "t_pi",
    "photons_per_mode_at_t_pi",
    "suggest_cavity_cutoff",
    "suggest_spin_cutoff",
]


def occupations_closed_form(c: EffectiveCouplings, t: float):
    """Occupations ``(n1, n2, n3)`` of the closed dynamics from vacuum.

    With ``theta = sqrt(|xi2|^2 - |xi1|^2)``::

        n2 = (|xi1|^2 |xi2|^2 / theta^4) (cos(theta t) - 1)^2
        n3 = (|xi1|^2 / theta^2) sin^2(theta t)
        n1 = n2 + n3
    """
    x1 = abs(complex(c.xi1))
    x2 = abs(complex(c.xi2))
    th = c.theta
    phase = th * t
    n2 = (x1 * x2 / th**2) ** 2 * (math.cos(phase) - 1.0) ** 2
    n3 = (x1 / th) ** 2 * math.sin(phase) ** 2
    return n2 + n3, n2, n3


def zeta12_closed_form(c: EffectiveCouplings, t: float) -> float:
    """Relative-number-squeezing parameter of the evolved state, in closed form.

    On the reachable subspace the conserved combination
    ``n2 - n1 + n3 = 0`` makes ``n1 - n2`` equal to the spin number operator,
    and the spin marginal of the evolved state is thermal with mean ``n3``,
    so ``Var(n1 - n2) = n3 (1 + n3)`` and::

        zeta12 = n3 (1 + n3) / (n1 + n2)

    Returns the independent-states reference value 1 when ``n1 + n2`` is
    below 1e-14 (the t -> 0 limit).
    """
    n1, n2, n3 = occupations_closed_form(c, t)
    if n1 + n2 < 1e-14:
        return 1.0
    return n3 * (1.0 + n3) / (n1 + n2)


@dataclass(frozen=True)
class PropagatorAmplitudes:
    """Scalar amplitudes of the factorized propagator acting on vacuum.

    ``exp_alpha4 = 1/sqrt(1+n1)``, ``|alpha1| = sqrt(n3/(1+n1))``,
    ``alpha2 = sqrt(n2/(1+n1))``.  The square roots fix only magnitudes;
    for real non-negative couplings the pair correlation ``<a1 c>`` carries
    the sign of ``sin(theta t)``, so ``alpha1`` flips sign each half period
    while ``alpha2`` (whose correlation goes as ``1 - cos``) stays
    non-negative.  Without that sign the amplitude table disagrees with the
    evolved state beyond the first half period by a relative ``(-1)^m``.
    """

    alpha1: float
    alpha2: float
    exp_alpha4: float
    t: float


def propagator_amplitudes(c: EffectiveCouplings, t: float) -> PropagatorAmplitudes:
    n1, n2, n3 = occupations_closed_form(c, t)
    sign = 1.0 if math.sin(c.theta * t) >= 0.0 else -1.0
    return PropagatorAmplitudes(
        alpha1=sign * math.sqrt(n3 / (1.0 + n1)),
        alpha2=math.sqrt(n2 / (1.0 + n1)),
        exp_alpha4=1.0 / math.sqrt(1.0 + n1),
        t=t,
    )


def evolved_amplitudes(
    c: EffectiveCouplings,
    t: float,
    m_max: int,
    n_max: int,
    tail_tol: float = 1e-10,
) -> np.ndarray:
    """Amplitude table of the evolved state from vacuum.

    Entry ``[m, n]`` is the amplitude of the basis state with ``m + n``
    photons in cavity 1, ``n`` photons in cavity 2 and ``m`` collective spin
    excitations::

        amp(m, n) = exp_alpha4 * alpha1^m * alpha2^n * sqrt((m+n)! / (m! n!))

    The square-root binomial factor is evaluated through log-gamma so the
    table stays finite for ``m + n`` of several hundred.

    Raises
    ------
    CutoffError
        If the retained probability falls below ``1 - tail_tol``.
    """
    if m_max < 0 or n_max < 0:
        raise ValueError("cutoffs must be non-negative")
    pa = propagator_amplitudes(c, t)
    m = np.arange(m_max + 1)[:, None]
    n = np.arange(n_max + 1)[None, :]
    log_binom = 0.5 * (gammaln(m + n + 1.0) - gammaln(m + 1.0) - gammaln(n + 1.0))
    a1_mag = abs(pa.alpha1)
    with np.errstate(divide="ignore"):
        log_a1 = np.where(m > 0, m * np.log(a1_mag if a1_mag > 0 else 1.0), 0.0)
        log_a2 = np.where(n > 0, n * np.log(pa.alpha2 if pa.alpha2 > 0 else 1.0), 0.0)
    amps = pa.exp_alpha4 * np.exp(log_binom + log_a1 + log_a2)
    if pa.alpha1 < 0.0:
        amps[1::2, :] *= -1.0
    if pa.alpha1 == 0.0:
        amps[1:, :] = 0.0
    if pa.alpha2 == 0.0:
        amps[:, 1:] = 0.0
    retained = float(np.sum(amps**2))
    if retained < 1.0 - tail_tol:
        raise CutoffError(
            f"cutoffs (m_max={m_max}, n_max={n_max}) retain {retained:.12f} "
            f"of the norm; tail exceeds {tail_tol:g}"
        )
    return amps.astype(complex)


def tmss_amplitudes(r: float, n_max: int) -> np.ndarray:
    """Amplitudes of the two-mode squeezed target over ``|n, n>``.

    ``amp_n`` is proportional to ``(2r/(1+r^2))^n`` and the vector is
    magnitude-normalized over the truncation; the untruncated prefactor
    magnitude is ``(r^2-1)/(1+r^2)``.
    """
    if r <= 1:
        raise ValueError("r must exceed 1")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    q = 2.0 * r / (1.0 + r * r)
    amps = q ** np.arange(n_max + 1)
    amps /= np.linalg.norm(amps)
    return amps.astype(complex)


def squeezing_parameter(r: float) -> float:
    """Two-mode squeezing degree ``atanh(2r / (1 + r^2))``."""
    if r <= 1:
        raise ValueError("r must exceed 1")
    return math.atanh(2.0 * r / (1.0 + r * r))


def t_pi(c: EffectiveCouplings) -> float:
    """Instant ``pi / theta`` at which the spin decouples from the cavities."""
    return math.pi / c.theta


def photons_per_mode_at_t_pi(r: float) -> float:
    """Per-mode photon number ``4 r^2 / (r^2 - 1)^2`` of the prepared state."""
    if r <= 1:
        raise ValueError("r must exceed 1")
    return 4.0 * r * r / (r * r - 1.0) ** 2


def suggest_cavity_cutoff(r: float, tail_mass: float = 1e-10) -> int:
    """Smallest cavity ``n_max`` whose geometric target-state tail is below ``tail_mass``.

    Uses ``n_max >= log(tail_mass) / log(q)`` with ``q = (2r/(1+r^2))^2``.
    """
    if r <= 1:
        raise ValueError("r must exceed 1")
    if not 0 < tail_mass < 1:
        raise ValueError("tail_mass must lie in (0, 1)")
    q = (2.0 * r / (1.0 + r * r)) ** 2
    return int(math.ceil(math.log(tail_mass) / math.log(q)))


def suggest_spin_cutoff(r: float, tail_mass: float = 1e-10) -> int:
    """Smallest spin ``m_max`` bounding the thermal spin tail below ``tail_mass``.

    The spin marginal of the evolved state is thermal; its population ratio
    peaks at ``1/r^2``, so ``m_max >= log(tail_mass) / log(1/r^2)``.
    """
    if r <= 1:
        raise ValueError("r must exceed 1")
    if not 0 < tail_mass < 1:
        raise ValueError("tail_mass must lie in (0, 1)")
    return int(math.ceil(math.log(tail_mass) / (-2.0 * math.log(r))))
