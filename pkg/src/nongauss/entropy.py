"""Symplectic spectra, Gaussian entropies and the non-Gaussianity measure.

The measure is delta = S(rho_G) - S(rho): the entropy of the Gaussian
state sharing the first and second moments of rho, minus the entropy of
rho itself.  It vanishes exactly when rho is Gaussian.  For closed
dynamics S(rho(tau)) = S(rho(0)), which is 0 for coherent inputs and the
thermal entropy s_V(2 nbar + 1) for thermal mechanics, so the whole
measure reduces to covariance-matrix data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceMatrix, InitialState, ThermalMech
from .errors import DomainError, InvalidParameter, NonPhysicalState

#: eigenvalues in [1 - CLAMP_TOL, 1) are treated as 1 (roundoff);
#: below 1 - ERROR_TOL the matrix violates the uncertainty relation
CLAMP_TOL = 1e-9
ERROR_TOL = 1e-6

# unitary map from (a, b, a†, b†) to quadratures (q_a, p_a, q_b, p_b)
# with [q, p] = i, so the vacuum covariance stays the identity
_TO_QUAD = np.array([
    [1, 0, 1, 0],
    [-1j, 0, 1j, 0],
    [0, 1, 0, 1],
    [0, -1j, 0, 1j],
], dtype=complex) / np.sqrt(2.0)

_I_OMEGA = np.diag([1.0, 1.0, -1.0, -1.0])  # i * diag(-i,-i,i,i)


@dataclass(frozen=True)
class SymplecticPair:
    """The two symplectic eigenvalues, ordered nu_plus >= nu_minus >= 1."""

    nu_plus: float
    nu_minus: float


@dataclass(frozen=True)
class DeltaResult:
    """Non-Gaussianity with its entropy bookkeeping.

    ``entropy_initial`` is the entropy subtracted from the Gaussian
    reference entropy: the (conserved) initial entropy for closed
    dynamics, or the current von Neumann entropy for the Fock engine's
    open trajectories.
    """

    delta: float
    entropy_gaussian: float
    entropy_initial: float
    pair: SymplecticPair


def _clamp_nu(nu: float) -> float:
    if nu < 1.0 - ERROR_TOL:
        raise NonPhysicalState(f"symplectic eigenvalue {nu!r} < 1 beyond tolerance")
    if nu < 1.0:
        if nu >= 1.0 - CLAMP_TOL:
            return 1.0
        return nu  # grey zone: left as-is, rejected later by binary_entropy
    return nu


def symplectic_eigenvalues(sigma: CovarianceMatrix) -> SymplecticPair:
    """Moduli of the eigenvalues of i Omega sigma, deduplicated to a pair.

    The four eigenvalues come in +/- pairs; the two moduli are averaged
    over their duplicates to suppress solver noise, clamped at 1 within
    tolerance, and returned ordered.
    """
    nus = np.sort(np.abs(np.linalg.eigvals(_I_OMEGA @ sigma.sigma)))
    nu_minus = _clamp_nu(0.5 * (nus[0] + nus[1]))
    nu_plus = _clamp_nu(0.5 * (nus[2] + nus[3]))
    return SymplecticPair(nu_plus=float(nu_plus), nu_minus=float(nu_minus))


def symplectic_eigenvalues_invariant(sigma: CovarianceMatrix) -> SymplecticPair:
    """Secondary route through the quadrature-basis symplectic invariants.

    Transforms to (q_a, p_a, q_b, p_b), then uses
    2 nu_pm^2 = Delta +/- sqrt(Delta^2 - 4 det sigma) with
    Delta = det A + det B + 2 det C.  Kept as an independent check of the
    spectral route; the two must agree to 1e-10 on physical matrices.
    """
    sq = _TO_QUAD @ sigma.sigma @ _TO_QUAD.conj().T
    if np.max(np.abs(sq.imag)) > 1e-8:
        raise NonPhysicalState("quadrature covariance has a non-real part")
    sq = sq.real
    det_a = np.linalg.det(sq[:2, :2])
    det_b = np.linalg.det(sq[2:, 2:])
    det_c = np.linalg.det(sq[:2, 2:])
    big_delta = det_a + det_b + 2.0 * det_c
    disc = max(big_delta**2 - 4.0 * np.linalg.det(sq), 0.0)
    root = math.sqrt(disc)
    nu_plus = math.sqrt(max(0.5 * (big_delta + root), 0.0))
    nu_minus = math.sqrt(max(0.5 * (big_delta - root), 0.0))
    return SymplecticPair(nu_plus=float(_clamp_nu(nu_plus)),
                          nu_minus=float(_clamp_nu(nu_minus)))


def binary_entropy(x: float) -> float:
    """Entropy s_V(x) of a thermal mode with symplectic eigenvalue x.

    s_V(x) = ((x+1)/2) ln((x+1)/2) - ((x-1)/2) ln((x-1)/2), with the
    continuous limit s_V(1) = 0.
    """
    if x < 1.0 - CLAMP_TOL:
        raise DomainError(f"binary_entropy argument {x!r} < 1")
    if x <= 1.0:
        return 0.0
    xp = 0.5 * (x + 1.0)
    xm = 0.5 * (x - 1.0)
    return xp * math.log(xp) - xm * math.log(xm)


def gaussian_entropy(sigma: CovarianceMatrix) -> float:
    """Von Neumann entropy of the Gaussian state with covariance sigma."""
    pair = symplectic_eigenvalues(sigma)
    return binary_entropy(pair.nu_plus) + binary_entropy(pair.nu_minus)


def initial_entropy(initial: InitialState) -> float:
    """Entropy of the initial state: 0 for coherent mechanics, the
    thermal entropy s_V(2 nbar + 1) otherwise."""
    if isinstance(initial.mechanics, ThermalMech):
        return binary_entropy(2.0 * initial.mechanics.nbar + 1.0)
    return 0.0


def delta(sigma: CovarianceMatrix, initial: InitialState) -> DeltaResult:
    """Non-Gaussianity of a closed trajectory from its covariance matrix.

    Uses S(rho(tau)) = S(rho(0)) (unitary invariance); the result is
    floored at 0 since tiny negative values are numerical artefacts.
    """
    pair = symplectic_eigenvalues(sigma)
    s_g = binary_entropy(pair.nu_plus) + binary_entropy(pair.nu_minus)
    s_0 = initial_entropy(initial)
    return DeltaResult(delta=max(0.0, s_g - s_0), entropy_gaussian=s_g,
                       entropy_initial=s_0, pair=pair)


def delta_small_mu(f_complex: complex, mu_c: complex) -> float:
    """Leading small-|mu_c| asymptotics of the measure:

        delta ~ -(1 + (1 - 2 e^{-|F|^2}) |F|^2) |mu_c|^2 ln|mu_c|.

    Documented validity regime |mu_c|^2 << 1 (not enforced).
    """
    amp = abs(mu_c)
    if amp == 0.0:
        return 0.0
    af2 = abs(f_complex) ** 2
    return -(1.0 + (1.0 - 2.0 * math.exp(-af2)) * af2) * amp**2 * math.log(amp)


def delta_large_mu(theta_a: float, f_complex: complex, mu_c: complex,
                   tau: float) -> tuple[float, float]:
    """Large-|mu_c| asymptotics of the measure.

    Returns ``(delta_tilde_full, delta_leading)`` where the full form is
    s_V(nu_plus) + s_V(nu_minus) with

        nu_plus  = 1 + 2|mu_c|^2 (1 - e^{-4 |mu_c|^2 sin^2(theta_a/2)} e^{-|F|^2})
        nu_minus = sqrt(4 |mu_c|^2 |F|^2 + 1)

    and the leading term is 4 ln|mu_c|.  ``tau`` is part of the interface
    for symmetry with the covariance construction; the phases it would
    contribute cancel in the eigenvalues.
    """
    mc2 = abs(mu_c) ** 2
    af2 = abs(f_complex) ** 2
    nu_plus = 1.0 + 2.0 * mc2 * (1.0 - math.exp(-4.0 * mc2 * math.sin(0.5 * theta_a) ** 2)
                                 * math.exp(-af2))
    nu_minus = math.sqrt(4.0 * mc2 * af2 + 1.0)
    full = binary_entropy(nu_plus) + binary_entropy(nu_minus)
    leading = 4.0 * math.log(abs(mu_c)) if mu_c != 0 else 0.0
    return full, leading


def entropy_expansion(delta_nu: float, regime: str) -> float:
    """Asymptotic expansions of s_V(1 + delta_nu).

    ``regime="small"`` returns x - x ln x with x = delta_nu / 2 (the
    leading log plus its first correction, accurate to O(x^2));
    ``regime="large"`` returns ln(delta_nu / 2) + 1.
    """
    if delta_nu < 0:
        raise InvalidParameter("delta_nu must be >= 0")
    x = 0.5 * delta_nu
    if regime == "small":
        if x == 0.0:
            return 0.0
        return x - x * math.log(x)
    if regime == "large":
        return math.log(x) + 1.0
    raise InvalidParameter(f"unknown regime {regime!r}")


def local_symplectic_eigenvalues(sigma: CovarianceMatrix) -> tuple[float, float]:
    """Symplectic eigenvalues of the two single-mode blocks,

        nu_A = sqrt(sigma_11^2 - |sigma_31|^2),
        nu_B = sqrt(sigma_22^2 - |sigma_42|^2).
    """
    s = sigma.sigma
    nu_a = math.sqrt(max(s[0, 0].real**2 - abs(s[2, 0]) ** 2, 0.0))
    nu_b = math.sqrt(max(s[1, 1].real**2 - abs(s[3, 1]) ** 2, 0.0))
    return _clamp_nu(nu_a), _clamp_nu(nu_b)


def entropy_difference_bound(sigma: CovarianceMatrix, subtracted_entropy: float) -> float:
    """max(0, |s_V(nu_A) - s_V(nu_B)| - subtracted_entropy).

    The subadditivity of entropy applied to the Gaussian reference makes
    this a lower bound on S(rho_G) - subtracted_entropy.
    """
    nu_a, nu_b = local_symplectic_eigenvalues(sigma)
    gap = abs(binary_entropy(nu_a) - binary_entropy(nu_b))
    return max(0.0, gap - subtracted_entropy)


def araki_lieb_witness(sigma: CovarianceMatrix, initial: InitialState) -> float:
    """Experimentally cheap lower bound on the non-Gaussianity.

    Only the two single-mode blocks of the covariance matrix enter:
    the witness is |s_V(nu_A) - s_V(nu_B)| minus the initial entropy,
    floored at 0.  It never exceeds :func:`delta` of the same state, and
    a nonzero value certifies non-Gaussianity without full tomography.
    """
    return entropy_difference_bound(sigma, initial_entropy(initial))
