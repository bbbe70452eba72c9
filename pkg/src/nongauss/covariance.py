"""Heisenberg-picture moments and the 4x4 covariance matrix.

Under the factored evolution the mode operators map to

    a(tau) = e^{-i theta_a (Na + 1/2)} D_b(F*) a
    b(tau) = e^{-i tau} (b + F* Na)

in the frame rotating at the cavity frequency (the global optical phase
never enters second moments).  For a coherent optical input and either a
coherent or a displaced-thermal mechanical input, every first and second
moment then has a closed form, and the covariance matrix in the ordering
X = (a, b, a†, b†) follows from

    sigma_nm = <{X_n, X_m†}> - 2 <X_n><X_m†>,

normalised so any product of coherent states gives the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .coefficients import EvolutionCoefficients
from .errors import InvalidParameter, InvariantViolation

BASIS = "a b adag bdag"


@dataclass(frozen=True)
class CoherentMech:
    """Mechanics prepared in a coherent state |mu_m>."""

    mu_m: complex = 0j


@dataclass(frozen=True)
class ThermalMech:
    """Mechanics prepared in a thermal state with mean occupation nbar."""

    nbar: float = 0.0

    def __post_init__(self):
        if self.nbar < 0:
            raise InvalidParameter("nbar must be >= 0")


Mechanics = Union[CoherentMech, ThermalMech]


@dataclass(frozen=True)
class InitialState:
    """Optical coherent amplitude plus the mechanical preparation."""

    mu_c: complex
    mechanics: Mechanics = CoherentMech(0j)


@dataclass(frozen=True)
class Moments:
    """First and second moments of the two modes at one time.

    na and nb are stored complex like the rest but are real and
    non-negative for any physical state; na equals |mu_c|^2 exactly
    because the photon number commutes with the interaction.
    """

    a1: complex
    b1: complex
    a2: complex
    b2: complex
    na: complex
    nb: complex
    ab: complex
    ab_dag: complex


@dataclass(frozen=True)
class CovarianceMatrix:
    """4x4 second-moment matrix in the ordering (a, b, a†, b†)."""

    sigma: np.ndarray
    basis: str = BASIS


def _optical_core(coeffs: EvolutionCoefficients, mu_c: complex):
    """Shared optical factors of the coherent and thermal moments."""
    th = coeffs.theta_a
    f = coeffs.f_complex
    mc2 = abs(mu_c) ** 2
    af2 = abs(f) ** 2
    k0 = (np.exp(-0.5j * th) * np.exp(mc2 * (np.exp(-1j * th) - 1.0))
          * np.exp(-0.5 * af2))
    a2_core = (np.exp(-2j * th) * np.exp(mc2 * (np.exp(-2j * th) - 1.0))
               * np.exp(-2.0 * af2))
    return th, f, mc2, af2, k0, a2_core


def moments_coherent(coeffs: EvolutionCoefficients, mu_c: complex,
                     mu_m: complex) -> Moments:
    """Moments for the product of optical and mechanical coherent states."""
    mu_c = complex(mu_c)
    mu_m = complex(mu_m)
    tau = coeffs.tau
    th, f, mc2, af2, k0, a2_core = _optical_core(coeffs, mu_c)
    fc = np.conj(f)
    kick = np.exp(fc * np.conj(mu_m) - f * mu_m)  # unit modulus
    k = k0 * kick
    b_shift = mu_m + fc * mc2
    return Moments(
        a1=k * mu_c,
        b1=np.exp(-1j * tau) * (mu_m + fc * mc2),
        a2=a2_core * kick**2 * mu_c**2,
        b2=np.exp(-2j * tau) * ((mu_m + fc * mc2) ** 2 + fc**2 * mc2),
        na=mc2 + 0j,
        nb=abs(b_shift) ** 2 + af2 * mc2 + 0j,
        ab=k * mu_c * np.exp(-1j * tau) * (mu_m + (mc2 * np.exp(-1j * th) + 1.0) * fc),
        ab_dag=k * mu_c * np.exp(1j * tau) * (np.conj(mu_m) + mc2 * np.exp(-1j * th) * f),
    )


def moments_thermal(coeffs: EvolutionCoefficients, mu_c: complex,
                    nbar: float) -> Moments:
    """Moments for a coherent optical input and thermal mechanics.

    The Gaussian averages over the thermal coherent-state distribution
    are carried out in closed form; in particular

        <e^{F* b* - F b}>_th = e^{-nbar |F|^2},
        <b  e^{F* b* - F b}>_th =  nbar F* e^{-nbar |F|^2},
        <b* e^{F* b* - F b}>_th = -nbar F  e^{-nbar |F|^2}.

    The thermal occupation also enters <b†b> additively: nbar = 0
    reproduces :func:`moments_coherent` with mu_m = 0 exactly.
    """
    if nbar < 0:
        raise InvalidParameter("nbar must be >= 0")
    mu_c = complex(mu_c)
    tau = coeffs.tau
    th, f, mc2, af2, k0, a2_core = _optical_core(coeffs, mu_c)
    fc = np.conj(f)
    damp = np.exp(-nbar * af2)
    k = k0 * damp
    return Moments(
        a1=k * mu_c,
        b1=np.exp(-1j * tau) * (fc * mc2),
        a2=a2_core * np.exp(-4.0 * nbar * af2) * mu_c**2,
        b2=np.exp(-2j * tau) * ((fc * mc2) ** 2 + fc**2 * mc2),
        na=mc2 + 0j,
        nb=nbar + (abs(fc * mc2) ** 2 + af2 * mc2) + 0j,
        ab=k * mu_c * np.exp(-1j * tau) * ((mc2 * np.exp(-1j * th) + (nbar + 1.0)) * fc),
        ab_dag=k * mu_c * np.exp(1j * tau) * ((mc2 * np.exp(-1j * th) - nbar) * f),
    )


def moments_for_initial(coeffs: EvolutionCoefficients,
                        initial: InitialState) -> Moments:
    """Dispatch on the mechanical preparation."""
    if isinstance(initial.mechanics, ThermalMech):
        return moments_thermal(coeffs, initial.mu_c, initial.mechanics.nbar)
    return moments_coherent(coeffs, initial.mu_c, initial.mechanics.mu_m)


def _assemble(d_a, d_b, z_a, z_b, z_p, z_x) -> np.ndarray:
    # Hermitian layout with sigma_31 = z_a, sigma_42 = z_b,
    # sigma_21 = z_p, sigma_41 = z_x.  The anticommutator definition
    # forces the equal pairs sigma_34 = sigma_21 and sigma_32 = sigma_41
    # (conjugating both mode slots undoes itself), while opposite corners
    # relate by conjugation.
    cj = np.conj
    return np.array([
        [d_a,     cj(z_p), cj(z_a), cj(z_x)],
        [z_p,     d_b,     cj(z_x), cj(z_b)],
        [z_a,     z_x,     d_a,     z_p],
        [z_x,     z_b,     cj(z_p), d_b],
    ], dtype=complex)


def covariance_from_moments(m: Moments) -> CovarianceMatrix:
    """Build the covariance matrix from a full moment set.

    Raises :class:`InvariantViolation` if the implied diagonal entries
    carry an imaginary part above 1e-10, which signals an inconsistent
    moment set rather than roundoff.
    """
    d_a = 1.0 + 2.0 * m.na - 2.0 * abs(m.a1) ** 2
    d_b = 1.0 + 2.0 * m.nb - 2.0 * abs(m.b1) ** 2
    if abs(np.imag(d_a)) > 1e-10 or abs(np.imag(d_b)) > 1e-10:
        raise InvariantViolation(
            f"covariance diagonal not real: Im = ({np.imag(d_a):.2e}, {np.imag(d_b):.2e})")
    z_a = 2.0 * m.a2 - 2.0 * m.a1**2
    z_b = 2.0 * m.b2 - 2.0 * m.b1**2
    z_p = 2.0 * m.ab_dag - 2.0 * m.a1 * np.conj(m.b1)
    z_x = 2.0 * m.ab - 2.0 * m.a1 * m.b1
    return CovarianceMatrix(_assemble(np.real(d_a), np.real(d_b), z_a, z_b, z_p, z_x))


def covariance_coherent_direct(coeffs: EvolutionCoefficients, mu_c: complex,
                               mu_m: complex) -> CovarianceMatrix:
    """Covariance entries transcribed directly in closed form.

    Cross-check only: the diagonal entry keeps a unit-modulus factor
    exp(F* mu_m* - F mu_m) that a real quantity cannot carry, so this
    route is only meaningful at mu_m = 0, where it must agree with
    :func:`covariance_from_moments` entrywise.  The moments route is the
    authoritative one.
    """
    mu_c = complex(mu_c)
    mu_m = complex(mu_m)
    tau = coeffs.tau
    th = coeffs.theta_a
    f = coeffs.f_complex
    fc = np.conj(f)
    mc2 = abs(mu_c) ** 2
    af2 = abs(f) ** 2
    kick = np.exp(fc * np.conj(mu_m) - f * mu_m)
    e_th = np.exp(-1j * th)

    d_a = 1.0 + 2.0 * mc2 * (1.0 - np.exp(-4.0 * mc2 * np.sin(0.5 * th) ** 2)
                             * np.exp(-af2) * kick)
    z_a = 2.0 * mu_c**2 * e_th * np.exp(-af2) * (
        e_th * np.exp(mc2 * (np.exp(-2j * th) - 1.0)) * np.exp(-af2) * kick**2
        - np.exp(2.0 * mc2 * (e_th - 1.0)) * kick**2)
    d_b = 1.0 + 2.0 * mc2 * af2
    z_b = 2.0 * np.exp(-2j * tau) * mc2 * fc**2
    shared = (np.exp(-0.5j * th) * np.exp(mc2 * (e_th - 1.0))
              * np.exp(-0.5 * af2) * kick)
    z_p = 2.0 * f * mu_c * mc2 * (e_th - 1.0) * np.exp(1j * tau) * shared
    z_x = 2.0 * fc * mu_c * (mc2 * (e_th - 1.0) + 1.0) * np.exp(-1j * tau) * shared
    return CovarianceMatrix(_assemble(d_a, d_b, z_a, z_b, z_p, z_x))


def covariance_large_mu(coeffs: EvolutionCoefficients, mu_c: complex) -> CovarianceMatrix:
    """Large-|mu_c| limit of the covariance matrix.

    Away from theta_a = 2 pi n the mode-mixing entries are suppressed by
    exp(-|mu_c|^2 ...) factors and only the diagonals plus the mechanical
    squeezing entry survive.  Documented validity regime |mu_c| >= 1.
    """
    mu_c = complex(mu_c)
    mc2 = abs(mu_c) ** 2
    f = coeffs.f_complex
    af2 = abs(f) ** 2
    d_a = 1.0 + 2.0 * mc2 * (1.0 - np.exp(-4.0 * mc2 * np.sin(0.5 * coeffs.theta_a) ** 2)
                             * np.exp(-af2))
    d_b = 2.0 * mc2 * af2 + 1.0
    z_b = 2.0 * mc2 * np.exp(-2j * coeffs.tau) * np.conj(f) ** 2
    return CovarianceMatrix(_assemble(np.real(d_a), np.real(d_b), 0j, z_b, 0j, 0j))
