"""Dimensionless coupling profiles g(tau) and trap-parameter conversion.

Everything downstream works in units of the mechanical frequency: time is
tau = omega_m * t and the coupling is g(tau) = g_lab(t) / omega_m.  Three
profile kinds are supported: constant, sinusoidally modulated
g(tau) = g0 * (1 + epsilon * sin(omega0 * tau)), and tabulated samples
interpolated with a monotone cubic (no overshoot between samples).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InvalidParameter

SPEED_OF_LIGHT = 299_792_458.0  # m / s
HBAR = 1.054_571_817e-34        # J s

CONSTANT = "constant"
MODULATED = "modulated"
TABULATED = "tabulated"


@dataclass(frozen=True)
class CouplingProfile:
    """Time profile of the dimensionless optomechanical coupling.

    Use the :meth:`constant`, :meth:`modulated` and :meth:`tabulated`
    constructors rather than filling fields by hand.
    """

    kind: str
    g0: float = 0.0
    epsilon: float = 0.0
    omega0: float = 0.0
    samples: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in (CONSTANT, MODULATED, TABULATED):
            raise InvalidParameter(f"unknown profile kind {self.kind!r}")
        if self.kind in (CONSTANT, MODULATED) and self.g0 < 0:
            raise InvalidParameter("g0 must be >= 0")
        if self.kind == MODULATED and self.omega0 < 0:
            raise InvalidParameter("omega0 must be >= 0")
        if self.kind == TABULATED:
            taus = np.asarray([t for t, _ in self.samples], dtype=float)
            if taus.size < 2:
                raise InvalidParameter("tabulated profile needs at least 2 samples")
            if not np.all(np.diff(taus) > 0):
                raise InvalidParameter("tabulated sample times must be strictly increasing")

    @classmethod
    def constant(cls, g0: float) -> "CouplingProfile":
        return cls(kind=CONSTANT, g0=float(g0))

    @classmethod
    def modulated(cls, g0: float, epsilon: float, omega0: float) -> "CouplingProfile":
        return cls(kind=MODULATED, g0=float(g0), epsilon=float(epsilon), omega0=float(omega0))

    @classmethod
    def tabulated(cls, samples) -> "CouplingProfile":
        return cls(kind=TABULATED, samples=tuple((float(t), float(g)) for t, g in samples))

    @cached_property
    def _interpolator(self) -> PchipInterpolator:
        taus = np.array([t for t, _ in self.samples])
        vals = np.array([g for _, g in self.samples])
        return PchipInterpolator(taus, vals, extrapolate=True)

    def value(self, tau):
        """Evaluate g(tau); accepts scalars or arrays."""
        if self.kind == CONSTANT:
            return self.g0 * np.ones_like(np.asarray(tau, dtype=float)) if np.ndim(tau) else self.g0
        if self.kind == MODULATED:
            return self.g0 * (1.0 + self.epsilon * np.sin(self.omega0 * np.asarray(tau)))
        return self._interpolator(tau)

    def breakpoints(self, tau: float):
        """Interior non-smooth points in (0, tau), used as quadrature hints."""
        if self.kind != TABULATED:
            return ()
        return tuple(t for t, _ in self.samples if 0.0 < t < tau)


@dataclass(frozen=True)
class TrapParameters:
    """Laboratory parameters of an optically levitated dielectric bead.

    All fields are SI: bead radius [m], mass density [kg/m^3], relative
    permittivity (> 1), trapping-laser intensity [W/m^2], trap beam waist
    [m], cavity length [m], cavity wavelength [m], cavity mode volume
    [m^3] (estimated from the cavity geometry when omitted), and the
    optical phase fixing the bead position in the intracavity standing
    wave [rad].
    """

    radius: float
    density: float
    epsilon_r: float
    intensity: float
    waist: float
    cavity_length: float
    wavelength: float
    mode_volume: float | None = None
    phase: float = np.pi / 2

    def __post_init__(self):
        for name in ("radius", "density", "epsilon_r", "intensity", "waist",
                     "cavity_length", "wavelength", "phase"):
            if getattr(self, name) <= 0:
                raise InvalidParameter(f"{name} must be positive")
        if self.mode_volume is not None and self.mode_volume <= 0:
            raise InvalidParameter("mode_volume must be positive")
        if self.epsilon_r <= 1:
            raise InvalidParameter("epsilon_r must exceed 1")


def trap_parameters_to_coupling(p: TrapParameters):
    """Convert trap parameters to (omega_m, g, g_tilde).

    The trapping frequency follows from the harmonic term of the
    Rayleigh-regime dipole energy of the bead in the Gaussian trap beam,

        omega_m^2 = 4 * I * eps_c / (rho * c * W0^2),

    with eps_c = 3 (eps_r - 1) / (eps_r + 2); the polarisability prefactor
    eps_0 cancels against the intensity I = c eps_0 E0^2 / 2.  The
    single-photon coupling of the standing-wave gradient force is

        g = sqrt(hbar / (2 omega_m m)) * omega_c^2 V eps_c phi / (2 V_c c).

    Returns
    -------
    (omega_m, g, g_tilde) : tuple of float
        Mechanical frequency [rad/s], coupling [rad/s], and the
        dimensionless ratio g / omega_m.
    """
    eps_c = 3.0 * (p.epsilon_r - 1.0) / (p.epsilon_r + 2.0)
    omega_m = np.sqrt(4.0 * p.intensity * eps_c / (p.density * SPEED_OF_LIGHT * p.waist**2))

    volume = (4.0 / 3.0) * np.pi * p.radius**3
    mass = p.density * volume
    omega_c = 2.0 * np.pi * SPEED_OF_LIGHT / p.wavelength
    if p.mode_volume is not None:
        v_c = p.mode_volume
    else:
        # TEM00 estimate: V_c = (pi/4) W_c^2 L with W_c^2 = lambda L / (2 pi)^2
        v_c = p.wavelength * p.cavity_length**2 / (16.0 * np.pi)

    zpf = np.sqrt(HBAR / (2.0 * omega_m * mass))
    g = zpf * omega_c**2 * volume * eps_c * p.phase / (2.0 * v_c * SPEED_OF_LIGHT)
    return float(omega_m), float(g), float(g / omega_m)
