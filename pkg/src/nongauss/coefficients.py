"""Decoupling coefficients of the factored two-mode evolution operator.

The nonlinear interaction H / (hbar omega_m) = Omega Na + Nb - g(tau) Na (b + b†)
admits an exact factorisation of its time-ordered evolution into
exponentials of Na^2, Na B+ and Na B-.  The scalar weights of those
generators are

    F_na2(tau)    = -2 * int_0^tau dt g(t) sin t * int_0^t ds g(s) cos s
    F_b_plus(tau) = -  int_0^tau dt g(t) cos t
    F_b_minus(tau)= -  int_0^tau dt g(t) sin t

together with the derived combinations theta_a = 2 (F_na2 + F_b_plus * F_b_minus)
and F = F_b_minus + i F_b_plus, the photon-number-conditioned mechanical
displacement.  This module evaluates them in closed form for constant,
modulated and resonantly modulated couplings, and by adaptive quadrature
for arbitrary profiles.

All closed forms are organised around the stable primitives
int_0^tau cos(k t) dt and int_0^tau sin(k t) dt expressed through
sin(x)/x, so the removable k -> 0 singularities cost no precision; the
only genuinely singular point of the modulated forms is omega0 = 1,
which is guarded and served by the dedicated resonant forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .coupling import CONSTANT, MODULATED, CouplingProfile
from .errors import InvalidParameter, QuadratureFailure, ResonanceSingularity

#: below this distance of omega0 from mechanical resonance the off-resonant
#: closed form loses accuracy to 1/(1 - omega0^2) cancellations
RESONANCE_GUARD = 1e-4


@dataclass(frozen=True)
class EvolutionCoefficients:
    """Decoupling coefficients at a single dimensionless time tau.

    ``theta_a`` and ``f_complex`` are always derived from the three
    primitive coefficients by :meth:`from_primitives`, so they can be
    recomputed bit-for-bit from the stored primitives.
    """

    tau: float
    f_na2: float
    f_b_plus: float
    f_b_minus: float
    theta_a: float
    f_complex: complex

    @classmethod
    def from_primitives(cls, tau, f_na2, f_b_plus, f_b_minus):
        return cls(
            tau=float(tau),
            f_na2=float(f_na2),
            f_b_plus=float(f_b_plus),
            f_b_minus=float(f_b_minus),
            theta_a=2.0 * (float(f_na2) + float(f_b_plus) * float(f_b_minus)),
            f_complex=complex(float(f_b_minus), float(f_b_plus)),
        )


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerance and budget for :func:`coeffs_numeric`."""

    abs_tol: float = 1e-10
    max_evals: int = 10**6

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise InvalidParameter("quadrature tolerance must be positive")
        if self.max_evals < 100:
            raise InvalidParameter("evaluation budget too small")


def _sinc(x):
    # unnormalised sin(x)/x with value 1 at x = 0
    return np.sinc(x / np.pi)


def _int_cos(k, tau):
    # int_0^tau cos(k t) dt, exact at k = 0
    return tau * _sinc(k * tau)


def _int_sin(k, tau):
    # int_0^tau sin(k t) dt = (1 - cos(k tau)) / k, exact at k = 0
    h = 0.5 * k * tau
    return tau * np.sin(h) * _sinc(h)


def _w_int(a, b, tau):
    # int_0^tau sin(a t) (1 - cos(b t)) / b dt; vanishes as b -> 0
    if b == 0.0:
        return 0.0
    return (_int_sin(a, tau) - 0.5 * (_int_sin(a + b, tau) + _int_sin(a - b, tau))) / b


def _z_int(w, b, tau):
    # int_0^tau sin(w t) sin(t) (1 - cos(b t)) / b dt; vanishes as b -> 0
    if b == 0.0:
        return 0.0
    i0 = 0.5 * (_int_cos(w - 1.0, tau) - _int_cos(w + 1.0, tau))
    i1 = 0.25 * (_int_cos(w - 1.0 + b, tau) + _int_cos(w - 1.0 - b, tau)
                 - _int_cos(w + 1.0 + b, tau) - _int_cos(w + 1.0 - b, tau))
    return (i0 - i1) / b


def _check_pre(g0, tau):
    if g0 < 0:
        raise InvalidParameter("g0 must be >= 0")
    if tau < 0:
        raise InvalidParameter("tau must be >= 0")


def coeffs_constant(g0: float, tau: float) -> EvolutionCoefficients:
    """Closed forms for a constant coupling g(tau) = g0.

    F_na2 = -g0^2 [1 - sinc(2 tau)] tau, F_b_plus = -g0 sin(tau),
    F_b_minus = g0 (cos(tau) - 1); hence F = g0 (e^{-i tau} - 1) and
    theta_a reduces to -2 pi g0^2 at tau = pi.
    """
    _check_pre(g0, tau)
    f_na2 = -g0 * g0 * (1.0 - _sinc(2.0 * tau)) * tau
    f_b_plus = -g0 * math.sin(tau)
    f_b_minus = g0 * (math.cos(tau) - 1.0)
    return EvolutionCoefficients.from_primitives(tau, f_na2, f_b_plus, f_b_minus)


def coeffs_modulated(g0: float, epsilon: float, omega0: float, tau: float,
                     guard: bool = True) -> EvolutionCoefficients:
    """Closed forms for g(tau) = g0 (1 + epsilon sin(omega0 tau)).

    Obtained by integrating the defining integrals term by term with
    product-to-sum identities; reduces exactly to :func:`coeffs_constant`
    when the modulation vanishes (epsilon = 0 or omega0 = 0).

    With ``guard`` enabled (the default) a :class:`ResonanceSingularity`
    is raised for |omega0 - 1| <= 1e-4, where the off-resonant expressions
    lose accuracy; callers should switch to :func:`coeffs_resonant`.
    ``guard=False`` evaluates the expressions as written, which is useful
    for checking the omega0 -> 1 limit.
    """
    _check_pre(g0, tau)
    if epsilon == 0.0 or omega0 == 0.0:
        # modulation identically zero: g(tau) = g0 for every tau
        return coeffs_constant(g0, tau)
    if omega0 < 0:
        raise InvalidParameter("omega0 must be >= 0")
    if guard and abs(omega0 - 1.0) <= RESONANCE_GUARD:
        raise ResonanceSingularity(
            f"|omega0 - 1| = {abs(omega0 - 1.0):.2e} <= {RESONANCE_GUARD}; "
            "use coeffs_resonant")

    w = omega0
    f_b_plus = -g0 * (math.sin(tau) + 0.5 * epsilon * (_int_sin(w + 1.0, tau)
                                                       + _int_sin(w - 1.0, tau)))
    f_b_minus = -g0 * (_int_sin(1.0, tau) + 0.5 * epsilon * (_int_cos(w - 1.0, tau)
                                                             - _int_cos(w + 1.0, tau)))
    p1 = 0.5 * (tau - math.sin(tau) * math.cos(tau))
    p2 = 0.5 * _int_sin(w, tau) - 0.25 * (_int_sin(w + 2.0, tau) + _int_sin(w - 2.0, tau))
    p3 = _w_int(1.0, w + 1.0, tau)
    p4 = _w_int(1.0, w - 1.0, tau)
    p5 = _z_int(w, w + 1.0, tau) + _z_int(w, w - 1.0, tau)
    f_na2 = -2.0 * g0 * g0 * (p1 + epsilon * p2 + 0.5 * epsilon * (p3 + p4)
                              + 0.5 * epsilon * epsilon * p5)
    return EvolutionCoefficients.from_primitives(tau, f_na2, f_b_plus, f_b_minus)


def coeffs_resonant(g0: float, epsilon: float, tau: float) -> EvolutionCoefficients:
    """Closed forms for resonant modulation, omega0 = 1.

    F_b_minus carries the secular term -(g0 epsilon / 2) tau, so |F|
    grows without bound, |F|^2 ~ (g0 epsilon tau)^2 / 4 for tau >> 1.
    """
    _check_pre(g0, tau)
    s2 = math.sin(2.0 * tau)
    f_na2 = -(g0 * g0 / 16.0) * (
        16.0 * tau - 8.0 * s2
        + epsilon * (32.0 - 36.0 * math.cos(tau) + 4.0 * math.cos(3.0 * tau))
        + epsilon * epsilon * (6.0 * tau - 4.0 * s2 + s2 * math.cos(2.0 * tau)))
    f_b_plus = -g0 * math.sin(tau) * (1.0 + 0.5 * epsilon * math.sin(tau))
    f_b_minus = 0.25 * g0 * epsilon * (s2 - 2.0 * tau) - 2.0 * g0 * math.sin(0.5 * tau) ** 2
    return EvolutionCoefficients.from_primitives(tau, f_na2, f_b_plus, f_b_minus)


def _resonant_f_na2_variant(g0: float, epsilon: float, tau: float) -> float:
    # algebraically equivalent regrouping of the resonant F_na2 (uses
    # sin(4 tau) instead of sin(2 tau) cos(2 tau)); kept as an identity
    # check exercised by the test suite
    s2 = math.sin(2.0 * tau)
    return -(g0 * g0 / 32.0) * (
        epsilon * epsilon * (12.0 * tau - 8.0 * s2 + math.sin(4.0 * tau))
        + epsilon * (64.0 - 72.0 * math.cos(tau) + 8.0 * math.cos(3.0 * tau))
        + 32.0 * tau - 16.0 * s2)


class _BudgetedProfile:
    """Wrap a profile's value() with an evaluation budget."""

    def __init__(self, profile, max_evals):
        self.profile = profile
        self.remaining = max_evals

    def __call__(self, t):
        n = np.size(t)
        self.remaining -= n
        if self.remaining < 0:
            raise QuadratureFailure("quadrature evaluation budget exhausted")
        return self.profile.value(t)


def _quad_1d(f, tau, tol, points):
    val, err = quad(f, 0.0, tau, epsabs=0.1 * tol, epsrel=1e-12,
                    limit=400, points=points or None)
    if err > tol:
        raise QuadratureFailure(f"1-d quadrature error estimate {err:.2e} > {tol:.2e}")
    return val


def _nested_na2(g, tau, tol, first_tol):
    # F_na2 as an ODE in the running upper limit: the inner cumulative
    # integral C(t) = int_0^t g cos is carried as state alongside the
    # outer integral, so the nested integral costs one adaptive pass.
    def rhs(t, y):
        gt = g(t)
        return (gt * math.cos(t), -2.0 * gt * math.sin(t) * y[0])

    sol = solve_ivp(rhs, (0.0, tau), (0.0, 0.0), method="DOP853",
                    rtol=1e-12, atol=first_tol)
    if not sol.success:
        raise QuadratureFailure(f"nested integration failed: {sol.message}")
    return sol.y[1, -1]


def coeffs_numeric(profile: CouplingProfile, tau: float,
                   quad_config: QuadratureConfig | None = None) -> EvolutionCoefficients:
    """Evaluate the defining integrals for an arbitrary profile.

    F_b_plus and F_b_minus use one-dimensional adaptive quadrature; the
    nested F_na2 integral is solved with the inner cumulative integral
    cached as ODE state on the same adaptive grid.  The nested result is
    verified by re-solving at a tighter tolerance; if the two disagree by
    more than the configured absolute tolerance a
    :class:`QuadratureFailure` is raised.
    """
    cfg = quad_config or QuadratureConfig()
    if tau < 0:
        raise InvalidParameter("tau must be >= 0")
    if tau == 0.0:
        return EvolutionCoefficients.from_primitives(0.0, 0.0, 0.0, 0.0)

    g = _BudgetedProfile(profile, cfg.max_evals)
    points = list(profile.breakpoints(tau))
    f_b_plus = -_quad_1d(lambda t: g(t) * math.cos(t), tau, cfg.abs_tol, points)
    f_b_minus = -_quad_1d(lambda t: g(t) * math.sin(t), tau, cfg.abs_tol, points)

    coarse = _nested_na2(g, tau, cfg.abs_tol, first_tol=1e-2 * cfg.abs_tol)
    fine = _nested_na2(g, tau, cfg.abs_tol, first_tol=1e-4 * cfg.abs_tol)
    if abs(coarse - fine) > cfg.abs_tol:
        raise QuadratureFailure(
            f"nested integral not converged: |{coarse:.3e} - {fine:.3e}| > {cfg.abs_tol:.2e}")
    return EvolutionCoefficients.from_primitives(tau, fine, f_b_plus, f_b_minus)


def coeffs_for_profile(profile: CouplingProfile, tau: float) -> EvolutionCoefficients:
    """Route a profile to its best evaluator.

    Constant couplings and vanishing modulations use the constant closed
    form; modulated couplings use the resonant closed form inside the
    resonance guard band and the off-resonant one outside; tabulated
    profiles fall back to quadrature.
    """
    if profile.kind == CONSTANT:
        return coeffs_constant(profile.g0, tau)
    if profile.kind == MODULATED:
        if profile.epsilon == 0.0 or profile.omega0 == 0.0:
            return coeffs_constant(profile.g0, tau)
        if abs(profile.omega0 - 1.0) <= RESONANCE_GUARD:
            return coeffs_resonant(profile.g0, profile.epsilon, tau)
        return coeffs_modulated(profile.g0, profile.epsilon, profile.omega0, tau)
    return coeffs_numeric(profile, tau)
