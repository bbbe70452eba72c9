"""Brute-force reference engine on a truncated two-mode Fock space.

Everything here is deliberately independent of the closed-form pipeline:
states are vectors or density matrices over |n_photon> x |n_phonon>,
closed evolution integrates the Schrodinger / von Neumann equation with
a fixed-step classical 4th-order scheme (coupling evaluated at sub-step
times), and open evolution integrates the Lindblad equation with photon
and phonon decay operators sqrt(kappa_c) a and sqrt(kappa_m) b.  For a
constant coupling an exact propagator exists: within each photon sector
n the Hamiltonian is a displaced oscillator

    H_n = b'b - g0 n (b + b'),

so U_n(dt) = e^{i g0^2 n^2 dt} D(g0 n) e^{-i dt b'b} D(-g0 n); this is
used as the exactness anchor for the stepper.

The engine works in the same rotating frame as the analytic pipeline
(the free optical term is transformed away), so moments are directly
comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence

import numpy as np
import scipy.sparse as sp

from .coefficients import coeffs_for_profile
from .coupling import CONSTANT, CouplingProfile
from .covariance import (CoherentMech, InitialState, Moments, ThermalMech,
                         covariance_from_moments)
from .entropy import DeltaResult, binary_entropy, symplectic_eigenvalues
from .errors import (InvalidParameter, StepSizeTooLarge, TruncationTooSmall)

#: dense density matrices refuse to run above this total dimension
DM_DIM_CAP = 4096
#: maximum population the initial state may lose to the cutoff
INIT_LEAK_TOL = 1e-8
#: top-of-space population that aborts an open evolution
EVOLVE_TOP_TOL = 1e-6
#: eigenvalues below this are treated as numerical zeros in entropies
EIG_FLOOR = 1e-14

PURE = "pure"
DENSITY = "dm"


@dataclass(frozen=True)
class Truncation:
    """Fock-space cutoffs: levels 0..n_photon-1 and 0..n_phonon-1.

    ``budget`` bounds the total dimension for state vectors; density
    matrices are additionally capped at :data:`DM_DIM_CAP` regardless of
    the configured budget.
    """

    n_photon: int
    n_phonon: int
    budget: int = DM_DIM_CAP

    def __post_init__(self):
        if self.n_photon < 2 or self.n_phonon < 2:
            raise InvalidParameter("need at least 2 levels per mode")
        if self.dim > self.budget:
            raise TruncationTooSmall(
                f"dimension {self.dim} exceeds budget {self.budget}")

    @property
    def dim(self) -> int:
        return self.n_photon * self.n_phonon


@dataclass(frozen=True)
class NoiseConfig:
    """Dimensionless decay rates kappa / omega_m for the two modes."""

    kappa_c: float = 0.0
    kappa_m: float = 0.0

    def __post_init__(self):
        if self.kappa_c < 0 or self.kappa_m < 0:
            raise InvalidParameter("decay rates must be >= 0")

    @property
    def is_closed(self) -> bool:
        return self.kappa_c == 0.0 and self.kappa_m == 0.0


@dataclass(frozen=True)
class StepperConfig:
    """Fixed-step RK4 configuration.

    With ``check_convergence`` the trajectory is recomputed at half the
    step and :class:`StepSizeTooLarge` is raised if the non-Gaussianity
    or the photon number at any reported point moves by more than
    ``convergence_tol``.
    """

    dt: float = 1e-3
    check_convergence: bool = False
    convergence_tol: float = 1e-6

    def __post_init__(self):
        if self.dt <= 0:
            raise InvalidParameter("dt must be positive")


@dataclass
class FockState:
    """State on the truncated two-mode space at one instant."""

    kind: str
    data: np.ndarray
    trunc: Truncation
    time: float = 0.0

    @property
    def is_pure(self) -> bool:
        return self.kind == PURE

    def norm_defect(self) -> float:
        """Norm - 1 (pure) or trace - 1 (density matrix), unrenormalised."""
        if self.is_pure:
            return float(np.linalg.norm(self.data) - 1.0)
        return float(np.trace(self.data).real - 1.0)

    def to_density_matrix(self) -> "FockState":
        if not self.is_pure:
            return self
        if self.trunc.dim > DM_DIM_CAP:
            raise TruncationTooSmall(
                f"density matrix of dimension {self.trunc.dim} exceeds cap {DM_DIM_CAP}")
        rho = np.outer(self.data, self.data.conj())
        return FockState(kind=DENSITY, data=rho, trunc=self.trunc, time=self.time)

    def validate(self):
        """Raise if the state drifted outside its representation invariants."""
        if self.is_pure:
            if abs(np.linalg.norm(self.data) - 1.0) > 1e-9:
                raise InvalidParameter("pure state norm defect above 1e-9")
            return
        rho = self.data
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise InvalidParameter("density matrix not Hermitian within 1e-10")
        if abs(np.trace(rho).real - 1.0) > 1e-8:
            raise InvalidParameter("density matrix trace defect above 1e-8")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -1e-9:
            raise InvalidParameter("density matrix has eigenvalues below -1e-9")


@dataclass(frozen=True)
class TruncationReport:
    """Population sitting in the top two levels of each mode."""

    photon_tail: float
    phonon_tail: float
    tol: float
    passed: bool


class _Ops:
    """Cached sparse operators and diagonals for one truncation."""

    def __init__(self, n_photon: int, n_phonon: int):
        self.n_photon = n_photon
        self.n_phonon = n_phonon
        am = sp.diags(np.sqrt(np.arange(1, n_photon)), 1, format="csr")
        bm = sp.diags(np.sqrt(np.arange(1, n_phonon)), 1, format="csr")
        eye_p = sp.identity(n_photon, format="csr")
        eye_m = sp.identity(n_phonon, format="csr")
        self.a = sp.kron(am, eye_m, format="csr")
        self.b = sp.kron(eye_p, bm, format="csr")
        self.a_dag = self.a.conj().T.tocsr()
        self.b_dag = self.b.conj().T.tocsr()
        self.aa = (self.a @ self.a).tocsr()
        self.bb = (self.b @ self.b).tocsr()
        self.ab = (self.a @ self.b).tocsr()
        self.ab_dag = (self.a @ self.b_dag).tocsr()
        n_ph = np.repeat(np.arange(n_photon, dtype=float), n_phonon)
        n_m = np.tile(np.arange(n_phonon, dtype=float), n_photon)
        self.na_diag = n_ph
        self.nb_diag = n_m
        # interaction generator Na (b + b')
        self.v = sp.kron(sp.diags(np.arange(n_photon, dtype=float)),
                         bm + bm.conj().T, format="csr")


@lru_cache(maxsize=8)
def _ops(n_photon: int, n_phonon: int) -> _Ops:
    return _Ops(n_photon, n_phonon)


def _coherent_amplitudes(mu: complex, n: int) -> np.ndarray:
    c = np.zeros(n, dtype=complex)
    c[0] = 1.0
    for k in range(1, n):
        c[k] = c[k - 1] * mu / math.sqrt(k)
    return c * np.exp(-0.5 * abs(mu) ** 2)


def make_initial(initial: InitialState, trunc: Truncation) -> FockState:
    """Build |mu_c> x |mu_m> (pure) or |mu_c><mu_c| x rho_thermal.

    The population each cutoff discards is measured; if the total exceeds
    1e-8 a :class:`TruncationTooSmall` carrying the leak is raised.  The
    retained state is renormalised.
    """
    c_ph = _coherent_amplitudes(complex(initial.mu_c), trunc.n_photon)
    leak_ph = max(0.0, 1.0 - float(np.sum(np.abs(c_ph) ** 2)))

    mech = initial.mechanics
    if isinstance(mech, ThermalMech):
        nbar = mech.nbar
        if nbar == 0.0:
            p = np.zeros(trunc.n_phonon)
            p[0] = 1.0
            leak_m = 0.0
        else:
            k = np.arange(trunc.n_phonon)
            p = np.exp(k * math.log(nbar / (1.0 + nbar)) - math.log(1.0 + nbar))
            leak_m = max(0.0, 1.0 - float(p.sum()))
        leak = leak_ph + leak_m
        if leak > INIT_LEAK_TOL:
            raise TruncationTooSmall(
                f"initial state leaks {leak:.3e} > {INIT_LEAK_TOL}", leak=leak)
        if trunc.dim > DM_DIM_CAP:
            raise TruncationTooSmall(
                f"density matrix of dimension {trunc.dim} exceeds cap {DM_DIM_CAP}")
        rho_ph = np.outer(c_ph, c_ph.conj())
        rho = np.kron(rho_ph, np.diag(p).astype(complex))
        rho /= np.trace(rho).real
        return FockState(kind=DENSITY, data=rho, trunc=trunc, time=0.0)

    c_m = _coherent_amplitudes(complex(mech.mu_m), trunc.n_phonon)
    leak_m = max(0.0, 1.0 - float(np.sum(np.abs(c_m) ** 2)))
    leak = leak_ph + leak_m
    if leak > INIT_LEAK_TOL:
        raise TruncationTooSmall(
            f"initial state leaks {leak:.3e} > {INIT_LEAK_TOL}", leak=leak)
    psi = np.kron(c_ph, c_m)
    psi /= np.linalg.norm(psi)
    return FockState(kind=PURE, data=psi, trunc=trunc, time=0.0)


def _check_grid(state: FockState, tau_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(tau_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise InvalidParameter("tau_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise InvalidParameter("tau_grid must be strictly increasing")
    if abs(grid[0] - state.time) > 1e-12:
        raise InvalidParameter(
            f"tau_grid must start at the state's time {state.time}, got {grid[0]}")
    return grid


def _rk4(y, t0, t1, dt, rhs):
    """Classic fixed-step RK4 from t0 to t1 with steps of at most dt."""
    n = max(1, int(math.ceil((t1 - t0) / dt - 1e-12)))
    h = (t1 - t0) / n
    t = t0
    for _ in range(n):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1)
        k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return y


def _closed_rhs_pure(ops: _Ops, profile: CouplingProfile):
    nb = ops.nb_diag
    v = ops.v

    def rhs(t, psi):
        return -1j * (nb * psi - profile.value(t) * (v @ psi))

    return rhs


def _lindblad_rhs(ops: _Ops, profile: CouplingProfile, noise: NoiseConfig):
    # RK4 stage arguments stay Hermitian (the generator preserves
    # Hermiticity), so with H_eff = H - (i/2) sum L'L the coherent and
    # anticommutator parts collapse to -i (X - X†) for X = H_eff rho,
    # one sparse product per evaluation.  The jump terms a rho a' and
    # b rho b' are index shifts on the four-tensor view, no matmul.
    v = ops.v
    kc, km = noise.kappa_c, noise.kappa_m
    d_eff = ops.nb_diag - 0.5j * (kc * ops.na_diag + km * ops.nb_diag)
    n_ph, n_m = ops.n_photon, ops.n_phonon
    wp = np.sqrt(np.arange(1.0, n_ph))
    wm = np.sqrt(np.arange(1.0, n_m))
    jump_p = kc * np.outer(wp, wp)
    jump_m = km * np.outer(wm, wm)

    def rhs(t, rho):
        x = v @ rho
        x *= -profile.value(t)
        x += d_eff[:, None] * rho
        out = x - x.conj().T
        out *= -1j
        if kc or km:
            r4 = rho.reshape(n_ph, n_m, n_ph, n_m)
            o4 = out.reshape(n_ph, n_m, n_ph, n_m)
            if kc:
                o4[:-1, :, :-1, :] += jump_p[:, None, :, None] * r4[1:, :, 1:, :]
            if km:
                o4[:, :-1, :, :-1] += jump_m[None, :, None, :] * r4[:, 1:, :, 1:]
        return out

    return rhs


def _propagate(state: FockState, profile: CouplingProfile,
               noise: NoiseConfig | None, grid: np.ndarray,
               dt: float, check_top: bool) -> List[FockState]:
    ops = _ops(state.trunc.n_photon, state.trunc.n_phonon)
    if state.is_pure and (noise is None or noise.is_closed):
        rhs = _closed_rhs_pure(ops, profile)
    else:
        state = state.to_density_matrix()
        rhs = _lindblad_rhs(ops, profile, noise or NoiseConfig())
    out = [FockState(state.kind, state.data.copy(), state.trunc, float(grid[0]))]
    y = state.data
    for t0, t1 in zip(grid[:-1], grid[1:]):
        y = _rk4(y, float(t0), float(t1), dt, rhs)
        snap = FockState(state.kind, y.copy(), state.trunc, float(t1))
        if check_top:
            report = truncation_check(snap, EVOLVE_TOP_TOL)
            if not report.passed:
                raise TruncationTooSmall(
                    f"top-level population (photon {report.photon_tail:.2e}, "
                    f"phonon {report.phonon_tail:.2e}) exceeds {EVOLVE_TOP_TOL} "
                    f"at tau = {t1:.4f}",
                    leak=max(report.photon_tail, report.phonon_tail))
        out.append(snap)
    return out


def _convergence_guard(traj_h, traj_h2, tol):
    for sh, sh2 in zip(traj_h, traj_h2):
        try:
            dd = abs(delta_numeric(sh).delta - delta_numeric(sh2).delta)
            dn = abs(expectation_photons(sh) - expectation_photons(sh2))
        except Exception as exc:  # blown-up run: observables unevaluable
            raise StepSizeTooLarge(
                f"observables unevaluable at tau = {sh.time:.4f}: {exc}") from exc
        # negated comparison so NaN from an unstable run also trips
        if not (dd <= tol and dn <= tol):
            raise StepSizeTooLarge(
                f"halving the step moved observables by ({dd:.2e}, {dn:.2e}) "
                f"> {tol} at tau = {sh.time:.4f}")


def evolve_closed(state: FockState, profile: CouplingProfile,
                  tau_grid: Sequence[float],
                  stepper: StepperConfig | None = None) -> List[FockState]:
    """Unitary evolution sampled on ``tau_grid``.

    Pure states integrate the Schrodinger equation, density matrices the
    dissipator-free von Neumann equation, both with fixed-step RK4 and
    the coupling evaluated at sub-step times.  For constant profiles
    :func:`evolve_closed_exact` provides the exact reference.
    """
    cfg = stepper or StepperConfig()
    grid = _check_grid(state, tau_grid)
    traj = _propagate(state, profile, None, grid, cfg.dt, check_top=False)
    if cfg.check_convergence:
        traj_h2 = _propagate(state, profile, None, grid, 0.5 * cfg.dt, check_top=False)
        _convergence_guard(traj, traj_h2, cfg.convergence_tol)
    return traj


def evolve_lindblad(state: FockState, profile: CouplingProfile,
                    noise: NoiseConfig, tau_grid: Sequence[float],
                    stepper: StepperConfig | None = None) -> List[FockState]:
    """Open evolution of the density matrix sampled on ``tau_grid``.

    The trace is never renormalised; its drift stays visible through
    :meth:`FockState.norm_defect`.  The run aborts with
    :class:`TruncationTooSmall` if the top levels of either mode
    accumulate more than 1e-6 population.
    """
    cfg = stepper or StepperConfig()
    grid = _check_grid(state, tau_grid)
    traj = _propagate(state, profile, noise, grid, cfg.dt, check_top=True)
    if cfg.check_convergence:
        traj_h2 = _propagate(state, profile, noise, grid, 0.5 * cfg.dt, check_top=True)
        _convergence_guard(traj, traj_h2, cfg.convergence_tol)
    return traj


@lru_cache(maxsize=8)
def _displacement_basis(n_phonon: int):
    bm = np.diag(np.sqrt(np.arange(1.0, n_phonon)), 1)
    herm = 1j * (bm.conj().T - bm)
    w, vecs = np.linalg.eigh(herm)
    return w, vecs


def _block_displacements(g0: float, n_photon: int, n_phonon: int):
    w, vecs = _displacement_basis(n_phonon)
    mats = []
    for n in range(n_photon):
        lam = g0 * n
        mats.append((vecs * np.exp(-1j * lam * w)) @ vecs.conj().T)
    return mats


def evolve_closed_exact(state: FockState, g0: float,
                        tau_grid: Sequence[float]) -> List[FockState]:
    """Exact evolution for a constant coupling via per-photon blocks.

    Within photon sector n the propagator is the displaced-oscillator
    form e^{i g0^2 n^2 dt} D(g0 n) e^{-i dt b'b} D(-g0 n), exact up to
    the phonon cutoff.  Serves as the oracle for the RK4 stepper.
    """
    grid = _check_grid(state, tau_grid)
    n_ph, n_m = state.trunc.n_photon, state.trunc.n_phonon
    disp = _block_displacements(g0, n_ph, n_m)
    levels = np.arange(n_m)

    def step_pure(mat, dt):
        phase = np.exp(-1j * dt * levels)
        out = np.empty_like(mat)
        for n in range(n_ph):
            out[n] = (np.exp(1j * (g0 * n) ** 2 * dt)
                      * (disp[n] @ (phase * (disp[n].conj().T @ mat[n]))))
        return out

    out_states = [FockState(state.kind, state.data.copy(), state.trunc, float(grid[0]))]
    if state.is_pure:
        mat = state.data.reshape(n_ph, n_m).copy()
        for t0, t1 in zip(grid[:-1], grid[1:]):
            mat = step_pure(mat, float(t1 - t0))
            out_states.append(FockState(PURE, mat.reshape(-1).copy(),
                                        state.trunc, float(t1)))
        return out_states

    rho = state.data.reshape(n_ph, n_m, n_ph, n_m).copy()
    for t0, t1 in zip(grid[:-1], grid[1:]):
        dt = float(t1 - t0)
        phase = np.exp(-1j * dt * levels)
        us = [np.exp(1j * (g0 * n) ** 2 * dt)
              * (disp[n] * phase[None, :]) @ disp[n].conj().T for n in range(n_ph)]
        for n in range(n_ph):
            for m in range(n_ph):
                rho[n, :, m, :] = us[n] @ rho[n, :, m, :] @ us[m].conj().T
        out_states.append(FockState(DENSITY, rho.reshape(n_ph * n_m, n_ph * n_m).copy(),
                                    state.trunc, float(t1)))
    return out_states


def _expect(op: sp.spmatrix, state: FockState) -> complex:
    if state.is_pure:
        return complex(np.vdot(state.data, op @ state.data))
    return complex((op.multiply(state.data.T)).sum())


def expectation_photons(state: FockState) -> float:
    """<Na>, conserved by the interaction for any coupling profile."""
    ops = _ops(state.trunc.n_photon, state.trunc.n_phonon)
    if state.is_pure:
        return float(np.sum(ops.na_diag * np.abs(state.data) ** 2))
    return float(np.sum(ops.na_diag * np.diag(state.data).real))


def moments_numeric(state: FockState) -> Moments:
    """The eight moments by direct operator expectation."""
    ops = _ops(state.trunc.n_photon, state.trunc.n_phonon)
    if state.is_pure:
        psi = state.data
        a_psi = ops.a @ psi
        b_psi = ops.b @ psi
        return Moments(
            a1=complex(np.vdot(psi, a_psi)),
            b1=complex(np.vdot(psi, b_psi)),
            a2=complex(np.vdot(psi, ops.a @ a_psi)),
            b2=complex(np.vdot(psi, ops.b @ b_psi)),
            na=complex(np.vdot(a_psi, a_psi)),
            nb=complex(np.vdot(b_psi, b_psi)),
            ab=complex(np.vdot(psi, ops.a @ b_psi)),
            ab_dag=complex(np.vdot(psi, ops.ab_dag @ psi)),
        )
    return Moments(
        a1=_expect(ops.a, state),
        b1=_expect(ops.b, state),
        a2=_expect(ops.aa, state),
        b2=_expect(ops.bb, state),
        na=complex(np.sum(ops.na_diag * np.diag(state.data))),
        nb=complex(np.sum(ops.nb_diag * np.diag(state.data))),
        ab=_expect(ops.ab, state),
        ab_dag=_expect(ops.ab_dag, state),
    )


def von_neumann_entropy(state: FockState) -> float:
    """-Tr(rho ln rho); exactly 0 for pure-vector states."""
    if state.is_pure:
        return 0.0
    rho = 0.5 * (state.data + state.data.conj().T)
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > EIG_FLOOR]
    return float(-np.sum(evals * np.log(evals)))


def reduced_entropies(state: FockState) -> tuple[float, float]:
    """Von Neumann entropies of the optical and mechanical reductions."""
    n_ph, n_m = state.trunc.n_photon, state.trunc.n_phonon
    if state.is_pure:
        mat = state.data.reshape(n_ph, n_m)
        rho_a = mat @ mat.conj().T
        rho_b = mat.conj().T @ mat
    else:
        r = state.data.reshape(n_ph, n_m, n_ph, n_m)
        rho_a = np.einsum("imjm->ij", r)
        rho_b = np.einsum("imin->mn", r)

    def ent(rho):
        evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        evals = evals[evals > EIG_FLOOR]
        return float(-np.sum(evals * np.log(evals)))

    return ent(rho_a), ent(rho_b)


def delta_numeric(state: FockState) -> DeltaResult:
    """Non-Gaussianity S(rho_G) - S(rho) from the state itself.

    The Gaussian reference entropy comes from the state's own moments
    through the shared covariance machinery; the subtracted entropy is
    the state's current von Neumann entropy, which makes this the only
    form of the measure valid under open dynamics.  Floored at 0.
    """
    sigma = covariance_from_moments(moments_numeric(state))
    pair = symplectic_eigenvalues(sigma)
    s_g = binary_entropy(pair.nu_plus) + binary_entropy(pair.nu_minus)
    s_rho = von_neumann_entropy(state)
    return DeltaResult(delta=max(0.0, s_g - s_rho), entropy_gaussian=s_g,
                       entropy_initial=s_rho, pair=pair)


def truncation_check(state: FockState, tol: float) -> TruncationReport:
    """Population in the top two levels of each mode; pass iff both < tol."""
    n_ph, n_m = state.trunc.n_photon, state.trunc.n_phonon
    if state.is_pure:
        pops = np.abs(state.data.reshape(n_ph, n_m)) ** 2
    else:
        pops = np.diag(state.data).real.reshape(n_ph, n_m)
    photon_tail = float(pops[-2:, :].sum())
    phonon_tail = float(pops[:, -2:].sum())
    return TruncationReport(photon_tail=photon_tail, phonon_tail=phonon_tail,
                            tol=tol, passed=photon_tail < tol and phonon_tail < tol)


def state_fidelity(state: FockState, other: FockState) -> float:
    """Uhlmann fidelity between two states on the same truncation."""
    if state.trunc.dim != other.trunc.dim:
        raise InvalidParameter("states live on different truncations")
    if state.is_pure and other.is_pure:
        return float(abs(np.vdot(state.data, other.data)) ** 2)
    if state.is_pure != other.is_pure:
        psi = state.data if state.is_pure else other.data
        rho = other.data if state.is_pure else state.data
        return float(np.real(np.vdot(psi, rho @ psi)))
    w, v = np.linalg.eigh(0.5 * (state.data + state.data.conj().T))
    w = np.clip(w, 0.0, None)
    sqrt_rho = (v * np.sqrt(w)) @ v.conj().T
    inner = sqrt_rho @ other.data @ sqrt_rho
    evals = np.clip(np.linalg.eigvalsh(0.5 * (inner + inner.conj().T)), 0.0, None)
    return float(np.sum(np.sqrt(evals)) ** 2)


def suggest_truncation(profile: CouplingProfile, initial: InitialState,
                       tau_max: float, budget: int = DM_DIM_CAP) -> Truncation:
    """Heuristic cutoffs for a planned run.

    Photons: ceil(|mu_c|^2 + 6 |mu_c| + 10), a coherent-state mean plus
    six standard deviations plus margin.  Phonons: the mechanics is
    displaced by F per photon, so the reach of the highest retained
    photon level, |mu_m| + |F|_max (n_photon - 1), sets the scale; the
    result is capped by the dimension budget (runtime truncation checks
    still guard correctness when the cap bites).
    """
    amp_c = abs(complex(initial.mu_c))
    n_photon = int(math.ceil(amp_c**2 + 6.0 * amp_c + 10.0))
    taus = np.linspace(0.0, tau_max, 257)
    f_max = max(abs(coeffs_for_profile(profile, float(t)).f_complex) for t in taus)
    if isinstance(initial.mechanics, ThermalMech):
        amp_m = 3.0 * math.sqrt(initial.mechanics.nbar)
    else:
        amp_m = abs(complex(initial.mechanics.mu_m))
    reach = amp_m + f_max * (n_photon - 1)
    n_phonon_raw = int(math.ceil(reach**2 + 6.0 * reach + 10.0))
    n_phonon = min(n_phonon_raw, budget // n_photon)
    if n_phonon < 2:
        raise TruncationTooSmall(
            f"budget {budget} cannot hold n_photon = {n_photon} with any phonon cutoff")
    return Truncation(n_photon=n_photon, n_phonon=n_phonon, budget=budget)
