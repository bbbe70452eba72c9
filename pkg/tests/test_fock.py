"""Truncated-Fock engine: construction, evolution contracts, observables."""

import math

import numpy as np
import pytest

from nongauss import (CoherentMech, CouplingProfile, InitialState, NoiseConfig,
                      StepperConfig, ThermalMech, Truncation, binary_entropy,
                      coeffs_constant, covariance_from_moments, delta,
                      delta_numeric, evolve_closed, evolve_closed_exact,
                      evolve_lindblad, make_initial, moments_coherent,
                      moments_numeric, reduced_entropies, state_fidelity,
                      suggest_truncation, truncation_check, von_neumann_entropy)
from nongauss.errors import (InvalidParameter, StepSizeTooLarge,
                             TruncationTooSmall)
from nongauss.fock import FockState, PURE, _coherent_amplitudes, expectation_photons

CONSTANT_ONE = CouplingProfile.constant(1.0)


class TestMakeInitial:
    def test_vacuum(self):
        st = make_initial(InitialState(mu_c=0.0), Truncation(4, 4))
        assert st.is_pure
        assert np.linalg.norm(st.data) == pytest.approx(1.0, abs=1e-15)
        assert st.data[0] == pytest.approx(1.0)

    def test_poisson_tail_leak_is_small(self):
        st = make_initial(InitialState(mu_c=1.0), Truncation(12, 4))
        amps = _coherent_amplitudes(1.0, 12)
        assert 1.0 - np.sum(np.abs(amps) ** 2) < 1e-8
        assert abs(np.linalg.norm(st.data) - 1.0) < 1e-15

    def test_overfull_coherent_state_rejected(self):
        with pytest.raises(TruncationTooSmall) as err:
            make_initial(InitialState(mu_c=3.0), Truncation(10, 4))
        assert err.value.leak > 1e-8

    def test_thermal_zero_equals_pure_vacuum_mechanics(self):
        st = make_initial(InitialState(mu_c=0.5, mechanics=ThermalMech(0.0)),
                          Truncation(10, 6))
        ref = make_initial(InitialState(mu_c=0.5), Truncation(10, 6))
        assert not st.is_pure
        rho_ref = np.outer(ref.data, ref.data.conj())
        assert np.max(np.abs(st.data - rho_ref)) < 1e-14

    def test_thermal_state_validates(self):
        st = make_initial(InitialState(mu_c=0.3, mechanics=ThermalMech(1.0)),
                          Truncation(8, 60))
        st.validate()


class TestClosedEvolution:
    def test_zero_coupling_stays_gaussian(self):
        st = make_initial(InitialState(mu_c=0.7, mechanics=CoherentMech(0.4)),
                          Truncation(10, 10))
        traj = evolve_closed(st, CouplingProfile.constant(0.0),
                             np.linspace(0, 2 * math.pi, 5), StepperConfig(dt=2e-3))
        for snap in traj:
            assert delta_numeric(snap).delta <= 1e-9

    def test_photon_number_conserved_for_any_profile(self):
        st = make_initial(InitialState(mu_c=0.5), Truncation(10, 80))
        prof = CouplingProfile.modulated(1.0, 1.0, 0.7)
        traj = evolve_closed(st, prof, [0.0, 1.0, 2.0], StepperConfig(dt=1e-3))
        for snap in traj:
            assert abs(expectation_photons(snap) - 0.25) <= 1e-9

    def test_rk4_matches_exact_block_propagator(self):
        st = make_initial(InitialState(mu_c=0.3), Truncation(12, 40))
        grid = [0.0, 0.7, 1.4]
        rk4 = evolve_closed(st, CONSTANT_ONE, grid, StepperConfig(dt=1e-3))
        exact = evolve_closed_exact(st, 1.0, grid)
        for a, b in zip(rk4, exact):
            assert state_fidelity(a, b) >= 1.0 - 1e-10

    def test_cross_engine_delta_at_adequate_truncation(self):
        init = InitialState(mu_c=0.5)
        st = make_initial(init, Truncation(12, 150))
        traj = evolve_closed_exact(st, 1.0, [0.0, math.pi])
        d_fock = delta_numeric(traj[-1]).delta
        sigma = covariance_from_moments(
            moments_coherent(coeffs_constant(1.0, math.pi), 0.5, 0.0))
        d_analytic = delta(sigma, init).delta
        assert abs(d_fock - d_analytic) <= 1e-3

    def test_grid_must_start_at_state_time(self):
        st = make_initial(InitialState(mu_c=0.1), Truncation(6, 6))
        with pytest.raises(InvalidParameter):
            evolve_closed(st, CONSTANT_ONE, [0.5, 1.0])

    def test_step_halving_guard_passes_at_sane_step(self):
        st = make_initial(InitialState(mu_c=0.2), Truncation(8, 24))
        evolve_closed(st, CONSTANT_ONE, [0.0, 0.5],
                      StepperConfig(dt=1e-3, check_convergence=True))

    def test_step_halving_guard_trips_at_huge_step(self):
        st = make_initial(InitialState(mu_c=0.2), Truncation(8, 24))
        with pytest.raises(StepSizeTooLarge):
            evolve_closed(st, CONSTANT_ONE, [0.0, 2.0],
                          StepperConfig(dt=0.5, check_convergence=True))


class TestLindblad:
    @pytest.mark.slow
    def test_zero_noise_matches_closed_evolution(self):
        st = make_initial(InitialState(mu_c=0.1), Truncation(12, 40))
        grid = [0.0, 0.25, 0.5]
        traj = evolve_lindblad(st.to_density_matrix(), CONSTANT_ONE,
                               NoiseConfig(), grid, StepperConfig(dt=2e-3))
        exact = evolve_closed_exact(st, 1.0, grid)
        for rho, psi in zip(traj, exact):
            assert state_fidelity(psi, rho) >= 1.0 - 1e-8

    @pytest.mark.slow
    def test_pure_photon_loss_decay_law(self):
        st = make_initial(InitialState(mu_c=0.1), Truncation(12, 40))
        grid = np.linspace(0.0, 1.5, 4)
        traj = evolve_lindblad(st.to_density_matrix(), CONSTANT_ONE,
                               NoiseConfig(kappa_c=0.3), grid, StepperConfig(dt=4e-3))
        for snap in traj[1:]:
            expected = 0.01 * math.exp(-0.3 * snap.time)
            assert abs(expectation_photons(snap) - expected) / expected < 1e-6
            assert abs(snap.norm_defect()) < 1e-10

    def test_truncation_overflow_aborts(self):
        # phonon space far too small for the conditional displacement
        st = make_initial(InitialState(mu_c=1.0), Truncation(14, 8))
        with pytest.raises(TruncationTooSmall):
            evolve_lindblad(st.to_density_matrix(), CONSTANT_ONE,
                            NoiseConfig(kappa_c=0.1), [0.0, 2.0],
                            StepperConfig(dt=2e-3))


class TestObservables:
    def test_vacuum_moments_are_zero(self):
        st = make_initial(InitialState(mu_c=0.0), Truncation(4, 4))
        m = moments_numeric(st)
        for name in ("a1", "b1", "a2", "b2", "na", "nb", "ab", "ab_dag"):
            assert getattr(m, name) == pytest.approx(0j, abs=1e-15)

    def test_initial_coherent_amplitude(self):
        st = make_initial(InitialState(mu_c=1.0), Truncation(14, 4))
        assert moments_numeric(st).a1 == pytest.approx(1.0 + 0j, abs=1e-9)

    def test_evolved_moments_match_closed_forms(self):
        st = make_initial(InitialState(mu_c=1.0), Truncation(13, 450, budget=8192))
        traj = evolve_closed_exact(st, 1.0, [0.0, math.pi])
        mf = moments_numeric(traj[-1])
        ma = moments_coherent(coeffs_constant(1.0, math.pi), 1.0, 0.0)
        for name in ("a1", "b1", "a2", "b2", "na", "nb", "ab", "ab_dag"):
            assert getattr(mf, name) == pytest.approx(getattr(ma, name), abs=1e-6)

    def test_von_neumann_entropy(self):
        pure = make_initial(InitialState(mu_c=0.5), Truncation(10, 6))
        assert von_neumann_entropy(pure) == 0.0
        thermal = make_initial(InitialState(mu_c=0.0, mechanics=ThermalMech(0.5)),
                               Truncation(2, 60))
        assert von_neumann_entropy(thermal) == pytest.approx(
            binary_entropy(2.0), abs=1e-9)

    def test_delta_numeric_vanishes_for_coherent_states(self):
        st = make_initial(InitialState(mu_c=0.8, mechanics=CoherentMech(0.3)),
                          Truncation(12, 12))
        assert delta_numeric(st).delta <= 1e-6

    def test_reduced_entropies_product_state(self):
        st = make_initial(InitialState(mu_c=0.5, mechanics=CoherentMech(0.7)),
                          Truncation(10, 12))
        s_a, s_b = reduced_entropies(st)
        assert s_a == pytest.approx(0.0, abs=1e-10)
        assert s_b == pytest.approx(0.0, abs=1e-10)

    def test_reduced_entropies_schmidt_symmetry(self):
        st = make_initial(InitialState(mu_c=1.0), Truncation(13, 450, budget=8192))
        traj = evolve_closed_exact(st, 1.0, [0.0, math.pi])
        s_a, s_b = reduced_entropies(traj[-1])
        assert abs(s_a - s_b) <= 1e-8
        assert s_a > 0.5  # strongly entangled mid-cycle


class TestTruncationCheck:
    def test_vacuum_passes(self):
        st = make_initial(InitialState(mu_c=0.0), Truncation(4, 4))
        assert truncation_check(st, 1e-8).passed

    def test_clipped_coherent_state_fails(self):
        amps = _coherent_amplitudes(3.0, 10)  # Poisson mean 9, cutoff 10
        psi = np.kron(amps / np.linalg.norm(amps), [1.0, 0, 0, 0]).astype(complex)
        st = FockState(kind=PURE, data=psi, trunc=Truncation(10, 4))
        assert not truncation_check(st, 1e-6).passed

    @pytest.mark.slow
    def test_resonant_run_needs_displacement_headroom(self):
        # at resonance the conditional displacement grows secularly; the
        # phonon cutoff must cover |F| n for the populated photon sectors
        init = InitialState(mu_c=0.5)
        grid = [0.0, 4 * math.pi]
        prof = CouplingProfile.modulated(1.0, 1.0, 1.0)
        small = make_initial(init, Truncation(9, 128, budget=6000))
        traj = evolve_closed(small, prof, grid, StepperConfig(dt=1e-3))
        assert not truncation_check(traj[-1], 1e-4).passed
        big = make_initial(init, Truncation(9, 512, budget=6000))
        traj = evolve_closed(big, prof, grid, StepperConfig(dt=1e-3))
        assert truncation_check(traj[-1], 1e-4).passed

    def test_suggest_truncation_covers_initial_state(self):
        trunc = suggest_truncation(CONSTANT_ONE, InitialState(mu_c=1.0), 2 * math.pi,
                                   budget=4096)
        assert trunc.n_photon >= 17
        make_initial(InitialState(mu_c=1.0), trunc)  # no leak error

    def test_suggest_truncation_refuses_absurd_budget(self):
        with pytest.raises(TruncationTooSmall):
            suggest_truncation(CONSTANT_ONE, InitialState(mu_c=5.0), 1.0, budget=64)


class TestStateFidelity:
    def test_pure_pure(self):
        a = make_initial(InitialState(mu_c=0.3), Truncation(8, 8))
        assert state_fidelity(a, a) == pytest.approx(1.0, abs=1e-14)

    def test_pure_mixed_consistency(self):
        a = make_initial(InitialState(mu_c=0.3), Truncation(8, 8))
        rho = a.to_density_matrix()
        assert state_fidelity(a, rho) == pytest.approx(1.0, abs=1e-12)
        assert state_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
