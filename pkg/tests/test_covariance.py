"""Moments and covariance matrices against independent oracles.

Two oracles appear here: a truncated-Fock evolution built from scratch on
the displaced-oscillator structure of the photon sectors (independent of
the production Fock module), and two-dimensional Gauss-Hermite quadrature
for the thermal averages.
"""

import math

import numpy as np
import pytest

from nongauss import (CoherentMech, CouplingProfile, InitialState, ThermalMech,
                      coeffs_constant, covariance_coherent_direct,
                      covariance_from_moments, covariance_large_mu,
                      moments_coherent, moments_for_initial, moments_thermal)
from nongauss.covariance import Moments
from nongauss.errors import InvariantViolation

TWO_PI = 2.0 * math.pi
MOMENT_FIELDS = ("a1", "b1", "a2", "b2", "na", "nb", "ab", "ab_dag")


# --------------------------------------------------------------------------
# test-local oracle: sector-resolved exact evolution for constant coupling

def _coherent_amps(mu, n):
    c = np.zeros(n, complex)
    c[0] = 1.0
    for k in range(1, n):
        c[k] = c[k - 1] * mu / math.sqrt(k)
    return c * np.exp(-0.5 * abs(mu) ** 2)


class SectorOracle:
    """Exact per-photon-sector propagation of the phonon mode.

    Within photon sector n the Hamiltonian is b'b - g0 n (b + b'), whose
    propagator is a displacement conjugation of the free rotation.  Any
    initial product state (optical coherent) x (phonon column vectors)
    evolves sector by sector; moments follow from sector overlaps.
    """

    def __init__(self, g0, tau, n_ph, n_m):
        self.g0, self.tau = g0, tau
        self.n_ph, self.n_m = n_ph, n_m
        b = np.diag(np.sqrt(np.arange(1.0, n_m)), 1)
        self.w, self.vecs = np.linalg.eigh(1j * (b.conj().T - b))
        self.levels = np.arange(n_m)
        self.phase = np.exp(-1j * tau * self.levels)

    def propagate(self, cols):
        """Evolve phonon column vectors through every photon sector;
        returns a list indexed by sector n."""
        v, w = self.vecs, self.w
        vh = v.conj().T
        out = []
        for n in range(self.n_ph):
            lam = self.g0 * n
            x = vh @ cols
            x = np.exp(1j * lam * w)[:, None] * x          # D(-lam)
            x = v @ x
            x = self.phase[:, None] * x                    # free rotation
            x = vh @ x
            x = np.exp(-1j * lam * w)[:, None] * x         # D(lam)
            x = v @ x
            out.append(np.exp(1j * lam**2 * self.tau) * x)
        return out

    def moments(self, mu_c, cols, weights):
        """nb and a1 for sum_k weights[k] |mu_c, cols[:, k]><...|."""
        c = _coherent_amps(mu_c, self.n_ph)
        psi = self.propagate(cols)
        occ = sum(abs(c[n]) ** 2 *
                  (self.levels @ (np.abs(psi[n]) ** 2 @ weights))
                  for n in range(self.n_ph))
        a1 = sum(math.sqrt(n + 1) * np.conj(c[n]) * c[n + 1] *
                 ((psi[n].conj() * psi[n + 1]).sum(axis=0) @ weights)
                 for n in range(self.n_ph - 1))
        return complex(a1), float(occ)


def gauss_hermite_thermal_average(f, nbar, order=48):
    """(1 / nbar pi) int d^2 beta exp(-|beta|^2 / nbar) f(beta)."""
    x, w = np.polynomial.hermite.hermgauss(order)
    total = 0.0 + 0j
    scale = math.sqrt(nbar)
    for u, wu in zip(x, w):
        for v, wv in zip(x, w):
            total += wu * wv * f(scale * (u + 1j * v))
    return total / math.pi


# --------------------------------------------------------------------------


class TestCoherentMoments:
    def test_vacuum_is_trivial(self):
        c = coeffs_constant(0.0, 1.0)
        m = moments_coherent(c, 0.0, 0.0)
        for name in MOMENT_FIELDS:
            assert getattr(m, name) == 0j

    def test_photon_number_is_conserved(self):
        for tau in (0.1, 1.7, 5.0):
            m = moments_coherent(coeffs_constant(1.3, tau), 2.0, 0.7j)
            assert m.na == 4.0 + 0j

    def test_mechanical_displacement_spot_value(self):
        m = moments_coherent(coeffs_constant(1.0, math.pi), 1.0, 0.0)
        assert m.b1 == pytest.approx(2.0 + 0j, abs=1e-13)

    @pytest.mark.parametrize("mu_m", [0.0, 0.4 + 0.2j])
    def test_against_sector_oracle(self, mu_m):
        oracle = SectorOracle(1.0, math.pi, 14, 460)
        cols = _coherent_amps(mu_m, 460)[:, None]
        a1, nb = oracle.moments(1.0, cols, np.ones(1))
        m = moments_coherent(coeffs_constant(1.0, math.pi), 1.0, mu_m)
        assert a1 == pytest.approx(m.a1, abs=2e-6)
        assert nb == pytest.approx(m.nb.real, abs=2e-6)


class TestThermalMoments:
    def test_nbar_zero_equals_coherent_exactly(self):
        c = coeffs_constant(1.0, 2.3)
        mt = moments_thermal(c, 0.8 + 0.1j, 0.0)
        mc = moments_coherent(c, 0.8 + 0.1j, 0.0)
        for name in MOMENT_FIELDS:
            assert getattr(mt, name) == getattr(mc, name)

    def test_free_thermal_state(self):
        c = coeffs_constant(0.0, 0.7)
        m = moments_thermal(c, 0.0, 2.0)
        assert m.nb == 2.0 + 0j
        assert m.a1 == 0j and m.b1 == 0j

    def test_gaussian_averages_against_quadrature(self):
        # the closed-form thermal moments are Gaussian averages of the
        # coherent ones over the mechanical amplitude
        c = coeffs_constant(1.0, 2.1)
        nbar = 0.7
        mt = moments_thermal(c, 1.1, nbar)
        for name in MOMENT_FIELDS:
            avg = gauss_hermite_thermal_average(
                lambda beta, _n=name: getattr(moments_coherent(c, 1.1, beta), _n),
                nbar)
            assert avg == pytest.approx(getattr(mt, name), abs=1e-8)

    @pytest.mark.slow
    def test_against_fock_density_matrix_oracle(self):
        # coherent light + thermal mechanics as a phonon-Fock mixture
        nbar, k_max = 0.5, 27
        oracle = SectorOracle(1.0, math.pi, 14, 860)
        cols = np.eye(860, k_max)
        k = np.arange(k_max)
        weights = np.exp(k * math.log(nbar / (1 + nbar)) - math.log(1 + nbar))
        a1, nb = oracle.moments(1.0, cols, weights)
        mt = moments_thermal(coeffs_constant(1.0, math.pi), 1.0, nbar)
        assert nb == pytest.approx(mt.nb.real, abs=1e-6)
        assert a1 == pytest.approx(mt.a1, abs=1e-6)


class TestCovarianceFromMoments:
    def test_vacuum_gives_identity(self):
        c = coeffs_constant(0.0, 2.0)
        s = covariance_from_moments(moments_coherent(c, 0.0, 0.0)).sigma
        assert np.allclose(s, np.eye(4), atol=1e-15)

    def test_coherent_product_gives_identity(self):
        c = coeffs_constant(0.0, 2.0)
        s = covariance_from_moments(moments_coherent(c, 1.3, 0.4 - 0.2j)).sigma
        assert np.allclose(s, np.eye(4), atol=1e-12)

    def test_spot_values(self):
        c = coeffs_constant(1.0, math.pi)
        s = covariance_from_moments(moments_coherent(c, 1.0, 0.0)).sigma
        assert s[0, 0].real == pytest.approx(1 + 2 * (1 - math.exp(-4)), abs=1e-6)
        assert s[1, 1].real == pytest.approx(9.0, abs=1e-12)
        assert s[3, 1] == pytest.approx(8.0 + 0j, abs=1e-12)

    @pytest.mark.parametrize("g0,tau,mu_c,mu_m", [
        (1.0, 0.5, 0.5, 0.0),
        (0.8, 2.9, 1.2, 0.3 - 0.5j),
        (1.5, 4.4, 0.2, 1.0j),
    ])
    def test_structure(self, g0, tau, mu_c, mu_m):
        s = covariance_from_moments(
            moments_coherent(coeffs_constant(g0, tau), mu_c, mu_m)).sigma
        # Hermitian, doubled diagonal, conjugate corners, equal cross pairs
        assert np.max(np.abs(s - s.conj().T)) < 1e-12
        assert abs(s[0, 0] - s[2, 2]) < 1e-12 and abs(s[1, 1] - s[3, 3]) < 1e-12
        assert abs(s[0, 2] - np.conj(s[2, 0])) < 1e-12
        assert abs(s[1, 3] - np.conj(s[3, 1])) < 1e-12
        assert abs(s[2, 3] - s[1, 0]) < 1e-12
        assert abs(s[2, 1] - s[3, 0]) < 1e-12
        assert s[0, 0].real >= 1.0 - 1e-12 and s[1, 1].real >= 1.0 - 1e-12

    def test_inconsistent_moments_rejected(self):
        m = Moments(a1=0j, b1=0j, a2=0j, b2=0j, na=1.0 + 0.1j, nb=0j, ab=0j, ab_dag=0j)
        with pytest.raises(InvariantViolation):
            covariance_from_moments(m)


class TestDirectRoute:
    def test_zero_coeffs_identity(self):
        c = coeffs_constant(0.0, 1.0)
        s = covariance_coherent_direct(c, 0.7, 0.0).sigma
        assert np.allclose(s, np.eye(4), atol=1e-14)

    def test_squeezing_entry_spot_value(self):
        c = coeffs_constant(1.0, math.pi)
        s = covariance_coherent_direct(c, 1.0, 0.0).sigma
        expected = 2 * math.exp(-4) * (math.exp(-4) - 1)
        assert s[2, 0] == pytest.approx(expected + 0j, abs=1e-9)

    @pytest.mark.parametrize("g0,tau,mu_c", [
        (1.0, 0.8, 0.5), (1.0, math.pi, 1.0), (0.7, 2.6, 1.5), (1.4, 5.1, 0.3),
    ])
    def test_agrees_with_moments_route_at_ground_state(self, g0, tau, mu_c):
        c = coeffs_constant(g0, tau)
        direct = covariance_coherent_direct(c, mu_c, 0.0).sigma
        via_moments = covariance_from_moments(moments_coherent(c, mu_c, 0.0)).sigma
        assert np.max(np.abs(direct - via_moments)) < 1e-12


class TestLargeMu:
    def test_zero_coeffs_identity(self):
        s = covariance_large_mu(coeffs_constant(0.0, 1.0), 5.0).sigma
        assert np.allclose(s, np.eye(4), atol=1e-14)

    def test_mechanical_diagonal_spot_value(self):
        s = covariance_large_mu(coeffs_constant(1.0, math.pi), 10.0).sigma
        assert s[1, 1].real == pytest.approx(801.0, abs=1e-9)

    def test_close_to_exact_matrix_at_large_mu(self):
        c = coeffs_constant(1.0, math.pi)
        approx = covariance_large_mu(c, 10.0).sigma
        exact = covariance_from_moments(moments_coherent(c, 10.0, 0.0)).sigma
        scale = np.max(np.abs(exact))
        assert np.max(np.abs(approx - exact)) < 0.01 * scale


class TestDispatch:
    def test_initial_state_dispatch(self):
        c = coeffs_constant(1.0, 1.0)
        m1 = moments_for_initial(c, InitialState(mu_c=1.0, mechanics=CoherentMech(0.5)))
        assert m1 == moments_coherent(c, 1.0, 0.5)
        m2 = moments_for_initial(c, InitialState(mu_c=1.0, mechanics=ThermalMech(0.3)))
        assert m2 == moments_thermal(c, 1.0, 0.3)
