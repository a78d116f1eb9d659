import math

import numpy as np
import pytest

from neqfridge import (
    ModelParams,
    ParameterError,
    ResonanceInfeasibleError,
    VirtualTemperaturePoleError,
    build_hamiltonians,
    resolve_resonance,
    resonant_frame,
    thermal_population,
    tilde_populations,
    virtual_coherence,
    virtual_temperature,
)
from neqfridge.dissipation import tilde_channel
from neqfridge.linalg import IDENTITY_2, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, kron
from neqfridge.model import fridge_tilde_operator
from neqfridge.observables import product_state

from conftest import random_feasible


class TestModelParams:
    def test_valid_point(self, p0):
        assert p0.beta1 == pytest.approx(0.75)
        assert p0.beta2 == 0.5
        assert p0.beta3 == 0.25

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"e1": -1.0},
            {"e3": 0.0},
            {"gamma": -0.1},
            {"gamma": 0.6},        # above E1/2
            {"t1": 0.0},
            {"t1": 3.0},           # breaks ordering
            {"t3": 1.0},           # breaks ordering
            {"p": 0.0},
            {"g": -0.01},
        ],
    )
    def test_invalid_points_raise(self, kwargs):
        base = dict(e1=1.0, e3=4.0, gamma=0.3, t1=4 / 3, t2=2.0, t3=4.0, p=0.01, g=0.01)
        base.update(kwargs)
        with pytest.raises(ParameterError):
            ModelParams(**base)

    def test_ordering_relaxable(self):
        params = ModelParams(
            e1=1.0, e3=4.0, gamma=0.3, t1=3.0, t2=2.0, t3=4.0, p=0.01, g=0.01,
            require_ordered_temps=False,
        )
        assert params.t1 == 3.0


class TestResonantFrame:
    def test_no_coupling(self):
        frame = resonant_frame(1.0, 4.0, 0.0)
        assert frame.delta_e == pytest.approx(1.0)
        assert frame.e2 == pytest.approx(5.0)
        assert frame.lam == 0.5
        assert frame.theta == 0.0
        assert np.array_equal(frame.unitary, np.eye(4))
        assert frame.eps2 == pytest.approx(5.0)
        assert frame.eps3 == pytest.approx(4.0)

    def test_maximal_coupling_boundary(self):
        frame = resonant_frame(1.0, 4.0, 0.5)
        assert frame.delta_e == 0.0
        assert frame.theta == pytest.approx(math.pi / 2)

    def test_benchmark_coupling(self):
        frame = resonant_frame(1.0, 4.0, 0.3)
        assert frame.delta_e == pytest.approx(0.8, abs=1e-15)
        assert frame.e2 == pytest.approx(4.8, abs=1e-15)
        assert frame.lam == 0.5
        assert frame.theta == pytest.approx(math.atan(0.75), abs=1e-15)
        assert frame.eps2 == pytest.approx(4.9, abs=1e-14)
        assert frame.eps3 == pytest.approx(3.9, abs=1e-14)

    def test_infeasible(self):
        with pytest.raises(ResonanceInfeasibleError):
            resonant_frame(1.0, 4.0, 0.51)

    def test_unitary_against_operator_formula(self):
        # cos^2(t/4) + sin^2(t/4) ZZ + sin(t/2)(s2+ s3- - s2- s3+)
        rng = np.random.default_rng(7)
        for _ in range(10):
            e1 = rng.uniform(0.5, 2.0)
            gamma = rng.uniform(0.0, 0.5) * e1
            frame = resonant_frame(e1, rng.uniform(2.0, 8.0), gamma)
            t = frame.theta
            formula = (
                math.cos(t / 4) ** 2 * np.eye(4)
                + math.sin(t / 4) ** 2 * kron(SIGMA_Z, SIGMA_Z)
                + math.sin(t / 2) * (kron(SIGMA_PLUS, SIGMA_MINUS) - kron(SIGMA_MINUS, SIGMA_PLUS))
            )
            assert np.max(np.abs(frame.unitary - formula)) < 1e-14

    def test_frame_invariants(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            params = random_feasible(rng)
            frame = resolve_resonance(params)
            u = frame.unitary
            assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12
            # dressed diagonal transforms back to the machine Hamiltonian
            diag = 0.5 * frame.eps2 * kron(SIGMA_Z, IDENTITY_2) + 0.5 * frame.eps3 * kron(IDENTITY_2, SIGMA_Z)
            hfridge = (
                0.5 * frame.e2 * kron(SIGMA_Z, IDENTITY_2)
                + 0.5 * params.e3 * kron(IDENTITY_2, SIGMA_Z)
                + params.gamma * (kron(SIGMA_PLUS, SIGMA_MINUS) + kron(SIGMA_MINUS, SIGMA_PLUS))
            )
            assert np.max(np.abs(u.conj().T @ diag @ u - hfridge)) < 1e-12
            # resonance and consistency of lambda with the gap formula
            assert abs(frame.eps2 - frame.eps3 - params.e1) < 1e-12
            assert abs(frame.lam - math.hypot(0.5 * frame.delta_e, params.gamma)) < 1e-12
            # machine eigenvalues, each doubled by the target tensor factor
            eigs = np.sort(np.linalg.eigvalsh(hfridge))
            expected = np.sort([frame.ebar, frame.lam, -frame.lam, -frame.ebar])
            assert np.max(np.abs(eigs - expected)) < 1e-12


class TestThermalPopulation:
    def test_infinite_temperature_limit(self):
        assert thermal_population(1.0, 1e12) == pytest.approx(0.5, abs=1e-12)

    def test_zero_temperature_limit(self):
        assert thermal_population(1.0, 1e-12) == 0.0

    def test_reference_value(self):
        assert thermal_population(1.0, 2.0) == pytest.approx(0.3775406687981454, abs=1e-15)

    def test_monotone_in_temperature(self):
        values = [thermal_population(1.0, t) for t in (0.5, 1.0, 2.0, 5.0, 50.0)]
        assert values == sorted(values)
        assert all(0.0 < v < 0.5 for v in values)

    def test_invalid(self):
        with pytest.raises(ParameterError):
            thermal_population(-1.0, 2.0)


class TestTildePopulations:
    def test_degenerate_baths(self):
        frame = resonant_frame(1.0, 4.0, 0.3)
        pops = tilde_populations(frame, 2.0, 2.0)
        assert pops.rtilde2 == pytest.approx(thermal_population(frame.eps2, 2.0), abs=1e-15)
        assert pops.rtilde3 == pytest.approx(thermal_population(frame.eps3, 2.0), abs=1e-15)
        assert pops.ttilde2 == pytest.approx(2.0, abs=1e-12)
        assert pops.ttilde3 == pytest.approx(2.0, abs=1e-12)

    def test_no_delocalization(self):
        frame = resonant_frame(1.0, 4.0, 0.0)
        pops = tilde_populations(frame, 2.0, 4.0)
        assert pops.rtilde2 == pops.r22
        assert pops.rtilde3 == pops.r33
        assert pops.ttilde2 == pytest.approx(2.0, abs=1e-12)
        assert pops.ttilde3 == pytest.approx(4.0, abs=1e-12)

    def test_benchmark_values(self):
        frame = resonant_frame(1.0, 4.0, 0.3)
        pops = tilde_populations(frame, 2.0, 4.0)
        assert pops.rtilde2 == pytest.approx(0.09420046832590666, abs=1e-12)
        assert pops.rtilde3 == pytest.approx(0.25895185268404036, abs=1e-12)
        assert pops.ttilde2 == pytest.approx(2.1648915151351646, abs=1e-10)
        assert pops.ttilde3 == pytest.approx(3.709257191331811, abs=1e-10)

    def test_mixing_formula(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            params = random_feasible(rng)
            frame = resolve_resonance(params)
            pops = tilde_populations(frame, params.t2, params.t3)
            c2, s2 = frame.cos_half_sq, frame.sin_half_sq
            assert pops.rtilde2 == pytest.approx(c2 * pops.r22 + s2 * pops.r23, abs=1e-15)
            assert pops.rtilde3 == pytest.approx(c2 * pops.r33 + s2 * pops.r32, abs=1e-15)
            for r in (pops.r22, pops.r23, pops.r32, pops.r33, pops.rtilde2, pops.rtilde3):
                assert 0.0 < r < 0.5
            assert pops.ttilde2 > 0 and pops.ttilde3 > 0

    def test_cross_check_against_channel_fixed_point(self):
        # the dressed channels annihilate the product state built from the
        # claimed mixed populations
        frame = resonant_frame(1.0, 4.0, 0.3)
        pops = tilde_populations(frame, 2.0, 4.0, t1=4 / 3)
        rho0 = product_state(frame, pops)
        for nu in (2, 3):
            out = tilde_channel(nu, frame, pops, 0.01).apply(rho0)
            assert np.max(np.abs(out)) < 1e-15


class TestVirtualQubit:
    def test_degenerate_baths_give_bath_temperature(self):
        frame = resonant_frame(1.0, 4.0, 0.3)
        pops = tilde_populations(frame, 2.0, 2.0)
        assert virtual_temperature(frame, pops) == pytest.approx(2.0, abs=1e-12)

    def test_uncoupled_formula(self):
        frame = resonant_frame(1.0, 4.0, 0.0)
        pops = tilde_populations(frame, 2.0, 4.0)
        expected = 1.0 / (5.0 / 2.0 - 4.0 / 4.0)
        assert virtual_temperature(frame, pops) == pytest.approx(expected, abs=1e-12)

    def test_benchmark_value(self):
        frame = resonant_frame(1.0, 4.0, 0.3)
        pops = tilde_populations(frame, 2.0, 4.0)
        assert virtual_temperature(frame, pops) == pytest.approx(0.8251033339169167, abs=1e-12)

    def test_pole_reported(self):
        from dataclasses import replace

        frame = resonant_frame(1.0, 4.0, 0.3)
        pops = tilde_populations(frame, 2.0, 4.0)
        broken = replace(pops, rtilde3=pops.rtilde2)
        with pytest.raises(VirtualTemperaturePoleError):
            virtual_temperature(frame, broken)

    def test_coherence_vanishes_without_coupling(self):
        frame = resonant_frame(1.0, 4.0, 0.0)
        pops = tilde_populations(frame, 2.0, 4.0)
        assert virtual_coherence(frame, pops) == 0.0

    def test_coherence_vanishes_for_equal_populations(self):
        from dataclasses import replace

        frame = resonant_frame(1.0, 4.0, 0.3)
        pops = tilde_populations(frame, 2.0, 4.0)
        equal = replace(pops, rtilde3=pops.rtilde2)
        assert virtual_coherence(frame, equal) == 0.0

    def test_coherence_benchmark_value(self):
        frame = resonant_frame(1.0, 4.0, 0.3)
        pops = tilde_populations(frame, 2.0, 4.0)
        assert virtual_coherence(frame, pops) == pytest.approx(0.324776673327092, abs=1e-12)

    def test_coherence_decreases_with_virtual_temperature(self):
        # sweep the engine bath at a fixed frame and compare orderings
        frame = resonant_frame(1.0, 4.0, 0.3)
        points = []
        for t3 in np.linspace(2.0, 30.0, 40):
            pops = tilde_populations(frame, 2.0, t3)
            points.append((virtual_temperature(frame, pops), virtual_coherence(frame, pops)))
        points.sort()
        coherences = [c for _, c in points]
        assert all(c_lo >= c_hi - 1e-15 for c_lo, c_hi in zip(coherences, coherences[1:]))

    def test_virtual_temperature_slope_sign(self):
        # the derivative of Tv in T3 at T3 = T2 follows the cooling condition
        from neqfridge.observables import cooling_condition

        for gamma in (0.1, 0.3, 0.45, 0.49, 0.4962, 0.499):
            frame = resonant_frame(1.0, 4.0, gamma)
            h = 1e-6

            def tv(t3):
                return virtual_temperature(frame, tilde_populations(frame, 2.0, t3))

            slope = (tv(2.0 + h) - tv(2.0 - h)) / (2 * h)
            condition = cooling_condition(1.0, 4.0, gamma)
            assert (slope < 0) == condition
            assert (2.0 * gamma**2 < 4.0 * frame.delta_e) == condition


class TestHamiltonians:
    def test_hermitian_and_commuting(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            params = random_feasible(rng)
            frame = resolve_resonance(params)
            hams = build_hamiltonians(params, frame)
            for h in (hams.h1, hams.hfridge, hams.hg, hams.htot):
                assert np.max(np.abs(h - h.conj().T)) < 1e-12
            free = hams.h1 + hams.hfridge
            comm = free @ hams.hg - hams.hg @ free
            assert np.max(np.abs(comm)) < 1e-12

    def test_uncoupled_machine_is_diagonal(self):
        params = ModelParams(e1=1.0, e3=4.0, gamma=0.0, t1=4 / 3, t2=2.0, t3=4.0, p=0.01, g=0.01)
        hams = build_hamiltonians(params, resolve_resonance(params))
        assert np.max(np.abs(hams.hfridge - np.diag(np.diag(hams.hfridge)))) == 0.0

    def test_no_tripartite_coupling(self):
        params = ModelParams(e1=1.0, e3=4.0, gamma=0.3, t1=4 / 3, t2=2.0, t3=4.0, p=0.01, g=0.0)
        hams = build_hamiltonians(params, resolve_resonance(params))
        assert np.max(np.abs(hams.hg)) == 0.0

    def test_interaction_matrix_elements(self, p0):
        # direct assembly from the eigenvector columns as the oracle
        frame = resolve_resonance(p0)
        hams = build_hamiltonians(p0, frame)
        psi01 = frame.eigvecs[:, 1]
        psi10 = frame.eigvecs[:, 2]
        zero = np.array([1.0, 0.0])
        one = np.array([0.0, 1.0])
        # raising the target lowers the virtual qubit: |1, psi01> -> |0, psi10>
        bra = np.kron(zero, psi10)
        ket = np.kron(one, psi01)
        assert bra.conj() @ hams.hg @ ket == pytest.approx(p0.g, abs=1e-14)
        # dressed ladder form: sigma_v^+ equals the dressed exchange operator
        sig_v_plus = np.outer(psi01, psi10.conj())
        assert np.max(np.abs(sig_v_plus - fridge_tilde_operator(frame, "+-"))) < 1e-14

    def test_degenerate_bath_collapse_to_gibbs(self):
        # T2 = T3 makes the dressed product the Gibbs state of the machine
        params = ModelParams(e1=1.0, e3=4.0, gamma=0.35, t1=2.0, t2=2.0, t3=2.0, p=0.01, g=0.01)
        frame = resolve_resonance(params)
        pops = tilde_populations(frame, 2.0, 2.0, t1=2.0)
        hams = build_hamiltonians(params, frame)
        hfridge4 = hams.hfridge.reshape(2, 4, 2, 4)[0, :, 0, :]
        evals, evecs = np.linalg.eigh(hfridge4)
        weights = np.exp(-evals / 2.0)
        gibbs = (evecs * (weights / weights.sum())) @ evecs.conj().T
        fridge_part = product_state(frame, pops).reshape(2, 4, 2, 4)[0, :, 0, :] / pops.r1
        assert np.max(np.abs(fridge_part - gibbs)) < 1e-12
