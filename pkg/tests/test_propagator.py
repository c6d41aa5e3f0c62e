"""Unit tests for kernels, the generating function, and wavepacket evolution."""

import cmath
import math

import numpy as np
import pytest

from quadprop.errors import FocalPointError, NonConvergentError
from quadprop.lie_core import NormalOrderFactors, QuadraticGenerator, normal_order
from quadprop.propagator import (
    ComplexGaussian,
    GaussianKernel,
    GaussianWavepacket,
    classical_map_from_w,
    compose_kernels,
    convolve,
    generating_function,
    kernel_from_abcd,
    kernel_from_sr,
    named_generator,
)
from quadprop.symplectic import AbcdMatrix, abcd_from_generator, compose
from quadprop.verify import random_generators

# Frozen reference: free-particle kernel value K(Q=1, q=0) at m = t = 1,
# computed independently at 40-digit precision before the build.
FREE_KERNEL_0_TO_1 = 0.38280491754448324 - 0.11231802257721920j

OSC_QUARTER = AbcdMatrix(0.0, 1.0, -1.0, 0.0)
FREE_UNIT = AbcdMatrix(1.0, 1.0, 0.0, 1.0)


class TestKernelFromSr:
    def test_quarter_period_rotation(self):
        k = kernel_from_sr(NormalOrderFactors(1j, 0j))
        ref = cmath.exp(-1j * np.pi / 4) / math.sqrt(2 * np.pi)
        assert k.prefactor == pytest.approx(ref, abs=1e-14)
        assert k.coef_qQ == pytest.approx(-1j, abs=1e-14)
        assert abs(k.coef_qq) < 1e-14
        assert abs(k.coef_QQ) < 1e-14
        # same kernel through the matrix route
        k2 = kernel_from_abcd(OSC_QUARTER)
        for q, Q in [(0.3, -1.2), (1.0, 1.0), (-2.0, 0.5)]:
            assert k.evaluate(q, Q) == pytest.approx(k2.evaluate(q, Q), abs=1e-14)

    def test_pure_squeeze_is_focal(self):
        with pytest.raises(FocalPointError) as err:
            kernel_from_sr(NormalOrderFactors(1.25 + 0j, -0.75 + 0j))
        assert err.value.matrix is not None
        assert err.value.matrix.b == pytest.approx(0.0)

    def test_free_particle_coefficients(self):
        k = kernel_from_sr(NormalOrderFactors(1.0 + 0.5j, -0.5j))
        assert k.coef_qQ == pytest.approx(-1j, abs=1e-14)
        assert k.coef_qq == pytest.approx(0.5j, abs=1e-14)
        assert k.coef_QQ == pytest.approx(0.5j, abs=1e-14)
        assert k.evaluate(0.0, 1.0) == pytest.approx(FREE_KERNEL_0_TO_1, abs=1e-12)

    def test_rejects_non_unitary_factors(self):
        with pytest.raises(ValueError, match="not unitary"):
            kernel_from_sr(NormalOrderFactors(2.0 + 0j, 0j))


class TestKernelFromAbcd:
    def test_oscillator_closed_form(self):
        k = kernel_from_abcd(OSC_QUARTER)
        pref = cmath.exp(-1j * np.pi / 4) / math.sqrt(2 * np.pi)
        for q in (-1.5, 0.0, 2.0):
            for Q in (-0.5, 1.0):
                ref = pref * cmath.exp(-1j * q * Q)
                assert k.evaluate(q, Q) == pytest.approx(ref, abs=1e-13)

    def test_free_closed_form(self):
        k = kernel_from_abcd(FREE_UNIT)
        pref = cmath.exp(-1j * np.pi / 4) / math.sqrt(2 * np.pi)
        for q in (-1.5, 0.0, 2.0):
            for Q in (-0.5, 1.0):
                ref = pref * cmath.exp(0.5j * (q - Q) ** 2)
                assert k.evaluate(q, Q) == pytest.approx(ref, abs=1e-13)

    def test_frozen_value(self):
        k = kernel_from_abcd(FREE_UNIT)
        assert k.evaluate(0.0, 1.0) == pytest.approx(FREE_KERNEL_0_TO_1, abs=1e-12)

    def test_negative_b_branch(self):
        k = kernel_from_abcd(AbcdMatrix(1.0, -1.0, 0.0, 1.0))
        assert cmath.phase(k.prefactor) == pytest.approx(np.pi / 4, abs=1e-14)

    def test_focal_point(self):
        with pytest.raises(FocalPointError) as err:
            kernel_from_abcd(AbcdMatrix(2.0, 0.0, 0.0, 0.5))
        assert err.value.matrix == AbcdMatrix(2.0, 0.0, 0.0, 0.5)

    def test_exponent_structure_random(self):
        rng = np.random.default_rng(11)
        for g in random_generators(rng, 300, scale=2.0):
            m = abcd_from_generator(g)
            if abs(m.b) < 1e-2:
                continue
            k = kernel_from_abcd(m)
            assert k.coef_qQ == pytest.approx(-1j / m.b, abs=1e-12)
            assert k.coef_qq == pytest.approx(0.5j * m.a / m.b, abs=1e-12)
            assert k.coef_QQ == pytest.approx(0.5j * m.d / m.b, abs=1e-12)
            assert abs(k.prefactor) == pytest.approx(
                1.0 / math.sqrt(2 * np.pi * abs(m.b)), abs=1e-12
            )


class TestGeneratingFunction:
    def test_free_particle_form(self):
        w = generating_function(FREE_UNIT)
        for q, Q in [(0.0, 0.0), (1.0, 2.0), (-0.7, 0.3)]:
            assert w.evaluate(q, Q) == pytest.approx(q * Q - 0.5 * q * q - 0.5 * Q * Q)

    def test_no_constant_term(self):
        rng = np.random.default_rng(12)
        for g in random_generators(rng, 100, scale=2.0):
            m = abcd_from_generator(g)
            if abs(m.b) < 1e-2:
                continue
            assert generating_function(m).evaluate(0.0, 0.0) == 0.0

    def test_oscillator_eighth_period_value(self):
        m = abcd_from_generator(named_generator("harmonic", 1.0, 1.0, np.pi / 4))
        w = generating_function(m)
        assert w.evaluate(1.0, 1.0) == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-12)

    def test_reconstructs_matrix(self):
        rng = np.random.default_rng(13)
        for g in random_generators(rng, 300, scale=2.0):
            m = abcd_from_generator(g)
            if abs(m.b) < 1e-2:
                continue
            back = generating_function(m).to_abcd()
            assert back.a == pytest.approx(m.a, abs=1e-10)
            assert back.b == pytest.approx(m.b, abs=1e-10)
            assert back.c == pytest.approx(m.c, abs=1e-10)
            assert back.d == pytest.approx(m.d, abs=1e-10)

    def test_focal_point(self):
        with pytest.raises(FocalPointError):
            generating_function(AbcdMatrix(2.0, 0.0, 0.0, 0.5))


class TestClassicalMap:
    def test_free_flight(self):
        w = generating_function(FREE_UNIT)
        p, P = classical_map_from_w(w, 0.0, 1.0)
        assert p == pytest.approx(1.0)
        assert P == pytest.approx(1.0)

    def test_origin_maps_to_origin(self):
        rng = np.random.default_rng(14)
        for g in random_generators(rng, 50, scale=2.0):
            m = abcd_from_generator(g)
            if abs(m.b) < 1e-2:
                continue
            p, P = classical_map_from_w(generating_function(m), 0.0, 0.0)
            assert p == 0.0 and P == 0.0

    def test_quarter_rotation_sends_momentum_to_position(self):
        w = generating_function(OSC_QUARTER)
        p, P = classical_map_from_w(w, 0.0, 1.0)
        assert p == pytest.approx(1.0, abs=1e-14)
        assert P == pytest.approx(0.0, abs=1e-14)

    def test_consistent_with_linear_map(self):
        rng = np.random.default_rng(15)
        for g in random_generators(rng, 300, scale=2.0):
            m = abcd_from_generator(g)
            if abs(m.b) < 1e-2:
                continue
            q, Q = rng.uniform(-2, 2, size=2)
            p, P = classical_map_from_w(generating_function(m), q, Q)
            Q_img, P_img = m.apply(q, p)
            assert Q_img == pytest.approx(Q, abs=1e-10)
            assert P_img == pytest.approx(P, abs=1e-10)

    def test_matches_finite_differences(self):
        h = 1e-6
        for m in (FREE_UNIT, OSC_QUARTER,
                  abcd_from_generator(QuadraticGenerator(0.8, 0.3, -0.4))):
            w = generating_function(m)
            for q, Q in [(0.4, -1.1), (-2.0, 0.9)]:
                p, P = classical_map_from_w(w, q, Q)
                p_fd = (w.evaluate(q + h, Q) - w.evaluate(q - h, Q)) / (2 * h)
                P_fd = -(w.evaluate(q, Q + h) - w.evaluate(q, Q - h)) / (2 * h)
                assert p_fd == pytest.approx(p, abs=1e-6)
                assert P_fd == pytest.approx(P, abs=1e-6)


class TestWavepacket:
    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            GaussianWavepacket(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            GaussianWavepacket(0.0, 0.0, -1.0)

    def test_normalized_on_construction(self):
        for w in (0.3, 1.0, 2.7):
            psi = GaussianWavepacket(1.2, -0.7, w, phase=0.4)
            assert psi.to_complex().norm() == pytest.approx(1.0, abs=1e-12)

    def test_norm_against_quadrature(self):
        psi = GaussianWavepacket(0.5, 2.0, 1.3).to_complex()
        x = np.linspace(-20, 20, 40001)
        num = math.sqrt(np.trapezoid(np.abs(psi.evaluate(x)) ** 2, x))
        assert psi.norm() == pytest.approx(num, abs=1e-9)

    def test_moments_against_quadrature(self):
        psi = GaussianWavepacket(-0.8, 1.7, 0.9).to_complex()
        x = np.linspace(-20, 20, 40001)
        vals = psi.evaluate(x)
        dens = np.abs(vals) ** 2
        mean_q = np.trapezoid(x * dens, x)
        assert psi.mean_position() == pytest.approx(mean_q, abs=1e-9)
        dpsi = np.gradient(vals, x)
        mean_p = np.trapezoid((vals.conjugate() * dpsi).imag, x)
        # second-order finite differences limit the oracle to ~1e-6 here
        assert psi.mean_momentum() == pytest.approx(mean_p, abs=1e-5)


class TestConvolve:
    def test_short_time_is_near_identity(self):
        k = kernel_from_abcd(abcd_from_generator(named_generator("free", 1.0, 0.0, 1e-6)))
        psi = GaussianWavepacket(0.0, 0.0, 1.0)
        out = convolve(k, psi)
        assert out.l2_distance(psi.to_complex()) < 1e-5

    def test_free_flight_moves_center(self):
        k = kernel_from_abcd(FREE_UNIT)
        out = convolve(k, GaussianWavepacket(0.0, 1.0, 1.0))
        assert out.mean_position() == pytest.approx(1.0, abs=1e-12)
        assert out.mean_momentum() == pytest.approx(1.0, abs=1e-12)

    def test_near_half_period_rotation(self):
        t = np.pi - 0.01
        k = kernel_from_abcd(abcd_from_generator(named_generator("harmonic", 1.0, 1.0, t)))
        out = convolve(k, GaussianWavepacket(1.0, 0.0, 1.0))
        assert math.hypot(out.mean_position() + 1.0, out.mean_momentum()) < 2e-2

    def test_half_period_is_focal(self):
        with pytest.raises(FocalPointError):
            kernel_from_abcd(abcd_from_generator(named_generator("harmonic", 1.0, 1.0, np.pi)))

    def test_norm_preserved(self):
        rng = np.random.default_rng(16)
        count = 0
        while count < 100:
            g = random_generators(rng, 1, scale=2.0)[0]
            m = abcd_from_generator(g)
            if abs(m.b) < 1e-2:
                continue
            psi = GaussianWavepacket(
                rng.uniform(-2, 2), rng.uniform(-2, 2),
                rng.uniform(0.5, 2.0), rng.uniform(-np.pi, np.pi),
            )
            out = convolve(kernel_from_abcd(m), psi)
            assert out.norm() == pytest.approx(1.0, abs=1e-10)
            count += 1

    def test_accepts_complex_gaussian_input(self):
        k = kernel_from_abcd(FREE_UNIT)
        psi = GaussianWavepacket(0.0, 1.0, 1.0)
        assert convolve(k, psi.to_complex()).mean_position() == pytest.approx(1.0)

    def test_non_convergent_combination(self):
        bad = GaussianKernel(prefactor=1.0, coef_qQ=0.0, coef_qq=1.0 + 0j, coef_QQ=-1.0 + 0j)
        with pytest.raises(NonConvergentError):
            convolve(bad, GaussianWavepacket(0.0, 0.0, 2.0))

    def test_evolved_state_against_quadrature(self):
        # direct numerical integral of K(Q, q) psi(q) against the closed form
        k = kernel_from_abcd(abcd_from_generator(QuadraticGenerator(0.7, 0.2, 0.4)))
        psi = GaussianWavepacket(0.5, -0.3, 1.1)
        out = convolve(k, psi)
        q = np.linspace(-30, 30, 120001)
        vals = psi.evaluate(q)
        for Q in (-1.0, 0.0, 1.5):
            num = np.trapezoid(k.evaluate(q, Q) * vals, q)
            assert out.evaluate(Q) == pytest.approx(num, abs=1e-7)


class TestComposeKernels:
    def test_matches_composed_matrix(self):
        rng = np.random.default_rng(17)
        count = 0
        while count < 50:
            g1, g2 = random_generators(rng, 2, scale=1.5)
            m1 = abcd_from_generator(g1)
            m2 = abcd_from_generator(g2)
            m12 = compose(m2, m1)
            if min(abs(m1.b), abs(m2.b), abs(m12.b)) < 5e-2:
                continue
            k12 = compose_kernels(kernel_from_abcd(m2), kernel_from_abcd(m1))
            ref = kernel_from_abcd(m12)
            assert k12.coef_qQ == pytest.approx(ref.coef_qQ, abs=1e-8)
            assert k12.coef_qq == pytest.approx(ref.coef_qq, abs=1e-8)
            assert k12.coef_QQ == pytest.approx(ref.coef_QQ, abs=1e-8)
            assert abs(k12.prefactor) == pytest.approx(abs(ref.prefactor), abs=1e-8)
            # any leftover discrepancy is a constant unit-modulus phase
            ratio = k12.prefactor / ref.prefactor
            assert abs(abs(ratio) - 1.0) < 1e-8
            count += 1

    def test_free_steps_compose_exactly(self):
        k1 = kernel_from_abcd(FREE_UNIT)
        k12 = compose_kernels(k1, k1)
        ref = kernel_from_abcd(AbcdMatrix(1.0, 2.0, 0.0, 1.0))
        assert k12.coef_qQ == pytest.approx(ref.coef_qQ, abs=1e-14)
        assert k12.prefactor == pytest.approx(ref.prefactor, abs=1e-14)

    def test_focal_composition(self):
        quarter = kernel_from_abcd(OSC_QUARTER)
        with pytest.raises(FocalPointError):
            compose_kernels(quarter, quarter)


class TestNamedGenerator:
    def test_harmonic_assignment(self):
        g = named_generator("harmonic", 1.0, 1.0, np.pi / 2)
        assert g == QuadraticGenerator(np.pi / 2, 0.0, np.pi / 2)

    def test_free_assignment(self):
        assert named_generator("free", 1.0, 123.0, 1.0) == QuadraticGenerator(1.0, 0.0, 0.0)

    def test_zero_frequency_limit_is_free(self):
        g = named_generator("harmonic", 2.0, 0.0, 3.0)
        assert g == QuadraticGenerator(1.5, 0.0, 0.0)

    def test_mass_scaling(self):
        g = named_generator("harmonic", 2.0, 3.0, 0.5)
        assert g.alpha == pytest.approx(0.25)
        assert g.gamma == pytest.approx(9.0)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            named_generator("free", 0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            named_generator("free", -1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            named_generator("harmonic", 1.0, -2.0, 1.0)
        with pytest.raises(ValueError):
            named_generator("anharmonic", 1.0, 1.0, 1.0)


def test_batch_evaluation_independent_of_partitioning():
    # evaluating in one batch or in chunks must give bitwise-equal results
    k = kernel_from_abcd(abcd_from_generator(QuadraticGenerator(0.9, -0.2, 0.3)))
    q = np.linspace(-2, 2, 101)
    Q = np.linspace(-1, 3, 101)
    whole = k.evaluate(q, Q)
    parts = np.concatenate([k.evaluate(q[:37], Q[:37]),
                            k.evaluate(q[37:], Q[37:])])
    assert np.array_equal(whole, parts)
    singles = np.array([k.evaluate(qi, Qi) for qi, Qi in zip(q, Q)])
    assert np.array_equal(whole, singles)


def test_dual_form_pointwise_agreement():
    rng = np.random.default_rng(18)
    pts = rng.uniform(-2.0, 2.0, size=(100, 2))
    worst = 0.0
    count = 0
    while count < 1000:
        g = random_generators(rng, 1, scale=2.0)[0]
        m = abcd_from_generator(g)
        if abs(m.b) <= 1e-2:
            continue
        v1 = kernel_from_sr(normal_order(g)).evaluate(pts[:, 0], pts[:, 1])
        v2 = kernel_from_abcd(m).evaluate(pts[:, 0], pts[:, 1])
        worst = max(worst, float(np.abs(v1 - v2).max()))
        count += 1
    assert worst <= 1e-10
