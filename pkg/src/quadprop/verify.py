"""Self-contained invariant suites for every module, used by the CLI.

Each suite re-derives its module's defining identities on fixed-seed
random samples and reports the worst residual per check. ``run_all``
aggregates them into a machine-readable summary; any residual above its
tolerance fails the run. A fault-injection flag perturbs one check on
purpose so the harness itself can be exercised.
"""

from __future__ import annotations

import numpy as np

from . import coherent_iwop, lie_core, oracle, propagator, symplectic
from .lie_core import QuadraticGenerator, normal_order
from .propagator import GaussianWavepacket, named_generator
from .symplectic import abcd_from_generator, compose

__all__ = ["run_all", "random_generators", "near_degenerate_generators"]

DEFAULT_SEED = 20260801


def random_generators(rng, n: int, scale: float = 5.0) -> list[QuadraticGenerator]:
    """n generators with components uniform in [-scale, scale]."""
    vals = rng.uniform(-scale, scale, size=(n, 3))
    return [QuadraticGenerator(*row) for row in vals]


def near_degenerate_generators(rng, n: int) -> list[QuadraticGenerator]:
    """Generators sampled near beta^2 = alpha*gamma so |delta_sq| < 1e-6."""
    out = []
    for _ in range(n):
        alpha = rng.uniform(0.05, 5.0) * (1 if rng.random() < 0.5 else -1)
        gamma = rng.uniform(0.05, 5.0) * np.sign(alpha)
        beta = np.sqrt(alpha * gamma) * (1 if rng.random() < 0.5 else -1)
        beta += rng.uniform(-1.0, 1.0) * 1e-8
        out.append(QuadraticGenerator(alpha, beta, gamma))
    return out


def _filtered_generators(rng, n, scale, min_b):
    """Random generators whose flow matrix has |B| above min_b."""
    out = []
    while len(out) < n:
        g = random_generators(rng, 1, scale)[0]
        if abs(abcd_from_generator(g).b) > min_b:
            out.append(g)
    return out


def _check(residual: float, tolerance: float) -> dict:
    residual = float(residual)
    return {"residual": residual, "tolerance": tolerance, "pass": residual <= tolerance}


def lie_core_suite(rng, inject_fault: bool = False) -> dict:
    checks = {}

    gens = random_generators(rng, 10_000) + near_degenerate_generators(rng, 300)
    worst = 0.0
    for g in gens:
        f = normal_order(g)
        s = f.s + 1e-6 if inject_fault else f.s
        worst = max(worst, abs(abs(s) ** 2 - abs(f.r) ** 2 - 1.0))
    checks["unitarity"] = _check(worst, 1e-10)

    # Continuity through the delta_sq = 0 seam of gc/gs, lifted to (s, r)
    # with tau and sigma held fixed.
    worst = 0.0
    for tau, sigma in [(0.5 + 0.5j, 1.0), (2.0 - 1.0j, -4.0), (0.0 + 0.0j, 3.0)]:
        ref_s = complex(lie_core.gc(0.0), -0.5 * sigma * lie_core.gs(0.0))
        ref_r = -tau * lie_core.gs(0.0)
        for x in (-1e-9, 1e-9):
            s = complex(lie_core.gc(x), -0.5 * sigma * lie_core.gs(x))
            r = -tau * lie_core.gs(x)
            worst = max(worst, abs(s - ref_s), abs(r - ref_r))
    checks["seam_continuity"] = _check(worst, 1e-7)

    # Truncated-Fock certification of the factorization: single exponential
    # vs three-factor product, compared on levels <= 8.
    worst = 0.0
    for g in random_generators(rng, 20, scale=0.5):
        direct = oracle.fock_unitary_direct(g, dim=60)
        ordered = oracle.fock_unitary_ordered(g, dim=60)
        worst = max(worst, float(np.abs(direct[:9, :9] - ordered[:9, :9]).max()))
    checks["fock_equivalence"] = _check(worst, 1e-6)

    return _suite(checks)


def symplectic_suite(rng) -> dict:
    checks = {}
    gens = random_generators(rng, 10_000) + near_degenerate_generators(rng, 300)

    worst_det = 0.0
    worst_oracle = 0.0
    worst_dict = 0.0
    for g in gens:
        m = abcd_from_generator(g)
        worst_det = max(worst_det, abs(m.det() - 1.0))
        o = symplectic.matrix_exp_oracle(g)
        worst_oracle = max(
            worst_oracle,
            abs(m.a - o.a), abs(m.b - o.b), abs(m.c - o.c), abs(m.d - o.d),
        )
        md = symplectic.abcd_from_sr(normal_order(g))
        worst_dict = max(
            worst_dict,
            abs(m.a - md.a), abs(m.b - md.b), abs(m.c - md.c), abs(m.d - md.d),
        )
    checks["determinant"] = _check(worst_det, 1e-10)
    checks["matrix_exp_oracle"] = _check(worst_oracle, 1e-10)
    checks["sr_dictionary"] = _check(worst_dict, 1e-10)

    worst = 0.0
    for g in random_generators(rng, 2000):
        f = normal_order(g)
        back = symplectic.sr_from_abcd(symplectic.abcd_from_sr(f))
        worst = max(worst, abs(back.s - f.s), abs(back.r - f.r))
    checks["dictionary_roundtrip"] = _check(worst, 1e-12)

    # Long composition chain of rotation-dominated steps (bounded entries);
    # the determinant must stay pinned to 1.
    total = symplectic.AbcdMatrix.identity()
    worst = 0.0
    for _ in range(1000):
        theta = rng.uniform(-np.pi, np.pi)
        eps = rng.uniform(-0.01, 0.01, size=3)
        step = abcd_from_generator(
            QuadraticGenerator(theta + eps[0], eps[1], theta + eps[2])
        )
        total = compose(step, total)
        worst = max(worst, abs(total.det() - 1.0))
    checks["composition_chain"] = _check(worst, 1e-9)

    return _suite(checks)


def propagator_suite(rng) -> dict:
    checks = {}

    # Kernel from (s, r) and kernel from ABCD agree pointwise. The |B|
    # floor matches the acceptance gate: closer to a caustic the (s, r)
    # components cancel in B and double rounding alone exceeds 1e-10.
    worst = 0.0
    pts = rng.uniform(-2.0, 2.0, size=(100, 2))
    for g in _filtered_generators(rng, 1000, scale=2.0, min_b=1e-2):
        k1 = propagator.kernel_from_sr(normal_order(g))
        k2 = propagator.kernel_from_abcd(abcd_from_generator(g))
        v1 = k1.evaluate(pts[:, 0], pts[:, 1])
        v2 = k2.evaluate(pts[:, 0], pts[:, 1])
        worst = max(worst, float(np.abs(v1 - v2).max()))
    checks["dual_form"] = _check(worst, 1e-10)

    # The generating function reconstructs its source matrix, and its
    # gradient map reproduces the linear map exactly.
    worst = 0.0
    for g in _filtered_generators(rng, 1000, scale=2.0, min_b=1e-2):
        m = abcd_from_generator(g)
        w = propagator.generating_function(m)
        back = w.to_abcd()
        worst = max(
            worst,
            abs(back.a - m.a), abs(back.b - m.b), abs(back.c - m.c), abs(back.d - m.d),
        )
        q, qq = rng.uniform(-2.0, 2.0, size=2)
        p, pp = propagator.classical_map_from_w(w, q, qq)
        q_img, p_img = m.apply(q, p)
        worst = max(worst, abs(q_img - qq), abs(p_img - pp))
    checks["generating_roundtrip"] = _check(worst, 1e-10)

    # Group property at the kernel level, modulo a constant phase.
    worst = 0.0
    count = 0
    while count < 100:
        g1, g2 = random_generators(rng, 2, scale=1.5)
        m1 = abcd_from_generator(g1)
        m2 = abcd_from_generator(g2)
        m12 = compose(m2, m1)
        if min(abs(m1.b), abs(m2.b), abs(m12.b)) < 5e-2:
            continue
        k12 = propagator.compose_kernels(
            propagator.kernel_from_abcd(m2), propagator.kernel_from_abcd(m1)
        )
        k_ref = propagator.kernel_from_abcd(m12)
        worst = max(
            worst,
            abs(k12.coef_qQ - k_ref.coef_qQ),
            abs(k12.coef_qq - k_ref.coef_qq),
            abs(k12.coef_QQ - k_ref.coef_QQ),
            abs(abs(k12.prefactor) - abs(k_ref.prefactor)),
        )
        count += 1
    checks["kernel_group"] = _check(worst, 1e-8)

    # Unitary kernels preserve the norm of every packet they act on.
    worst = 0.0
    for g in _filtered_generators(rng, 100, scale=2.0, min_b=1e-2):
        k = propagator.kernel_from_abcd(abcd_from_generator(g))
        psi = GaussianWavepacket(
            center_q=rng.uniform(-2, 2),
            center_p=rng.uniform(-2, 2),
            width=rng.uniform(0.5, 2.0),
            phase=rng.uniform(-np.pi, np.pi),
        )
        worst = max(worst, abs(propagator.convolve(k, psi).norm() - 1.0))
    checks["convolve_unitarity"] = _check(worst, 1e-10)

    return _suite(checks)


def iwop_suite(rng) -> dict:
    checks = {}

    # Coherent-state completeness with the d^2z/pi measure: the smeared
    # delta normalization int g(x) K(x,y) g(y) dx dy over a |z| <= 8 disk
    # equals 1 for a unit Gaussian g.
    checks["completeness"] = _check(abs(_completeness_quadrature() - 1.0), 1e-4)

    worst = 0.0
    for g in _filtered_generators(rng, 100, scale=2.0, min_b=1e-2):
        q, qq = rng.uniform(-3.0, 3.0, size=2)
        via = coherent_iwop.kernel_via_iwop(g, q, qq)
        direct = propagator.kernel_from_sr(normal_order(g)).evaluate(q, qq)
        worst = max(worst, abs(via - direct))
    checks["dual_route"] = _check(worst, 1e-10)

    # At s = 1, r = 0 the matrix element reduces to the bare coherent overlap.
    ident = lie_core.NormalOrderFactors(s=1.0 + 0.0j, r=0.0 + 0.0j)
    worst = 0.0
    for _ in range(50):
        z1 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        z2 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        got = coherent_iwop.sandwich(
            coherent_iwop.CoherentLabel(z1), coherent_iwop.CoherentLabel(z2), ident
        )
        ref = np.exp(z2 * z1.conjugate() - 0.5 * abs(z1) ** 2 - 0.5 * abs(z2) ** 2)
        worst = max(worst, abs(got - ref))
    checks["identity_limit"] = _check(worst, 1e-12)

    return _suite(checks)


def _completeness_quadrature() -> float:
    """int (d^2 z / pi) |<z|g>|^2 over |z| <= 8 for the unit-width Gaussian g,
    with <z|g> evaluated by position-space quadrature of the coherent
    overlap. The integrand is computed in one vectorized sweep (half a
    million labels), pinned against overlap_position on a spot sample."""
    hx = 0.05
    x = np.arange(-16.0, 16.0 + 0.5 * hx, hx)
    g = np.pi ** (-0.25) * np.exp(-0.5 * x * x)
    weights = g * hx

    hz = 0.02
    axis = np.arange(-8.0 + 0.5 * hz, 8.0, hz)
    total = 0.0
    base = -0.5 * x * x
    for a in axis:
        b = axis[np.hypot(a, axis) <= 8.0]
        if b.size == 0:
            continue
        zc = a - 1j * b  # conjugated labels for this strip
        expo = base[None, :] + np.sqrt(2.0) * zc[:, None] * x[None, :]
        expo += (-0.5 * zc * zc - 0.5 * (a * a + b * b))[:, None]
        rows = np.pi ** (-0.25) * np.exp(expo)
        if abs(a - 0.01) < 0.5 * hz:
            # vectorized sweep must reproduce the public overlap exactly
            ref = coherent_iwop.overlap_position(
                coherent_iwop.CoherentLabel(complex(a, b[3])), x
            )
            if np.abs(rows[3] - ref).max() > 1e-14:
                raise AssertionError("completeness integrand drifted from overlap_position")
        inner = rows @ weights
        total += float(np.sum(np.abs(inner) ** 2))
    return total * hz * hz / np.pi


def oracle_suite(rng) -> dict:
    checks = {}

    fock = oracle.FockTruncation.build(60)
    checks["fock_commutator"] = _check(fock.commutator_residual(), 1e-12)

    # Norm conservation over 10^3 Crank-Nicolson steps, with and without
    # the cross term.
    worst = 0.0
    for g in [QuadraticGenerator(1.0, 0.0, 0.0), QuadraticGenerator(0.8, 0.3, 1.2)]:
        grid = oracle.Grid.from_wavepacket(GaussianWavepacket(0.0, 1.0, 1.0))
        out = oracle.grid_evolve([g], grid, steps=1000)
        worst = max(worst, abs(out.norm() - grid.norm()))
    checks["norm_conservation"] = _check(worst, 1e-10)

    # End to end: Schrodinger grid vs closed-form kernel convolution.
    worst = 0.0
    for kind, packet in [
        ("free", GaussianWavepacket(0.0, 1.0, 1.0)),
        ("harmonic", GaussianWavepacket(1.0, 0.0, 1.0)),
    ]:
        for t in (0.5, 1.0):
            g = named_generator(kind, 1.0, 1.0, t)
            grid = oracle.Grid.from_wavepacket(packet)
            evolved = oracle.grid_evolve([g], grid, steps=max(1, round(t / 1e-3)))
            kernel = propagator.kernel_from_abcd(abcd_from_generator(g))
            state = propagator.convolve(kernel, packet)
            diff = evolved.amplitudes - state.evaluate(evolved.x)
            l2 = np.sqrt(np.sum(np.abs(diff) ** 2) * evolved.spacing)
            worst = max(worst, float(l2))
    checks["end_to_end"] = _check(worst, 1e-3)

    return _suite(checks)


def _suite(checks: dict) -> dict:
    return {
        "pass": all(c["pass"] for c in checks.values()),
        "max_residual": max(c["residual"] for c in checks.values()),
        "checks": checks,
    }


def run_all(inject_fault: bool = False, seed: int = DEFAULT_SEED) -> dict:
    """Run every suite and aggregate into a JSON-ready summary."""
    suites = {
        "lie_core": lie_core_suite(np.random.default_rng(seed), inject_fault=inject_fault),
        "symplectic": symplectic_suite(np.random.default_rng(seed + 1)),
        "propagator": propagator_suite(np.random.default_rng(seed + 2)),
        "iwop": iwop_suite(np.random.default_rng(seed + 3)),
        "oracle": oracle_suite(np.random.default_rng(seed + 4)),
    }
    return {"pass": all(s["pass"] for s in suites.values()), "suites": suites}
