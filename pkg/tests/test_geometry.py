"""Generic geometry pipeline against classical and closed-form oracles."""

import numpy as np
import pytest

from jetlag.errors import SingularMetricError
from jetlag.fd import field_partial
from jetlag.geometry import (
    AdaptedFrame,
    EMForm,
    GeometryEvaluator,
    adapted_derivative,
    em_form,
    evaluate_bundle,
    maxwell_vertical_residual,
    metric_from_lagrangian,
    metricity_residuals,
    nonlinear_connection,
    semispray_from_lagrangian,
    torsions,
    ym_energy,
)
from jetlag.models import FreePolarModel, PolynomialModel
from jetlag.monolayer import closed_semispray
from jetlag.points import jet_point
from oracles import polar_christoffel, polar_metric, polar_spray

FP = FreePolarModel(m=1.0)


class TestMetric:
    def test_free_polar_diag(self):
        met = metric_from_lagrangian(FP, jet_point(0.0, 2.0, 0.0, 1.0, 1.0))
        assert np.allclose(met.g, polar_metric(1.0, 2.0), atol=1e-10)
        assert np.allclose(met.g @ met.g_inv, np.eye(2), atol=1e-10)

    def test_monolayer_off_diagonal_zero(self, model5):
        met = metric_from_lagrangian(model5, jet_point(1e-3, 0.5, 0.0, -1.0, 0.2))
        assert met.g[0, 1] == pytest.approx(0.0, abs=1e-8 * abs(met.g[0, 0]))
        assert met.g[0, 1] == met.g[1, 0]

    def test_monolayer_g11_matches_closed_form(self, model5, params5, sample_pt):
        from jetlag.monolayer import closed_metric

        met = metric_from_lagrangian(model5, sample_pt)
        want = closed_metric(sample_pt, params5).g[0, 0]
        assert met.g[0, 0] == pytest.approx(want, rel=1e-6)

    def test_singular_metric_raises(self):
        degenerate = PolynomialModel(lambda t, r, phi, rd, pd: (rd + pd) ** 2)
        with pytest.raises(SingularMetricError):
            metric_from_lagrangian(degenerate, jet_point(0.0, 1.0, 0.0, 1.0, 1.0))


class TestSemispray:
    def test_free_polar_matches_classical(self):
        pt = jet_point(0.0, 2.0, 0.0, 3.0, 0.5)
        spray = semispray_from_lagrangian(FP, pt)
        G1, G2 = polar_spray(pt.r, pt.rdot, pt.phidot)
        assert spray.G[0] == pytest.approx(G1, rel=1e-8)  # -0.25
        assert spray.G[1] == pytest.approx(G2, rel=1e-8)  # 0.75
        assert np.all(spray.H == 0.0)

    def test_monolayer_g2_is_exact_form(self, model5, sample_pt):
        spray = semispray_from_lagrangian(model5, sample_pt)
        assert spray.G[1] == pytest.approx(sample_pt.rdot * sample_pt.phidot / sample_pt.r, rel=1e-8)

    def test_monolayer_g1_matches_exact_fraction(self, model5, params5, sample_pt):
        spray = semispray_from_lagrangian(model5, sample_pt)
        want = closed_semispray(sample_pt, params5, form="exact").G[0]
        assert spray.G[0] == pytest.approx(want, rel=1e-6)


class TestNonlinearConnection:
    def test_monolayer_second_row(self, model5, sample_pt):
        nlc = nonlinear_connection(model5, sample_pt)
        assert nlc.N[1, 0] == pytest.approx(sample_pt.phidot / sample_pt.r, rel=1e-6)
        assert nlc.N[1, 1] == pytest.approx(sample_pt.rdot / sample_pt.r, rel=1e-6)

    def test_free_polar_n12(self):
        # N_(1)2^(1) = d(-r phidot^2/2)/dphidot = -r phidot = -1 at r=2, phidot=0.5
        nlc = nonlinear_connection(FP, jet_point(0.0, 2.0, 0.0, 3.0, 0.5))
        assert nlc.N[0, 1] == pytest.approx(-1.0, rel=1e-8)

    def test_self_consistency_vs_direct_fd_of_g(self, model5, sample_pt):
        # definition self-consistency in the matrix infinity norm: entries
        # tiny relative to ||N|| sit below the FD-of-G noise floor
        nlc = nonlinear_connection(model5, sample_pt)

        def g_component(i):
            def fn(q):
                return semispray_from_lagrangian(model5, q).G[i]

            return fn

        scales = np.array([1.0, 1.0, 1.0, 0.3, 1.0])
        fd = np.empty((2, 2))
        for i in range(2):
            for j, axis in enumerate(("y1", "y2")):
                fd[i, j] = field_partial(g_component(i), sample_pt, (axis,), scales=scales)
        assert np.max(np.abs(nlc.N - fd)) / np.max(np.abs(nlc.N)) < 1e-6

    def test_self_consistency_free_polar(self):
        pt = jet_point(0.0, 2.0, 0.0, 3.0, 0.5)
        nlc = nonlinear_connection(FP, pt)
        for i in range(2):
            for j, axis in enumerate(("y1", "y2")):
                ref = field_partial(
                    lambda q, i=i: semispray_from_lagrangian(FP, q).G[i], pt, (axis,)
                )
                assert abs(nlc.N[i, j] - ref) < 1e-8 * max(1.0, abs(ref))


class TestAdaptedDerivative:
    def test_y_independent_field(self, model5, sample_pt):
        frame = AdaptedFrame.from_connection(nonlinear_connection(model5, sample_pt))
        got = adapted_derivative(frame, lambda q: q.r**2, sample_pt, 0)
        assert got == pytest.approx(2 * sample_pt.r, rel=1e-9)

    def test_zero_frame_reduces_to_partial(self, sample_pt):
        frame = AdaptedFrame(N=np.zeros((2, 2)))
        got = adapted_derivative(frame, lambda q: q.r * q.rdot, sample_pt, 0)
        assert got == pytest.approx(sample_pt.rdot, rel=1e-9)

    def test_monolayer_g22_field(self, model5, params5, sample_pt):
        # g22 = m r^2 / 2 has no fibre dependence: delta g22/delta r = m r
        frame = AdaptedFrame.from_connection(nonlinear_connection(model5, sample_pt))
        got = adapted_derivative(frame, lambda q: 0.5 * params5.m * q.r**2, sample_pt, 0)
        assert got == pytest.approx(params5.m * sample_pt.r, rel=1e-9)

    def test_bad_index(self, sample_pt):
        with pytest.raises(ValueError):
            adapted_derivative(AdaptedFrame(N=np.zeros((2, 2))), lambda q: 1.0, sample_pt, 2)


class TestCartan:
    def test_free_polar_christoffel(self):
        pt = jet_point(0.0, 2.0, 0.0, 1.0, 0.3)
        cart = GeometryEvaluator(FP, pt).cartan()
        want = polar_christoffel(pt.r)
        assert cart.L[0, 1, 1] == pytest.approx(want["L1_22"], rel=1e-7)
        assert cart.L[1, 0, 1] == pytest.approx(want["L2_12"], rel=1e-7)
        assert np.allclose(cart.C, 0.0, atol=1e-8)
        assert np.allclose(cart.G_time, 0.0, atol=1e-8)
        assert cart.kappa111 == 0.0

    def test_L_symmetry(self, model5, sample_pt):
        cart = GeometryEvaluator(model5, sample_pt).cartan()
        assert np.allclose(cart.L, np.swapaxes(cart.L, 1, 2), atol=1e-12)
        assert np.allclose(cart.C, np.swapaxes(cart.C, 1, 2), atol=1e-12)

    def test_monolayer_printed_entries(self, model5, sample_pt):
        cart = GeometryEvaluator(model5, sample_pt).cartan()
        assert cart.L[1, 0, 1] == pytest.approx(1.0 / sample_pt.r, rel=1e-6)
        assert cart.L[1, 1, 0] == pytest.approx(1.0 / sample_pt.r, rel=1e-6)
        assert abs(cart.L[1, 1, 1]) < 1e-8

    def test_monolayer_c_vs_closed(self, model5, params5, sample_pt):
        from jetlag.monolayer import closed_cartan

        cart = GeometryEvaluator(model5, sample_pt).cartan()
        want = closed_cartan(sample_pt, params5, form="exact").C[0, 0, 0]
        assert cart.C[0, 0, 0] == pytest.approx(want, rel=1e-6)


class TestTorsions:
    def test_r_antisymmetry_any_model(self, model5, sample_pt):
        tor = torsions(model5, sample_pt)
        for k in range(2):
            assert tor.R[k, 0, 1] == -tor.R[k, 1, 0]
            assert tor.R[k, 0, 0] == pytest.approx(0.0, abs=1e-8)
            assert tor.R[k, 1, 1] == pytest.approx(0.0, abs=1e-8)

    def test_monolayer_r2_identity(self, model5, sample_pt):
        # R_(1)12^(2) = N_(1)1^(1) / r, with both sides from the pipeline
        ev = GeometryEvaluator(model5, sample_pt)
        tor = ev.torsions()
        want = ev.nonlinear_connection().N[0, 0] / sample_pt.r
        assert tor.R[1, 0, 1] == pytest.approx(want, rel=1e-6)

    def test_p_vert_equals_c(self, model5, sample_pt):
        ev = GeometryEvaluator(model5, sample_pt)
        assert np.array_equal(ev.torsions().P_vert, ev.cartan().C)

    def test_t_and_calp_equal_minus_gtime(self, model5, sample_pt):
        ev = GeometryEvaluator(model5, sample_pt)
        assert np.array_equal(ev.torsions().T, -ev.cartan().G_time)
        assert np.array_equal(ev.torsions().calP, -ev.cartan().G_time)

    def test_free_polar_flat(self):
        tor = torsions(FP, jet_point(0.1, 2.0, 0.0, 1.0, 0.4))
        assert np.max(np.abs(tor.R)) < 1e-5
        assert np.max(np.abs(tor.H_tor)) < 1e-8


class TestEMForm:
    def test_antisymmetry(self, model5, sample_pt):
        em = em_form(model5, sample_pt)
        assert abs(em.F[0, 0]) < 1e-10
        assert abs(em.F[1, 1]) < 1e-10
        assert em.F[0, 1] == -em.F[1, 0]

    def test_monolayer_vanishes_at_zero_phidot(self, model5):
        em = em_form(model5, jet_point(1e-3, 0.5, 0.0, -1.0, 0.0))
        assert np.max(np.abs(em.F)) < 1e-9

    def test_free_polar_vanishes(self):
        em = em_form(FP, jet_point(0.0, 2.0, 0.0, 1.0, 0.7))
        assert np.max(np.abs(em.F)) < 1e-8


class TestYMEnergy:
    def test_zero(self):
        assert ym_energy(EMForm(F=np.zeros((2, 2))), 1.0) == 0.0

    def test_arithmetic(self):
        F = np.array([[0.0, 3.0], [-3.0, 0.0]])
        assert ym_energy(EMForm(F=F), 1.0) == pytest.approx(9.0, rel=1e-14)

    def test_trace_identity_random(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.normal()
            F = np.array([[0.0, a], [-a, 0.0]])
            m = abs(rng.normal()) + 0.1
            assert ym_energy(EMForm(F=F), m) == pytest.approx(a * a / m, rel=1e-12)

    def test_nonpositive_mass(self):
        with pytest.raises(ValueError):
            ym_energy(EMForm(F=np.zeros((2, 2))), 0.0)


class TestMetricity:
    def test_free_polar(self):
        res = metricity_residuals(FP, jet_point(0.0, 1.7, 0.0, 0.8, -0.2))
        assert max(res) < 1e-8

    def test_monolayer_sample(self, model5):
        rng = np.random.default_rng(11)
        for _ in range(100):
            pt = jet_point(rng.uniform(1e-4, 2e-3), rng.uniform(0.3, 1.0), 0.0,
                           rng.uniform(-3, -0.5), rng.uniform(-1, 1))
            assert max(metricity_residuals(model5, pt)) < 1e-5

    def test_negative_control(self, model5, sample_pt):
        from jetlag.geometry import CartanConnection, cartan_connection

        cart = cartan_connection(model5, sample_pt)
        perturbed_L = np.array(cart.L, copy=True)
        perturbed_L[1, 0, 1] += 0.1
        bad = CartanConnection(G_time=cart.G_time, L=perturbed_L, C=cart.C)
        res = metricity_residuals(model5, sample_pt, cartan=bad)
        assert max(res) > 1e-3


class TestMaxwellVertical:
    def test_free_polar(self):
        assert maxwell_vertical_residual(FP, jet_point(0.0, 1.5, 0.0, 1.0, 0.5)) < 1e-8

    def test_monolayer(self, model5, sample_pt):
        assert maxwell_vertical_residual(model5, sample_pt) < 1e-5

    def test_degenerate_index_ranges_finite(self, model5, sample_pt):
        # n = 2: every cyclic triple has a repeated index; the residual must
        # still evaluate to a finite number
        val = maxwell_vertical_residual(model5, sample_pt)
        assert np.isfinite(val)


def test_bundle_aggregates(model5, sample_pt):
    bundle = evaluate_bundle(model5, sample_pt)
    assert bundle.metric.g.shape == (2, 2)
    assert bundle.ym_energy >= 0.0
    assert bundle.em.F.shape == (2, 2)


class TestBuiltinModelInvariants:
    """Metric symmetry / inverse / metricity across all built-in models at
    100+ seeded valid points each."""

    def _ed_model(self):
        from jetlag.electrodynamics import ElectrodynamicsFixtureParams, electrodynamics_fixture

        return electrodynamics_fixture(
            ElectrodynamicsFixtureParams(
                m=1.3,
                e=0.7,
                A=lambda x: np.array([0.4 * x[1] ** 2, -0.8 * x[0]]),
                A_jac=lambda x: np.array([[0.0, 0.8 * x[1]], [-0.8, 0.0]]),
            )
        )

    def _points_for(self, name, n=100):
        rng = np.random.default_rng(17)
        pts = []
        for _ in range(n):
            if name == "monolayer":
                pts.append(jet_point(rng.uniform(1e-4, 1e-3), rng.uniform(0.3, 1.0), 0.0,
                                     rng.uniform(-3.0, -0.3), rng.uniform(-1, 1)))
            else:
                pts.append(jet_point(rng.uniform(0, 1), rng.uniform(0.5, 2.0),
                                     rng.uniform(-1, 1), rng.uniform(-2, 2), rng.uniform(-2, 2)))
        return pts

    @pytest.mark.parametrize("name", ["free_polar", "monolayer", "electrodynamics"])
    def test_metric_symmetry_and_inverse(self, name, model5):
        model = {"free_polar": FP, "monolayer": model5}.get(name) or self._ed_model()
        for pt in self._points_for(name):
            met = metric_from_lagrangian(model, pt)
            scale = max(1.0, float(np.max(np.abs(met.g))))
            assert abs(met.g[0, 1] - met.g[1, 0]) < 1e-12 * scale
            assert np.max(np.abs(met.g @ met.g_inv - np.eye(2))) < 1e-10

    @pytest.mark.parametrize("name", ["free_polar", "electrodynamics"])
    def test_metricity_all_models(self, name):
        model = FP if name == "free_polar" else self._ed_model()
        for pt in self._points_for(name, n=10):
            assert max(metricity_residuals(model, pt)) < 1e-5


def test_evaluator_thread_safety(model5):
    # pure functions on immutable inputs: concurrent bundle evaluations must
    # agree with the serial result
    import concurrent.futures

    pts = [jet_point(1e-4 + 1e-5 * k, 0.4 + 0.01 * k, 0.0, -1.0 - 0.1 * k, 0.2) for k in range(8)]
    serial = [evaluate_bundle(model5, pt).ym_energy for pt in pts]
    with concurrent.futures.ThreadPoolExecutor(max_workers=4) as pool:
        parallel = list(pool.map(lambda pt: evaluate_bundle(model5, pt).ym_energy, pts))
    assert serial == parallel
