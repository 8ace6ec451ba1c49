import math

import numpy as np
import pytest

from ecoevo import closed_forms as cf
from ecoevo.equilibria import branch_s
from ecoevo.exceptions import DomainError, PreconditionError
from ecoevo.hopf import (
    Criticality,
    appendix_l1_oracle,
    criticality_of,
    first_lyapunov,
    focus_equilibria,
    hopf_curve,
    hopf_epsilon,
    hopf_point,
    locate_gh,
    transversality,
)
from ecoevo.linearize import jacobian
from ecoevo.model import ModelParams, State, SystemKind, benchmark_params

SR, ES = SystemKind.SELF_RENEWING, SystemKind.EXTERNALLY_SUPPLIED
SR_C = np.linspace(-0.1 + 1e-4, -1e-4, 200)
ES_C = np.linspace(-1 / 60 + 1e-4, 0.8 - 1e-4, 200)


def eps_star(kind, c):
    return hopf_point(kind, benchmark_params(float(c))).epsilon


class TestCriticalEpsilon:
    def test_gh_neighbourhood(self):
        _, s2 = branch_s(-0.0889)
        assert hopf_epsilon(SR, benchmark_params(-0.0889), s2) == pytest.approx(0.1429, abs=1e-4)

    def test_sr_matches_focus_branch_closed_form(self):
        for c in SR_C:
            e = eps_star(SR, c)
            assert e == pytest.approx(cf.sr_hopf_epsilon(c, root=-1), rel=1e-10)
            assert e == pytest.approx(cf.sr_hopf_epsilon_definition(c), rel=1e-10)

    def test_sr_limit_at_double_root(self):
        # eps* approaches its endpoint value like sqrt(c + 0.1)
        assert eps_star(SR, -0.1 + 1e-10) == pytest.approx(cf.sr_hopf_epsilon(-0.1, root=-1), rel=1e-5)
        assert cf.sr_hopf_epsilon(-0.1, root=-1) == pytest.approx(0.15, rel=1e-12)

    @pytest.mark.xfail(strict=True, reason="printed sign of the square root selects the saddle branch")
    def test_sr_printed_closed_form(self):
        for c in SR_C:
            assert eps_star(SR, c) == pytest.approx(cf.sr_hopf_epsilon(c), rel=1e-10)

    def test_es_definition_with_corrected_entry(self):
        for c in ES_C:
            assert eps_star(ES, c) == pytest.approx(cf.es_hopf_epsilon_definition(c, r22=0.6), rel=1e-10)

    @pytest.mark.xfail(strict=True, reason="printed second form disagrees with its own definition")
    def test_es_printed_closed_form(self):
        assert eps_star(ES, 0.2) == pytest.approx(cf.es_hopf_epsilon(0.2), rel=1e-10)

    def test_not_an_equilibrium(self):
        with pytest.raises(PreconditionError):
            hopf_epsilon(SR, benchmark_params(-0.05), State(0.3, 0.3))

    def test_saddle_branch_is_not_hopf(self):
        # trace vanishes on the saddle branch too, at the printed closed-form value, but det < 0
        s1, _ = branch_s(-0.05)
        p = benchmark_params(-0.05)
        e = hopf_epsilon(SR, p, s1)
        assert e == pytest.approx(cf.sr_hopf_epsilon(-0.05), rel=1e-10)
        assert jacobian(SR, p.with_(epsilon=e), s1).det < 0
        assert hopf_point(SR, p, s1) is None

    def test_none_outside_unit_interval(self):
        # strategy part of the trace is already negative: stable for every eps
        p = ModelParams.from_values(0.8, 0.2, 0.45, 0.1)
        (s,) = focus_equilibria(SR, p)
        assert hopf_epsilon(SR, p, s) is None

    @pytest.mark.parametrize("kind,c", [(SR, -0.05), (ES, 0.3)])
    def test_trace_affine_in_eps(self, kind, c):
        p = benchmark_params(c)
        (s,) = focus_equilibria(kind, p)
        tr = [jacobian(kind, p.with_(epsilon=e), s).trace for e in (0.1, 0.2, 0.3)]
        assert abs(tr[2] - 2 * tr[1] + tr[0]) <= 1e-12 * max(1.0, *map(abs, tr))


class TestCurve:
    def test_sr_curve(self):
        curve = hopf_curve(SR, n_samples=60)
        assert len(curve) == 60 and not curve.skipped
        for hp in curve:
            assert hp.epsilon == pytest.approx(cf.sr_hopf_epsilon(hp.c, -1), rel=1e-10)
            J = jacobian(SR, benchmark_params(hp.c, hp.epsilon), hp.equilibrium)
            assert abs(J.trace) <= 1e-10 * (1 + J.norm_inf) and J.det > 0
            assert hp.omega0**2 == pytest.approx(J.det, rel=1e-10)

    def test_es_supercritical_throughout(self):
        curve = hopf_curve(ES, n_samples=60)
        assert len(curve) == 60
        assert all(hp.l1 < 0 and hp.criticality is Criticality.SUPERCRITICAL for hp in curve)

    def test_sr_subcritical_segment(self):
        curve = hopf_curve(SR, c_range=(-0.1 + 1e-6, -0.0889 - 1e-6), n_samples=30)
        assert all(hp.l1 > 0 for hp in curve)

    def test_outside_interval_skipped(self):
        curve = hopf_curve(SR, c_range=(-0.2, -0.15), n_samples=5)
        assert len(curve) == 0 and len(curve.skipped) == 5

    def test_sr_frequency_display(self):
        # the printed frequency with a negative square root is i * 2 * omega0
        for c in (-0.09, -0.05, -0.01):
            hp = hopf_point(SR, benchmark_params(c))
            assert abs(cf.sr_omega0(c, root=-1)) == pytest.approx(2 * hp.omega0, rel=1e-8)

    @pytest.mark.xfail(strict=True, reason="printed squared frequency is negative")
    def test_es_frequency_display(self):
        hp = hopf_point(ES, benchmark_params(0.2))
        assert cf.es_nu0_squared(0.2) == pytest.approx(hp.omega0**2, rel=1e-8)


class TestTransversality:
    def test_sr_focus_branch(self):
        for c in (-0.09, -0.05, -0.01):
            assert transversality(SR, benchmark_params(), c) == pytest.approx(cf.sr_transversality(c, -1), rel=1e-10)

    @pytest.mark.xfail(strict=True, reason="printed value is the saddle-branch slope")
    def test_sr_printed(self):
        assert transversality(SR, benchmark_params(), -0.05) == pytest.approx(-0.33204, abs=1e-5)

    @pytest.mark.xfail(strict=True, reason="printed formula does not match the eps-slope of the trace")
    def test_es_printed(self):
        assert transversality(ES, benchmark_params(), 0.2) == pytest.approx(cf.es_transversality(0.2), rel=1e-10)

    @pytest.mark.parametrize("kind,cs", [(SR, SR_C[::10]), (ES, ES_C[::10])])
    def test_negative(self, kind, cs):
        assert all(transversality(kind, benchmark_params(), float(c)) < 0 for c in cs)

    def test_no_hopf_point(self):
        with pytest.raises(DomainError):
            transversality(SR, benchmark_params(), -0.15)


class TestLyapunov:
    def test_signs(self):
        assert hopf_point(SR, benchmark_params(-0.095)).l1 > 0
        assert hopf_point(SR, benchmark_params(-0.05)).l1 < 0

    def test_zero_at_located_point(self):
        gh = locate_gh(SR)
        scale = max(abs(hp.l1) for hp in hopf_curve(SR, n_samples=40))
        assert abs(hopf_point(SR, benchmark_params(gh.c)).l1) <= 1e-6 * scale

    @pytest.mark.xfail(strict=True, reason="the quoted c is rounded; l1 is 1e-3 there")
    def test_zero_at_quoted_point(self):
        scale = max(abs(hp.l1) for hp in hopf_curve(SR, n_samples=40))
        assert abs(hopf_point(SR, benchmark_params(-0.0889)).l1) <= 1e-6 * scale

    def test_sr_matches_closed_form(self):
        for c in np.linspace(-0.099, -0.001, 25):
            hp = hopf_point(SR, benchmark_params(float(c)))
            assert hp.l1 == pytest.approx(appendix_l1_oracle(SR, float(c)), rel=1e-9)

    def test_es_negative_like_closed_form(self):
        hp = hopf_point(ES, benchmark_params(0.4))
        assert hp.l1 < 0 and appendix_l1_oracle(ES, 0.4) < 0

    @pytest.mark.xfail(strict=True, reason="closed form differs by a non-constant factor")
    def test_es_value_closed_form(self):
        hp = hopf_point(ES, benchmark_params(0.4))
        assert hp.l1 == pytest.approx(appendix_l1_oracle(ES, 0.4), rel=1e-6)

    def test_normalizations_share_sign(self):
        for c in (-0.095, -0.05):
            a = hopf_point(SR, benchmark_params(c), normalization="resource").l1
            b = hopf_point(SR, benchmark_params(c), normalization="unit").l1
            assert np.sign(a) == np.sign(b)

    def test_precondition(self):
        p = benchmark_params(-0.05, 0.5)
        _, s2 = branch_s(-0.05)
        with pytest.raises(PreconditionError):
            first_lyapunov(SR, p, s2, 0.04)

    def test_criticality(self):
        assert criticality_of(-1.0) is Criticality.SUPERCRITICAL
        assert criticality_of(1.0) is Criticality.SUBCRITICAL
        assert criticality_of(0.0) is Criticality.DEGENERATE


class TestOracle:
    def test_sign_agreement(self):
        for kind, cs in ((SR, np.linspace(-0.0995, -0.0005, 50)), (ES, np.linspace(-0.0166, 0.799, 50))):
            for c in cs:
                hp = hopf_point(kind, benchmark_params(float(c)))
                assert np.sign(hp.l1) == np.sign(appendix_l1_oracle(kind, float(c)))

    def test_sr_zero(self):
        assert abs(appendix_l1_oracle(SR, -0.0888885)) < 1e-4

    def test_domain(self):
        with pytest.raises(DomainError):
            appendix_l1_oracle(SR, 0.1)


class TestGH:
    def test_sr(self):
        gh = locate_gh(SR)
        assert gh.c == pytest.approx(-0.0889, abs=1e-3)
        assert gh.epsilon == pytest.approx(0.1429, abs=1e-3)
        assert gh.width <= 1e-6
        assert gh.l1_bracket[0] * gh.l1_bracket[1] < 0
        assert gh.omega0 == pytest.approx(math.sqrt(jacobian(SR, benchmark_params(gh.c, gh.epsilon), gh.equilibrium).det))

    @pytest.mark.xfail(strict=True, reason="quoted frequency 0.0715 is the saddle-branch value")
    def test_sr_quoted_frequency(self):
        assert locate_gh(SR).omega0 == pytest.approx(0.0715, abs=1e-3)

    def test_es_none(self):
        assert locate_gh(ES, c_range=(-1 / 60 + 1e-4, 0.8 - 1e-4)) is None

    def test_sr_sub_range_none(self):
        assert locate_gh(SR, c_range=(-0.05, -0.01)) is None
