import math

import numpy as np
import pytest

from ecoevo import closed_forms as cf
from ecoevo.exceptions import InvalidParameterError
from ecoevo.hopf import hopf_point
from ecoevo.model import SystemKind, benchmark_params
from ecoevo.scan import RegimeLabel, epsilon_surface, two_param_scan

SR, ES = SystemKind.SELF_RENEWING, SystemKind.EXTERNALLY_SUPPLIED
WINDOW = dict(c_range=(-0.12, 0.0), eps_range=(0.01, 0.3))


@pytest.fixture(scope="module")
def reference():
    return two_param_scan(SR, benchmark_params(), resolution=100, **WINDOW)


def test_shape_and_overlays(reference):
    g = reference
    assert len(g.cells) == 100 and all(len(row) == 100 for row in g.cells)
    for hp in g.hopf_overlay:
        assert -0.12 <= hp.c <= 0.0 and 0.01 <= hp.epsilon <= 0.3
        assert hp.epsilon == pytest.approx(cf.sr_hopf_epsilon(hp.c, -1), rel=1e-10)
    assert g.gh_overlay.c == pytest.approx(-0.0889, abs=1e-3)
    assert g.gh_overlay.epsilon == pytest.approx(0.1429, abs=1e-3)
    assert g.metadata["c_range"] == [-0.12, 0.0]


def test_no_interior_below_existence():
    g = two_param_scan(SR, benchmark_params(), (-0.2, -0.11), (0.05, 0.3), 8)
    assert set(g.labels().ravel()) == {"NoInterior"}


def test_es_has_no_gh():
    g = two_param_scan(ES, benchmark_params(), resolution=12, **WINDOW)
    assert g.hopf_overlay and g.gh_overlay is None


def test_stable_above_unstable_below(reference):
    i, j = reference.cell_of(-0.05, 0.25)
    assert reference.cells[i][j].label is RegimeLabel.STABLE_INTERIOR
    i, j = reference.cell_of(-0.05, 0.123)
    assert reference.cells[i][j].label is RegimeLabel.UNSTABLE_INTERIOR_WITH_CYCLE
    i, j = reference.cell_of(-0.11, 0.2)
    assert reference.cells[i][j].label is RegimeLabel.NO_INTERIOR


def test_deterministic():
    a = two_param_scan(SR, benchmark_params(), resolution=20, threads=1, **WINDOW)
    b = two_param_scan(SR, benchmark_params(), resolution=20, threads=3, **WINDOW)
    assert list(a.rows()) == list(b.rows())


def _coarse(label):
    # the cycle/no-cycle split is a separate boundary (the cycle reaching the edges)
    return "Unstable" if label.startswith("UnstableInterior") else label


def test_label_continuity(reference):
    g = reference
    eps_star = {}
    for i, c in enumerate(g.c_axis):
        hp = hopf_point(SR, benchmark_params(float(c))) if c > -0.1 else None
        eps_star[i] = hp.epsilon if hp else math.nan
    de = g.epsilon_axis[1] - g.epsilon_axis[0]
    dc = g.c_axis[1] - g.c_axis[0]
    labels = g.labels()
    nc, ne = labels.shape
    for i in range(nc):
        for j in range(ne):
            for di, dj in ((1, 0), (0, 1)):
                k, m = i + di, j + dj
                if k >= nc or m >= ne or _coarse(labels[i, j]) == _coarse(labels[k, m]):
                    continue
                near_existence = abs(g.c_axis[i] + 0.1) <= 2 * dc or abs(g.c_axis[k] + 0.1) <= 2 * dc
                near_hopf = any(abs(eps_star[n] - g.epsilon_axis[j]) <= 2 * de for n in (i, k) if not math.isnan(eps_star[n]))
                assert near_existence or near_hopf, (g.c_axis[i], g.epsilon_axis[j], labels[i, j], labels[k, m])


def test_monotone_refinement():
    coarse = two_param_scan(SR, benchmark_params(), resolution=26, **WINDOW).labels()
    fine = two_param_scan(SR, benchmark_params(), resolution=51, **WINDOW).labels()
    for i in range(coarse.shape[0] - 1):
        for j in range(coarse.shape[1] - 1):
            block = {coarse[i, j], coarse[i + 1, j], coarse[i, j + 1], coarse[i + 1, j + 1]}
            if len(block) == 1:
                (lab,) = block
                assert np.all(fine[2 * i : 2 * i + 3, 2 * j : 2 * j + 3] == lab)


def test_linear_only_flag():
    g = two_param_scan(SR, benchmark_params(), resolution=10, simulate_cycles=False, **WINDOW)
    flags = {cell.flags for row in g.cells for cell in row if cell.label is RegimeLabel.UNSTABLE_INTERIOR_WITH_CYCLE}
    assert flags == {("linear-only",)}


def test_invalid_ranges():
    with pytest.raises(InvalidParameterError):
        two_param_scan(SR, benchmark_params(), (0, -1), (0.1, 0.2), 5)
    with pytest.raises(InvalidParameterError):
        two_param_scan(SR, benchmark_params(), (-0.1, 0), (0.1, 0.2), 1)


class TestSurface:
    def test_sr_b_c_nonempty(self):
        s = epsilon_surface(SR, benchmark_params(), ("b", "c"), ((0.0, 0.3), (-0.12, 0.0)), 15)
        assert s.mask.any()
        assert np.all((s.values[s.mask] > 0) & (s.values[s.mask] < 1))
        assert np.all(np.isnan(s.values[~s.mask]))

    def test_es_c_e1_nonempty(self):
        s = epsilon_surface(ES, benchmark_params(), ("c", "e1"), ((-0.016, 0.8), (0.05, 0.75)), 15)
        assert s.mask.any()

    def test_matches_one_dimensional_curve(self):
        s = epsilon_surface(SR, benchmark_params(), ("b", "c"), ((0.1, 0.2), (-0.05, 0.0)), 3)
        assert s.values[0, 0] == pytest.approx(cf.sr_hopf_epsilon(-0.05, -1), rel=1e-10)
        s = epsilon_surface(SR, benchmark_params(), ("c", "e1"), ((-0.05, 0.0), (0.2, 0.5)), 3)
        assert s.values[0, 0] == pytest.approx(cf.sr_hopf_epsilon(-0.05, -1), rel=1e-10)

    def test_bad_axes(self):
        with pytest.raises(InvalidParameterError):
            epsilon_surface(SR, benchmark_params(), ("b", "b"), ((0, 1), (0, 1)), 3)
        with pytest.raises(InvalidParameterError):
            epsilon_surface(SR, benchmark_params(), ("b", "d"), ((0, 1), (0, 1)), 3)
