import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from archetypal.core import FitConfig, fit
from archetypal.errors import ConfigurationError, NotEnoughPointsError
from archetypal.selection import ScreeSeries, scree, suggest_elbow


@pytest.fixture(scope="module")
def triangle_series(triangle_fx):
    return scree(triangle_fx.data, 5, FitConfig(1, restarts=5))


def test_triangle_series_collapses_at_three(triangle_series):
    rss = triangle_series.rss()
    assert [e.k for e in triangle_series.entries] == [1, 2, 3, 4, 5]
    assert rss[2] <= 1e-6 and rss[3] <= 1e-6 and rss[4] <= 1e-6


def test_triangle_series_non_increasing(triangle_series):
    assert np.all(np.diff(triangle_series.rss()) <= 1e-9)


def test_triangle_elbow(triangle_series):
    assert suggest_elbow(triangle_series).k == 3


def test_entries_are_well_formed(triangle_series, triangle_fx):
    norm_x = np.linalg.norm(triangle_fx.data.values)
    for e in triangle_series.entries:
        assert e.best_rss >= 0 and e.restart_rss_spread >= 0
        assert 0 <= e.converged_fraction <= 1
        assert e.best_rss_rel == pytest.approx(e.best_rss / norm_x, rel=1e-12, abs=1e-300)


def test_k_max_one_is_mean_fit(rng):
    X = rng.normal(size=(20, 3))
    series = scree(X, 1, FitConfig(1, restarts=2))
    assert len(series.entries) == 1
    assert series.entries[0].best_rss == pytest.approx(fit(X, FitConfig(1)).rss, rel=1e-12)


def test_random_data_non_increasing(rng):
    for _ in range(3):
        X = rng.normal(size=(25, 4))
        series = scree(X, 6, FitConfig(1, restarts=2, seed=int(rng.integers(100))))
        assert np.all(np.diff(series.rss()) <= 1e-9)


def test_k_max_out_of_range(rng):
    with pytest.raises(ConfigurationError):
        scree(rng.normal(size=(4, 2)), 5, FitConfig(1))


def test_elbow_hand_computed():
    # second differences 0.68 at k = 2 and 0.01 at k = 3
    suggestion = suggest_elbow(ScreeSeries.from_rss({1: 1.0, 2: 0.3, 3: 0.28, 4: 0.27}))
    assert suggestion.k == 2
    assert suggestion.scores[2] == pytest.approx(0.68)
    assert suggestion.scores[3] == pytest.approx(0.01)


def test_elbow_linear_series_ties_to_smallest():
    suggestion = suggest_elbow(ScreeSeries.from_rss([5.0, 4.0, 3.0, 2.0, 1.0]))
    assert suggestion.k == 2
    assert all(s == pytest.approx(0.0, abs=1e-12) for s in suggestion.scores.values())


def test_elbow_needs_three_points():
    with pytest.raises(NotEnoughPointsError):
        suggest_elbow(ScreeSeries.from_rss([2.0, 1.0]))


@given(
    rss=st.lists(st.floats(0.0, 100.0), min_size=3, max_size=10),
    c=st.floats(1e-3, 1e3),
)
def test_elbow_scale_invariant(rss, c):
    rss = sorted(rss, reverse=True)
    a = suggest_elbow(ScreeSeries.from_rss(rss)).k
    b = suggest_elbow(ScreeSeries.from_rss([c * r for r in rss])).k
    assert a == b


def test_failed_k_is_recorded(monkeypatch, rng):
    import archetypal.selection as selection
    from archetypal.errors import FitError

    real_fit = selection.fit

    def flaky(data, config, initial_betas=()):
        if config.k == 2:
            raise FitError("no start finished")
        return real_fit(data, config, initial_betas)

    monkeypatch.setattr(selection, "fit", flaky)
    series = scree(rng.normal(size=(10, 2)), 3, FitConfig(1, restarts=1))
    assert [e.k for e in series.entries] == [1, 2, 3]
    assert series.entries[1].error and np.isnan(series.entries[1].best_rss)
    assert series.entries[2].error is None
