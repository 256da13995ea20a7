import warnings

import numpy as np
import pytest

from archetypal.core import DataMatrix, FitConfig, fit
from archetypal.errors import ConfigurationError
from archetypal.scaling import ScalingParams, standardize, unscale_archetypes


def test_minmax_endpoints():
    scaled, params = standardize(DataMatrix([[0.0], [5.0], [10.0]], ("a",)), "minmax")
    np.testing.assert_array_equal(scaled.values[:, 0], [0.0, 0.5, 1.0])
    assert params.offset[0] == 0.0 and params.divisor[0] == 10.0


def test_zscore_uses_sample_sd():
    scaled, params = standardize(DataMatrix([[1.0], [2.0], [3.0]], ("a",)), "zscore")
    np.testing.assert_allclose(scaled.values[:, 0], [-1.0, 0.0, 1.0])
    assert params.divisor[0] == pytest.approx(1.0)


def test_none_is_identity(rng):
    X = rng.normal(size=(6, 3))
    scaled, params = standardize(DataMatrix(X, ("a", "b", "c")), "none")
    np.testing.assert_array_equal(scaled.values, X)
    assert params.constant_columns == ()


def test_constant_column_maps_to_zero_with_warning():
    data = DataMatrix([[7.0, 1.0], [7.0, 2.0], [7.0, 4.0]], ("flat", "b"))
    with pytest.warns(RuntimeWarning, match="flat"):
        scaled, params = standardize(data, "zscore")
    np.testing.assert_array_equal(scaled.values[:, 0], 0.0)
    assert params.constant_columns == (True, False)


@pytest.mark.parametrize("method", ["none", "zscore", "minmax"])
def test_round_trip(rng, method):
    X = rng.normal(loc=50, scale=[1, 100, 0.01], size=(30, 3))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        scaled, params = standardize(DataMatrix(X, ("a", "b", "c")), method)
    np.testing.assert_allclose(params.unscale(scaled.values), X, rtol=1e-10, atol=1e-10)


def test_archetypes_reported_in_original_units(rng):
    X = rng.normal(size=(40, 2)) * [3.0, 1000.0] + [10.0, -5.0]
    data = DataMatrix(X, ("a", "b"))
    scaled, params = standardize(data, "zscore")
    model = fit(scaled, FitConfig(3, restarts=2))
    Z = model.archetypes_original()
    np.testing.assert_allclose(Z, unscale_archetypes(model.archetypes, params))
    np.testing.assert_allclose(Z, model.beta @ X, rtol=1e-10, atol=1e-8)


def test_params_dict_round_trip():
    p = ScalingParams("minmax", [1.0, 2.0], [3.0, 1.0], (False, True))
    q = ScalingParams.from_dict(p.to_dict())
    assert q.method == "minmax" and q.constant_columns == (False, True)
    np.testing.assert_array_equal(q.offset, p.offset)
    np.testing.assert_array_equal(q.divisor, p.divisor)


@pytest.mark.parametrize("kwargs", [dict(method="log"), dict(divisor=[0.0])])
def test_invalid_params(kwargs):
    base = dict(method="zscore", offset=[0.0], divisor=[1.0])
    with pytest.raises(ConfigurationError):
        ScalingParams(**{**base, **kwargs})


def test_unknown_method():
    with pytest.raises(ConfigurationError):
        standardize(DataMatrix([[1.0], [2.0]], ("a",)), "robust")
