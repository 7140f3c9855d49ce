"""JSON round-trips for priors, models, and potentials, plus config hashing."""

import json

import numpy as np
import pytest

from cbayes import (
    AlgebraicMultipliers,
    CustomPotential,
    DeconvolutionModel,
    GaussianAdditive,
    LinearModel,
    MultiplicativeUniform,
    ProductPrior,
    SeriesPrior,
    equispaced_points,
)
from cbayes.config import (
    canonical_json,
    config_hash,
    dist_from_json,
    dist_to_json,
    model_from_json,
    model_to_json,
    potential_from_json,
    potential_to_json,
    prior_from_json,
    prior_to_json,
)
from cbayes.measures1d import (
    Exponential,
    Gamma,
    Gaussian,
    Laplace,
    Logistic,
    Uniform,
)
from cbayes.series_prior import (
    AlgebraicFourier,
    AlgebraicSequence,
    ExplicitSchedule,
    FourierCircle,
    Hierarchical,
    IID,
)

ALL_KINDS = [
    Gaussian(0.5, 2.0),
    Exponential(3.0),
    Laplace(-1.0, 0.5),
    Logistic(0.0, 1.5),
    Gamma(2.5, 0.75),
    Uniform(-1.0, 4.0),
]


@pytest.mark.parametrize("d", ALL_KINDS, ids=str)
def test_distribution_round_trip(d):
    assert dist_from_json(dist_to_json(d)) == d


def test_distribution_rejects_unknown_kind():
    with pytest.raises((KeyError, ValueError)):
        dist_from_json({"kind": "cauchy", "params": {}})


@pytest.mark.parametrize(
    "prior",
    [
        ProductPrior((Gaussian(0.0, 1.0), Laplace(0.0, 2.0))),
        SeriesPrior(FourierCircle(), AlgebraicFourier(1.25), IID(Laplace(0.0, 1.0))),
        SeriesPrior(FourierCircle(), AlgebraicSequence(2.0), IID(Gaussian(0.0, 1.0)), 0.5),
        SeriesPrior(FourierCircle(), ExplicitSchedule((2.0, 1.0, 0.5, 0.25)),
                    Hierarchical(Gamma(2.0, 1.0), Gaussian(0.0, 1.0))),
    ],
)
def test_prior_round_trip(prior):
    assert prior_from_json(prior_to_json(prior)) == prior


def test_model_round_trip():
    lin = LinearModel(np.array([[1.0, 0.5], [0.25, 2.0]]))
    back = model_from_json(model_to_json(lin))
    assert np.array_equal(back.matrix, lin.matrix)

    dec = DeconvolutionModel(AlgebraicMultipliers(1.5), equispaced_points(6), 4)
    back = model_from_json(model_to_json(dec))
    assert np.array_equal(back.observation_points, dec.observation_points)
    assert np.array_equal(back.multiplier_values(), dec.multiplier_values())
    assert back.truncation == dec.truncation

    explicit = DeconvolutionModel(dec.multiplier_values(), equispaced_points(6), 4)
    back = model_from_json(model_to_json(explicit))
    assert np.array_equal(back.multiplier_values(), explicit.multiplier_values())


def test_potential_round_trip():
    model = DeconvolutionModel(AlgebraicMultipliers(1.0), equispaced_points(4), 4)
    y = [0.1, -0.2, 0.3, 0.0]
    phi = GaussianAdditive(model, 4.0, y, proj_level=2)
    back = potential_from_json(potential_to_json(phi))
    u = np.random.default_rng(0).normal(size=model.dim)
    assert back.evaluate(u) == phi.evaluate(u)
    assert back.proj_level == 2

    dense = GaussianAdditive(LinearModel(np.eye(2)), np.array([[2.0, 0.3], [0.3, 1.0]]),
                             [1.0, -1.0])
    back = potential_from_json(potential_to_json(dense))
    assert back.evaluate([0.5, 0.5]) == dense.evaluate([0.5, 0.5])

    mult = MultiplicativeUniform(1.5, dim=3)
    back = potential_from_json(potential_to_json(mult))
    assert back == mult


def test_custom_potential_not_serializable():
    with pytest.raises(TypeError):
        potential_to_json(CustomPotential(lambda u: 0.0, dim=1))


def test_canonical_json_is_stable_and_sorted():
    a = canonical_json({"b": 1, "a": [1.5, 2]})
    b = canonical_json({"a": [1.5, 2], "b": 1})
    assert a == b
    assert json.loads(a) == {"a": [1.5, 2], "b": 1}
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})


def test_config_hash_tracks_content():
    h1 = config_hash({"seed": 0, "effort": 100})
    h2 = config_hash({"effort": 100, "seed": 0})
    h3 = config_hash({"seed": 1, "effort": 100})
    assert h1 == h2
    assert h1 != h3
    assert len(h1) == 64 and all(c in "0123456789abcdef" for c in h1)
