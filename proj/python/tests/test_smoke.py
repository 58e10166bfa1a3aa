import json
import math
import random

import numpy as np
import pytest

import convforge as cf


def brute_convolve(a, b):
    out = [0.0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def test_convolve_matches_definition():
    rng = random.Random(1)
    for _ in range(20):
        a = [rng.uniform(-1, 1) for _ in range(rng.randint(1, 6))]
        b = [rng.uniform(-1, 1) for _ in range(rng.randint(1, 6))]
        assert np.allclose(cf.convolve(a, b), brute_convolve(a, b), atol=1e-14)


def test_toeplitz_shape_and_entries():
    t = cf.toeplitz([2.0, 3.0, 5.0], 2, 2)
    assert t.shape == (4, 2)
    assert t.tolist() == [[2, 0], [3, 2], [5, 3], [0, 5]]


def test_factorize_round_trip():
    W = brute_convolve(brute_convolve([1, 0.5, -1], [2, 1, 1]), [0.3, -1, 0.7])
    result = cf.factorize_mask(W, 2)
    assert result["J"] == 3
    fold = [1.0]
    for mask in result["masks"]:
        assert len(mask) == 3
        fold = brute_convolve(mask, fold)
    assert max(abs(x - y) for x, y in zip(fold, W)) <= 1e-10 * max(map(abs, W))


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError, match="s must be"):
        cf.factorize_mask([1, 2, 1], 1)
    with pytest.raises(cf.NumericalError):
        cf.factorize_mask(brute_convolve([1, 0.3, -1], [2, 1, 1]), 2, 1e-300)


def test_build_and_evaluate_reproduce_ridge():
    ridge = cf.RidgeExpansion(
        beta0=0.2,
        alpha0=np.array([0.5, -0.25, 1.0]),
        v=1.5,
        terms=[
            cf.RidgeTerm(0.8, np.array([0.5, 0.3, -0.2]), 0.1),
            cf.RidgeTerm(-0.4, np.array([-0.1, 0.6, 0.3]), 0.7),
        ],
    )
    ridge.validate()
    J = cf.minimal_depth(3, 3, ridge.m)
    assert J == 5
    net = cf.build_network(ridge, 3, J)
    assert net.widths == [3 + 3 * j for j in range(J + 1)]
    scale = max([1.0] + list(net.bound_ledger))
    rng = np.random.default_rng(3)
    for _ in range(200):
        x = rng.uniform(-1, 1, 3)
        assert abs(net(x) - ridge(x)) <= 1e-8 * scale
    activations, output = cf.forward(net, np.zeros(3))
    assert len(activations) == J + 1
    assert output == pytest.approx(0.2, abs=1e-8 * scale)
    assert cf.count_free_parameters(net) == cf.free_parameter_formula(3, 3, J)


def test_depth_too_small():
    ridge = cf.RidgeExpansion(0.0, np.array([0.5, 0.5]), 1.0, [cf.RidgeTerm(1.0, np.array([1.0, 0.0]), 0.5)])
    with pytest.raises(ValueError, match="DepthTooSmall"):
        cf.build_network(ridge, 2, 3)


def test_json_round_trip():
    ridge = cf.fit_ridge("gaussian", 2, 3, seed=4)
    doc = json.loads(ridge.to_json())
    assert doc["schema"] == "convforge/v1" and doc["kind"] == "ridge"
    again = cf.RidgeExpansion.from_json(ridge.to_json())
    net = cf.build_network(again, 2, cf.minimal_depth(2, 2, 3))
    loaded = cf.DeepCnn.from_json(net.to_json())
    x = np.array([0.3, -0.6])
    assert loaded(x) == net(x)


def test_fit_is_seeded_and_valid():
    a = cf.fit_ridge("cosine-ridge", 2, 4, seed=9)
    b = cf.fit_ridge("cosine-ridge", 2, 4, seed=9)
    a.validate()
    assert a.v == b.v
    for s, t in zip(a.terms, b.terms):
        assert np.array_equal(s.alpha, t.alpha)
        assert abs(np.abs(s.alpha).sum() - 1.0) <= 1e-10


def test_rate_study_rows():
    rows = cf.rate_study("gaussian", 2, 2, [4, 8], seed=7, samples=512)
    assert [r["m"] for r in rows] == [1, 3]
    assert all(r["sup_error"] >= 0 and math.isfinite(r["sup_error"]) for r in rows)
    assert rows[1]["param_count"] == cf.free_parameter_formula(2, 2, 8)
