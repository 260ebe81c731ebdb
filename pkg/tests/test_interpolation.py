import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkinterp.errors import (
    CollapsedNodes,
    DimensionMismatch,
    DomainViolation,
    DuplicateNodes,
    IllConditioned,
    KreinSpec,
    SingularGram,
    UnsupportedId,
)
from rkinterp.interpolation import (
    chebyshev_nodes,
    deep_feature_map,
    evaluate,
    fit,
    fit_deep,
    gram,
    krein_form,
    rkhs_norm,
    solve_gram,
)
from rkinterp.kernels import custom_series, make_spec
from rkinterp.oracles import elliptic_e, homotopy_phi

from _cases import ALL_IDS, PSD_IDS, perturbation_gap, quiet_fit, random_case


# --------------------------------------------------------------------------
# gram
# --------------------------------------------------------------------------

def test_gram_single_node():
    x = np.array([[0.3], [0.4j]])
    assert gram(make_spec("omega"), x)[0, 0] == pytest.approx(1 / (1 - 0.25))


def test_gram_two_nodes():
    assert gram(make_spec("omega"), [0.0, 0.5]) == pytest.approx(np.array([[1, 1], [1, 4 / 3]]))


def test_gram_duplicate_nodes():
    with pytest.raises(DuplicateNodes):
        gram(make_spec("omega"), [0.2, 0.5, 0.2])


def test_gram_domain():
    with pytest.raises(DomainViolation):
        gram(make_spec("omega"), [0.2, 1.5])


def test_gram_is_hermitian():
    rng = np.random.default_rng(3)
    X = 0.4 * (rng.normal(size=(2, 6)) + 1j * rng.normal(size=(2, 6)))
    P = gram(make_spec("omega"), X / np.linalg.norm(X, axis=0).max())
    assert np.array_equal(P, P.conj().T)


# --------------------------------------------------------------------------
# fit / evaluate
# --------------------------------------------------------------------------

def test_softplus_single_node_interpolant():
    net, _ = fit(make_spec("softplus"), [1.0], [1.0])
    z = np.linspace(-2, 2, 9)
    expected = np.log1p(np.exp(z)) / math.log1p(math.e)
    assert np.allclose(evaluate(net, z), expected, rtol=1e-13)


def test_softplus_krein_form_value():
    # natural logarithm: 1 / log(1 + e) = 0.7615...
    net, _ = fit(make_spec("softplus"), [1.0], [1.0])
    assert krein_form(net) == pytest.approx(1 / math.log1p(math.e), rel=1e-13)
    assert krein_form(net) == pytest.approx(0.761463, abs=1e-6)


@pytest.mark.parametrize("kid", PSD_IDS + ["tanh", "softplus", "sobolev_K"])
def test_zero_values_give_zero_weights(kid):
    nodes = np.array([0.1, 0.3, 0.55, 0.8])
    net, _ = fit(make_spec(kid), nodes, np.zeros(4))
    assert not np.any(net.weights)
    assert evaluate(net, 0.42) == 0


def test_omega_homotopy_weight_magnitude():
    # the reference figure is about 1.6e4; first-kind nodes give a larger value
    # of the same order of magnitude band (see the decisions log)
    x = chebyshev_nodes(13, -0.9, 0.9)
    net, _ = quiet_fit(make_spec("omega"), x, homotopy_phi(x))
    w = np.max(np.abs(net.weights))
    assert 1.6e4 / 20 <= w <= 1.6e4 * 20


def test_evaluate_reproduces_training_values():
    x = chebyshev_nodes(12, -0.8, 0.8)
    lam = np.cos(3 * x)
    net, rep = fit(make_spec("omega"), x, lam)
    assert np.linalg.norm(evaluate(net, x) - lam) <= 1e-8 * np.linalg.norm(lam)
    assert rep.success and rep.residual_norm <= 1e-8 * np.linalg.norm(lam)


def test_evaluate_single_and_batch_shapes():
    X = np.array([[0.1, 0.2, -0.3], [0.0, 0.4, 0.1]])
    net, _ = fit(make_spec("omega"), X, [1.0, 2.0, 3.0])
    assert isinstance(evaluate(net, [0.1, 0.0]), complex)
    assert evaluate(net, X).shape == (3,)
    with pytest.raises(DimensionMismatch):
        evaluate(net, [0.1, 0.2, 0.3])


def test_evaluate_domain_violation():
    net, _ = fit(make_spec("omega"), [0.5, 0.9], [1.0, 2.0])
    with pytest.raises(DomainViolation):
        evaluate(net, 1.5)


def test_elliptic_network_heldout_mse():
    x = chebyshev_nodes(30, -1.0, 1.0)
    net, _ = quiet_fit(make_spec("omega"), x, elliptic_e(np.abs(x)))
    k = np.random.default_rng(0).uniform(0, 1, 1000)
    mse = np.mean(np.abs(evaluate(net, k) - elliptic_e(k)) ** 2)
    assert mse <= 1e-9


def test_vector_targets_share_factorization():
    x = chebyshev_nodes(8, -0.7, 0.7)
    lam = np.stack([np.sin(x), np.cos(x)], axis=1)
    net, _ = fit(make_spec("omega"), x, lam)
    assert np.allclose(evaluate(net, x), lam, atol=1e-10)


def test_singular_gram_without_jitter():
    # constant kernel: rank-one Gram, inconsistent data
    with pytest.raises(SingularGram):
        fit(custom_series([1.0]), [0.1, 0.5], [1.0, 2.0], jitter=False)


def test_ill_conditioned_warning():
    x = chebyshev_nodes(13, -0.9, 0.9)
    with pytest.warns(IllConditioned):
        fit(make_spec("segal_bargmann"), x, homotopy_phi(x))


def test_solve_report_path_for_krein():
    _, rep = fit(make_spec("tanh"), [0.2, 0.7], [1.0, -1.0])
    assert rep.path == "pivoted"


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------

def test_rkhs_norm_zero():
    net, _ = fit(make_spec("omega"), [0.1, 0.2], [0, 0])
    assert rkhs_norm(net) == 0
    assert krein_form(net) == 0


def test_rkhs_norm_single_node():
    x = np.array([[0.3], [0.5j]])
    lam = 2.0 - 1.0j
    net, _ = fit(make_spec("omega"), x, [lam])
    assert rkhs_norm(net) == pytest.approx(abs(lam) * math.sqrt(1 - 0.34), rel=1e-14)


def test_rkhs_norm_softplus_assoc_single_node():
    k11 = -np.log(1 + np.exp(1j)) + math.log(4) + 0.5 * (1 + 1j)
    net, _ = fit(make_spec("softplus_assoc"), [1.0], [1.0])
    assert abs(k11.imag) < 1e-15
    assert rkhs_norm(net) == pytest.approx(1 / math.sqrt(k11.real), rel=1e-13)


def test_rkhs_norm_rejects_krein():
    net, _ = fit(make_spec("tanh"), [0.5], [1.0])
    with pytest.raises(KreinSpec):
        rkhs_norm(net)


def test_negative_kernel_has_negative_form():
    neg = custom_series([-1.0, -0.5, -0.25], 1.0)
    net, _ = fit(neg, [0.1, 0.6, -0.4], [1.0, -2.0, 0.5])
    assert krein_form(net) < 0


# --------------------------------------------------------------------------
# deep layers
# --------------------------------------------------------------------------

def test_feature_map_sphere_collapses():
    Y = np.array([[-0.5, 0.1, 0.7]])
    assert np.all(deep_feature_map(Y, 1.0) == 0)
    assert np.all(deep_feature_map(Y, -1.0) == 0)


def test_feature_map_at_origin():
    Y = np.array([[-0.5, 0.1, 0.7]])
    assert deep_feature_map(Y, 0.0) == pytest.approx((1 - np.abs(Y[0])) / math.sqrt(3))


def test_feature_map_single_anchor():
    assert deep_feature_map(np.array([[0.0]]), 0.5) == pytest.approx([0.5])


def test_feature_map_rejects_outside_ball():
    with pytest.raises(DomainViolation):
        deep_feature_map(np.array([[0.0]]), 1.2)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), N=st.integers(1, 10), d=st.integers(1, 3))
def test_feature_map_lands_in_open_ball(seed, N, d):
    rng = np.random.default_rng(seed)
    Y = rng.normal(size=(d, N)) + 1j * rng.normal(size=(d, N))
    Y *= rng.uniform(0, 0.99, N) / np.linalg.norm(Y, axis=0)
    x = rng.normal(size=d)
    x *= rng.uniform(0, 1) / np.linalg.norm(x)
    assert np.linalg.norm(deep_feature_map(Y, x)) < 1


def test_depth_two_is_plain_fit():
    x = chebyshev_nodes(6, -0.8, 0.8)
    a = fit_deep(make_spec("omega"), x, np.sin(x), depth=2)
    b, _ = fit(make_spec("omega"), x, np.sin(x))
    assert np.array_equal(a.weights, b.weights)


def test_depth_three_equal_at_plus_minus_one():
    x = np.linspace(-0.9, 0.8, 10)
    net = fit_deep(make_spec("omega"), x, np.sin(3 * x) + x, depth=3)
    assert abs(evaluate(net, 1.0) - evaluate(net, -1.0)) <= 1e-10
    assert np.allclose(evaluate(net, x), np.sin(3 * x) + x, atol=1e-8)


def test_depth_three_collapsed_nodes():
    with pytest.raises(CollapsedNodes):
        fit_deep(make_spec("omega"), [-1.0, 0.0, 1.0], [0.0, 1.0, 2.0], depth=3)


def test_deep_requires_omega():
    with pytest.raises(UnsupportedId):
        fit_deep(make_spec("segal_bargmann"), [0.1, 0.2], [1, 2], depth=3)


def _deep_sin_100():
    x = np.random.default_rng(0).uniform(-1, 1, 100)
    lam = np.sin(np.pi * x)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        net = fit_deep(make_spec("omega"), x, lam, depth=3)
    return net, x, lam


def test_deep_100_nodes_solver_does_not_fail():
    net, x, lam = _deep_sin_100()
    assert np.all(np.isfinite(net.weights))
    # best attainable in double precision is far below the raw data scale
    assert np.linalg.norm(evaluate(net, x) - lam) <= 1e-4 * np.linalg.norm(lam)


@pytest.mark.xfail(strict=True, reason="depth-3 Gram on 100 random nodes has condition ~1e19; "
                                       "the 1e-8 relative node residual is out of reach in double precision")
def test_deep_100_nodes_residual_at_full_tolerance():
    net, x, lam = _deep_sin_100()
    assert np.linalg.norm(evaluate(net, x) - lam) <= 1e-8 * np.linalg.norm(lam)


# --------------------------------------------------------------------------
# chebyshev nodes
# --------------------------------------------------------------------------

def test_chebyshev_examples():
    assert chebyshev_nodes(1) == pytest.approx([0.0], abs=1e-16)
    assert chebyshev_nodes(2) == pytest.approx([-math.sqrt(2) / 2, math.sqrt(2) / 2])
    r = math.sqrt(3) / 2
    assert chebyshev_nodes(3, 0, 1) == pytest.approx([(1 - r) / 2, 0.5, (1 + r) / 2])


def test_chebyshev_rejects_bad_interval():
    with pytest.raises(ValueError):
        chebyshev_nodes(3, 1, 0)


# --------------------------------------------------------------------------
# properties
# --------------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(kid=st.sampled_from(ALL_IDS), seed=st.integers(0, 2 ** 32 - 1),
       n=st.integers(1, 20), d=st.integers(2, 3))
def test_interpolation_exactness(kid, seed, n, d):
    rng = np.random.default_rng(seed)
    spec, X = random_case(rng, kid, n, d)
    lam = rng.normal(size=n) + 1j * rng.normal(size=n)
    net, _ = quiet_fit(spec, X, lam)
    assert np.linalg.norm(evaluate(net, X) - lam) <= 1e-8 * np.linalg.norm(lam)


@settings(max_examples=40, deadline=None)
@given(kid=st.sampled_from(PSD_IDS), seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 12),
       d=st.integers(2, 3))
def test_minimum_norm_stationarity(kid, seed, n, d):
    rng = np.random.default_rng(seed)
    spec, C = random_case(rng, kid, n + 1, d)
    X, w = C[:, :n], C[:, n:]
    lam = rng.normal(size=n) + 1j * rng.normal(size=n)
    for t in (-1, -0.1, 0.1, 1):
        assert perturbation_gap(spec, X, lam, w, t) >= -1e-10


@settings(max_examples=20, deadline=None)
@given(kid=st.sampled_from(["tanh", "softplus"]), seed=st.integers(0, 2 ** 32 - 1))
def test_krein_fit_is_unique(kid, seed):
    rng = np.random.default_rng(seed)
    x = np.linspace(-0.9, 0.9, 5) + rng.uniform(-0.05, 0.05, 5)
    lam = rng.normal(size=5)
    a, _ = fit(make_spec(kid), x, lam)
    b, _ = fit(make_spec(kid), x, lam)
    assert np.array_equal(a.weights, b.weights)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(2, 40))
def test_sobolev_interpolant_is_piecewise_linear(seed, n):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.choice(np.linspace(0.01, 0.99, 500), n, replace=False))
    net, _ = fit(make_spec("sobolev_K"), x, rng.normal(size=n))
    for a, b in zip(x[:-1], x[1:]):
        t = np.linspace(a, b, 10)
        f = evaluate(net, t).real
        assert np.max(np.abs(f[:-2] - 2 * f[1:-1] + f[2:])) <= 1e-9


@pytest.mark.parametrize("kid", ["omega", "segal_bargmann", "softplus_assoc", "softplus"])
def test_constant_data_reproduced_when_origin_is_a_node(kid):
    # K(z, 0) = a_0 is constant, so constant data lie in the span of the sections
    x = np.array([-0.7, -0.3, 0.0, 0.4, 0.8])
    net, _ = fit(make_spec(kid), x, np.full(5, 2.5))
    z = np.linspace(-0.95, 0.95, 50)
    assert np.max(np.abs(evaluate(net, z) - 2.5)) <= 1e-9


def test_solve_gram_jitter_report():
    P = np.ones((3, 3))
    alpha, rep = solve_gram(P, np.array([1.0, 1.0, 1.0]))
    assert rep.success and np.allclose(P @ alpha, 1.0)
