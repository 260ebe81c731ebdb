import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkinterp.errors import DimensionMismatch, DomainViolation, DuplicatePoints, InvalidFill, UnsupportedId
from rkinterp.kernels import (
    KERNEL_IDS,
    SERIES_IDS,
    KernelSpec,
    associated_hilbert,
    custom_series,
    eval_kernel,
    fill_gaps,
    kernel_matrix,
    krein_split,
    make_spec,
    membership_certificate,
    psd_check,
    resolved_coeffs,
    series_coefficients,
    series_length,
)


# --------------------------------------------------------------------------
# closed-form evaluation
# --------------------------------------------------------------------------

@pytest.mark.parametrize("kid", ["omega", "segal_bargmann"])
def test_zero_argument_gives_one(kid):
    spec = make_spec(kid)
    assert eval_kernel(spec, [0.0, 0.0], [0.3, -0.2j]) == pytest.approx(1.0)


def test_omega_half_half():
    assert eval_kernel(make_spec("omega"), 0.5, 0.5) == pytest.approx(4 / 3, rel=1e-15)


def test_sobolev_1d_value():
    assert eval_kernel(make_spec("sobolev_K"), 0.3, 0.7).real == pytest.approx(0.09, abs=1e-15)


def test_omega_blows_up_at_pairing_one():
    with pytest.raises(DomainViolation):
        eval_kernel(make_spec("omega"), 1.0, 1.0)


def test_tanh_outside_radius():
    with pytest.raises(DomainViolation):
        eval_kernel(make_spec("tanh"), 1.3, 1.3)


def test_sobolev_outside_cube():
    with pytest.raises(DomainViolation):
        eval_kernel(make_spec("sobolev_K"), 1.2, 0.5)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        eval_kernel(make_spec("omega"), [0.1, 0.2], [0.1])


def test_pairing_is_conjugate_linear_in_second_argument():
    spec = custom_series([0.0, 1.0])
    x, y = np.array([0.3 + 0.1j]), np.array([0.2 - 0.4j])
    assert eval_kernel(spec, x, y) == pytest.approx(np.conj(y[0]) * x[0])


def test_unknown_id():
    with pytest.raises(UnsupportedId):
        make_spec("relu")


# --------------------------------------------------------------------------
# series
# --------------------------------------------------------------------------

def test_tanh_series():
    assert series_coefficients("tanh", 6) == pytest.approx([0, 1, 0, -1 / 3, 0, 2 / 15], abs=1e-16)


def test_softplus_series():
    assert series_coefficients("softplus", 5) == pytest.approx(
        [math.log(2), 0.5, 0.125, 0.0, -1 / 192], abs=1e-16)


def test_omega_and_exp_series():
    assert series_coefficients("omega", 4) == [1, 1, 1, 1]
    assert series_coefficients("segal_bargmann", 5) == pytest.approx([1 / math.factorial(j) for j in range(5)])


def test_tanh_series_against_taylor_oracle():
    # independent oracle: tanh'(z) = 1 - tanh^2, recurrence on Taylor coefficients
    n = 16
    t = np.zeros(n)
    t[1] = 1.0
    for k in range(1, n - 1):
        sq = sum(t[i] * t[k - i] for i in range(k + 1))
        t[k + 1] = ((1.0 if k == 0 else 0.0) - sq) / (k + 1)
    assert series_coefficients("tanh", n) == pytest.approx(t, abs=1e-15)


def test_sobolev_has_no_series():
    with pytest.raises(UnsupportedId):
        series_coefficients("sobolev_K", 3)


@pytest.mark.parametrize("kid", SERIES_IDS)
def test_series_matches_closed_form_at_half_radius(kid):
    spec = make_spec(kid)
    r = 0.5 * (spec.radius if math.isfinite(spec.radius) else 2.0)
    x = math.sqrt(r)
    n = series_length(spec, r)
    series = custom_series(resolved_coeffs(spec, n))
    a = eval_kernel(spec, x, x)
    b = eval_kernel(series, x, x)
    assert abs(a - b) <= 1e-10 * abs(a)


# --------------------------------------------------------------------------
# transforms
# --------------------------------------------------------------------------

def test_associated_tanh():
    spec = associated_hilbert(make_spec("tanh", 6))
    assert spec.id == "tan_assoc"
    assert spec.coeffs == pytest.approx([0, 1, 0, 1 / 3, 0, 2 / 15])


def test_associated_softplus():
    spec = associated_hilbert(make_spec("softplus", 5))
    assert spec.id == "softplus_assoc"
    assert spec.coeffs == pytest.approx([math.log(2), 0.5, 0.125, 0, 1 / 192])


def test_associated_closed_forms_match_series():
    for src, dst in (("tanh", "tan_assoc"), ("softplus", "softplus_assoc")):
        w = 0.7
        series = sum(abs(c) * w ** j for j, c in enumerate(series_coefficients(src, 80)))
        assert eval_kernel(make_spec(dst), math.sqrt(w), math.sqrt(w)) == pytest.approx(series, rel=1e-12)


def test_associated_of_positive_is_identity():
    spec = make_spec("omega", 8)
    assert associated_hilbert(spec) is spec


def test_fill_gaps_tan_assoc():
    spec = fill_gaps(make_spec("tan_assoc", 6), 1.0, 5)
    assert spec.coeffs == pytest.approx([1, 1, 1, 1 / 3, 1, 2 / 15])
    rng = np.random.default_rng(1)
    X = rng.uniform(-0.9, 0.9, (1, 8))
    assert psd_check(kernel_matrix(spec, X, X))[0]


def test_fill_gaps_examples():
    ones = custom_series([1, 1, 1])
    assert fill_gaps(ones).coeffs == ones.coeffs
    assert fill_gaps(custom_series([0, 1]), 0.5, 3).coeffs == (0.5, 1, 0.5, 0.5)


def test_fill_gaps_rejects_nonpositive():
    with pytest.raises(InvalidFill):
        fill_gaps(custom_series([0, 1]), 0.0)
    with pytest.raises(UnsupportedId):
        fill_gaps(make_spec("sobolev_K"))


def test_krein_split_tanh():
    split = krein_split(make_spec("tanh", 6))
    assert split.plus.coeffs == pytest.approx([0, 1, 0, 0, 0, 2 / 15])
    assert split.minus.coeffs == pytest.approx([0, 0, 0, 1 / 3, 0, 0])


def test_krein_split_omega():
    split = krein_split(make_spec("omega", 5))
    assert split.plus.coeffs == (1, 1, 1, 1, 1)
    assert not any(split.minus.coeffs)


def test_krein_split_softplus_negative_part():
    split = krein_split(make_spec("softplus", 6))
    neg = [j for j, c in enumerate(split.minus.coeffs) if c]
    assert neg == [4]
    assert split.minus.coeffs[4] == pytest.approx(1 / 192)


# --------------------------------------------------------------------------
# membership certificate
# --------------------------------------------------------------------------

def test_certificate_zero_function():
    ok, _ = membership_certificate(make_spec("omega"), [0.1, 0.4, -0.3], [0, 0, 0], 0.5)
    assert ok


def test_certificate_unit_kernel_section():
    spec = make_spec("omega")
    y = 0.4
    X = np.array([-0.6, -0.1, 0.2, 0.5, 0.8])
    ky = np.array([eval_kernel(spec, x, y) for x in X])
    vals = ky / math.sqrt(eval_kernel(spec, y, y).real)
    ok, lam = membership_certificate(spec, X, vals, 1.0)
    assert ok and lam >= -1e-10


def test_certificate_rejects_large_function():
    X = np.linspace(0.1, 0.8, 5)
    ok, lam = membership_certificate(make_spec("omega"), X, 1 / (1 - X) ** 2, 1.0)
    assert not ok and lam < 0


def test_certificate_duplicate_points():
    with pytest.raises(DuplicatePoints):
        membership_certificate(make_spec("omega"), [0.1, 0.1], [1, 1], 1.0)


# --------------------------------------------------------------------------
# properties
# --------------------------------------------------------------------------

coeff_lists = st.lists(st.floats(0, 2), min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(coeffs=coeff_lists, seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 12), d=st.integers(1, 3))
def test_nonnegative_series_gram_is_psd(coeffs, seed, n, d):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(d, n)) + 1j * rng.normal(size=(d, n))
    X *= rng.uniform(0, 0.95, n) / np.linalg.norm(X, axis=0)
    spec = custom_series(coeffs, 1.0)
    P = kernel_matrix(spec, X, X)
    ev = np.linalg.eigvalsh(0.5 * (P + P.conj().T))
    assert ev[0] >= -1e-10 * abs(np.trace(P).real) - 1e-300


@settings(max_examples=60, deadline=None)
@given(kid=st.sampled_from(["tanh", "softplus", "omega", "segal_bargmann"]), n=st.integers(2, 14))
def test_associated_idempotent_and_split_recombines(kid, n):
    spec = make_spec(kid, n)
    once = associated_hilbert(spec)
    assert associated_hilbert(once).coeffs == once.coeffs
    assert krein_split(spec).recombine() == pytest.approx(resolved_coeffs(spec))


@settings(max_examples=80, deadline=None)
@given(kid=st.sampled_from([k for k in KERNEL_IDS if k != "custom_series"]),
       seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 3))
def test_hermitian_symmetry(kid, seed, d):
    rng = np.random.default_rng(seed)
    spec = make_spec(kid)
    if kid == "sobolev_K":
        x, y = rng.uniform(0, 1, d), rng.uniform(0, 1, d)
    else:
        r = min(spec.radius, 2.0) ** 0.5 * 0.7
        x = rng.normal(size=d) + 1j * rng.normal(size=d)
        y = rng.normal(size=d) + 1j * rng.normal(size=d)
        x *= r / np.linalg.norm(x)
        y *= r / np.linalg.norm(y)
    assert eval_kernel(spec, x, y) == pytest.approx(np.conj(eval_kernel(spec, y, x)), rel=1e-12, abs=1e-14)


def test_kernelspec_validation():
    with pytest.raises(ValueError):
        KernelSpec("omega", (), -1.0)
    assert not make_spec("softplus").is_positive
    assert make_spec("softplus_assoc").is_positive
