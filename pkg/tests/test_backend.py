import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkinterp import _backend, _pycore

core = pytest.importorskip("rkinterp._core")


def test_compiled_backend_selected():
    assert _backend.BACKEND == "cython"
    assert _backend.perm_ryser is core.perm_ryser


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(0, 7))
def test_compiled_matches_python(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    for name in ("perm_leibniz", "perm_ryser", "det_leibniz"):
        a, b = getattr(core, name)(A), getattr(_pycore, name)(A)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(b)), name


def test_compiled_accepts_real_and_noncontiguous():
    A = np.arange(16, dtype=float).reshape(4, 4)[:, ::-1].T
    assert core.perm_ryser(A) == pytest.approx(_pycore.perm_ryser(A))
    assert core.det_leibniz(A) == pytest.approx(_pycore.det_leibniz(A), abs=1e-9)


def test_public_entry_rejects_nonsquare():
    from rkinterp.oracles import permanent
    with pytest.raises(ValueError):
        permanent(np.ones((2, 3)), "ryser")
