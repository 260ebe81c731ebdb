"""Pick the compiled combinatorial core when it is built, else the Python one."""
try:
    from ._core import det_leibniz, perm_leibniz, perm_ryser

    BACKEND = "cython"
except ImportError:  # extension not compiled
    from ._pycore import det_leibniz, perm_leibniz, perm_ryser

    BACKEND = "python"

__all__ = ["BACKEND", "det_leibniz", "perm_leibniz", "perm_ryser"]
