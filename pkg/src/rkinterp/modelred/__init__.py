"""Hankel-norm model reduction, Pick interpolation and prolongation networks."""
from .aak import (
    MarginalReduction,
    RationalApproximant,
    ResidualFactor,
    UncertifiedReduction,
    aak_reduce_1d,
    marginal_aak,
    realize,
)
from .hankel import (
    PowerSymbol,
    ProductSymbol,
    boundary_samples,
    hankel_matrix,
    hankel_norm,
    l2_norm,
    schmidt_numbers,
    strictly_proper_part,
    sup_norm,
)
from .pick import (
    PickSystem,
    ProductInterpolant,
    SchurInterpolant,
    nevanlinna_pick_1d,
    pick_matrices,
    pick_product_interpolant,
    principal_root,
)
from .prolong import build_prolongation, fit_pnn, tensor_grid

__all__ = [
    "MarginalReduction", "RationalApproximant", "ResidualFactor", "UncertifiedReduction",
    "aak_reduce_1d", "marginal_aak", "realize",
    "PowerSymbol", "ProductSymbol", "boundary_samples", "hankel_matrix", "hankel_norm",
    "l2_norm", "schmidt_numbers", "strictly_proper_part", "sup_norm",
    "PickSystem", "ProductInterpolant", "SchurInterpolant", "nevanlinna_pick_1d",
    "pick_matrices", "pick_product_interpolant", "principal_root",
    "build_prolongation", "fit_pnn", "tensor_grid",
]
