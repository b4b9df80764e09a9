"""Dense linear algebra used by the DPP, forest and quantum modules."""

from numerics.eigen import EigenDecomposition, normalize_signs, pinv_sym, sym_eig
from numerics.matrix import as_matrix, det, gram, qr_orthonormalize

__all__ = [
    "EigenDecomposition",
    "as_matrix",
    "det",
    "gram",
    "normalize_signs",
    "pinv_sym",
    "qr_orthonormalize",
    "sym_eig",
]
