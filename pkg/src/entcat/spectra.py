"""Schmidt-spectrum algebra.

Spectra of bipartite pure states are represented as ordered probability
vectors.  Everything needed for LOCC convertibility lives here: tensor
products, entanglement monotones, the deterministic-conversion
(majorization) test and the optimal conversion probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# Absolute tolerance for probability comparisons.  Spectra come from closed
# forms and short products, so doubles keep at least 12 significant digits.
TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SchmidtVector:
    """Ordered Schmidt spectrum of a bipartite pure state.

    Coefficients are probabilities sorted in non-increasing order and summing
    to one.  Trailing zeros are legal and preserved, so padding to a common
    dimension stays explicit and predictable.  Use :func:`make_schmidt` to
    build one from unnormalized or unsorted weights.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise InvalidInputError("spectrum must be a non-empty 1-D sequence")
        if np.any(coeffs < 0.0):
            raise InvalidInputError("Schmidt coefficients must be non-negative")
        if np.any(np.diff(coeffs) > TOL):
            raise InvalidInputError("Schmidt coefficients must be sorted non-increasing")
        total = float(coeffs.sum())
        if abs(total - 1.0) > TOL:
            raise InvalidInputError(f"Schmidt coefficients must sum to 1, got {total}")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def dimension(self) -> int:
        return self.coefficients.size

    def padded(self, dimension: int) -> "SchmidtVector":
        """Copy of this spectrum zero-padded to ``dimension``."""
        if dimension < self.dimension:
            raise InvalidInputError("cannot pad to a smaller dimension")
        if dimension == self.dimension:
            return self
        extra = np.zeros(dimension - self.dimension)
        return SchmidtVector(np.concatenate([self.coefficients, extra]))

    def __repr__(self):
        body = ",".join(f"{c:.12g}" for c in self.coefficients)
        return f"SchmidtVector([{body}])"


@dataclass(frozen=True, eq=False)
class MonotoneVector:
    """Vector of LOCC monotones derived from a Schmidt spectrum.

    Entry k (1-based) is one minus the sum of the k-1 largest coefficients.
    The first entry is exactly 1, the sequence is non-increasing, and
    consecutive differences reproduce the sorted coefficients.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise InvalidInputError("monotone vector must be a non-empty 1-D sequence")
        if vals[0] != 1.0:
            raise InvalidInputError("first monotone must equal 1")
        if np.any(np.diff(vals) > TOL):
            raise InvalidInputError("monotones must be non-increasing")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def make_schmidt(weights) -> SchmidtVector:
    """Normalize and sort non-negative weights into a Schmidt spectrum.

    Zeros are kept so the dimension equals the number of weights supplied.
    """
    w = np.asarray(list(weights), dtype=float)
    if w.size == 0:
        raise InvalidInputError("at least one weight is required")
    if np.any(w < 0.0):
        raise InvalidInputError("weights must be non-negative")
    total = float(w.sum())
    if total <= 0.0:
        raise InvalidInputError("weights must not all be zero")
    return SchmidtVector(np.sort(w / total)[::-1])


def two_qubit_state(p: float) -> SchmidtVector:
    """Two-qubit spectrum ``(p, 1-p)`` with ``p`` the larger coefficient."""
    if not 0.5 <= p <= 1.0:
        raise InvalidInputError(f"larger coefficient must lie in [0.5, 1], got {p}")
    return SchmidtVector(np.array([p, 1.0 - p]))


def monotones(s: SchmidtVector) -> MonotoneVector:
    """Monotone vector of ``s``: entry k is 1 minus the k-1 largest coefficients."""
    prefix = np.concatenate([[0.0], np.cumsum(s.coefficients)[:-1]])
    values = 1.0 - prefix
    # Rounding can push the tail a hair below zero; monotones are probabilities.
    np.maximum(values, 0.0, out=values)
    return MonotoneVector(values)


def tensor_product(a: SchmidtVector, b: SchmidtVector) -> SchmidtVector:
    """Spectrum of the joint state: all pairwise products, sorted."""
    prod = np.sort(np.outer(a.coefficients, b.coefficients).ravel())[::-1]
    return SchmidtVector(prod)


def _padded_monotone_values(initial: SchmidtVector, final: SchmidtVector):
    d = max(initial.dimension, final.dimension)
    e_i = monotones(initial.padded(d)).values
    e_f = monotones(final.padded(d)).values
    return e_i, e_f


def can_convert_deterministically(initial: SchmidtVector, final: SchmidtVector) -> bool:
    """Majorization test: can ``initial`` reach ``final`` with certainty under LOCC?

    Both spectra are zero-padded to the larger dimension, then every monotone
    of the initial state must dominate the final one's (within tolerance).
    """
    e_i, e_f = _padded_monotone_values(initial, final)
    return bool(np.all(e_i >= e_f - TOL))


def _min_monotone_ratio(e_i: np.ndarray, e_f: np.ndarray) -> float:
    """Minimum ratio of monotones with the zero-entry conventions.

    Indices where the final monotone vanishes but the initial one does not are
    never binding and are skipped; an index with a vanishing initial monotone
    against a positive final one forces the result to zero; indices where both
    vanish are skipped.  Entries at or below ``TOL`` count as zero.
    """
    num_zero = e_i <= TOL
    den_zero = e_f <= TOL
    if np.any(num_zero & ~den_zero):
        return 0.0
    valid = ~num_zero & ~den_zero
    p = float(np.min(e_i[valid] / e_f[valid]))
    # The first ratio is identically 1, so p <= 1 up to rounding.  Snap values
    # within tolerance of 1 so that p == 1 exactly when conversion is
    # deterministic under the same tolerance.
    if p >= 1.0 - TOL:
        return 1.0
    return p


def conversion_probability(initial: SchmidtVector, final: SchmidtVector) -> float:
    """Optimal LOCC probability of converting ``initial`` into ``final``.

    Equals the minimum over k of the ratio of the k-th monotones of the two
    spectra (padded to a common dimension).  Returns 1 exactly when
    :func:`can_convert_deterministically` holds.
    """
    e_i, e_f = _padded_monotone_values(initial, final)
    return _min_monotone_ratio(e_i, e_f)
