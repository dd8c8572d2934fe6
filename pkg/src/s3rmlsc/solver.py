"""Trace-ratio projection learning via the decomposed Newton iteration.

Maximizing tr(V^T B V) / tr(V^T T V) over orthonormal V is solved as the
root of g(lambda) = sum of the top-d eigenvalues of (B - lambda T): at each
step V collects the top-d eigenvectors at the current lambda and the ratio
at that V becomes the next lambda. The sequence is monotone non-decreasing
and converges to the global optimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import SampleSet
from .exceptions import ConvergenceError, SingularDenominatorError
from .scatter import ScatterPair
from .validation import check_symmetric, check_unit_interval


@dataclass(frozen=True)
class Projection:
    """Orthonormal projection columns plus solver diagnostics."""

    matrix: np.ndarray  # (D, d)
    lambda_star: float
    iterations: int
    residual: float

    def __post_init__(self):
        matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n_components(self) -> int:
        return self.matrix.shape[1]


def sym_eig_topd(matrix: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-d eigenpairs of a symmetric matrix, eigenvalues descending.

    The input is defensively symmetrized; each eigenvector's sign is fixed
    so its largest-magnitude component is positive.
    """
    matrix = check_symmetric(matrix, "matrix")
    n = matrix.shape[0]
    if not 1 <= d <= n:
        raise ValueError(f"d must lie in 1..{n}, got {d}")
    sym = (matrix + matrix.T) / 2.0
    values, vectors = np.linalg.eigh(sym)
    values = values[::-1][:d]
    vectors = vectors[:, ::-1][:, :d]
    flip = vectors[np.argmax(np.abs(vectors), axis=0), np.arange(d)] < 0
    vectors = np.where(flip, -vectors, vectors)
    return values, vectors


def trace_ratio_dnm(
    between: np.ndarray,
    total: np.ndarray,
    d: int,
    tol: float = 1e-8,
    max_iter: int = 100,
    history: list | None = None,
) -> Projection:
    """Solve max tr(V^T B V) / tr(V^T T V) for an orthonormal D x d projection.

    Starts from lambda = 0 and stops once |g(lambda)| <= tol * tr(T). When
    `history` is given, each lambda iterate is appended to it.
    """
    between = check_symmetric(between, "between")
    total = check_symmetric(total, "total")
    if between.shape != total.shape:
        raise ValueError("between and total must have equal shapes")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    trace_total = float(np.trace(total))
    threshold = tol * max(trace_total, np.finfo(float).tiny)

    lam = 0.0
    for iteration in range(1, max_iter + 1):
        if history is not None:
            history.append(lam)
        values, vectors = sym_eig_topd(between - lam * total, d)
        g = float(values.sum())
        numerator = float(np.trace(vectors.T @ between @ vectors))
        denominator = float(np.trace(vectors.T @ total @ vectors))
        if denominator <= 1e-12 * trace_total:
            raise SingularDenominatorError(
                "trace-ratio denominator vanished on the candidate subspace; "
                "increase gamma or alpha to regularize the total scatter"
            )
        lam_next = numerator / denominator
        if abs(g) <= threshold:
            return Projection(
                matrix=vectors,
                lambda_star=lam_next,
                iterations=iteration,
                residual=abs(g),
            )
        lam = lam_next
    raise ConvergenceError(
        f"trace-ratio iteration did not reach |g| <= {threshold:.3e} "
        f"in {max_iter} iterations (residual {abs(g):.3e})",
        residual=abs(g),
    )


def assemble_objective(
    fused: ScatterPair, penalty: np.ndarray, gamma: float
) -> tuple[np.ndarray, np.ndarray]:
    """Between scatter and penalized total scatter for the solver.

    Returns (B, T + gamma * penalty), the second defensively symmetrized.
    """
    gamma = check_unit_interval(gamma, "gamma")
    penalty = np.asarray(penalty, dtype=np.float64)
    if penalty.shape != fused.total.shape:
        raise ValueError(
            f"penalty shape {penalty.shape} does not match scatter {fused.total.shape}"
        )
    total = fused.total + gamma * penalty
    return fused.between, (total + total.T) / 2.0


def project(samples: SampleSet, projection: Projection) -> SampleSet:
    """Map spectra through the projection; coords and labels carry over."""
    v = projection.matrix
    if samples.dim != v.shape[0]:
        raise ValueError(
            f"sample dim {samples.dim} does not match projection rows {v.shape[0]}"
        )
    return SampleSet(
        dim=v.shape[1],
        spectra=v.T @ samples.spectra,
        coords=samples.coords,
        labels=samples.labels,
    )
