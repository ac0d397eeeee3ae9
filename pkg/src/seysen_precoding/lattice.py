"""Seysen lattice reduction (greedy and lazy pair selection) and an LLL baseline.

Bases are real matrices whose *columns* are the basis vectors. Every reducer
returns ``(B_red, T, report)`` with ``B_red = B @ T`` and ``T`` an exact
integer unimodular matrix. Pair indices are 0-based throughout.

Seysen's measure of a basis is ``S(A) = sum_i A[i, i] * A*[i, i]`` where
``A = B^T B`` and ``A* = A^-1`` is the Gram matrix of the dual basis.  One
elementary step replaces column ``j`` by ``b_j + lam * b_i``; both quadratic
forms are updated in O(n) per step instead of being recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import SingularMatrixError, TransformOverflowError
from .matrix_core import as_real, gram, invert_spd

__all__ = [
    "ReductionState",
    "ReductionReport",
    "Reduction",
    "init_state",
    "dual_basis",
    "seysen_measure",
    "lambda_opt",
    "lambda_matrix",
    "delta",
    "delta_matrix",
    "apply_pair",
    "is_s2_reduced",
    "check_state",
    "reduce_greedy",
    "reduce_lazy",
    "lll_reduce",
    "reduce_basis",
    "REDUCERS",
    "DEFAULT_MAX_ITERS",
    "DEFAULT_LLL_DELTA",
]

DEFAULT_MAX_ITERS = 10_000
DEFAULT_LLL_DELTA = 0.75

_INT64_MAX = np.iinfo(np.int64).max


@dataclass
class ReductionState:
    """Working state of a Seysen reduction.

    ``B`` is the current basis (original basis times ``T``), ``A`` and
    ``Adual`` its primal and dual quadratic forms.  ``log`` collects one
    ``(i, j, lam, delta)`` record per applied elementary transform.
    """

    B: np.ndarray
    A: np.ndarray
    Adual: np.ndarray
    T: np.ndarray
    log: list[tuple[int, int, int, float]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def copy(self) -> "ReductionState":
        return ReductionState(
            self.B.copy(), self.A.copy(), self.Adual.copy(), self.T.copy(), list(self.log)
        )


@dataclass
class ReductionReport:
    algorithm: str
    iterations: int
    initial_measure: float
    final_measure: float
    measure_trace: list[float]
    pair_evaluations: int
    converged: bool = True


class Reduction(NamedTuple):
    basis: np.ndarray
    T: np.ndarray
    report: ReductionReport


def init_state(B) -> ReductionState:
    B = as_real(B).copy()
    m, n = B.shape
    if n > m:
        raise SingularMatrixError(f"{n} columns in dimension {m} cannot be independent")
    A = gram(B)
    return ReductionState(B=B, A=A, Adual=invert_spd(A), T=np.eye(n, dtype=np.int64))


def dual_basis(B) -> np.ndarray:
    """Dual basis ``B (B^T B)^-1``; column i of B and column j of the result
    have inner product ``delta_ij``."""
    B = as_real(B)
    return B @ invert_spd(gram(B))


def seysen_measure(state: ReductionState) -> float:
    return float(np.dot(np.diag(state.A), np.diag(state.Adual)))


def _round_half_toward_zero(x):
    # |lam - x| <= 1/2 < |x| whenever lam != 0, so the step strictly lowers S
    return np.sign(x) * np.ceil(np.abs(x) - 0.5)


def _check_lambda(x) -> None:
    if not np.all(np.abs(x) < 2.0**62):
        raise TransformOverflowError("reduction coefficient exceeds the int64 range")


def lambda_opt(state: ReductionState, i: int, j: int) -> int:
    """Integer coefficient minimising the measure for the step ``b_j += lam*b_i``."""
    if i == j:
        raise ValueError("pair indices must differ")
    A, Ad = state.A, state.Adual
    x = 0.5 * (Ad[i, j] / Ad[j, j] - A[i, j] / A[i, i])
    _check_lambda(x)
    return int(_round_half_toward_zero(x))


def lambda_matrix(state: ReductionState) -> np.ndarray:
    """All pairwise coefficients at once (float array, zero diagonal)."""
    A, Ad = state.A, state.Adual
    a = np.diag(A)
    ad = np.diag(Ad)
    x = 0.5 * (Ad / ad[None, :] - A / a[:, None])
    np.fill_diagonal(x, 0.0)
    _check_lambda(x)
    return _round_half_toward_zero(x)


def delta(state: ReductionState, i: int, j: int, lam: int) -> float:
    """Change in Seysen's measure caused by ``b_j += lam * b_i``."""
    A, Ad = state.A, state.Adual
    return float(
        2.0 * lam * lam * A[i, i] * Ad[j, j]
        + 2.0 * lam * (A[i, j] * Ad[j, j] - Ad[i, j] * A[i, i])
    )


def delta_matrix(state: ReductionState, lam: np.ndarray) -> np.ndarray:
    A, Ad = state.A, state.Adual
    a = np.diag(A)[:, None]
    ad = np.diag(Ad)[None, :]
    return 2.0 * lam * lam * a * ad + 2.0 * lam * (A * ad - Ad * a)


def apply_pair(state: ReductionState, i: int, j: int, lam: int, dS: float | None = None) -> ReductionState:
    """Apply ``T_ij^lam = I + lam * e_i e_j^T`` to the state in place.

    Column ``j`` of the basis becomes ``b_j + lam * b_i``; ``A`` transforms
    by ``T^T A T`` and ``Adual`` by the inverse factor.  Returns the state.
    """
    if i == j:
        raise ValueError("pair indices must differ")
    lam = int(lam)
    if lam == 0:
        return state
    T = state.T
    bound = int(np.max(np.abs(T[:, j]))) + abs(lam) * int(np.max(np.abs(T[:, i])))
    if bound > _INT64_MAX:
        raise TransformOverflowError(f"transform entry overflow at pair ({i}, {j}), lam={lam}")
    if dS is None:
        dS = delta(state, i, j, lam)
    B, A, Ad = state.B, state.A, state.Adual
    B[:, j] += lam * B[:, i]
    A[:, j] += lam * A[:, i]
    A[j, :] += lam * A[i, :]
    Ad[i, :] -= lam * Ad[j, :]
    Ad[:, i] -= lam * Ad[:, j]
    T[:, j] += lam * T[:, i]
    state.log.append((i, j, lam, float(dS)))
    return state


def is_s2_reduced(state: ReductionState) -> bool:
    """True when no single pair step changes the basis."""
    return not np.any(lambda_matrix(state))


def check_state(state: ReductionState, B0, atol: float = 1e-8) -> None:
    """Recompute everything from scratch and compare with the incremental state.

    Used by tests and by ``verify=True`` runs; raises AssertionError on drift.
    """
    B0 = as_real(B0)
    Bt = B0 @ state.T.astype(np.float64)
    scale = max(1.0, float(np.max(np.abs(Bt))))
    if not np.allclose(state.B, Bt, rtol=0.0, atol=1e-10 * scale):
        raise AssertionError("basis drifted from B0 @ T")
    A = gram(Bt)
    if not np.allclose(state.A, A, rtol=1e-8, atol=1e-8 * float(np.max(np.abs(A)))):
        raise AssertionError("primal quadratic form drifted")
    n = state.n
    if np.max(np.abs(state.A @ state.Adual - np.eye(n))) > atol:
        raise AssertionError("A @ Adual is not the identity")


def _report(algorithm, state, trace, iterations, evals, converged) -> ReductionReport:
    return ReductionReport(
        algorithm=algorithm,
        iterations=iterations,
        initial_measure=trace[0],
        final_measure=trace[-1],
        measure_trace=trace,
        pair_evaluations=evals,
        converged=converged,
    )


def reduce_greedy(B, max_iters: int = DEFAULT_MAX_ITERS, verify: bool = False) -> Reduction:
    """Seysen reduction, always taking the pair with the largest measure drop.

    Pairs are scanned row-major over ``(i, j)``; ties go to the first one.
    Stops when no pair lowers the measure, or after ``max_iters`` steps with
    ``report.converged = False``.
    """
    B0 = as_real(B)
    state = init_state(B0)
    n = state.n
    trace = [seysen_measure(state)]
    evals = 0
    iterations = 0
    converged = False
    while True:
        lam = lambda_matrix(state)
        evals += n * (n - 1)
        if not lam.any():
            converged = True
            break
        d = delta_matrix(state, lam)
        k = int(np.argmin(d))
        if not d.flat[k] < 0.0:
            converged = True
            break
        if iterations >= max_iters:
            break
        i, j = divmod(k, n)
        apply_pair(state, i, j, int(lam[i, j]), d.flat[k])
        iterations += 1
        trace.append(seysen_measure(state))
        if verify:
            check_state(state, B0)
    return Reduction(state.B, state.T, _report("seysen-greedy", state, trace, iterations, evals, converged))


def reduce_lazy(
    B,
    max_iters: int = DEFAULT_MAX_ITERS,
    rng: np.random.Generator | None = None,
    verify: bool = False,
) -> Reduction:
    """Seysen reduction with a uniformly random choice among improving pairs."""
    if rng is None:
        rng = np.random.default_rng(0)
    B0 = as_real(B)
    state = init_state(B0)
    n = state.n
    trace = [seysen_measure(state)]
    evals = 0
    iterations = 0
    converged = False
    while True:
        lam = lambda_matrix(state)
        evals += n * (n - 1)
        d = delta_matrix(state, lam)
        candidates = np.flatnonzero((lam != 0) & (d < 0.0))
        if candidates.size == 0:
            converged = True
            break
        if iterations >= max_iters:
            break
        k = int(candidates[rng.integers(candidates.size)])
        i, j = divmod(k, n)
        apply_pair(state, i, j, int(lam[i, j]), d.flat[k])
        iterations += 1
        trace.append(seysen_measure(state))
        if verify:
            check_state(state, B0)
    return Reduction(state.B, state.T, _report("seysen-lazy", state, trace, iterations, evals, converged))


def _measure_of(B: np.ndarray) -> float:
    A = gram(B)
    return float(np.dot(np.diag(A), np.diag(invert_spd(A))))


def lll_reduce(B, delta: float = DEFAULT_LLL_DELTA, max_iters: int = DEFAULT_MAX_ITERS) -> Reduction:
    """LLL reduction of the columns of ``B`` (QR / Givens formulation).

    Output is size reduced (``|mu_lk| <= 1/2``) and satisfies the Lovasz
    condition with parameter ``delta``.  ``report.iterations`` counts passes
    of the main loop, ``pair_evaluations`` counts size-reduction coefficients
    computed.
    """
    if not 0.25 < delta <= 1.0:
        raise ValueError("delta must lie in (0.25, 1]")
    B0 = as_real(B)
    m, n = B0.shape
    if n > m:
        raise SingularMatrixError(f"{n} columns in dimension {m} cannot be independent")
    initial = _measure_of(B0)
    Bw = B0.copy()
    R = np.linalg.qr(B0, mode="r")
    if np.min(np.abs(np.diag(R))) <= 1e-12 * max(1.0, float(np.max(np.abs(np.diag(R))))):
        raise SingularMatrixError("basis is rank deficient")
    T = np.eye(n, dtype=np.int64)
    iterations = 0
    evals = 0
    converged = True
    k = 1
    while k < n:
        if iterations >= max_iters:
            converged = False
            break
        iterations += 1
        for l in range(k - 1, -1, -1):
            evals += 1
            mu = R[l, k] / R[l, l]
            _check_lambda(mu)
            q = round(mu)
            if q != 0:
                bound = int(np.max(np.abs(T[:, k]))) + abs(q) * int(np.max(np.abs(T[:, l])))
                if bound > _INT64_MAX:
                    raise TransformOverflowError("transform entry overflow in size reduction")
                R[: l + 1, k] -= q * R[: l + 1, l]
                Bw[:, k] -= q * Bw[:, l]
                T[:, k] -= q * T[:, l]
        if delta * R[k - 1, k - 1] ** 2 > R[k - 1, k] ** 2 + R[k, k] ** 2:
            R[:, [k - 1, k]] = R[:, [k, k - 1]]
            Bw[:, [k - 1, k]] = Bw[:, [k, k - 1]]
            T[:, [k - 1, k]] = T[:, [k, k - 1]]
            a, b = R[k - 1, k - 1], R[k, k - 1]
            r = np.hypot(a, b)
            c, s = a / r, b / r
            G = np.array([[c, s], [-s, c]])
            R[k - 1 : k + 1, k - 1 :] = G @ R[k - 1 : k + 1, k - 1 :]
            R[k, k - 1] = 0.0
            k = max(k - 1, 1)
        else:
            k += 1
    final = _measure_of(Bw)
    report = ReductionReport(
        algorithm="lll",
        iterations=iterations,
        initial_measure=initial,
        final_measure=final,
        measure_trace=[initial, final],
        pair_evaluations=evals,
        converged=converged,
    )
    return Reduction(Bw, T, report)


REDUCERS = ("seysen-greedy", "seysen-lazy", "lll")


def reduce_basis(B, algo: str, *, delta: float = DEFAULT_LLL_DELTA,
                 max_iters: int = DEFAULT_MAX_ITERS,
                 rng: np.random.Generator | None = None) -> Reduction:
    """Dispatch on a reducer name from ``REDUCERS``."""
    if algo == "seysen-greedy":
        return reduce_greedy(B, max_iters=max_iters)
    if algo == "seysen-lazy":
        return reduce_lazy(B, max_iters=max_iters, rng=rng)
    if algo == "lll":
        return lll_reduce(B, delta=delta, max_iters=max_iters)
    raise ValueError(f"unknown reducer {algo!r}; expected one of {REDUCERS}")
