"""Consensus-graph clustering by four-block alternating minimization.

Given V row-stochastic anchor graphs S_v (n x m), the solver minimizes

    || Z - sum_v alpha_v S_v ||_F^2  +  beta * ||Z||_*
                                     +  gamma * || Z - F G^T ||_F^2

over the consensus graph Z (n x m), a non-negative soft indicator
F (n x c), a column-orthonormal basis G (m x c), and simplex view
weights alpha. Each block update below is the exact minimizer of its
subproblem, so the objective never increases:

    F      max(Z G, 0)                          (separable clamp)
    G      U V^T from the SVD of Z^T F          (orthogonal Procrustes)
    Z      soft-threshold the singular values of
           (sum_v alpha_v S_v + gamma F G^T) / (1 + gamma)
           at beta / (2 (1 + gamma))            (nuclear-norm prox)
    alpha  projected gradient on a V-dim simplex QP

Hard labels are the row-argmax of F.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .anchors import AnchorGraphSet
from .errors import (
    InvalidParameter,
    NumericalBreakdown,
    QpNotConvergedWarning,
    RankDeficientWarning,
)

DEFAULT_BETA = 0.3
DEFAULT_GAMMA = 0.1


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters and iteration controls for fit()."""

    c: int
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA
    max_iters: int = 200
    rel_tol: float = 1e-6
    seed: int = 0
    qp_max_iters: int = 1000
    qp_tol: float = 1e-10

    def __post_init__(self):
        if self.c < 1:
            raise InvalidParameter(f"c must be >= 1, got {self.c}")
        if self.beta < 0 or self.gamma < 0:
            raise InvalidParameter(
                f"beta and gamma must be >= 0, got beta={self.beta}, "
                f"gamma={self.gamma}"
            )
        if self.max_iters < 1:
            raise InvalidParameter(f"max_iters must be >= 1, got {self.max_iters}")
        if self.rel_tol <= 0:
            raise InvalidParameter(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.qp_max_iters < 1 or self.qp_tol <= 0:
            raise InvalidParameter("qp_max_iters must be >= 1 and qp_tol > 0")


@dataclass
class SolverState:
    Z: np.ndarray
    F: np.ndarray
    G: np.ndarray
    alpha: np.ndarray
    objective_history: list[float] = field(default_factory=list)
    iters_run: int = 0


@dataclass(frozen=True)
class ClusteringResult:
    labels: np.ndarray
    state: SolverState
    elapsed: float
    converged: bool


def mix_graphs(graphs: list[np.ndarray], alpha: np.ndarray) -> np.ndarray:
    """Weighted sum of the per-view graphs."""
    Z = alpha[0] * graphs[0]
    for a, S in zip(alpha[1:], graphs[1:]):
        Z += a * S
    return Z


def init_state(graphs: AnchorGraphSet, config: SolverConfig) -> SolverState:
    """Even view weights, Z as their mixture, random F >= 0, random orthonormal G."""
    V, n, m = graphs.num_views, graphs.n, graphs.m
    if config.c > m:
        warnings.warn(
            f"c={config.c} exceeds the anchor count m={m}; the basis cannot "
            "have orthonormal columns and results will be unreliable",
            stacklevel=2,
        )
    alpha = np.full(V, 1.0 / V)
    Z = mix_graphs(graphs.graphs, alpha)
    rng = np.random.default_rng(config.seed)
    F = np.abs(rng.standard_normal((n, config.c)))
    Q, _ = np.linalg.qr(rng.standard_normal((m, min(config.c, m))))
    if config.c > m:
        G = np.zeros((m, config.c))
        G[:, :m] = Q
    else:
        G = Q
    return SolverState(Z=Z, F=F, G=G, alpha=alpha)


def update_F(Z: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Exact non-negative minimizer of ||Z - F G^T||_F^2 for orthonormal G."""
    return np.maximum(Z @ G, 0.0)


def update_G(Z: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Orthogonal Procrustes: maximize Tr(G^T W) with W = Z^T F."""
    W = Z.T @ F
    U, s, Vt = np.linalg.svd(W, full_matrices=False)
    if s.size and s[-1] < 1e-12:
        warnings.warn(
            "Z^T F is rank deficient; the basis update is non-unique "
            "(fixed by the SVD convention)",
            RankDeficientWarning,
            stacklevel=2,
        )
    return U @ Vt


def svt(M: np.ndarray, tau: float) -> np.ndarray:
    """Singular value thresholding, the proximal operator of tau * ||.||_*.

    Minimizes 0.5 ||Z - M||_F^2 + tau ||Z||_*. The SVD is taken through an
    eigendecomposition of the small Gram matrix, so the cost stays
    O(n m^2) for a tall n x m input.
    """
    if tau < 0:
        raise InvalidParameter(f"tau must be >= 0, got {tau}")
    M = np.asarray(M, dtype=np.float64)
    if tau == 0.0:
        return M.copy()
    transposed = M.shape[0] < M.shape[1]
    A = M.T if transposed else M
    lam, V = np.linalg.eigh(A.T @ A)
    sigma = np.sqrt(np.clip(lam, 0.0, None))
    keep = sigma > tau
    if not keep.any():
        return np.zeros_like(M)
    V = V[:, keep]
    sigma = sigma[keep]
    U = (A @ V) / sigma
    Z = (U * (sigma - tau)) @ V.T
    return Z.T if transposed else Z


def update_Z(
    graphs: list[np.ndarray],
    alpha: np.ndarray,
    F: np.ndarray,
    G: np.ndarray,
    beta: float,
    gamma: float,
) -> np.ndarray:
    """Exact Z-block minimizer: SVT of the blended target."""
    M = mix_graphs(graphs, alpha)
    if gamma != 0.0:
        M = (M + gamma * (F @ G.T)) / (1.0 + gamma)
    return svt(M, beta / (2.0 * (1.0 + gamma)))


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based, exact)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    ranks = np.arange(1, v.size + 1)
    rho = np.nonzero(u * ranks > (css - 1.0))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def update_alpha(
    graphs: list[np.ndarray],
    Z: np.ndarray,
    qp_max_iters: int = 1000,
    qp_tol: float = 1e-10,
) -> np.ndarray:
    """View weights minimizing ||Z - sum_v alpha_v S_v||_F^2 on the simplex.

    Expanding the norm gives the QP  alpha^T Q alpha - alpha^T q  with
    Q_uv = <S_u, S_v>_F and q_v = 2 <S_v, Z>_F, solved by projected
    gradient descent with step 1/L, L = 2 lambda_max(Q), started from the
    uniform weights (so symmetric ties resolve to the uniform point).
    """
    V = len(graphs)
    if V == 1:
        return np.ones(1)
    flat = np.stack([S.ravel() for S in graphs])
    Q = flat @ flat.T
    q = 2.0 * (flat @ Z.ravel())
    L = 2.0 * max(float(np.linalg.eigvalsh(Q)[-1]), np.finfo(float).tiny)

    def value(a):
        return float(a @ Q @ a - a @ q)

    alpha = np.full(V, 1.0 / V)
    best, best_val = alpha, value(alpha)
    for _ in range(qp_max_iters):
        grad = 2.0 * (Q @ alpha) - q
        nxt = project_simplex(alpha - grad / L)
        nxt_val = value(nxt)
        if nxt_val < best_val:
            best, best_val = nxt, nxt_val
        if np.max(np.abs(nxt - alpha)) < qp_tol:
            return nxt
        alpha = nxt
    warnings.warn(
        f"view-weight QP did not reach tol={qp_tol} in {qp_max_iters} "
        "iterations; returning the best iterate",
        QpNotConvergedWarning,
        stacklevel=2,
    )
    return best


def nuclear_norm(Z: np.ndarray) -> float:
    return float(np.linalg.svd(Z, compute_uv=False).sum())


def objective(state: SolverState, graphs: AnchorGraphSet, config: SolverConfig) -> float:
    """Value of the full objective at the given state."""
    return _objective(
        state.Z, state.F, state.G, state.alpha, graphs.graphs, config.beta, config.gamma
    )


def _objective(Z, F, G, alpha, graphs, beta, gamma):
    fit_term = float(np.sum((Z - mix_graphs(graphs, alpha)) ** 2))
    factor_term = float(np.sum((Z - F @ G.T) ** 2))
    return fit_term + beta * nuclear_norm(Z) + gamma * factor_term


def labels_from_F(F: np.ndarray) -> np.ndarray:
    """Row-argmax of the soft indicator; ties go to the lowest column."""
    return np.argmax(F, axis=1)


def fit(graphs: AnchorGraphSet, config: SolverConfig) -> ClusteringResult:
    """Run the alternating scheme until the relative objective change
    drops below rel_tol or max_iters cycles elapse."""
    return _fit_loop(graphs, config, with_alpha=True)


def _fit_loop(
    graphs: AnchorGraphSet, config: SolverConfig, with_alpha: bool
) -> ClusteringResult:
    t0 = time.perf_counter()
    state = init_state(graphs, config)
    S_list = graphs.graphs
    beta, gamma = config.beta, config.gamma

    try:
        prev = _objective(state.Z, state.F, state.G, state.alpha, S_list, beta, gamma)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(f"objective failed at initialization: {exc}") from None
    if not np.isfinite(prev):
        raise NumericalBreakdown("objective is non-finite at initialization")
    state.objective_history.append(prev)
    converged = False
    for cycle in range(1, config.max_iters + 1):
        try:
            state.F = update_F(state.Z, state.G)
            state.G = update_G(state.Z, state.F)
            state.Z = update_Z(S_list, state.alpha, state.F, state.G, beta, gamma)
            if with_alpha and graphs.num_views > 1:
                state.alpha = update_alpha(
                    S_list, state.Z, config.qp_max_iters, config.qp_tol
                )
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown(
                f"linear algebra failed at cycle {cycle}: {exc}"
            ) from None
        obj = _objective(state.Z, state.F, state.G, state.alpha, S_list, beta, gamma)
        state.objective_history.append(obj)
        state.iters_run = cycle
        if not np.isfinite(obj):
            raise NumericalBreakdown(
                f"objective became non-finite at cycle {cycle} "
                f"(beta={beta}, gamma={gamma})"
            )
        if abs(obj - prev) / max(prev, 1e-12) < config.rel_tol:
            converged = True
            break
        prev = obj

    labels = labels_from_F(state.F)
    return ClusteringResult(
        labels=labels,
        state=state,
        elapsed=time.perf_counter() - t0,
        converged=converged,
    )
