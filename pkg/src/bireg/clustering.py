"""Frame-model spectral machinery: Markov matrices, eigenvector lifting,
the spurious-eigenvalue bound, spectral clustering, and the regular-SBM
threshold comparison.

The balance condition p_i D_ij = p_j D_ji makes both the frame degree
matrix and its row normalization self-adjoint under weighted inner
products, so frame eigenpairs come from the symmetric eigensolver after a
diagonal conjugation.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .numkernel import sym_eig


class ClusteringError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Markov matrices


@dataclass(frozen=True)
class MarkovView:
    """Row-stochastic P = D_G^{-1} A and its symmetric conjugate
    L = D_G^{-1/2} A D_G^{-1/2}, sharing the same spectrum."""

    P: np.ndarray
    L: np.ndarray
    degrees: np.ndarray

    def eigenvalues(self):
        return sym_eig(self.L)[0]


def _adjacency_of(g):
    if isinstance(g, np.ndarray):
        return g
    return g.adjacency()


def markov(g):
    A = _adjacency_of(g)
    deg = A.sum(axis=1)
    if np.any(deg == 0):
        raise ClusteringError("graph has an isolated vertex")
    P = A / deg[:, None]
    half = 1.0 / np.sqrt(deg)
    L = A * half[:, None] * half[None, :]
    return MarkovView(P=P, L=L, degrees=deg)


@dataclass(frozen=True)
class FrameMarkov:
    R: np.ndarray


def frame_markov(frame):
    D = frame.degree_matrix()
    sums = D.sum(axis=1)
    if np.any(sums == 0):
        raise ClusteringError("frame has an all-zero degree row")
    return FrameMarkov(R=D / sums[:, None])


def frame_degree_eigs(frame):
    """Eigenpairs of the frame degree matrix D via the diag(sqrt p)
    conjugation that the balance condition makes symmetric.
    Returns (eigenvalues descending, eigenvector columns)."""
    D = frame.degree_matrix()
    p = np.array([float(x) for x in frame.p])
    sq = np.sqrt(p)
    sym = D * sq[:, None] / sq[None, :]
    w, U = sym_eig(sym)
    return w, U / sq[:, None]


def frame_markov_eigs(frame):
    """Eigenpairs of the frame Markov matrix R (weights p_i * rowsum_i)."""
    D = frame.degree_matrix()
    sums = D.sum(axis=1)
    if np.any(sums == 0):
        raise ClusteringError("frame has an all-zero degree row")
    R = D / sums[:, None]
    p = np.array([float(x) for x in frame.p])
    sq = np.sqrt(p * sums)
    sym = R * sq[:, None] / sq[None, :]
    w, U = sym_eig(sym)
    return w, U / sq[:, None]


# ---------------------------------------------------------------------------
# lifting


def lift_vector(x, class_sizes):
    return np.repeat(np.asarray(x, dtype=float), class_sizes)


def lift_residual(M, lam, x, class_sizes):
    """Lift a frame eigenpair to a piecewise-constant vector and report
    ||M x~ - lam x~||_inf (M is the adjacency for D-pairs, P for R-pairs)."""
    x_t = lift_vector(x, class_sizes)
    if M.shape[0] != x_t.size:
        raise ClusteringError(
            f"matrix size {M.shape[0]} != lifted vector size {x_t.size}"
        )
    return x_t, float(np.max(np.abs(M @ x_t - lam * x_t)))


# ---------------------------------------------------------------------------
# spurious-eigenvalue bound


@dataclass(frozen=True)
class WanBoundReport:
    C: float
    bound: float          # C * max_k (R_kk + sum_{l != k} sqrt(R_kl R_lk))
    loose_bound: float    # (C/2) * (1 + max column sum of R)
    block_ratios: dict    # (k, l) -> gap ratio bound for that block
    d_eigenvalues: tuple
    d_nonsingular: bool


def block_gap_ratios(frame, epsilon=0.0):
    """Per-block second-to-first eigenvalue ratio bounds
    (sqrt(D_kl - 1) + sqrt(D_lk - 1)) / sqrt(D_kl * D_lk) + epsilon,
    for every block with edges (the diagonal reduces to 2 sqrt(d-1)/d)."""
    ratios = {}
    K = frame.K
    for k in range(K):
        for l in range(K):
            dkl, dlk = frame.D[k][l], frame.D[l][k]
            if dkl == 0 or l < k:
                continue
            ratios[(k, l)] = float(
                (np.sqrt(dkl - 1.0) + np.sqrt(dlk - 1.0)) / np.sqrt(dkl * dlk)
                + epsilon
            )
    return ratios


def suggest_block_C(frame, epsilon=0.0):
    ratios = block_gap_ratios(frame, epsilon)
    if not ratios:
        raise ClusteringError("frame has no edges")
    return max(ratios.values())


def wan_bound(frame, C, epsilon=0.0):
    """Bound on eigenvalues of P that are not eigenvalues of R.

    The nonsingular-D hypothesis is reported, not enforced: the bound value
    itself is plain arithmetic in R and C.
    """
    if not 0 < C < 1:
        raise ClusteringError("need 0 < C < 1")
    R = frame_markov(frame).R
    K = frame.K
    terms = [
        R[k, k] + sum(np.sqrt(R[k, l] * R[l, k]) for l in range(K) if l != k)
        for k in range(K)
    ]
    bound = C * max(terms)
    loose = (C / 2.0) * (1.0 + R.sum(axis=0).max())
    dw, _ = frame_degree_eigs(frame)
    nonsingular = bool(np.min(np.abs(dw)) > 1e-12 * max(np.max(np.abs(dw)), 1.0))
    return WanBoundReport(
        C=float(C),
        bound=float(bound),
        loose_bound=float(loose),
        block_ratios=block_gap_ratios(frame, epsilon),
        d_eigenvalues=tuple(float(x) for x in dw),
        d_nonsingular=nonsingular,
    )


# ---------------------------------------------------------------------------
# spectral clustering


@dataclass(frozen=True)
class ClusterResult:
    assignment: tuple
    embedding: np.ndarray  # one row y^v per vertex, K columns
    tolerance: float
    eigengap: float
    reliable: bool

    def num_clusters(self):
        return len(set(self.assignment))


def spectral_cluster(fg, K, tol=1e-6):
    """Embed each vertex by its coordinates in the top-K eigenvectors of L
    (converted to P-eigenvectors, each normalized to unit sup-norm) and
    group vertices whose embeddings agree within tol.

    "Top" means largest modulus: the spurious-eigenvalue bound controls
    moduli, and bipartite-type frames put frame eigenvalues at both ends
    of the spectrum.  A gap below 1e-10 between the K-th and (K+1)-th
    modulus marks the run unreliable (frame eigenvalue colliding with the
    bulk).
    """
    if K < 1:
        raise ClusteringError("need K >= 1")
    mv = markov(fg)
    w, V = sym_eig(mv.L)
    if K > w.size:
        raise ClusteringError(f"K = {K} exceeds graph size {w.size}")
    # stable order: modulus descending, positive sign first on ties
    order = np.lexsort((-np.sign(w), -np.abs(w)))
    w, V = w[order], V[:, order]
    eigengap = float(abs(w[K - 1]) - abs(w[K])) if K < w.size else np.inf
    reliable = eigengap >= 1e-10
    # convert L-eigenvectors to P-eigenvectors and fix scale/sign
    Y = V[:, :K] / np.sqrt(mv.degrees)[:, None]
    for j in range(K):
        col = Y[:, j]
        big = np.abs(col) > 1e-12 * max(np.abs(col).max(), 1e-300)
        if big.any() and col[np.argmax(big)] < 0:
            col = -col
        Y[:, j] = col / np.abs(col).max()
    assignment = []
    reps = []
    for v in range(Y.shape[0]):
        for c, rep in enumerate(reps):
            if np.max(np.abs(Y[v] - rep)) <= tol:
                assignment.append(c)
                break
        else:
            reps.append(Y[v])
            assignment.append(len(reps) - 1)
    return ClusterResult(
        assignment=tuple(assignment),
        embedding=Y,
        tolerance=float(tol),
        eigengap=eigengap,
        reliable=reliable,
    )


def cluster_accuracy(assignment, true_labels):
    """Fraction of correctly labeled vertices under the best label
    permutation (feasible for the small K of frame models)."""
    assignment = list(assignment)
    true_labels = list(true_labels)
    k_true = max(true_labels) + 1
    k_got = max(assignment) + 1
    k = max(k_true, k_got)
    if k > 8:
        raise ClusteringError("label permutation search capped at 8 classes")
    n = len(true_labels)
    best = 0
    for perm in permutations(range(k)):
        hits = sum(
            1 for a, t in zip(assignment, true_labels) if perm[a] == t
        )
        best = max(best, hits)
    return best / n


# ---------------------------------------------------------------------------
# regular SBM thresholds


@dataclass(frozen=True)
class RsbmThresholds:
    brito_holds: bool
    spectral_holds: bool
    brito_margin: float
    spectral_margin: float


def rsbm_thresholds(d1, d2):
    """Compare (d1-d2)^2 > 4(d1+d2-1) (recovery threshold) against
    (d1-d2)^2 > 4(d2-1)((d1+d2)/d2)^2 (spectral clustering condition).
    Equal degrees are degenerate: both conditions are false."""
    if not (d1 >= d2 >= 1):
        raise ClusteringError("need d1 >= d2 >= 1")
    gap2 = float((d1 - d2) ** 2)
    brito_rhs = 4.0 * (d1 + d2 - 1)
    spectral_rhs = 4.0 * (d2 - 1) * ((d1 + d2) / d2) ** 2
    return RsbmThresholds(
        brito_holds=gap2 > brito_rhs,
        spectral_holds=gap2 > spectral_rhs,
        brito_margin=gap2 - brito_rhs,
        spectral_margin=gap2 - spectral_rhs,
    )
