"""Samplers and structural checks for bipartite biregular (multi)graphs.

The configuration model matches half-edges by a uniform permutation; the
exploration process reveals the same permutation one left half-edge at a
time.  Conditioning on a simple outcome gives the uniform simple graph.
Frame graphs generalize this to several vertex classes with prescribed
between-class degrees.
"""

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .numkernel import rng_from_seed


class ParameterError(ValueError):
    """Invalid sampler parameters (e.g. n*d1 != m*d2)."""


class BudgetExhausted(RuntimeError):
    """A rejection sampler ran out of attempts."""


class FrameError(ValueError):
    """Frame violates the balance condition or integrality."""


# ---------------------------------------------------------------------------
# bipartite graphs


@dataclass(frozen=True)
class BipartiteGraph:
    """A (d1, d2)-biregular bipartite multigraph.

    Edges are (left, right) index pairs, lexicographically sorted, with
    parallel edges kept as repeated pairs.  Self-loops are impossible by
    bipartiteness.  `attempts` records how many configuration samples a
    rejection sampler consumed (1 for direct samples).
    """

    n: int
    m: int
    d1: int
    d2: int
    edges: tuple
    simple: bool
    attempts: int = 1

    @property
    def num_edges(self):
        return len(self.edges)

    def biadjacency(self):
        """n x m matrix of edge multiplicities (0/1 when simple)."""
        X = np.zeros((self.n, self.m))
        for l, r in self.edges:
            X[l, r] += 1.0
        return X

    def adjacency(self):
        """(n+m) x (n+m) block adjacency [[0, X], [X^T, 0]]."""
        X = self.biadjacency()
        A = np.zeros((self.n + self.m, self.n + self.m))
        A[: self.n, self.n:] = X
        A[self.n:, : self.n] = X.T
        return A

    def transposed(self):
        """Swap the two sides (n <-> m, d1 <-> d2)."""
        edges = tuple(sorted((r, l) for l, r in self.edges))
        return replace(self, n=self.m, m=self.n, d1=self.d2, d2=self.d1, edges=edges)

    def neighbor_lists(self):
        """Adjacency lists over global vertex ids (left: 0..n-1, right: n..n+m-1)."""
        adj = [[] for _ in range(self.n + self.m)]
        for l, r in self.edges:
            adj[l].append(self.n + r)
            adj[self.n + r].append(l)
        return adj


def _canonical_edges(left, right):
    order = np.lexsort((right, left))
    return tuple(zip(left[order].tolist(), right[order].tolist()))


def _is_simple(edges):
    return len(set(edges)) == len(edges)


def from_edges(n, m, d1, d2, edges):
    edges = tuple(sorted((int(l), int(r)) for l, r in edges))
    for l, r in edges:
        if not (0 <= l < n and 0 <= r < m):
            raise ParameterError(f"edge ({l},{r}) out of range for ({n},{m})")
    return BipartiteGraph(n=n, m=m, d1=d1, d2=d2, edges=edges, simple=_is_simple(edges))


def complete_bipartite(n, m):
    """K_{n,m}; biregular with d1 = m, d2 = n."""
    edges = tuple((l, r) for l in range(n) for r in range(m))
    return BipartiteGraph(n=n, m=m, d1=m, d2=n, edges=edges, simple=True)


def _check_params(n, m, d1, d2):
    if min(n, m, d1, d2) < 1:
        raise ParameterError("all of n, m, d1, d2 must be >= 1")
    if n * d1 != m * d2:
        raise ParameterError(f"half-edge mismatch: n*d1 = {n * d1} != m*d2 = {m * d2}")


def sample_configuration(n, m, d1, d2, rng):
    """One configuration-model sample: a uniform matching of half-edges.

    Left half-edge k belongs to left vertex k // d1; a uniform permutation
    sends it to a right half-edge, owned by right vertex perm[k] // d2.
    """
    _check_params(n, m, d1, d2)
    perm = rng.permutation(n * d1)
    left = np.arange(n * d1) // d1
    right = perm // d2
    edges = _canonical_edges(left, right)
    return BipartiteGraph(n=n, m=m, d1=d1, d2=d2, edges=edges, simple=_is_simple(edges))


def sample_exploration(n, m, d1, d2, rng):
    """Exploration process: match left half-edges in lexicographic order,
    each against a uniform unmatched right half-edge.  Same law as
    sample_configuration."""
    _check_params(n, m, d1, d2)
    N = n * d1
    stubs = np.arange(N)
    for k in range(N):
        j = int(rng.integers(k, N))
        stubs[k], stubs[j] = stubs[j], stubs[k]
    left = np.arange(N) // d1
    right = stubs // d2
    edges = _canonical_edges(left, right)
    return BipartiteGraph(n=n, m=m, d1=d1, d2=d2, edges=edges, simple=_is_simple(edges))


def sample_simple(n, m, d1, d2, rng, max_attempts=1000):
    """Rejection-sample configuration graphs until one is simple.

    Attempts are drawn in vectorized batches; the accepted graph and the
    attempt count are deterministic functions of (parameters, seed).
    """
    _check_params(n, m, d1, d2)
    if max_attempts < 1:
        raise ParameterError("max_attempts must be >= 1")
    N = n * d1
    left = np.repeat(np.arange(n), d1)
    batch = min(256, max_attempts)
    template = np.tile(np.arange(N, dtype=np.int64), (batch, 1))
    done = 0
    while done < max_attempts:
        take = min(batch, max_attempts - done)
        mat = template[:take].copy()
        rng.permuted(mat, axis=1, out=mat)
        right = mat // d2
        keys = np.sort(left[None, :] * m + right, axis=1)
        ok = ~np.any(keys[:, 1:] == keys[:, :-1], axis=1)
        hit = np.flatnonzero(ok)
        if hit.size:
            i = int(hit[0])
            edges = _canonical_edges(left, right[i])
            return BipartiteGraph(
                n=n, m=m, d1=d1, d2=d2, edges=edges, simple=True,
                attempts=done + i + 1,
            )
        done += take
    raise BudgetExhausted(
        f"no simple graph in {max_attempts} attempts for ({n},{m},{d1},{d2})"
    )


@dataclass(frozen=True)
class GraphDiagnostics:
    passed: bool
    count_ok: bool
    left_degree_violations: tuple
    right_degree_violations: tuple
    duplicate_edges: tuple
    out_of_range: tuple


def validate(g):
    """Check degree counts, edge count, index ranges, duplicates. Diagnostic only."""
    left_deg = defaultdict(int)
    right_deg = defaultdict(int)
    seen = defaultdict(int)
    oor = []
    for l, r in g.edges:
        if not (0 <= l < g.n and 0 <= r < g.m):
            oor.append((l, r))
            continue
        left_deg[l] += 1
        right_deg[r] += 1
        seen[(l, r)] += 1
    lviol = tuple(
        (v, left_deg[v]) for v in range(g.n) if left_deg[v] != g.d1
    )
    rviol = tuple(
        (v, right_deg[v]) for v in range(g.m) if right_deg[v] != g.d2
    )
    dups = tuple(e for e, c in sorted(seen.items()) if c > 1)
    count_ok = len(g.edges) == g.n * g.d1 == g.m * g.d2
    passed = (
        count_ok
        and not lviol
        and not rviol
        and not oor
        and g.simple == (not dups)
    )
    return GraphDiagnostics(
        passed=passed,
        count_ok=count_ok,
        left_degree_violations=lviol,
        right_degree_violations=rviol,
        duplicate_edges=dups,
        out_of_range=tuple(oor),
    )


# ---------------------------------------------------------------------------
# balls and tangles


@dataclass(frozen=True)
class InducedBall:
    """Induced subgraph on the vertices at distance <= radius from center.

    Vertices are global ids (left: 0..n-1, right: n..n+m-1); edges keep
    multiplicity.  Balls are connected, so the cycle-space dimension is
    excess = |E| - |V| + 1.
    """

    center: int
    radius: int
    vertices: tuple
    edges: tuple

    @property
    def excess(self):
        return len(self.edges) - len(self.vertices) + 1


def ball(g, v, ell):
    if not (0 <= v < g.n + g.m):
        raise ParameterError(f"vertex {v} out of range")
    if ell < 0:
        raise ParameterError("radius must be >= 0")
    adj = g.neighbor_lists()
    dist = {v: 0}
    q = deque([v])
    while q:
        u = q.popleft()
        if dist[u] == ell:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    verts = set(dist)
    edges = []
    for l, r in g.edges:
        if l in verts and (g.n + r) in verts:
            edges.append((l, g.n + r))
    return InducedBall(
        center=v, radius=ell, vertices=tuple(sorted(verts)), edges=tuple(edges)
    )


@dataclass(frozen=True)
class TangleReport:
    ell: int
    worst_excess: int
    tangle_free: bool
    worst_vertex: int


def tangle_free(g, ell):
    """A graph is ell-tangle-free iff every radius-ell ball has at most one
    cycle, i.e. cycle-space dimension |E| - |V| + 1 <= 1."""
    if ell < 0:
        raise ParameterError("radius must be >= 0")
    worst, worst_v = -10 ** 9, 0
    for v in range(g.n + g.m):
        ex = ball(g, v, ell).excess
        if ex > worst:
            worst, worst_v = ex, v
    return TangleReport(
        ell=ell, worst_excess=worst, tangle_free=worst <= 1, worst_vertex=worst_v
    )


# ---------------------------------------------------------------------------
# frames and frame graphs


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 9)
    raise FrameError(f"cannot interpret proportion {x!r}")


@dataclass(frozen=True)
class Frame:
    """Weighted directed frame: class names, proportions p, degree matrix D.

    Balance p_i * D_ij = p_j * D_ji is enforced exactly (p as Fractions).
    D_ij is the number of neighbors in class j of each class-i vertex.
    """

    classes: tuple
    p: tuple
    D: tuple

    def __post_init__(self):
        K = len(self.classes)
        object.__setattr__(self, "p", tuple(_as_fraction(x) for x in self.p))
        object.__setattr__(
            self, "D", tuple(tuple(int(d) for d in row) for row in self.D)
        )
        if len(self.p) != K or len(self.D) != K or any(len(r) != K for r in self.D):
            raise FrameError("classes, p, and D must have matching size K")
        if sum(self.p) != 1:
            raise FrameError(f"proportions must sum to 1, got {sum(self.p)}")
        if any(x <= 0 for x in self.p):
            raise FrameError("proportions must be positive")
        if any(d < 0 for row in self.D for d in row):
            raise FrameError("degrees must be nonnegative")
        for i in range(K):
            for j in range(K):
                if self.p[i] * self.D[i][j] != self.p[j] * self.D[j][i]:
                    raise FrameError(
                        f"balance violated: p[{i}]*D[{i}][{j}] != p[{j}]*D[{j}][{i}]"
                    )

    @property
    def K(self):
        return len(self.classes)

    def class_sizes(self, n_total):
        sizes = []
        for i, pi in enumerate(self.p):
            ni = pi * n_total
            if ni.denominator != 1:
                raise FrameError(
                    f"n_total={n_total} gives non-integral size for class "
                    f"{self.classes[i]}: {ni}"
                )
            sizes.append(int(ni))
        return tuple(sizes)

    def degree_matrix(self):
        return np.array(self.D, dtype=float)

    def to_json_dict(self):
        return {
            "classes": list(self.classes),
            "p": [str(x) for x in self.p],
            "D": [list(row) for row in self.D],
        }

    @staticmethod
    def from_json_dict(d):
        return Frame(classes=tuple(d["classes"]), p=tuple(d["p"]), D=tuple(
            tuple(row) for row in d["D"]
        ))


def two_class_bipartite_frame(n, m, d1, d2):
    """The frame whose graphs are exactly G(n, m, d1, d2)."""
    if n * d1 != m * d2:
        raise ParameterError("n*d1 must equal m*d2")
    tot = n + m
    return Frame(
        classes=("left", "right"),
        p=(Fraction(n, tot), Fraction(m, tot)),
        D=((0, d1), (d2, 0)),
    )


def sbm_frame(d1, d2):
    """Two equal communities, within-degree d1, between-degree d2."""
    return Frame(
        classes=("a", "b"), p=(Fraction(1, 2), Fraction(1, 2)), D=((d1, d2), (d2, d1))
    )


@dataclass(frozen=True)
class FrameGraph:
    """A sampled frame graph: undirected edges over global vertex ids plus
    the class label of each vertex.  Class i occupies a contiguous id range."""

    frame: Frame
    n_total: int
    labels: tuple
    edges: tuple  # (u, v) with u < v, sorted

    def adjacency(self):
        A = np.zeros((self.n_total, self.n_total))
        for u, v in self.edges:
            A[u, v] += 1.0
            A[v, u] += 1.0
        return A

    def class_counts(self):
        counts = [0] * self.frame.K
        for c in self.labels:
            counts[c] += 1
        return tuple(counts)


def _sample_regular_matching(n, d, rng):
    """Uniform perfect matching of the n*d half-edges of a d-regular graph."""
    perm = rng.permutation(n * d)
    u = perm[0::2] // d
    v = perm[1::2] // d
    return u, v


def _sample_regular_simple(n, d, rng, max_attempts):
    """Simple d-regular graph on n vertices.

    Pure rejection of uniform matchings when the expected number of defects
    (d-1)/2 + (d-1)^2/4 is small; otherwise a stub-level-retry pairing
    (the networkx algorithm), since rejection is hopeless for dense blocks.
    """
    if d == 0:
        return ()
    if (n * d) % 2 != 0:
        raise ParameterError(f"n*d must be even for a {d}-regular graph on {n}")
    if d >= n:
        raise ParameterError(f"need d < n for a simple {d}-regular graph on {n}")
    lam = (d - 1) / 2 + (d - 1) ** 2 / 4
    if lam <= 12.0:
        for _ in range(max_attempts):
            u, v = _sample_regular_matching(n, d, rng)
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            if np.any(lo == hi):
                continue
            keys = np.sort(lo * n + hi)
            if np.any(keys[1:] == keys[:-1]):
                continue
            return tuple(sorted(zip(lo.tolist(), hi.tolist())))
        raise BudgetExhausted(
            f"no simple {d}-regular graph on {n} vertices in {max_attempts} attempts"
        )
    return _sample_regular_stub_retry(n, d, rng, max_attempts)


def _sample_regular_stub_retry(n, d, rng, max_restarts):
    def suitable(edges, potential):
        if not potential:
            return True
        keys = sorted(potential)
        for i, s1 in enumerate(keys):
            for s2 in keys[i + 1:]:
                if (s1, s2) not in edges:
                    return True
        return False

    for _ in range(max_restarts):
        edges = set()
        stubs = list(range(n)) * d
        ok = True
        while stubs:
            potential = defaultdict(int)
            arr = np.array(stubs)
            rng.shuffle(arr)
            it = iter(arr.tolist())
            for s1, s2 in zip(it, it):
                if s1 > s2:
                    s1, s2 = s2, s1
                if s1 != s2 and (s1, s2) not in edges:
                    edges.add((s1, s2))
                else:
                    potential[s1] += 1
                    potential[s2] += 1
            if not suitable(edges, potential):
                ok = False
                break
            stubs = [v for v, c in potential.items() for _ in range(c)]
        if ok:
            return tuple(sorted(edges))
    raise BudgetExhausted(f"stub-retry sampler failed after {max_restarts} restarts")


def sample_frame_graph(n_total, frame, rng, max_attempts=1000):
    """Sample a simple frame graph: diagonal blocks are D_ii-regular graphs,
    off-diagonal blocks (i, j) are G(n_i, n_j, D_ij, D_ji) samples.
    Simplicity is enforced per block independently."""
    sizes = frame.class_sizes(n_total)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    labels = tuple(
        c for c, sz in enumerate(sizes) for _ in range(sz)
    )
    edges = []
    for i in range(frame.K):
        dii = frame.D[i][i]
        if dii > 0:
            off = int(offsets[i])
            for u, v in _sample_regular_simple(sizes[i], dii, rng, max_attempts):
                edges.append((off + u, off + v))
    for i in range(frame.K):
        for j in range(i + 1, frame.K):
            dij, dji = frame.D[i][j], frame.D[j][i]
            if dij == 0 and dji == 0:
                continue
            g = sample_simple(sizes[i], sizes[j], dij, dji, rng, max_attempts)
            oi, oj = int(offsets[i]), int(offsets[j])
            for l, r in g.edges:
                edges.append((oi + l, oj + r))
    return FrameGraph(
        frame=frame, n_total=n_total, labels=labels, edges=tuple(sorted(edges))
    )


def validate_frame_graph(fg):
    """Check that each class-i vertex has exactly D_ij neighbors in class j."""
    K = fg.frame.K
    counts = np.zeros((fg.n_total, K), dtype=int)
    for u, v in fg.edges:
        counts[u, fg.labels[v]] += 1
        counts[v, fg.labels[u]] += 1
    for v in range(fg.n_total):
        for j in range(K):
            if counts[v, j] != fg.frame.D[fg.labels[v]][j]:
                return False
    return True


# ---------------------------------------------------------------------------
# conditional edge probabilities (Monte Carlo)


@dataclass(frozen=True)
class EdgeProbEstimate:
    p_hat: float
    std_err: float
    effective_samples: int
    trials: int


def conditional_edge_probability(n, m, d1, d2, H, e, trials, rng):
    """Estimate P(e in G | H subset of G) over configuration samples.

    Only the matching restricted to the half-edges of the left endpoints of
    H and e is sampled: the restriction of a uniform permutation to fixed
    positions is a uniform injection, so both events are measurable there
    and the rejection estimate is unbiased for the full model.
    """
    _check_params(n, m, d1, d2)
    H = [(int(l), int(r)) for l, r in H]
    e = (int(e[0]), int(e[1]))
    if e in H:
        raise ParameterError("candidate edge must not lie in H")
    if len(H) > n / 10:
        raise ParameterError("conditioning set too large: need |H| <= n/10")
    for l, r in H + [e]:
        if not (0 <= l < n and 0 <= r < m):
            raise ParameterError(f"edge ({l},{r}) out of range")

    lefts = sorted({l for l, _ in H} | {e[0]})
    col_of = {l: i for i, l in enumerate(lefts)}
    k = len(lefts) * d1
    N = n * d1
    batch = max(1, min(200_000, trials))
    template = np.tile(np.arange(N, dtype=np.int64), (batch, 1))

    def presence(targets_r, l, r):
        c = col_of[l] * d1
        return np.any(targets_r[:, c: c + d1] == r, axis=1)

    hits = 0
    joint = 0
    done = 0
    while done < trials:
        take = min(batch, trials - done)
        mat = template[:take].copy()
        rng.permuted(mat, axis=1, out=mat)
        targets_r = mat[:, :k] // d2
        cond = np.ones(take, dtype=bool)
        for l, r in H:
            cond &= presence(targets_r, l, r)
        hits += int(cond.sum())
        joint += int((cond & presence(targets_r, *e)).sum())
        done += take
    if hits == 0:
        raise BudgetExhausted(
            f"conditioning event never hit in {trials} configuration samples"
        )
    p = joint / hits
    se = float(np.sqrt(p * (1.0 - p) / hits))
    return EdgeProbEstimate(p_hat=p, std_err=se, effective_samples=hits, trials=trials)


# ---------------------------------------------------------------------------
# JSON graph files


def graph_to_json_dict(g, labels=None):
    d = {
        "n": g.n,
        "m": g.m,
        "d1": g.d1,
        "d2": g.d2,
        "edges": [list(e) for e in g.edges],
    }
    if labels is not None:
        d["labels"] = list(labels)
    return d


def graph_from_json_dict(d):
    return from_edges(d["n"], d["m"], d["d1"], d["d2"], d["edges"])


def save_graph(g, path, labels=None):
    with open(path, "w") as f:
        json.dump(graph_to_json_dict(g, labels), f, sort_keys=True)
        f.write("\n")


def load_graph(path):
    with open(path) as f:
        return graph_from_json_dict(json.load(f))
