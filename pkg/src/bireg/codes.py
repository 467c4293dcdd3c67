"""Tanner codes on biregular bipartite graphs over F2, with rate and
minimum-distance bounds and a brute-force distance oracle for tiny codes.

Rows of parity-check matrices are stored as Python int bitmasks; bit i is
coordinate i.  The Reed-Solomon component codes of the worked (14, 9)
example enter only through their (d, k, delta) parameters.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .graphgen import graph_from_json_dict, graph_to_json_dict, load_graph


class CodeError(ValueError):
    pass


class HypothesisError(CodeError):
    """A distance-bound hypothesis (delta1 >= delta2 > eta/2) fails."""


# ---------------------------------------------------------------------------
# F2 linear algebra on int bitmasks


def rows_to_masks(rows):
    masks = []
    for row in rows:
        m = 0
        for i, b in enumerate(row):
            if int(b) % 2:
                m |= 1 << i
        masks.append(m)
    return masks


def rank_f2(masks):
    leads = {}
    rank = 0
    for v in masks:
        while v:
            lead = v.bit_length() - 1
            if lead in leads:
                v ^= leads[lead]
            else:
                leads[lead] = v
                rank += 1
                break
    return rank


def rref_f2(masks):
    """Fully reduced row-echelon form: [(pivot, row)] with each pivot bit
    absent from every other row, sorted by decreasing pivot."""
    basis = []
    for v in masks:
        for p, b in basis:
            if (v >> p) & 1:
                v ^= b
        if v:
            p = v.bit_length() - 1
            basis = [(q, b ^ v if (b >> p) & 1 else b) for q, b in basis]
            basis.append((p, v))
    basis.sort(reverse=True)
    return basis


def nullspace_f2(masks, width):
    """Basis of {x in F2^width : row . x = 0 for every row}."""
    basis = rref_f2(masks)
    pivots = {p for p, _ in basis}
    out = []
    for f in range(width):
        if f in pivots:
            continue
        x = 1 << f
        for p, r in basis:
            if (r >> f) & 1:
                x |= 1 << p
        out.append(x)
    return out


# ---------------------------------------------------------------------------
# component and Tanner codes


@dataclass(frozen=True)
class ComponentCode:
    """[length, dim, design_distance] linear code given by a full-row-rank
    parity-check matrix over F2 (rows as bitmasks)."""

    length: int
    dim: int
    design_distance: int
    parity_rows: tuple

    def __post_init__(self):
        if rank_f2(list(self.parity_rows)) != len(self.parity_rows):
            raise CodeError("parity-check matrix must have full row rank over F2")
        if self.dim != self.length - len(self.parity_rows):
            raise CodeError("dimension must equal length minus number of parity rows")

    def contains(self, word_mask):
        return all(
            bin(row & word_mask).count("1") % 2 == 0 for row in self.parity_rows
        )


def code_from_parity_matrix(rows, design_distance):
    rows = [list(r) for r in rows]
    if not rows:
        raise CodeError("need at least one parity-check row")
    length = len(rows[0])
    if any(len(r) != length for r in rows):
        raise CodeError("parity-check rows must have equal length")
    return ComponentCode(
        length=length,
        dim=length - len(rows),
        design_distance=design_distance,
        parity_rows=tuple(rows_to_masks(rows)),
    )


def repetition_code(d):
    """[d, 1, d]: all coordinates equal."""
    rows = tuple((1 << i) | (1 << (i + 1)) for i in range(d - 1))
    return ComponentCode(length=d, dim=1, design_distance=d, parity_rows=rows)


def single_parity_code(d):
    """[d, d-1, 2]: even-weight words."""
    return ComponentCode(
        length=d, dim=d - 1, design_distance=2, parity_rows=((1 << d) - 1,)
    )


@dataclass(frozen=True)
class TannerCode:
    """Edge-indexed code: a word lies in the code iff its restriction to the
    edges at every left vertex is in c1 and at every right vertex in c2.
    Edge order at a vertex is ascending global edge index (edges sorted
    lexicographically)."""

    graph: object
    c1: ComponentCode
    c2: ComponentCode

    def __post_init__(self):
        if not self.graph.simple:
            raise CodeError("Tanner construction needs a simple graph")
        if self.c1.length != self.graph.d1 or self.c2.length != self.graph.d2:
            raise CodeError("component code lengths must match the degrees")

    @property
    def length(self):
        return self.graph.num_edges

    def incident_edges(self):
        left = [[] for _ in range(self.graph.n)]
        right = [[] for _ in range(self.graph.m)]
        for i, (l, r) in enumerate(self.graph.edges):
            left[l].append(i)
            right[r].append(i)
        return left, right

    def global_parity_rows(self):
        """Parity-check rows of the full code over F2^{|E|}."""
        left, right = self.incident_edges()
        rows = []
        for ids, comp in ((left, self.c1), (right, self.c2)):
            for inc in ids:
                for crow in comp.parity_rows:
                    mask = 0
                    for local, edge_idx in enumerate(inc):
                        if (crow >> local) & 1:
                            mask |= 1 << edge_idx
                    rows.append(mask)
        return rows


def word_to_mask(bits):
    mask = 0
    for i, b in enumerate(bits):
        if int(b) % 2:
            mask |= 1 << i
    return mask


def mask_to_word(mask, width):
    return [(mask >> i) & 1 for i in range(width)]


def tanner_membership(code, word):
    """word: iterable of |E| bits (or an int bitmask)."""
    if isinstance(word, int):
        mask = word
        if mask >> code.length:
            raise CodeError("word longer than the code length")
    else:
        word = list(word)
        if len(word) != code.length:
            raise CodeError(
                f"word length {len(word)} != code length {code.length}"
            )
        mask = word_to_mask(word)
    left, right = code.incident_edges()
    for ids, comp in ((left, code.c1), (right, code.c2)):
        for inc in ids:
            local = 0
            for j, edge_idx in enumerate(inc):
                if (mask >> edge_idx) & 1:
                    local |= 1 << j
            if not comp.contains(local):
                return False
    return True


def code_dimension(code):
    return code.length - rank_f2(code.global_parity_rows())


def min_distance_bruteforce(code, max_dim=20):
    """Exact minimum distance by enumerating the nullspace of the global
    parity-check matrix (Gray-code walk).  inf for the zero code."""
    basis = nullspace_f2(code.global_parity_rows(), code.length)
    dim = len(basis)
    if dim == 0:
        return math.inf
    if dim > max_dim:
        raise CodeError(f"code dimension {dim} exceeds brute-force budget {max_dim}")
    best = code.length + 1
    word = 0
    gray_prev = 0
    for t in range(1, 1 << dim):
        gray = t ^ (t >> 1)
        flipped = (gray ^ gray_prev).bit_length() - 1
        gray_prev = gray
        word ^= basis[flipped]
        w = bin(word).count("1")
        if 0 < w < best:
            best = w
    return best


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class DistanceBoundReport:
    distance_lb: float
    relative_distance_lb: float
    eta_used: float
    rate_lb: float = None  # k1/d1 + k2/d2 - 1 when dimensions are supplied

    def to_json_dict(self):
        return {
            "distance_lb": self.distance_lb,
            "relative_distance_lb": self.relative_distance_lb,
            "eta_used": self.eta_used,
            "rate_lb": self.rate_lb,
        }


def rate_lower_bound(d1, d2, k1, k2):
    if not (0 <= k1 <= d1 and 0 <= k2 <= d2):
        raise CodeError("need 0 <= k_i <= d_i")
    return k1 / d1 + k2 / d2 - 1.0


def janwa_lal_bound(n, d1, d2, delta1, delta2, eta, k1=None, k2=None):
    """Minimum-distance lower bound (n/d2) * (delta1*delta2 -
    (eta/2)(delta1+delta2)), valid when delta1 >= delta2 > eta/2."""
    if not delta1 >= delta2:
        raise HypothesisError(f"need delta1 >= delta2, got {delta1} < {delta2}")
    if not delta2 > eta / 2.0:
        raise HypothesisError(
            f"need delta2 > eta/2, got delta2 = {delta2} <= {eta / 2.0}"
        )
    dist = (n / d2) * (delta1 * delta2 - (eta / 2.0) * (delta1 + delta2))
    rate = rate_lower_bound(d1, d2, k1, k2) if k1 is not None and k2 is not None else None
    return DistanceBoundReport(
        distance_lb=float(dist),
        relative_distance_lb=float(dist / (n * d1)),
        eta_used=float(eta),
        rate_lb=rate,
    )


def corollary_bound(n, d1, d2, delta1, delta2, epsilon, k1=None, k2=None):
    """janwa_lal_bound with eta = sqrt(d1-1) + sqrt(d2-1) + epsilon."""
    eta = np.sqrt(d1 - 1.0) + np.sqrt(d2 - 1.0) + epsilon
    return janwa_lal_bound(n, d1, d2, delta1, delta2, float(eta), k1=k1, k2=k2)


def paper_example_report():
    """The unbalanced (14, 9) construction: components [14, 8, 7] and
    [9, 4, 6] on a G(216, 336, 14, 9) graph, evaluated at epsilon = 0."""
    return corollary_bound(216, 14, 9, 7, 6, 0.0, k1=8, k2=4)


# ---------------------------------------------------------------------------
# code spec files


def _rows_as_lists(comp):
    return [mask_to_word(r, comp.length) for r in comp.parity_rows]


def tanner_code_to_json_dict(code, graph_file=None):
    """Code spec: the graph (inline or by file reference) plus the two
    parity-check matrices as 0/1 row lists."""
    d = {
        "H1": _rows_as_lists(code.c1),
        "H2": _rows_as_lists(code.c2),
        "delta1": code.c1.design_distance,
        "delta2": code.c2.design_distance,
    }
    if graph_file is not None:
        d["graph_file"] = graph_file
    else:
        d["graph"] = graph_to_json_dict(code.graph)
    return d


def tanner_code_from_json_dict(d):
    if "graph_file" in d:
        graph = load_graph(d["graph_file"])
    else:
        graph = graph_from_json_dict(d["graph"])
    c1 = code_from_parity_matrix(d["H1"], d["delta1"])
    c2 = code_from_parity_matrix(d["H2"], d["delta2"])
    return TannerCode(graph=graph, c1=c1, c2=c2)


def save_tanner_code(code, path, graph_file=None):
    with open(path, "w") as f:
        json.dump(tanner_code_to_json_dict(code, graph_file), f, sort_keys=True)
        f.write("\n")


def load_tanner_code(path):
    with open(path) as f:
        return tanner_code_from_json_dict(json.load(f))
