"""Adjacency and non-backtracking spectra of bipartite biregular graphs.

The non-backtracking spectrum is never obtained from a general eigensolver:
it is assembled from the adjacency singular values through the determinant
correspondence (a biquadratic in lambda per nonzero adjacency eigenvalue,
plus bookkeeping for the kernel and the +/-1 eigenvalues), and validated
directly against det(B - lambda I) where needed.
"""

import cmath
from dataclasses import dataclass

import numpy as np

from .numkernel import complex_log_det, svd, wrap_angle

RANK_RTOL = 1e-8  # s_i counts toward rank when s_i > RANK_RTOL * s_1 * max(n, m)


class SpectraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# adjacency side


@dataclass(frozen=True)
class RealSpectrum:
    """Spectrum of the block adjacency of a simple biregular graph.

    values: descending, length n+m, the multiset {+s_i} U {-s_i} U {0,...};
    singulars: descending singular values of the biadjacency (sub-rank
    entries clamped to exactly 0); eta is the second largest eigenvalue and
    eta_min_plus the smallest strictly positive one (None if rank 0).
    """

    n: int
    m: int
    d1: int
    d2: int
    values: np.ndarray
    singulars: np.ndarray
    rank_r: int
    eta: float
    eta_min_plus: float


def adjacency_spectrum(g):
    if not g.simple:
        raise SpectraError("adjacency_spectrum requires a simple graph")
    X = g.biadjacency()
    s = svd(X).s
    s1 = s[0] if s.size else 0.0
    tol = RANK_RTOL * s1 * max(g.n, g.m)
    s = np.where(s > tol, s, 0.0)
    rank = int(np.count_nonzero(s))
    values = np.concatenate([s, -s, np.zeros(g.n + g.m - 2 * s.size)])
    values = np.sort(values)[::-1] + 0.0  # normalize -0.0 entries
    eta = float(values[1])
    eta_min_plus = float(s[rank - 1]) if rank >= 1 else None
    return RealSpectrum(
        n=g.n, m=g.m, d1=g.d1, d2=g.d2,
        values=values, singulars=s, rank_r=rank,
        eta=eta, eta_min_plus=eta_min_plus,
    )


def quartic_lambda(xi, d1, d2):
    """The four non-backtracking eigenvalues tied to an adjacency pair (-xi, xi):
    roots of lambda^4 - (xi^2 - d1 - d2 + 2) lambda^2 + (d1-1)(d2-1) = 0,
    closed under negation."""
    if xi == 0:
        raise SpectraError("xi = 0 is handled by the kernel categories, not the quartic")
    c = xi * xi - d1 - d2 + 2.0
    ab = float((d1 - 1) * (d2 - 1))
    w = cmath.sqrt(c * c - 4.0 * ab)
    roots = []
    for u in ((c + w) / 2.0, (c - w) / 2.0):
        lam = cmath.sqrt(u)
        roots.extend([lam, -lam])
    return tuple(roots)


def _perron_quartet(d1, d2):
    """Quartet for the exact Perron eigenvalue xi^2 = d1*d2.

    Integer arithmetic: the quadratic in lambda^2 factors exactly as
    (u - (d1-1)(d2-1))(u - 1), avoiding the sqrt-of-discriminant noise the
    generic path suffers at this double-root-adjacent point.
    """
    lam1 = cmath.sqrt((d1 - 1) * (d2 - 1))
    return (lam1, -lam1, 1.0 + 0.0j, -1.0 + 0.0j)


# ---------------------------------------------------------------------------
# non-backtracking side


@dataclass(frozen=True)
class NBSpectrum:
    """Categorized non-backtracking eigenvalue multiset (2|E| values).

    pm_one_mult copies each of +1 and -1; kernel_right = i*sqrt(d2-1) with
    multiplicity m - r per sign (from the biadjacency kernel); kernel_left =
    i*sqrt(d1-1) with multiplicity n - r per sign; one quartet per positive
    adjacency eigenvalue.
    """

    num_oriented: int
    d1: int
    d2: int
    pm_one_mult: int
    kernel_right: complex
    kernel_right_mult: int
    kernel_left: complex
    kernel_left_mult: int
    quartets: tuple

    def values(self):
        out = []
        out.extend([1.0 + 0j] * self.pm_one_mult)
        out.extend([-1.0 + 0j] * self.pm_one_mult)
        out.extend([self.kernel_right] * self.kernel_right_mult)
        out.extend([-self.kernel_right] * self.kernel_right_mult)
        out.extend([self.kernel_left] * self.kernel_left_mult)
        out.extend([-self.kernel_left] * self.kernel_left_mult)
        for q in self.quartets:
            out.extend(q)
        return np.array(out, dtype=complex)

    def rows(self):
        """(re, im, category) rows for CSV export."""
        rows = []
        for sgn in (1.0, -1.0):
            rows += [(sgn, 0.0, "pm_one")] * self.pm_one_mult
        for sgn in (1, -1):
            v = sgn * self.kernel_right
            rows += [(v.real, v.imag, "kernel_right")] * self.kernel_right_mult
        for sgn in (1, -1):
            v = sgn * self.kernel_left
            rows += [(v.real, v.imag, "kernel_left")] * self.kernel_left_mult
        for q in self.quartets:
            rows += [(v.real, v.imag, "adjacency_pair") for v in q]
        return rows

    def leading_modulus(self):
        return float(np.sqrt((self.d1 - 1) * (self.d2 - 1)))

    def second_modulus(self):
        """Max modulus after removing exactly one +Perron and one -Perron value."""
        vals = self.values()
        lam1 = self.leading_modulus()
        remaining = list(vals)
        for target in (lam1, -lam1):
            i = int(np.argmin(np.abs(np.array(remaining) - target)))
            remaining.pop(i)
        return float(np.max(np.abs(remaining))) if remaining else 0.0


def spectrum_B_from_A(spec, n=None, m=None, d1=None, d2=None):
    """Assemble the non-backtracking spectrum from an adjacency spectrum."""
    n = spec.n if n is None else n
    m = spec.m if m is None else m
    d1 = spec.d1 if d1 is None else d1
    d2 = spec.d2 if d2 is None else d2
    E = n * d1
    V = n + m
    if E < V:
        raise SpectraError(
            f"|E| = {E} < |V| = {V}: +/-1 multiplicity would be negative"
        )
    r = spec.rank_r
    # the leading singular value of a biregular graph is exactly
    # sqrt(d1*d2); its quartet comes from the factored form
    quartets = tuple(
        _perron_quartet(d1, d2) if i == 0
        else quartic_lambda(float(spec.singulars[i]), d1, d2)
        for i in range(r)
    )
    nb = NBSpectrum(
        num_oriented=2 * E,
        d1=d1,
        d2=d2,
        pm_one_mult=E - V,
        kernel_right=complex(0.0, np.sqrt(d2 - 1.0)),
        kernel_right_mult=m - r,
        kernel_left=complex(0.0, np.sqrt(d1 - 1.0)),
        kernel_left_mult=n - r,
        quartets=quartets,
    )
    assert len(nb.values()) == 2 * E
    return nb


@dataclass(frozen=True)
class NonBacktrackingOperator:
    """Sparse 0/1 operator on oriented edges.

    Index e in [0, |E|) is the e-th edge oriented left->right in
    lexicographic (left, right) order; index |E| + e is its reversal.
    B[e, f] = 1 iff f starts where e ends and f is not e's reversal.
    """

    num_edges: int
    edges: tuple
    rows: np.ndarray
    cols: np.ndarray
    heads: np.ndarray  # global head vertex of each oriented edge

    @property
    def size(self):
        return 2 * self.num_edges

    def dense(self, dtype=float):
        B = np.zeros((self.size, self.size), dtype=dtype)
        B[self.rows, self.cols] = 1
        return B

    def matvec(self, x):
        out = np.zeros(self.size, dtype=np.result_type(x.dtype, float))
        np.add.at(out, self.rows, x[self.cols])
        return out

    def rmatvec(self, x):
        out = np.zeros(self.size, dtype=np.result_type(x.dtype, float))
        np.add.at(out, self.cols, x[self.rows])
        return out


def build_B(g):
    if not g.simple:
        raise SpectraError("build_B requires a simple graph")
    E = g.num_edges
    by_left = [[] for _ in range(g.n)]
    by_right = [[] for _ in range(g.m)]
    for i, (l, r) in enumerate(g.edges):
        by_left[l].append(i)
        by_right[r].append(i)
    rows, cols = [], []
    for e, (l, r) in enumerate(g.edges):
        # forward edge e ends at right vertex r; continuations are reversals
        for f in by_right[r]:
            if g.edges[f][0] != l:
                rows.append(e)
                cols.append(E + f)
        # reversal E + e ends at left vertex l; continuations are forwards
        for f in by_left[l]:
            if g.edges[f][1] != r:
                rows.append(E + e)
                cols.append(f)
    heads = np.array(
        [g.n + r for (_, r) in g.edges] + [l for (l, _) in g.edges]
    )
    return NonBacktrackingOperator(
        num_edges=E,
        edges=g.edges,
        rows=np.array(rows, dtype=np.int64),
        cols=np.array(cols, dtype=np.int64),
        heads=heads,
    )


def perron_check(B, d1, d2):
    """Residual of the explicit Perron pair at lambda = sqrt((d1-1)(d2-1)):
    ones on forward edges and alpha = sqrt(d1-1)/sqrt(d2-1) on reversals
    for B itself; the adjoint's Perron vector carries 1/alpha (the two
    coincide when d1 = d2).  Returns the max of the two sup-norm residuals."""
    if d1 < 2 or d2 < 2:
        raise SpectraError("perron_check needs d1, d2 >= 2")
    E = B.num_edges
    alpha = np.sqrt(d1 - 1.0) / np.sqrt(d2 - 1.0)
    lam = np.sqrt((d1 - 1.0) * (d2 - 1.0))
    ones_alpha = np.concatenate([np.ones(E), np.full(E, alpha)])
    ones_inv = np.concatenate([np.ones(E), np.full(E, 1.0 / alpha)])
    res1 = np.max(np.abs(B.matvec(ones_alpha) - lam * ones_alpha))
    res2 = np.max(np.abs(B.rmatvec(ones_inv) - lam * ones_inv))
    return float(max(res1, res2))


@dataclass(frozen=True)
class IharaBassResidual:
    lam: complex
    log_modulus_discrepancy: float  # relative
    argument_discrepancy: float  # wrapped absolute
    lhs: tuple  # (log modulus, argument) of det(B - lam I)
    rhs: tuple


def ihara_bass_residual(g, lam, B=None):
    """Compare det(B - lam I) against
    (lam^2 - 1)^(|E|-|V|) * det(D - lam A + lam^2 I) in log form."""
    lam = complex(lam)
    for bad in (1.0, -1.0, 0.0):
        if abs(lam - bad) < 1e-6:
            raise SpectraError(f"lambda too close to the excluded point {bad}")
    if B is None:
        B = build_B(g)
    size = B.size
    lhs_mod, lhs_arg = complex_log_det(
        B.dense(dtype=complex) - lam * np.eye(size, dtype=complex)
    )
    A = g.adjacency().astype(complex)
    V = g.n + g.m
    D = np.diag(
        np.concatenate([np.full(g.n, g.d1 - 1.0), np.full(g.m, g.d2 - 1.0)])
    ).astype(complex)
    rhs_mod, rhs_arg = complex_log_det(D - lam * A + lam * lam * np.eye(V, dtype=complex))
    factor = (g.num_edges - V) * cmath.log(lam * lam - 1.0)
    rhs_mod += factor.real
    rhs_arg += factor.imag
    mod_disc = abs(lhs_mod - rhs_mod) / max(abs(lhs_mod), abs(rhs_mod), 1.0)
    arg_disc = abs(wrap_angle(lhs_arg - rhs_arg))
    return IharaBassResidual(
        lam=lam,
        log_modulus_discrepancy=float(mod_disc),
        argument_discrepancy=float(arg_disc),
        lhs=(lhs_mod, lhs_arg),
        rhs=(rhs_mod, rhs_arg),
    )


# ---------------------------------------------------------------------------
# gap certificates


@dataclass(frozen=True)
class GapCheck:
    name: str
    bound: float
    measured: float
    passed: bool
    informative: bool = True
    note: str = ""


@dataclass(frozen=True)
class GapCertificate:
    epsilon: float
    n: int
    m: int
    d1: int
    d2: int
    checks: tuple

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks if c.informative)

    def to_json_dict(self):
        return {
            "epsilon": self.epsilon,
            "n": self.n,
            "m": self.m,
            "d1": self.d1,
            "d2": self.d2,
            "checks": [
                {
                    "name": c.name,
                    "bound": c.bound,
                    "measured": c.measured,
                    "passed": c.passed,
                    "informative": c.informative,
                    "note": c.note,
                }
                for c in self.checks
            ],
            "all_passed": self.all_passed,
        }


def gap_certificate(g, epsilon):
    """Evaluate the second-eigenvalue upper bound, the smallest-positive-
    eigenvalue lower bound, the full-rank statement, the Alon-Boppana lower
    bound, and the non-backtracking gap, all with caller-supplied slack."""
    if g.d1 < g.d2:
        g = g.transposed()
    spec = adjacency_spectrum(g)
    nb = spectrum_B_from_A(spec)
    s1, s2 = np.sqrt(g.d1 - 1.0), np.sqrt(g.d2 - 1.0)
    checks = []

    checks.append(GapCheck(
        name="eta_upper",
        bound=float(s1 + s2 + epsilon),
        measured=spec.eta,
        passed=spec.eta <= s1 + s2 + epsilon,
    ))

    if g.d1 == g.d2:
        checks.append(GapCheck(
            name="eta_min_plus_lower",
            bound=float(s1 - s2 - epsilon),
            measured=spec.eta_min_plus if spec.eta_min_plus is not None else np.nan,
            passed=True,
            informative=False,
            note="no information gained when d1 = d2",
        ))
    else:
        measured = spec.eta_min_plus if spec.eta_min_plus is not None else np.nan
        checks.append(GapCheck(
            name="eta_min_plus_lower",
            bound=float(s1 - s2 - epsilon),
            measured=float(measured),
            passed=bool(
                spec.eta_min_plus is not None
                and spec.eta_min_plus >= s1 - s2 - epsilon
            ),
        ))

    if g.d1 == g.d2:
        checks.append(GapCheck(
            name="full_rank",
            bound=float(min(g.n, g.m)),
            measured=float(spec.rank_r),
            passed=True,
            informative=False,
            note="rank statement applies only when d1 != d2",
        ))
    else:
        checks.append(GapCheck(
            name="full_rank",
            bound=float(g.n),
            measured=float(spec.rank_r),
            passed=spec.rank_r == g.n,
        ))

    checks.append(GapCheck(
        name="alon_boppana",
        bound=float(s1 + s2 - epsilon),
        measured=spec.eta,
        passed=spec.eta >= s1 + s2 - epsilon,
    ))

    lam2 = nb.second_modulus()
    nb_bound = float(((g.d1 - 1.0) * (g.d2 - 1.0)) ** 0.25 + epsilon)
    checks.append(GapCheck(
        name="nb_second_eigenvalue",
        bound=nb_bound,
        measured=lam2,
        passed=lam2 <= nb_bound,
    ))

    return GapCertificate(
        epsilon=float(epsilon), n=g.n, m=g.m, d1=g.d1, d2=g.d2, checks=tuple(checks)
    )


# ---------------------------------------------------------------------------
# exports


def adjacency_csv_lines(spec):
    lines = ["value"]
    lines += [repr(float(v)) for v in spec.values]
    return lines


def nb_csv_lines(nb):
    lines = ["re,im,category"]
    lines += [f"{repr(re)},{repr(im)},{cat}" for re, im, cat in nb.rows()]
    return lines
