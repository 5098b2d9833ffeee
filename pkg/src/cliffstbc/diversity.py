"""Constellations, the sign-vector transform and diversity-product analysis.

For a code whose inner family is ``{U Diag(b_i) U^H}`` the symbols of group
``k`` enter the codeword only through ``y_k = T x_k`` with
``T = (1/c) [b_1^T ... b_n^T]``, and

    det(S^H(dX) S(dX)) = c^(2 nt) * prod_i (sum_k dy_{k,i}^2) ^ m.

The minimum over ``dX != 0`` is reached with a single active group, which
makes the diversity product ``c / (2 sqrt(nt)) * CPD(A_y) ** (1/n)``.
"""

from dataclasses import dataclass, field
from itertools import product
import json
import math

import numpy as np

from . import SCHEMA_VERSION

ORACLE_BUDGET = 10 ** 7
# minimum determinants at or below this are reported as rank deficient
DET_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Constellation:
    """Finite set of real ``dim``-vectors, one row per point."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ValueError("constellation needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("constellation points must be finite")
        if len(np.unique(pts, axis=0)) < 2:
            raise ValueError("constellation needs at least two distinct points")
        if self.avg_energy_of(pts) <= 0:
            raise ValueError("constellation has zero average energy")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @staticmethod
    def avg_energy_of(pts):
        return float(np.mean(np.sum(pts ** 2, axis=1)))

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def avg_energy(self):
        return self.avg_energy_of(self.points)

    def __len__(self):
        return self.points.shape[0]

    def scaled(self, s):
        return Constellation(self.points * s)

    def mapped(self, matrix):
        """Apply ``p -> matrix @ p`` to every point."""
        return Constellation(self.points @ np.asarray(matrix, dtype=float).T)

    def to_json(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "dim": self.dim,
            "points": [[float(v) for v in p] for p in self.points],
        }

    @classmethod
    def from_json(cls, doc):
        pts = np.asarray(doc["points"], dtype=float)
        c = cls(pts)
        if "dim" in doc and int(doc["dim"]) != c.dim:
            raise ValueError(f"declared dim {doc['dim']} does not match points of dim {c.dim}")
        return c

    def dumps(self):
        return json.dumps(self.to_json(), indent=1)


@dataclass(frozen=True)
class BTransform:
    b_vectors: np.ndarray
    c: float

    def __post_init__(self):
        B = np.array(self.b_vectors, dtype=float)
        B.setflags(write=False)
        object.__setattr__(self, "b_vectors", B)
        if not self.c > 0:
            raise ValueError("c must be positive")

    @property
    def n(self):
        return self.b_vectors.shape[0]

    @property
    def t_matrix(self):
        # columns are the sign vectors
        return self.b_vectors.T / self.c

    def forward(self, a_x):
        """``A_x -> A_y``."""
        return a_x.mapped(self.t_matrix)

    def inverse(self, a_y):
        """``A_y -> A_x``."""
        return a_y.mapped(np.linalg.inv(self.t_matrix))


def _sign_matrix(b_vectors):
    B = np.asarray(b_vectors, dtype=float)
    n = B.shape[0]
    if B.shape != (n, n) or not np.all(np.abs(B) == 1):
        raise ValueError("need n sign vectors of length n with entries +-1")
    if np.linalg.matrix_rank(B) < n:
        raise ValueError("sign vectors are linearly dependent")
    return B


def make_transform(b_vectors, source):
    """Transform whose image of `source` has the same average energy as `source`."""
    B = _sign_matrix(b_vectors)
    if source.dim != B.shape[0]:
        raise ValueError(f"constellation dim {source.dim} != n = {B.shape[0]}")
    mapped = source.points @ B  # rows: sum_i x_i b_i
    c = math.sqrt(Constellation.avg_energy_of(mapped) / source.avg_energy)
    return BTransform(B, c)


def transform_for_target(b_vectors, a_y):
    """Same energy rule, specified by the image constellation ``A_y``.

    ``A_x = T^{-1} A_y`` and ``T`` preserves average energy, so
    ``c^2 = E|y|^2 / E|M^{-1} y|^2`` with ``M = [b_1^T ... b_n^T]``.
    """
    B = _sign_matrix(b_vectors)
    if a_y.dim != B.shape[0]:
        raise ValueError(f"constellation dim {a_y.dim} != n = {B.shape[0]}")
    pre = a_y.points @ np.linalg.inv(B.T).T
    c = math.sqrt(a_y.avg_energy / Constellation.avg_energy_of(pre))
    return BTransform(B, c)


def cpd(points):
    """Coordinate product distance: ``min_{p != q} |prod_i (p_i - q_i)|``."""
    pts = points.points if isinstance(points, Constellation) else np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        raise ValueError("need at least two points")
    iu, ju = np.triu_indices(pts.shape[0], k=1)
    return float(np.min(np.abs(np.prod(pts[iu] - pts[ju], axis=1))))


def _diag_form(code):
    info = code.meta.get("diagonal_form")
    if not info:
        raise ValueError("code has no diagonal-form metadata (inner family U Diag(b) U^H)")
    return np.asarray(info["b_vectors"], dtype=float)


def code_transform(code, a_y):
    """Energy-matched transform for `code` given the target constellation ``A_y``."""
    return transform_for_target(_diag_form(code), a_y)


def diversity_product(code, transform, a_y):
    """Closed form ``c / (2 sqrt(nt)) * CPD(A_y)^(1/n)``."""
    B = _diag_form(code)
    if transform.n != code.n or B.shape[0] != code.n:
        raise ValueError(f"transform size {transform.n} does not match n = {code.n}")
    if a_y.dim != code.n:
        raise ValueError(f"constellation dim {a_y.dim} != n = {code.n}")
    return transform.c / (2 * math.sqrt(code.nt)) * cpd(a_y) ** (1.0 / code.n)


@dataclass
class OracleReport:
    single_group_min: float
    multi_group_min: float
    evaluations: int

    @property
    def minimum(self):
        return min(self.single_group_min, self.multi_group_min)

    @property
    def reduction_holds(self):
        """No sampled multi-group difference beats the single-group minimum."""
        return self.multi_group_min >= self.single_group_min * (1 - 1e-9)


def _gram_dets(code, dx):
    # det(S^H S) = |det S|^2 for square S; avoids squaring round-off near singularity
    S = np.tensordot(dx, code.stacked, axes=1)
    return np.abs(np.linalg.det(S)) ** 2


def oracle_search(code, per_group, samples=10_000, seed=0, chunk=4096):
    """Brute-force minimum of ``det(S^H(dX) S(dX))`` over constellation differences.

    Every single-group difference is enumerated; `samples` random
    differences with two or more active groups are drawn with `seed`.
    """
    groups = code.grouping.groups()
    pts = per_group.points
    for b in groups:
        if len(b) != per_group.dim:
            raise ValueError(f"group of size {len(b)} cannot take a {per_group.dim}-dim constellation")
    N = len(pts)
    iu, ju = np.triu_indices(N, k=1)
    diffs = pts[iu] - pts[ju]
    n_single = len(groups) * len(diffs)
    n_multi = samples if len(groups) > 1 else 0
    if n_single + n_multi > ORACLE_BUDGET:
        raise ValueError(f"oracle budget exceeded: {n_single + n_multi} > {ORACLE_BUDGET}")

    single = np.inf
    for b in groups:
        dx = np.zeros((len(diffs), code.K))
        dx[:, list(b)] = diffs
        for s in range(0, len(dx), chunk):
            single = min(single, float(_gram_dets(code, dx[s:s + chunk]).min()))

    multi = np.inf
    if n_multi:
        rng = np.random.default_rng(seed)
        g = len(groups)
        dx = np.zeros((n_multi, code.K))
        for t in range(n_multi):
            active = rng.choice(g, size=rng.integers(2, g + 1), replace=False)
            for k in active:
                dx[t, list(groups[k])] = diffs[rng.integers(len(diffs))]
        for s in range(0, n_multi, chunk):
            multi = min(multi, float(_gram_dets(code, dx[s:s + chunk]).min()))
    return OracleReport(single, multi, n_single + n_multi)


def min_det_oracle(code, per_group, samples=10_000, seed=0):
    """``min det(S^H(dX) S(dX))`` over enumerated and sampled differences of ``A_x``."""
    return oracle_search(code, per_group, samples, seed).minimum


def dp_report(code, a_y, samples=10_000, seed=0):
    """Closed-form and brute-force diversity figures for `code` with target ``A_y``."""
    T = code_transform(code, a_y)
    a_x = T.inverse(a_y)
    rep = oracle_search(code, a_x, samples, seed)
    value = cpd(a_y)
    closed = diversity_product(code, T, a_y)
    min_det = rep.minimum if rep.minimum > DET_ZERO_TOL else 0.0
    oracle_dp = min_det ** (1.0 / (2 * code.nt)) / (2 * math.sqrt(code.nt))
    predicted = T.c ** (2 * code.nt) * value ** (2 * code.m)
    return {
        "cpd": value,
        "c": T.c,
        "closed_form_dp": closed,
        "oracle_min_det": rep.minimum,
        "oracle_dp": oracle_dp,
        "predicted_min_det": predicted,
        "single_group_min_det": rep.single_group_min,
        "multi_group_min_det": rep.multi_group_min if np.isfinite(rep.multi_group_min) else None,
        "single_group_reduction_holds": rep.reduction_holds,
        "evaluations": rep.evaluations,
        "samples": samples,
        "seed": seed,
    }


def dp_consistent(report, rtol=1e-6, atol=DET_ZERO_TOL):
    """Closed form, oracle and predicted determinant agree."""
    def close(a, b):
        return abs(a - b) <= max(atol, rtol * max(abs(a), abs(b)))

    return (
        close(report["oracle_min_det"], report["predicted_min_det"])
        and close(report["closed_form_dp"], report["oracle_dp"])
        and report["single_group_reduction_holds"]
    )


def pam_levels(L):
    return np.arange(L, dtype=float) * 2 - (L - 1)


def _grid(L, dim):
    return np.array(list(product(pam_levels(L), repeat=dim)))


def _root(size, dim):
    L = round(size ** (1.0 / dim))
    if L < 2 or L ** dim != size:
        raise ValueError(f"size {size} is not a perfect {dim}-th power of an integer >= 2")
    return L


def rotation_2d(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _is_prime(p):
    return p > 1 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def lattice_rotation(dim):
    """Full-diversity generator for ``Z^dim``.

    Powers of two use the orthogonal matrix ``sqrt(2/n) cos(pi (2i+1)(2j+1) / 4n)``.
    Otherwise, when ``p = 2n+1`` is prime, the real embedding of
    ``Z[2 cos(2 pi / p)]`` is used (not orthogonal, product distance >= 1/p^(n/2)).
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    if dim == 1:
        return np.ones((1, 1))
    i = np.arange(dim)
    if dim & (dim - 1) == 0:
        return math.sqrt(2.0 / dim) * np.cos(np.pi * np.outer(2 * i + 1, 2 * i + 1) / (4 * dim))
    p = 2 * dim + 1
    if _is_prime(p):
        return 2 * np.cos(2 * np.pi * np.outer(i + 1, i + 1) / p) / math.sqrt(p)
    raise ValueError(f"no lattice rotation available for dim={dim}")


GOLDEN_ANGLE = 0.5 * math.atan(2.0)


def standard_constellations(name, size, dim=None, angle=None):
    """Named constellations on integer grids.

    ``rotated-square-2d``
        ``L x L`` PAM grid rotated by `angle` (default ``atan(2)/2``).
    ``rotated-zn-lattice-nd``
        ``L^dim`` PAM grid mapped by :func:`lattice_rotation` (default dim 4).
    ``qam-as-pairs``
        Unrotated ``L^dim`` grid (default dim 2); shares coordinates, CPD 0.

    Points are listed in lexicographic order of their PAM indices.
    """
    if name == "rotated-square-2d":
        if dim not in (None, 2):
            raise ValueError("rotated-square-2d is two dimensional")
        L = _root(size, 2)
        theta = GOLDEN_ANGLE if angle is None else angle
        return Constellation(_grid(L, 2) @ rotation_2d(theta).T)
    if name == "rotated-zn-lattice-nd":
        dim = 4 if dim is None else dim
        L = _root(size, dim)
        return Constellation(_grid(L, dim) @ lattice_rotation(dim).T)
    if name == "qam-as-pairs":
        dim = 2 if dim is None else dim
        L = _root(size, dim)
        return Constellation(_grid(L, dim))
    raise ValueError(f"unknown constellation {name!r}")
