"""Group-decodability checks for arbitrary weight-matrix sets."""

from dataclasses import dataclass

import numpy as np

from .construct import CodeDescriptor, GroupPartition
from .matrix import as_matrix

EDGE_TOL = 1e-8


def codeword(code, x):
    """``S(x) = sum_i x_i W_i``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (code.K,):
        raise ValueError(f"symbol vector must have length K={code.K}, got shape {x.shape}")
    return np.tensordot(x, code.stacked, axes=1)


def group_codewords(code, x, partition=None):
    """Per-group pieces ``S_k(X_k)`` stacked along the first axis."""
    partition = partition or code.grouping
    x = np.asarray(x, dtype=float)
    W = code.stacked
    return np.stack([np.tensordot(x[list(b)], W[list(b)], axes=1) for b in partition.groups()])


def hr_condition(a, b):
    """Frobenius norm of ``A^H B + B^H A``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"need equal square shapes, got {a.shape} and {b.shape}")
    return float(np.linalg.norm(a.conj().T @ b + b.conj().T @ a))


def hr_matrix(weights):
    """Pairwise HR residuals as a symmetric ``K x K`` array."""
    W = np.stack([as_matrix(w) for w in weights])
    G = np.einsum("aji,bjk->abik", W.conj(), W)
    return np.linalg.norm(G + G.transpose(1, 0, 2, 3), axis=(2, 3))


def _components(k, edges):
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    return [find(i) for i in range(k)]


def discover_partition(weights):
    """Finest partition with ``W_i^H W_j + W_j^H W_i = 0`` across groups.

    Two weights share a group when they are connected through pairs whose HR
    residual exceeds ``1e-8``.
    """
    weights = [as_matrix(w) for w in weights]
    if not weights:
        raise ValueError("need at least one weight matrix")
    shape = weights[0].shape
    if shape[0] != shape[1] or any(w.shape != shape for w in weights):
        raise ValueError("weights must be square and of equal shape")
    R = hr_matrix(weights)
    k = len(weights)
    edges = [(i, j) for i in range(k) for j in range(i + 1, k) if R[i, j] > EDGE_TOL]
    return GroupPartition.canonical(_components(k, edges))


def decomposition_residual(code, x, partition=None):
    partition = partition or code.grouping
    S = codeword(code, x)
    parts = group_codewords(code, x, partition)
    total = np.einsum("kji,kjl->il", parts.conj(), parts)
    return float(np.linalg.norm(S.conj().T @ S - total))


def verify_decomposition(code, trials=100, seed=0, partition=None):
    """Largest ``||S^H S - sum_k S_k^H S_k||_F`` over random real symbol vectors."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    return max(
        decomposition_residual(code, rng.standard_normal(code.K), partition)
        for _ in range(trials)
    )


def verify_theorem2_split(code):
    """Refine each declared group by HR-orthogonality among its own weights."""
    labels = [None] * code.K
    for k, block in enumerate(code.grouping.groups()):
        sub = discover_partition([code.weights[i] for i in block])
        for i, s in zip(block, sub.assignment):
            labels[i] = (k, s)
    return GroupPartition.canonical(labels)


def max_cross_group_hr(code, partition=None):
    partition = partition or code.grouping
    R = hr_matrix(code.weights)
    lab = np.asarray(partition.assignment)
    cross = lab[:, None] != lab[None, :]
    return float(R[cross].max()) if cross.any() else 0.0


def weight_rank(code):
    """Real rank of the vectorised weights (Gram-matrix based)."""
    V = np.concatenate([code.stacked.reshape(code.K, -1).real, code.stacked.reshape(code.K, -1).imag], axis=1)
    gram = V @ V.T
    return int(np.linalg.matrix_rank(gram, tol=1e-9 * max(1.0, np.abs(gram).max())))


@dataclass
class VerifyReport:
    partition: GroupPartition
    refined: GroupPartition
    declared_residual: float
    discovered_residual: float
    max_cross_group_hr: float
    rank: int
    K: int

    @property
    def full_rank(self):
        return self.rank == self.K

    @property
    def declared_valid(self):
        return self.declared_residual <= 1e-9 * self.K

    @property
    def ok(self):
        return self.full_rank and self.declared_valid

    def to_json(self):
        return {
            "partition": list(self.partition.assignment),
            "group_sizes": self.partition.sizes,
            "g": self.partition.g_total,
            "theorem2_partition": list(self.refined.assignment),
            "residuals": {
                "declared_grouping": self.declared_residual,
                "discovered_grouping": self.discovered_residual,
                "max_cross_group_hr": self.max_cross_group_hr,
            },
            "rank": {"rank": self.rank, "K": self.K, "full_rank": self.full_rank},
            "declared_grouping_valid": self.declared_valid,
            "ok": self.ok,
        }


def verify_code(code, trials=100, seed=0):
    """Run every weight-level check used by the ``verify`` command."""
    part = discover_partition(code.weights)
    return VerifyReport(
        partition=part,
        refined=verify_theorem2_split(code.with_grouping(part)),
        declared_residual=verify_decomposition(code, trials, seed),
        discovered_residual=verify_decomposition(code, trials, seed, part),
        max_cross_group_hr=max_cross_group_hr(code),
        rank=weight_rank(code),
        K=code.K,
    )
