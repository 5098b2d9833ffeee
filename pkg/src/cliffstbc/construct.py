"""Weight-matrix construction for multi-group decodable codes.

A code is assembled from two families:

* ``G0`` -- ``g`` matrices of size ``m`` with ``A^H B + B^H A = 0`` for every
  distinct pair.  These separate the decoding groups.
* ``Gt`` -- ``n`` mutually commuting Hermitian unitaries of size ``n``.

The weight set is ``{G0[k] (x) Gt[i]}`` with weight ``(k, i)`` at position
``k * n + i`` and in decoding group ``k``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import json

import numpy as np
import scipy.linalg

from . import SCHEMA_VERSION
from .clifford import gamma_representation, pauli_basis
from .matrix import (
    DEFAULT_TOL,
    approx_eq,
    as_matrix,
    clean,
    fro,
    from_pairs,
    identity,
    is_hermitian,
    is_unitary,
    kron,
    to_pairs,
)


@dataclass(frozen=True)
class GroupPartition:
    """Assignment of weight indices to decoding groups.

    ``assignment[i]`` is the 1-based group label of weight ``i``.  Labels are
    numbered by the smallest weight index they contain.
    """

    assignment: tuple

    def __post_init__(self):
        labels = tuple(int(v) for v in self.assignment)
        if not labels:
            raise ValueError("partition must cover at least one weight")
        used = sorted(set(labels))
        if used != list(range(1, len(used) + 1)):
            raise ValueError(f"group labels must be 1..g without gaps, got {used}")
        object.__setattr__(self, "assignment", labels)

    @classmethod
    def from_blocks(cls, blocks, size=None):
        size = size if size is not None else sum(len(b) for b in blocks)
        labels = [None] * size
        for k, b in enumerate(blocks):
            for i in b:
                if labels[i] is not None:
                    raise ValueError(f"weight {i} assigned twice")
                labels[i] = k
        if None in labels:
            raise ValueError("every weight index must be assigned exactly once")
        return cls.canonical(labels)

    @classmethod
    def canonical(cls, labels):
        """Relabel arbitrary hashable labels by first appearance."""
        mapping = {}
        out = []
        for lab in labels:
            if lab not in mapping:
                mapping[lab] = len(mapping) + 1
            out.append(mapping[lab])
        return cls(tuple(out))

    @classmethod
    def contiguous(cls, sizes):
        return cls(tuple(k + 1 for k, s in enumerate(sizes) for _ in range(s)))

    @property
    def g_total(self):
        return max(self.assignment)

    @property
    def size(self):
        return len(self.assignment)

    def groups(self):
        """Weight indices of each group, in label order."""
        out = [[] for _ in range(self.g_total)]
        for i, lab in enumerate(self.assignment):
            out[lab - 1].append(i)
        return [tuple(b) for b in out]

    @property
    def sizes(self):
        return [len(b) for b in self.groups()]

    def refines(self, other):
        """True if every group of ``self`` sits inside one group of `other`."""
        if self.size != other.size:
            return False
        return all(len({other.assignment[i] for i in b}) == 1 for b in self.groups())


@dataclass(frozen=True)
class CodeDescriptor:
    nt: int
    m: int
    n: int
    g: int
    group_sizes: tuple
    weights: tuple = field(repr=False)
    grouping: GroupPartition = field(repr=False)
    meta: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ws = tuple(as_matrix(w) for w in self.weights)
        for w in ws:
            if w.shape != (self.nt, self.nt):
                raise ValueError(f"weight of shape {w.shape} in a code with nt={self.nt}")
            w.setflags(write=False)
        object.__setattr__(self, "weights", ws)
        if self.grouping.size != len(ws):
            raise ValueError("grouping does not cover the weight list")
        object.__setattr__(self, "group_sizes", tuple(int(s) for s in self.group_sizes))

    @property
    def K(self):
        return len(self.weights)

    @property
    def real_rate(self):
        return Fraction(self.K, self.nt)

    @property
    def complex_rate(self):
        return self.real_rate / 2

    @property
    def stacked(self):
        """Weights as a ``(K, nt, nt)`` array."""
        return np.stack(self.weights)

    def with_grouping(self, grouping):
        return CodeDescriptor(
            self.nt, self.m, self.n, grouping.g_total, tuple(grouping.sizes),
            self.weights, grouping, dict(self.meta),
        )

    def to_json(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "nt": self.nt,
            "m": self.m,
            "n": self.n,
            "g": self.g,
            "group_sizes": list(self.group_sizes),
            "weights": [to_pairs(w) for w in self.weights],
            "grouping": list(self.grouping.assignment),
            "meta": self.meta,
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, doc):
        version = doc.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported code schema version {version}")
        weights = tuple(from_pairs(w) for w in doc["weights"])
        grouping = GroupPartition(tuple(doc["grouping"]))
        return cls(
            nt=int(doc["nt"]),
            m=int(doc.get("m", 1)),
            n=int(doc.get("n", doc["nt"])),
            g=int(doc.get("g", grouping.g_total)),
            group_sizes=tuple(doc.get("group_sizes", grouping.sizes)),
            weights=weights,
            grouping=grouping,
            meta=dict(doc.get("meta", {})),
        )

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


def g0_size(g):
    """Smallest matrix size carrying ``g`` pairwise HR-orthogonal unitaries."""
    return 2 ** ((g - 1) // 2)


def build_g0(g):
    """Identity plus Clifford generators: ``g`` matrices of size ``2**((g-1)//2)``.

    Even ``g`` uses all ``g - 1`` generators of ``CA_{g-1}``; odd ``g`` uses the
    first ``g - 1`` generators of ``CA_g``.
    """
    if not isinstance(g, (int, np.integer)) or not 2 <= g <= 12:
        raise ValueError(f"g must be an integer in [2, 12], got {g!r}")
    m = g0_size(g)
    if m == 1:
        gens = [np.array([[1j]])]
    else:
        gens = list(gamma_representation(int(np.log2(m))).gammas)
    return [identity(m)] + [np.array(x) for x in gens[: g - 1]]


def default_b_vectors(n):
    """``n`` independent sign vectors: all ones, then one flipped coordinate each.

    The flip position cycles ``n, 1, 2, ..., n-2`` (1-based).
    """
    out = [np.ones(n)]
    for i in range(1, n):
        b = np.ones(n)
        b[(i - 2) % n] = -1.0
        out.append(b)
    return out


def default_unitary(n):
    """Dense unitary: normalised Hadamard for powers of two, unitary DFT otherwise."""
    if n & (n - 1) == 0:
        return scipy.linalg.hadamard(n).astype(np.complex128) / np.sqrt(n)
    return scipy.linalg.dft(n, scale="sqrtn").astype(np.complex128)


def resolve_unitary(u, n):
    if u is None or (isinstance(u, str) and u == "default"):
        return default_unitary(n), "default"
    if isinstance(u, str):
        if u == "identity":
            return identity(n), "identity"
        if u == "hadamard":
            if n & (n - 1):
                raise ValueError(f"Hadamard unitary needs n a power of two, got {n}")
            return scipy.linalg.hadamard(n).astype(np.complex128) / np.sqrt(n), "hadamard"
        if u == "dft":
            return scipy.linalg.dft(n, scale="sqrtn").astype(np.complex128), "dft"
        raise ValueError(f"unknown unitary choice {u!r}")
    return as_matrix(u), "custom"


def build_gtilde_diag(n, u="default", b_vectors=None):
    """``{U Diag(b_i) U^H}`` for ``n`` independent sign vectors ``b_i``.

    Returns ``(matrices, b_vectors, U)``.

    Raises
    ------
    ValueError
        If `u` is not unitary, or the sign vectors are dependent or not +-1.
    """
    if n < 1:
        raise ValueError("n must be positive")
    U, _ = resolve_unitary(u, n)
    if U.shape != (n, n) or not is_unitary(U):
        raise ValueError("U must be an n x n unitary matrix (tol 1e-10)")
    bs = default_b_vectors(n) if b_vectors is None else [np.asarray(b, dtype=float) for b in b_vectors]
    B = np.array(bs, dtype=float)
    if B.shape != (n, n) or not np.all(np.abs(B) == 1):
        raise ValueError("need n sign vectors of length n with entries +-1")
    if np.linalg.matrix_rank(B) < n:
        raise ValueError("sign vectors are linearly dependent")
    mats = [clean(U @ np.diag(b) @ U.conj().T) for b in B]
    return mats, [b.copy() for b in B], U


def canonical_sign(a):
    """Flip sign so the first non-zero entry (row-major) points to +1 or +j."""
    flat = np.asarray(a).ravel()
    for z in flat:
        if abs(z) > 1e-12:
            if abs(z.real) > 1e-12:
                return a if z.real > 0 else -a
            return a if z.imag > 0 else -a
    return a


def build_gtilde_clifford(a):
    """``2**a`` commuting Hermitian unitaries from products of ``j R(g_k) R(g_{a+k})``.

    Ordering: identity, the ``a`` base products, then products over every
    subset of size 2..a in lexicographic order.  Each product takes the sign
    chosen by :func:`canonical_sign`.
    """
    if not isinstance(a, (int, np.integer)) or not 1 <= a <= 5:
        raise ValueError(f"a must be an integer in [1, 5], got {a!r}")
    gs = gamma_representation(int(a)).gammas
    base = [1j * gs[k] @ gs[a + k] for k in range(a)]
    out = [identity(2 ** a)]
    for size in range(1, a + 1):
        for subset in combinations(range(a), size):
            prod = identity(2 ** a)
            for k in subset:
                prod = prod @ base[k]
            out.append(clean(canonical_sign(prod)))
    return out


def diagonal_form(gtilde):
    """Common eigenbasis of commuting Hermitian unitaries.

    Returns ``(U, b_vectors)`` with ``gtilde[i] == U diag(b_i) U^H``.
    """
    mats = [as_matrix(x) for x in gtilde]
    n = mats[0].shape[0]
    weights = np.sqrt(np.arange(2, len(mats) + 2, dtype=float))
    mix = sum(w * x for w, x in zip(weights, mats))
    _, U = np.linalg.eigh((mix + mix.conj().T) / 2)
    bs = []
    for x in mats:
        d = U.conj().T @ x @ U
        b = np.sign(np.real(np.diag(d)))
        if fro(d - np.diag(b)) > 1e-8:
            raise ValueError("matrices are not simultaneously diagonal with +-1 spectrum")
        bs.append(b)
    U = clean(U)
    return U, [b.copy() for b in bs]


def _check_pairs(g0, gtilde):
    for i in range(len(g0)):
        for j in range(i + 1, len(g0)):
            a, b = g0[i], g0[j]
            r = fro(a.conj().T @ b + b.conj().T @ a)
            if r > DEFAULT_TOL:
                raise ValueError(f"G0 members {i} and {j} violate A^H B + B^H A = 0 (residual {r:.3g})")
    for i, a in enumerate(gtilde):
        if not is_hermitian(a):
            raise ValueError(f"inner matrix {i} is not Hermitian")
        for j in range(i + 1, len(gtilde)):
            b = gtilde[j]
            if not approx_eq(a @ b, b @ a):
                raise ValueError(f"inner matrices {i} and {j} do not commute")


def assemble_code(g0, gtilde, meta=None):
    """Kronecker weight set ``{g0[k] (x) gtilde[i]}`` with group ``k`` per outer matrix."""
    g0 = [as_matrix(x) for x in g0]
    gtilde = [as_matrix(x) for x in gtilde]
    if not g0 or not gtilde:
        raise ValueError("both families must be non-empty")
    m = g0[0].shape[0]
    n = gtilde[0].shape[0]
    if any(x.shape != (m, m) for x in g0) or any(x.shape != (n, n) for x in gtilde):
        raise ValueError("dimension mismatch inside a family")
    _check_pairs(g0, gtilde)
    weights = [clean(kron(a, b)) for a in g0 for b in gtilde]
    g = len(g0)
    info = {"construction": "custom"}
    info.update(meta or {})
    if "diagonal_form" not in info:
        try:
            U, bs = diagonal_form(gtilde)
            info["diagonal_form"] = _diag_meta(U, bs)
        except ValueError:
            pass
    return CodeDescriptor(
        nt=m * n, m=m, n=n, g=g, group_sizes=(len(gtilde),) * g,
        weights=tuple(weights),
        grouping=GroupPartition.contiguous([len(gtilde)] * g),
        meta=info,
    )


def _diag_meta(U, bs):
    return {"u": to_pairs(U), "b_vectors": [[int(v) for v in b] for b in bs]}


def construct_general(nt, g, u="default", b_vectors=None):
    """Delay-optimal ``g``-group code for ``nt`` antennas (``m = 2**((g-1)//2)`` must divide ``nt``)."""
    if not 2 <= g <= 12:
        raise ValueError(f"g must be in [2, 12], got {g}")
    m = g0_size(g)
    if nt < 1 or nt % m:
        raise ValueError(f"infeasible (nt={nt}, g={g}): nt must be a multiple of m = 2^floor((g-1)/2) = {m}")
    n = nt // m
    mats, bs, U = build_gtilde_diag(n, u, b_vectors)
    _, u_name = resolve_unitary(u, n) if isinstance(u, str) or u is None else (None, "custom")
    meta = {
        "construction": "general",
        "g0": f"identity + first {g - 1} Clifford generators (m={m})",
        "gtilde": "U diag(b_i) U^H",
        "u_choice": u_name,
        "b_vectors": [[int(v) for v in b] for b in bs],
        "generator_ordering": "recursive: {s1(x)I, js3(x)I, s4(x)B_k}",
        "diagonal_form": _diag_meta(U, bs),
    }
    return assemble_code(build_g0(g), mats, meta)


def _log2_exact(nt):
    a = int(nt).bit_length() - 1
    if nt < 1 or 2 ** a != nt:
        raise ValueError(f"nt must be a power of two, got {nt}")
    return a


def _finalise(code):
    from .verify import verify_theorem2_split

    return code.with_grouping(verify_theorem2_split(code))


def preset_ssd(a):
    """Single-symbol decodable code for ``2**a`` antennas: ``2a`` groups of two real symbols."""
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if 2 * a > 12:
        raise ValueError("a too large for the available Clifford representations")
    s4 = pauli_basis()[3]
    gtilde = [identity(2), s4]
    h2 = scipy.linalg.hadamard(2).astype(np.complex128) / np.sqrt(2)
    meta = {
        "construction": "ssd",
        "a": int(a),
        "g0": f"identity + {2 * a - 1} Clifford generators (m={2 ** (a - 1)})",
        "gtilde": "{I2, s4}",
        "generator_ordering": "recursive: {s1(x)I, js3(x)I, s4(x)B_k}",
        "diagonal_form": _diag_meta(h2, [np.array([1, 1]), np.array([1, -1])]),
    }
    return _finalise(assemble_code(build_g0(2 * a), gtilde, meta))


def preset_dsd(a):
    """Double-symbol decodable code for ``2**a`` antennas: ``2a - 2`` groups of four real symbols."""
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if 2 * a - 2 > 12:
        raise ValueError("a too large for the available Clifford representations")
    gtilde = build_gtilde_clifford(2)
    U, bs = diagonal_form(gtilde)
    meta = {
        "construction": "dsd",
        "a": int(a),
        "g0": f"identity + {2 * a - 3} Clifford generators (m={2 ** (a - 2)})",
        "gtilde": "{I(x)I, s3(x)js1, s1(x)s2, s4(x)s3}",
        "generator_ordering": "recursive: {s1(x)I, js3(x)I, s4(x)B_k}",
        "diagonal_form": _diag_meta(U, bs),
    }
    return _finalise(assemble_code(build_g0(2 * a - 2), gtilde, meta))
