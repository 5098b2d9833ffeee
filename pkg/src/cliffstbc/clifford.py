"""Matrix representations of the Clifford algebra generators.

The representation of ``CA_{2a+1}`` lives on ``2**a``-dimensional space and
is built recursively::

    a = 1:      {s1, s2, j*s3}
    a-1 -> a:   {s1 (x) I, j*s3 (x) I, s4 (x) B_1, ..., s4 (x) B_{2a-1}}

where ``B_k`` are the generators for ``a - 1``.  ``s4`` anticommutes with
``s1`` and ``j*s3``, squares to ``+I`` and is Hermitian, so every relation of
the algebra is inherited.  With this ordering the commuting family
``j*R(g_k) R(g_{a+k})`` for ``a = 2`` comes out as the familiar
``{I, s3 (x) j s1, s1 (x) s2, s4 (x) s3}`` set used for double-symbol
decodable codes.
"""

from dataclasses import dataclass, field

import numpy as np

from .matrix import DEFAULT_TOL, fro, identity, kron

MAX_A = 6


def pauli_basis():
    """Return ``(s1, s2, s3, s4)``.

    ``s1 = [[0, 1], [-1, 0]]``, ``s2 = [[0, j], [j, 0]]``,
    ``s3 = [[1, 0], [0, -1]]`` and ``s4 = -j * s2 = [[0, 1], [1, 0]]``.
    """
    s1 = np.array([[0, 1], [-1, 0]], dtype=np.complex128)
    s2 = np.array([[0, 1j], [1j, 0]], dtype=np.complex128)
    s3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    s4 = -1j * s2
    return s1, s2, s3, s4


@dataclass(frozen=True)
class GammaSet:
    a: int
    gammas: tuple = field(repr=False)

    @property
    def dim(self):
        return 2 ** self.a

    def __len__(self):
        return len(self.gammas)

    def __getitem__(self, k):
        return self.gammas[k]


@dataclass
class GammaReport:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def _raw_gammas(a):
    s1, s2, s3, s4 = pauli_basis()
    gs = [s1, s2, 1j * s3]
    for step in range(2, a + 1):
        eye = identity(2 ** (step - 1))
        gs = [kron(s1, eye), kron(1j * s3, eye)] + [kron(s4, b) for b in gs]
    return gs


def gamma_representation(a):
    """Generators ``R(g_1), ..., R(g_{2a+1})`` of ``CA_{2a+1}`` as ``2**a`` matrices.

    Raises
    ------
    ValueError
        If `a` is outside ``1..6``.
    """
    if not isinstance(a, (int, np.integer)) or not 1 <= a <= MAX_A:
        raise ValueError(f"a must be an integer in [1, {MAX_A}], got {a!r}")
    gs = tuple(g.copy() for g in _raw_gammas(int(a)))
    for g in gs:
        g.setflags(write=False)
    return GammaSet(int(a), gs)


def verify_gamma(gs, tol=DEFAULT_TOL):
    """Check the defining relations of a generator set.

    Returns a truthy :class:`GammaReport` when every generator is unitary and
    anti-Hermitian, squares to ``-I`` and anticommutes with every other
    generator.  Never raises; problems are listed in ``report.violations``.
    """
    gammas = list(gs.gammas if isinstance(gs, GammaSet) else gs)
    violations = []
    if not gammas:
        return GammaReport(False, ["empty generator set"])
    d = np.asarray(gammas[0]).shape[0]
    eye = identity(d)
    for k, g in enumerate(gammas):
        g = np.asarray(g, dtype=np.complex128)
        if g.shape != (d, d):
            violations.append(f"gamma[{k}] has shape {g.shape}, expected {(d, d)}")
            continue
        if fro(g.conj().T + g) > tol:
            violations.append(f"gamma[{k}] is not anti-Hermitian")
        if fro(g @ g + eye) > tol:
            violations.append(f"gamma[{k}] does not square to -I")
        if fro(g.conj().T @ g - eye) > tol:
            violations.append(f"gamma[{k}] is not unitary")
    for k in range(len(gammas)):
        for j in range(k + 1, len(gammas)):
            a = np.asarray(gammas[k], dtype=np.complex128)
            b = np.asarray(gammas[j], dtype=np.complex128)
            if a.shape != b.shape:
                continue
            if fro(a @ b + b @ a) > tol:
                violations.append(f"gamma[{k}] and gamma[{j}] do not anticommute")
    return GammaReport(not violations, violations)
