import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from cliffstbc.construct import (
    CodeDescriptor,
    GroupPartition,
    assemble_code,
    build_g0,
    build_gtilde_clifford,
    build_gtilde_diag,
    construct_general,
    default_b_vectors,
    diagonal_form,
    preset_dsd,
    preset_ssd,
)
from cliffstbc.matrix import approx_eq, identity, is_hermitian, is_unitary
from cliffstbc.verify import hr_condition

from conftest import EXAMPLE2_B
from displays import (
    EX2_BOTTOM_CONSISTENT,
    EX2_BOTTOM_PRINTED,
    EX2_TOP,
    SSD44,
    display_to_weights,
    dsd88_corrected,
)

GOLDEN = Path(__file__).parent / "golden"


def test_g0_four(paulis):
    s1, s2, s3, _ = paulis
    g0 = build_g0(4)
    for got, want in zip(g0, [identity(2), s1, s2, 1j * s3]):
        assert np.array_equal(got, want)
    assert hr_condition(g0[0], g0[1]) == 0


def test_g0_two():
    g0 = build_g0(2)
    assert [x.tolist() for x in g0] == [[[1]], [[1j]]]
    assert hr_condition(*g0) == 0


@pytest.mark.parametrize("g", range(2, 13))
def test_g0_pairwise_hr(g):
    g0 = build_g0(g)
    m = 2 ** ((g - 1) // 2)
    assert len(g0) == g and all(x.shape == (m, m) for x in g0)
    for i in range(g):
        assert is_unitary(g0[i])
        for j in range(i + 1, g):
            assert hr_condition(g0[i], g0[j]) <= 1e-10


@pytest.mark.parametrize("g", [1, 13])
def test_g0_range(g):
    with pytest.raises(ValueError):
        build_g0(g)


def test_gtilde_diag_example2():
    mats, bs, U = build_gtilde_diag(3, "identity", EXAMPLE2_B)
    assert [np.diag(m).real.tolist() for m in mats] == EXAMPLE2_B
    assert np.array_equal(U, identity(3))


def test_default_b_vectors_reproduce_example2():
    assert [b.tolist() for b in default_b_vectors(3)] == EXAMPLE2_B
    mats, _, _ = build_gtilde_diag(3, "identity")
    assert [np.diag(m).real.tolist() for m in mats] == EXAMPLE2_B


@pytest.mark.parametrize("n", range(1, 9))
def test_default_b_vectors_independent(n):
    B = np.array(default_b_vectors(n))
    assert np.linalg.matrix_rank(B) == n


def test_gtilde_trivial():
    mats, bs, _ = build_gtilde_diag(1)
    assert len(mats) == 1 and np.allclose(mats[0], [[1]])


@pytest.mark.parametrize("n,u", [(4, "hadamard"), (4, "default"), (3, "default"), (5, "dft"), (6, "default")])
def test_gtilde_diag_properties(n, u):
    mats, _, _ = build_gtilde_diag(n, u)
    assert len(mats) == n
    for i, a in enumerate(mats):
        assert is_hermitian(a) and is_unitary(a)
        for b in mats[i + 1:]:
            assert approx_eq(a @ b, b @ a)
            assert not approx_eq(a, b)


def test_gtilde_dense_with_hadamard():
    mats, _, _ = build_gtilde_diag(4, "hadamard")
    # every non-identity member has at least half of its entries non-zero
    for a in mats[1:]:
        assert np.count_nonzero(np.abs(a) > 1e-12) >= 8


def test_gtilde_rejects_bad_inputs():
    with pytest.raises(ValueError):
        build_gtilde_diag(2, np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        build_gtilde_diag(2, "identity", [[1, 1], [1, 1]])


def test_gtilde_clifford_matches_dsd_set(paulis):
    s1, s2, s3, s4 = paulis
    want = [np.eye(4), np.kron(s3, 1j * s1), np.kron(s1, s2), np.kron(s4, s3)]
    got = build_gtilde_clifford(2)
    assert len(got) == 4
    for a, b in zip(got, want):
        assert np.array_equal(a, b)


def test_gtilde_clifford_a1(paulis):
    got = build_gtilde_clifford(1)
    assert len(got) == 2
    assert np.array_equal(got[0], np.eye(2))
    assert is_hermitian(got[1]) and is_unitary(got[1]) and not approx_eq(got[1], np.eye(2))


@pytest.mark.parametrize("a", range(1, 6))
def test_gtilde_clifford_properties(a):
    mats = build_gtilde_clifford(a)
    assert len(mats) == 2 ** a
    flat = np.stack([m.ravel() for m in mats])
    assert np.linalg.matrix_rank(flat) == 2 ** a
    for i, x in enumerate(mats):
        assert is_hermitian(x) and is_unitary(x)
        for y in mats[i + 1:]:
            assert np.linalg.norm(x @ y - y @ x) <= 1e-10


def test_diagonal_form_roundtrip():
    mats = build_gtilde_clifford(2)
    U, bs = diagonal_form(mats)
    for m, b in zip(mats, bs):
        assert approx_eq(U @ np.diag(b) @ U.conj().T, m)
    assert np.linalg.matrix_rank(np.array(bs)) == 4


def test_example2_code_top_rows(example2):
    assert (example2.nt, example2.K, example2.grouping.sizes) == (6, 12, [3, 3, 3, 3])
    W = display_to_weights(EX2_TOP + EX2_BOTTOM_CONSISTENT, 12)
    for i in range(12):
        assert np.array_equal(example2.weights[i][:3], W[i][:3])


def test_example2_code_bottom_rows(example2):
    consistent = display_to_weights(EX2_TOP + EX2_BOTTOM_CONSISTENT, 12)
    printed = display_to_weights(EX2_TOP + EX2_BOTTOM_PRINTED, 12)
    S = example2.stacked
    assert np.array_equal(S, consistent)
    # the printed middle row agrees; the outer two carry the repeated term
    assert np.array_equal(S[:, 4], printed[:, 4])
    assert not np.array_equal(S[:, 3], printed[:, 3])
    assert not np.array_equal(S[:, 5], printed[:, 5])


def test_ssd_example_display(ssd4):
    W = display_to_weights(SSD44, 8)
    assert np.array_equal(ssd4.stacked, W)


def test_dsd_example_display(dsd8):
    W = display_to_weights(dsd88_corrected(), 16)
    assert np.array_equal(dsd8.stacked, W)
    assert dsd8.grouping.sizes == [4, 4, 4, 4]


def test_assemble_examples(paulis, ssd4):
    s4 = paulis[3]
    code = assemble_code(build_g0(4), [identity(2), s4])
    assert np.array_equal(code.stacked, ssd4.stacked)
    code = assemble_code(build_g0(4), build_gtilde_clifford(2))
    assert (code.nt, code.K, code.g) == (8, 16, 4)


def test_assemble_rejects_bad_g0(paulis):
    s1, _, s3, _ = paulis
    with pytest.raises(ValueError, match="G0 members 0 and 1"):
        assemble_code([identity(2), s3], [identity(1)])
    with pytest.raises(ValueError):
        assemble_code([identity(2), s1], [s1])  # s1 is not Hermitian
    with pytest.raises(ValueError):
        assemble_code([identity(2), np.eye(3)], [identity(1)])


ALL_CODES = [
    ("example2", lambda: construct_general(6, 4, "identity")),
    ("general-nt8-g6", lambda: construct_general(8, 6)),
    ("general-nt12-g5", lambda: construct_general(12, 5)),
    ("general-nt6-g3-dft", lambda: construct_general(6, 3, "dft")),
    ("ssd2", lambda: preset_ssd(2)),
    ("ssd3", lambda: preset_ssd(3)),
    ("dsd2", lambda: preset_dsd(2)),
    ("dsd3", lambda: preset_dsd(3)),
    ("dsd4", lambda: preset_dsd(4)),
]


@pytest.mark.parametrize("name,make", ALL_CODES)
def test_code_invariants(name, make):
    code = make()
    lab = code.grouping.assignment
    assert code.K == sum(code.group_sizes)
    assert code.real_rate * code.nt == code.K
    for i, a in enumerate(code.weights):
        assert is_unitary(a)
        for j in range(i + 1, code.K):
            b = code.weights[j]
            if lab[i] != lab[j]:
                assert hr_condition(a, b) <= 1e-10
            else:
                assert approx_eq(a.conj().T @ b, b.conj().T @ a)


def test_general_rate_and_errors():
    code = construct_general(6, 4, "identity")
    assert code.real_rate == 2 and code.complex_rate == 1
    assert construct_general(8, 6).real_rate == Fraction(6, 4)
    with pytest.raises(ValueError, match="multiple of m"):
        construct_general(6, 8)


@pytest.mark.parametrize("a", range(2, 6))
def test_preset_rates(a):
    ssd = preset_ssd(a)
    dsd = preset_dsd(a)
    assert ssd.nt == dsd.nt == 2 ** a
    assert ssd.complex_rate == Fraction(a, 2 ** (a - 1))
    assert ssd.grouping.g_total == 2 * a and set(ssd.grouping.sizes) == {2}
    assert dsd.complex_rate == Fraction(a - 1, 2 ** (a - 2))
    assert dsd.grouping.g_total == 2 * a - 2 and set(dsd.grouping.sizes) == {4}


def test_presets_reject_small_a():
    with pytest.raises(ValueError):
        preset_ssd(1)
    with pytest.raises(ValueError):
        preset_dsd(1)


def test_partition_helpers():
    p = GroupPartition.canonical(["b", "a", "b", "c"])
    assert p.assignment == (1, 2, 1, 3)
    assert p.groups() == [(0, 2), (1,), (3,)]
    assert GroupPartition.from_blocks([(3,), (0, 2), (1,)]) == p
    assert GroupPartition((1, 2, 1, 3)).refines(GroupPartition((1, 1, 1, 2)))
    assert not GroupPartition((1, 1, 2, 2)).refines(GroupPartition((1, 2, 2, 2)))
    with pytest.raises(ValueError):
        GroupPartition((1, 3))
    with pytest.raises(ValueError):
        GroupPartition.from_blocks([(0, 1), (1,)])


def test_json_roundtrip(dsd8):
    doc = json.loads(dsd8.dumps())
    assert doc["schema_version"] == 1
    assert set(doc) >= {"nt", "m", "n", "g", "weights", "grouping", "meta"}
    back = CodeDescriptor.from_json(doc)
    assert np.array_equal(back.stacked, dsd8.stacked)
    assert back.grouping == dsd8.grouping
    assert back.meta["diagonal_form"] == dsd8.meta["diagonal_form"]


@pytest.mark.parametrize("fname,make", [
    ("example2.json", lambda: construct_general(6, 4, "identity")),
    ("ssd4.json", lambda: preset_ssd(2)),
    ("dsd8.json", lambda: preset_dsd(3)),
])
def test_golden_files(fname, make):
    golden = json.loads((GOLDEN / fname).read_text())
    doc = make().to_json()
    for key in ("nt", "m", "n", "g", "group_sizes", "weights", "grouping"):
        assert doc[key] == golden[key], key
    assert doc["meta"].get("b_vectors") == golden["meta"].get("b_vectors")
