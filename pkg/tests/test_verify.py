import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cliffstbc.construct import GroupPartition, construct_general, preset_dsd, preset_ssd
from cliffstbc.matrix import identity, kron
from cliffstbc.verify import (
    codeword,
    discover_partition,
    hr_condition,
    verify_code,
    verify_decomposition,
    verify_theorem2_split,
    weight_rank,
)


def test_codeword_linear(ssd4, rng):
    assert not codeword(ssd4, np.zeros(8)).any()
    for i in range(8):
        e = np.zeros(8)
        e[i] = 1
        assert np.array_equal(codeword(ssd4, e), ssd4.weights[i])
    x, z = rng.standard_normal(8), rng.standard_normal(8)
    assert np.allclose(codeword(ssd4, 2 * x - z), 2 * codeword(ssd4, x) - codeword(ssd4, z))
    with pytest.raises(ValueError):
        codeword(ssd4, np.zeros(7))


def test_codeword_example3_entries(ssd4):
    x = np.arange(1, 9, dtype=float)
    S = codeword(ssd4, x)
    assert S[0, 0] == x[0] + 1j * x[6]
    assert S[2, 0] == -x[2] + 1j * x[4]


def test_hr_condition_values(paulis):
    s1, _, s3, _ = paulis
    assert hr_condition(identity(2), s1) == 0
    assert hr_condition(s3, identity(2)) == pytest.approx(2 * math.sqrt(2))
    with pytest.raises(ValueError):
        hr_condition(identity(2), identity(3))


def test_hr_cross_groups_ssd(ssd4):
    lab = ssd4.grouping.assignment
    for i in range(8):
        for j in range(8):
            if lab[i] != lab[j]:
                assert hr_condition(ssd4.weights[i], ssd4.weights[j]) <= 1e-10


def test_alamouti_single_symbol(paulis):
    s1, s2, s3, _ = paulis
    p = discover_partition([identity(2), 1j * s3, s1, s2])
    assert p.assignment == (1, 2, 3, 4)


def test_dsd_partition(dsd8):
    assert discover_partition(dsd8.weights).sizes == [4, 4, 4, 4]


def test_commuting_hermitian_single_group():
    mats = [np.diag(d).astype(complex) for d in ([1, 1, 1], [1, 1, -1], [-1, 1, 1])]
    assert discover_partition(mats).g_total == 1


def test_discover_rejects_mixed_shapes():
    with pytest.raises(ValueError):
        discover_partition([identity(2), identity(3)])


@settings(max_examples=25, deadline=None)
@given(st.permutations(list(range(16))))
def test_partition_permutation_invariant(perm):
    code = preset_dsd(3)
    base = discover_partition(code.weights)
    p = discover_partition([code.weights[i] for i in perm])
    # same blocks after undoing the permutation
    blocks = {frozenset(perm[i] for i in b) for b in p.groups()}
    assert blocks == {frozenset(b) for b in base.groups()}


@pytest.mark.parametrize("code", [preset_ssd(2), construct_general(6, 4, "identity"), preset_dsd(3)])
def test_decomposition_holds(code):
    assert verify_decomposition(code, trials=100, seed=4) <= 1e-10 * code.K
    part = discover_partition(code.weights)
    assert verify_decomposition(code, trials=50, seed=5, partition=part) <= 1e-9


def test_decomposition_negative_control(example2, paulis):
    s3 = paulis[2]
    ws = list(example2.weights)
    ws[4] = kron(s3, identity(3))
    bad = type(example2)(example2.nt, example2.m, example2.n, example2.g, example2.group_sizes,
                         tuple(ws), example2.grouping, {})
    assert verify_decomposition(bad, trials=100, seed=0) > 1e-6


def test_decomposition_seeded(dsd8):
    assert verify_decomposition(dsd8, 10, seed=3) == verify_decomposition(dsd8, 10, seed=3)


def test_theorem2_split(ssd4, dsd8):
    assert verify_theorem2_split(ssd4).sizes == [2, 2, 2, 2]
    assert verify_theorem2_split(dsd8).sizes == [4, 4, 4, 4]


def test_theorem2_split_singletons(paulis):
    s1, s2, s3, _ = paulis
    ws = [identity(2), 1j * s3, s1, s2]
    from cliffstbc.construct import CodeDescriptor

    code = CodeDescriptor(2, 2, 1, 4, (1, 1, 1, 1), tuple(ws), GroupPartition((1, 2, 3, 4)))
    assert verify_theorem2_split(code) == code.grouping


def test_theorem2_split_refines(paulis):
    s1, s2, s3, _ = paulis
    from cliffstbc.construct import CodeDescriptor

    ws = (identity(2), 1j * s3, s1, s2)
    coarse = CodeDescriptor(2, 2, 1, 1, (4,), ws, GroupPartition((1, 1, 1, 1)))
    fine = verify_theorem2_split(coarse)
    assert fine.refines(coarse.grouping)
    assert fine.g_total == 4
    assert verify_decomposition(coarse.with_grouping(fine), 20, 0) <= 1e-9


@pytest.mark.parametrize("code", [preset_ssd(3), preset_dsd(3), construct_general(12, 5)])
def test_rank_and_report(code):
    assert weight_rank(code) == code.K
    rep = verify_code(code, trials=10, seed=0)
    assert rep.ok
    assert rep.partition == code.grouping
    assert rep.refined.refines(rep.partition)


def test_rank_detects_dependence(ssd4):
    ws = list(ssd4.weights)
    ws[1] = ws[0]
    from cliffstbc.construct import CodeDescriptor

    code = CodeDescriptor(4, 2, 2, 4, ssd4.group_sizes, tuple(ws), ssd4.grouping)
    assert weight_rank(code) == 7
