import time

import pytest

from arrlab.arrangements import Arrangement
from arrlab.errors import BadParam
from arrlab.exact import FieldDescriptor, Subspace, identity
from arrlab.groups import act_on_subspace, generate, trivial_group
from arrlab.hypotheses import (
    INCONCLUSIVE,
    NOT_APPLICABLE,
    SATISFIED,
    SUFFICIENT,
    THEOREM_APPLIES,
    UNKNOWN,
    VIOLATED,
    TheoremInput,
    check_free_on_complement,
    check_hypotheses,
    reduce_min_codim,
)
from arrlab.instances import shift_orbit, five_atoms, fan_test_space
from arrlab.ration import Ration

F2 = FieldDescriptor.parse("f:2")
F3 = FieldDescriptor.parse("f:3")


def test_reduce_min_codim():
    A = five_atoms().arrangement
    assert reduce_min_codim(A) == A
    two = Subspace([[1, 0, 0, 0]], 4)
    mixed = Arrangement([Subspace([[1, 0, 0, 0], [0, 1, 0, 0]], 4), Subspace([[0, 0, 1, 0], [0, 0, 0, 1], [0, 1, 1, 0]], 4)], 4)
    assert reduce_min_codim(mixed).members == (mixed.members[0],)
    assert reduce_min_codim(Arrangement([two], 4)).members == (two,)


def test_half_turn_instance_applies():
    inst = fan_test_space(Ration((1, 1, 1, 1)), 2)
    t0 = time.perf_counter()
    rep = check_hypotheses(TheoremInput(inst.arrangement, inst.group, F2, 3))
    assert time.perf_counter() - t0 < 1
    c = rep.conditions
    assert c["A"].status == SATISFIED
    assert c["B"].status == SATISFIED and c["E"].status == SATISFIED
    assert c["C"].status == SUFFICIENT and c["D"].status == SUFFICIENT
    assert rep.overall == THEOREM_APPLIES
    assert "H^i(X;F2)=0, 1 <= i <= 3" in rep.verdict


def test_cyclic_counterexample_pattern():
    inst = shift_orbit(3)
    rep = check_hypotheses(TheoremInput(inst.arrangement, inst.group, F3, 2))
    c = rep.conditions
    assert c["B"].status == VIOLATED
    w = c["B"].witness
    g = inst.group.elements[w["element_index"]]
    L = inst.arrangement.members[inst.arrangement.names.index(w["member"])]
    assert act_on_subspace(g, L) != L
    assert c["C"].status == UNKNOWN
    assert c["A"].ok and c["D"].ok and c["E"].ok
    assert rep.overall == NOT_APPLICABLE


def test_trivial_group_violates_D():
    A = Arrangement([Subspace([[1, 0, 0], [0, 1, 0]], 3)], 3)
    rep = check_hypotheses(TheoremInput(A, trivial_group(3), F2, 2))
    assert rep.conditions["D"].status == VIOLATED


def test_condition_A_bounds_and_monotonicity():
    inst = fan_test_space(Ration((1, 1, 1, 1)), 2)
    # codim 2 needs n >= 1; every n >= 2 passes
    for n in range(2, 7):
        rep = check_hypotheses(TheoremInput(inst.arrangement, inst.group, F2, n))
        assert rep.conditions["A"].status == SATISFIED
    deep = Arrangement([Subspace(identity(5)[:4], 5)], 5)
    anti = generate([[[-1 if i == j else 0 for j in range(5)] for i in range(5)]])
    results = [check_hypotheses(TheoremInput(deep, anti, F2, n)).conditions["A"].status for n in range(2, 6)]
    assert results == [VIOLATED, SATISFIED, SATISFIED, SATISFIED]


def test_mixed_codims_need_reduction():
    A = Arrangement([Subspace([[1, 0, 0, 0], [0, 1, 0, 0]], 4), Subspace([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 1, 0]], 4)], 4)
    anti = generate([[[-1 if i == j else 0 for j in range(4)] for i in range(4)]])
    rep = check_hypotheses(TheoremInput(A, anti, F2, 3))
    assert rep.conditions["A"].status == UNKNOWN
    assert rep.overall in (INCONCLUSIVE, NOT_APPLICABLE)
    rep = check_hypotheses(TheoremInput(A, anti, F2, 3, reduce_to_min_codim=True))
    assert rep.conditions["A"].status == SATISFIED
    assert len(rep.reduced_arrangement) == 1


def test_report_is_deterministic():
    inst = shift_orbit(3)
    a = check_hypotheses(TheoremInput(inst.arrangement, inst.group, F3, 2)).to_json()
    b = check_hypotheses(TheoremInput(inst.arrangement, inst.group, F3, 2)).to_json()
    assert a == b


def test_input_validation():
    inst = five_atoms()
    with pytest.raises(BadParam):
        TheoremInput(inst.arrangement, inst.group, F2, 1)


def test_freeness():
    inst = five_atoms()
    assert check_free_on_complement(inst.arrangement, inst.group)
    m = 3
    anti = generate([[[-1 if i == j else 0 for j in range(m)] for i in range(m)]])
    assert check_free_on_complement(Arrangement([Subspace.zero(m)], m), anti)
    assert not check_free_on_complement(Arrangement([], m), anti)
