import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from crncompose import (
    conservation_vector,
    deficiency,
    linkage_classes,
    parse_network,
    reduce_mscrc,
    reversibility_flags,
    stoichiometric_matrix,
    structural_report,
)
from crncompose.core import complexes
from crncompose.structure import UndeterminedError, strong_components

from .strategies import networks


def _named_classes(crn):
    cx = complexes(crn)
    return [sorted(cx[i].format(crn.names) for i in cls) for cls in linkage_classes(crn)]


def test_linkage_classes(example1, example2, adder):
    assert len(linkage_classes(example1)) == 1
    assert _named_classes(example2.crn) == [["2 X", "X"], ["2 Y", "X + Y"], ["0", "Y"]]
    classes = _named_classes(adder.crn)
    assert len(classes) == 5
    assert ["0", "Y1", "Y2"] in classes


def test_reversibility(example1, normalizer):
    assert reversibility_flags(example1) == {"reversible": True, "weakly_reversible": True}
    assert reversibility_flags(parse_network("A -> B ; k=1")) == {"reversible": False, "weakly_reversible": False}
    assert reversibility_flags(normalizer.crn) == {"reversible": False, "weakly_reversible": False}
    reduced = reduce_mscrc(normalizer).base
    assert reversibility_flags(reduced) == {"reversible": True, "weakly_reversible": True}


def test_weakly_but_not_reversible():
    cycle = parse_network("A -> B ; k=1\nB -> C ; k=1\nC -> A ; k=1")
    assert reversibility_flags(cycle) == {"reversible": False, "weakly_reversible": True}


def test_deficiency(example1, example2, normalizer):
    assert deficiency(example1) == 0
    assert deficiency(parse_network("A -> B ; k=1")) == 0
    assert deficiency(example2.crn) == 6 - 3 - 2
    assert deficiency(normalizer.crn) == 4 - 2 - 1


def test_conservation_vectors(example2, normalizer):
    assert conservation_vector(reduce_mscrc(normalizer).base) == [1, 1]
    assert conservation_vector(parse_network("A -> B ; k=1")) == [1, 1]
    assert conservation_vector(example2.crn) is None


def test_conservation_vector_nontrivial_weights():
    crn = parse_network("2 A <=> B ; k=1,1\nB + C -> D ; k=1")
    v = conservation_vector(crn)
    # 2A <-> B forces v_B = 2 v_A; B + C -> D forces v_D = v_B + v_C
    assert v is not None and min(v) > 0
    assert v[1] == 2 * v[0] and v[3] == v[1] + v[2]


def test_conservation_vector_absent_when_only_semipositive():
    # 0 -> A kills any law involving A; B <-> C alone is conserved
    crn = parse_network("0 -> A ; k=1\nB <=> C ; k=1,1")
    assert conservation_vector(crn) is None


def test_conservation_lp_failure_is_undetermined(monkeypatch):
    import crncompose.structure as structure

    class Failed:
        status, success, message = 4, False, "numerical difficulties"

    monkeypatch.setattr(structure, "linprog", lambda *a, **k: Failed())
    with pytest.raises(UndeterminedError):
        conservation_vector(parse_network("A -> B ; k=1"))


def test_structural_report_example1(example1):
    r = structural_report(example1)
    assert (r.n_complexes, r.n_linkage_classes, r.stoich_rank, r.deficiency) == (2, 1, 1, 0)
    assert r.reversible and r.weakly_reversible
    assert r.conservation_vector == [1, 1]


def test_structural_report_adder(adder):
    r = structural_report(adder.crn)
    assert (r.n_complexes, r.n_linkage_classes, r.stoich_rank, r.deficiency) == (11, 5, 2, 4)
    assert not r.weakly_reversible
    assert r.conservation_vector is None


def test_report_json_fields(example1):
    d = json.loads(structural_report(example1).to_json())
    for key in (
        "n_complexes",
        "linkage_classes",
        "n_linkage_classes",
        "stoich_rank",
        "deficiency",
        "weakly_reversible",
        "reversible",
        "conservation_vector",
    ):
        assert key in d
    assert d["conservation_vector"] == [{"num": 1, "den": 1}, {"num": 1, "den": 1}]


@settings(max_examples=200, deadline=None)
@given(networks())
def test_structural_invariants(crn):
    r = structural_report(crn)
    assert r.deficiency >= 0
    assert r.deficiency == r.n_complexes - r.n_linkage_classes - r.stoich_rank
    if r.reversible:
        assert r.weakly_reversible
    if r.conservation_vector is not None:
        v = r.conservation_vector
        assert min(v) > 0
        gamma = stoichiometric_matrix(crn)
        for j in range(gamma.shape[1]):
            assert sum(Fraction(v[i]) * int(gamma[i, j]) for i in range(len(v))) == 0


@settings(max_examples=100, deadline=None)
@given(networks())
def test_weak_reversibility_via_edge_scc(crn):
    cx = complexes(crn)
    index = {c: i for i, c in enumerate(cx)}
    scc_of = {}
    for k, comp in enumerate(strong_components(crn)):
        for i in comp:
            scc_of[i] = k
    every_edge_inside = all(scc_of[index[r.reactant]] == scc_of[index[r.product]] for r in crn.reactions)
    assert reversibility_flags(crn)["weakly_reversible"] == every_edge_inside
