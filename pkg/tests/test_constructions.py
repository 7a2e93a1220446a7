import json
import os
from fractions import Fraction

import jsonschema
import pytest

from conftest import GRID
from mvote.constructions import (
    CONSTRUCTION_NAMES,
    ConstructionError,
    catalog_json,
    construct,
    list_constructions,
    load_schema,
    thm2_mirror_graph,
    write_instance,
)
from mvote.core import parse_election, plurality_scores, veto_scores
from mvote.matching import (
    build_integral_domination_graph,
    in_matching_uncovered_set,
    perfect_matching,
)
from mvote.metric import consistent_with, from_weighted_graph, is_alpha_decisive, parse_graph, social_cost
from mvote.rules import condorcet_winner, plurality_matching

# (name, extra params) pairs covering small m/k for the self-check grid
GRID_PARAMS = [
    ("thm1-tight", {"m": 3}),
    ("thm1-tight", {"m": 5}),
    ("thm2-lower", {"m": 2}),
    ("thm2-lower", {"m": 4}),
    ("thm2-lower", {"m": 5}),
    ("thm2-lower", {"m": 6}),
    ("thm6-rand", {"m": 4}),
    ("thm6-rand", {"m": 3}),
    ("prop2-muc", {}),
    ("prop2-muc", {"m": 6}),
    ("prop3-condorcet", {"k": 1}),
    ("prop3-condorcet", {"k": 3}),
    ("thm5-plurality", {"m": 2}),
    ("thm5-plurality", {"m": 4}),
    ("thm7-mix", {"m": 3, "k": 1}),
    ("thm7-mix", {"m": 5, "k": 4}),
    ("appC-ties", {"k": 1}),
    ("appC-ties", {"k": 4, "m": 5}),
]


@pytest.mark.parametrize("alpha", GRID)
@pytest.mark.parametrize("name,params", GRID_PARAMS)
def test_bundle_self_verifies(name, params, alpha):
    inst = construct(name, alpha=alpha, **params)
    for gname in inst.graphs:
        d = inst.metric(gname)
        assert consistent_with(d, inst.election), gname
        assert is_alpha_decisive(d, inst.election, alpha), gname
    for fact in inst.facts:
        got = fact.recompute(inst)
        if fact.kind == "asymptotic":
            assert got is None
        else:
            assert got == fact.value, fact.name


@pytest.mark.parametrize("alpha", GRID)
@pytest.mark.parametrize("m", [2, 4, 6])
def test_thm2_mirror_transposes_costs(m, alpha):
    inst = construct("thm2-lower", alpha=alpha, m=m)
    primary = inst.metric()
    mirror = from_weighted_graph(thm2_mirror_graph({"alpha": alpha, "m": m}))
    half = m // 2
    assert consistent_with(mirror, inst.election)
    assert is_alpha_decisive(mirror, inst.election, alpha)
    for k in range(half):
        assert social_cost(mirror, half + k) == social_cost(primary, k)
        assert social_cost(mirror, k) == social_cost(primary, half + k)


def test_thm1_facts_at_half():
    inst = construct("thm1-tight", alpha=Fraction(1, 2))
    assert inst.fact("SC(b)").value == Fraction(5, 2)
    assert inst.fact("SC(c)").value == 1


def test_thm5_lottery_fact():
    inst = construct("thm5-plurality", alpha=1, m=3)
    fact = inst.fact("lottery ratio with Pr[c*]=1/m")
    assert fact.value == Fraction(7, 3) == fact.recompute(inst)
    assert plurality_scores(inst.election) == (1, 1, 1)


def test_thm2_ratio_fact():
    inst = construct("thm2-lower", alpha=Fraction(1, 2), m=4)
    assert inst.fact("ratio SC(a_1)/SC(b_1)").value == Fraction(9, 4)


def test_appb_shape():
    inst = construct("appB-condorcet")
    assert (inst.election.n, inst.election.m) == (7, 4)
    assert condorcet_winner(inst.election) == 0
    assert plurality_scores(inst.election)[0] == 0 < veto_scores(inst.election)[0]
    assert not inst.graphs and not inst.facts


@pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1)])
def test_appc_unique_matchable(alpha):
    inst = construct("appC-ties", alpha=alpha, k=1)
    assert inst.election.n == 4
    assert plurality_matching(inst.election).matchable == (1,)


def test_prop2_matching_claims():
    e = construct("prop2-muc").election
    assert in_matching_uncovered_set(e, 0)
    assert perfect_matching(build_integral_domination_graph(e, 0)) is None
    assert perfect_matching(build_integral_domination_graph(e, 2)) is not None
    assert perfect_matching(build_integral_domination_graph(e, 3)) is not None


@pytest.mark.parametrize("k", [1, 2, 5])
def test_prop3_condorcet(k):
    assert condorcet_winner(construct("prop3-condorcet", k=k).election) == 0


def test_catalog():
    cat = list_constructions()
    assert len(cat) == 9
    assert [c["name"] for c in cat] == list(CONSTRUCTION_NAMES)
    jsonschema.validate(json.loads(catalog_json()), load_schema("catalog.schema.json"))
    for entry in cat:
        construct(entry["name"])


def test_parameter_errors():
    with pytest.raises(ConstructionError):
        construct("thm9")
    with pytest.raises(ConstructionError):
        construct("appB-condorcet", alpha=1)
    with pytest.raises(ConstructionError):
        construct("thm1-tight", m=2)
    with pytest.raises(ConstructionError):
        construct("thm1-tight", alpha=2)
    with pytest.raises(ConstructionError):
        construct("prop3-condorcet", k=0)


def test_write_instance_is_idempotent(tmp_path):
    inst = construct("thm6-rand", alpha=Fraction(1, 4), m=4)
    paths = write_instance(inst, str(tmp_path / "x"))
    names = sorted(os.path.basename(p) for p in paths)
    assert names == ["election.elec", "facts.json", "mirror.graph", "primary.graph"]
    first = {p: open(p).read() for p in paths}
    write_instance(inst, str(tmp_path / "x"))
    assert first == {p: open(p).read() for p in paths}
    assert sorted(os.listdir(tmp_path / "x")) == names
    facts = json.loads(first[str(tmp_path / "x" / "facts.json")])
    jsonschema.validate(facts, load_schema("facts.schema.json"))
    assert parse_election(first[str(tmp_path / "x" / "election.elec")]) == inst.election
    g = parse_graph(first[str(tmp_path / "x" / "primary.graph")])
    assert from_weighted_graph(g) == inst.metric()


def test_thm2_bundle_has_three_files(tmp_path):
    paths = write_instance(construct("thm2-lower", m=4, alpha=Fraction(1, 2)), str(tmp_path))
    assert len(paths) == 3
