import pytest

from smallcancel.dims import (
    Bound,
    DimensionProfile,
    Flags,
    GraphOfGroupsSpec,
    Interval,
    ProductHypotheses,
    eilenberg_ganea_verdict,
    graph_of_groups_bounds,
    max_of,
    parse_dim_value,
    parse_profile,
    scp_dimensions,
    vcyc_from_fin,
)
from smallcancel.words import ParseError, SpecError


# -- intervals -------------------------------------------------------------------


def test_interval_basics():
    assert Interval.point(2).is_point
    assert Interval.at_most(3).format() == "<= 3"
    assert Interval(2, 3).format() == "[2, 3]"
    assert Interval.unknown().is_unknown
    with pytest.raises(SpecError):
        Interval(3, 2)
    with pytest.raises(SpecError):
        Interval(-1, 2)


def test_interval_never_narrows_below_lower():
    iv = Interval(3, 5)
    assert iv.meet_upper(4) == Interval(3, 4)
    with pytest.raises(SpecError):
        iv.meet_upper(2)


def test_max_of_intervals():
    assert max_of([Interval.point(3), Interval.point(2)], floor=2) == Interval.point(3)
    assert max_of([Interval.at_most(3), Interval.point(3)], floor=2) == Interval.point(3)
    assert max_of([Interval.at_most(2)], floor=2) == Interval.point(2)
    assert max_of([Interval.unknown()], floor=2) == Interval(2, None)


def test_parse_dim_value():
    assert parse_dim_value("2") == Interval.point(2)
    assert parse_dim_value("<= 3".replace(" ", "")) == Interval.at_most(3)
    assert parse_dim_value("[2, 3]") == Interval(2, 3)
    assert parse_dim_value("unknown").is_unknown
    with pytest.raises(ParseError):
        parse_dim_value("many")


# -- graph of groups ----------------------------------------------------------------


def hyp_flags():
    return Flags(small_centralizers=True, acc_finite_subgroups=True)


def test_graph_of_groups_max_formula():
    spec = GraphOfGroupsSpec(
        vertices=(
            DimensionProfile(name="U", gd_fin=Interval.point(3), cd_fin=Interval.point(2)),
            DimensionProfile(name="V", gd_fin=Interval.point(2), cd_fin=Interval.point(2)),
        ),
        edges_finite=(True,),
    )
    report = graph_of_groups_bounds(spec)
    by_target = {(b.target, b.relation): b.value for b in report.bounds}
    assert by_target[("gd_fin(G)", "<=")] == 3
    assert by_target[("cd_fin(G)", "<=")] == 2


def test_graph_of_groups_finite_vertices_floor():
    spec = GraphOfGroupsSpec(
        vertices=(
            DimensionProfile(name="U", gd_fin=Interval.point(0), cd_fin=Interval.point(0),
                             gd_vc=Interval.point(0), cd_vc=Interval.point(0)),
        ),
        edges_finite=(True,),
    )
    report = graph_of_groups_bounds(spec)
    by_target = {(b.target, b.relation): b.value for b in report.bounds}
    assert by_target[("gd_fin(G)", "<=")] == 1
    assert by_target[("gd_vc(G)", "<=")] == 2


def test_graph_of_groups_sharper_bounds_need_flags():
    base = DimensionProfile(name="U", gd_fin=Interval.point(1), cd_fin=Interval.point(1))
    spec = GraphOfGroupsSpec(vertices=(base,), edges_finite=(True,))
    report = graph_of_groups_bounds(spec)
    assert not any(b.rule.endswith("vc-from-fin") for b in report.bounds)
    assert any("withheld" in w or "flags" in w for w in report.withheld)

    flagged = DimensionProfile(name="U", gd_fin=Interval.point(1), cd_fin=Interval.point(1),
                               flags=hyp_flags())
    report2 = graph_of_groups_bounds(GraphOfGroupsSpec(vertices=(flagged,), edges_finite=(True,)))
    sharp = [b for b in report2.bounds if b.rule.endswith("vc-from-fin")]
    assert {b.value for b in sharp} == {2}


def test_graph_of_groups_infinite_edge_withholds():
    spec = GraphOfGroupsSpec(
        vertices=(DimensionProfile(name="U", gd_fin=Interval.point(1)),),
        edges_finite=(False,),
    )
    report = graph_of_groups_bounds(spec)
    assert not report.bounds
    assert any("not finite" in w for w in report.withheld)


def test_every_bound_carries_rule_and_hypotheses():
    spec = GraphOfGroupsSpec(
        vertices=(DimensionProfile(name="U", gd_fin=Interval.point(3), cd_fin=Interval.point(2),
                                   gd_vc=Interval.point(3), cd_vc=Interval.point(2),
                                   flags=hyp_flags()),),
        edges_finite=(True,),
    )
    for b in graph_of_groups_bounds(spec).bounds:
        assert b.rule.startswith("bound:")
        assert b.hypotheses


# -- vc from fin -----------------------------------------------------------------------


def test_vcyc_from_fin_tightens():
    p = DimensionProfile(name="G", gd_fin=Interval.point(3), cd_fin=Interval.point(2),
                         flags=hyp_flags())
    new, report = vcyc_from_fin(p)
    assert new.gd_vc.upper == 3
    assert new.cd_vc.upper == 2
    assert {b.value for b in report.bounds} == {3, 2}


def test_vcyc_from_fin_floor_two():
    p = DimensionProfile(name="G", gd_fin=Interval.point(1), cd_fin=Interval.point(1),
                         flags=hyp_flags())
    new, _ = vcyc_from_fin(p)
    assert new.gd_vc.upper == 2
    assert new.cd_vc.upper == 2


def test_vcyc_from_fin_noop_without_flags():
    p = DimensionProfile(name="G", gd_fin=Interval.point(3))
    new, report = vcyc_from_fin(p)
    assert new == p
    assert report.withheld


# -- small cancellation products --------------------------------------------------------


FULL_HYP = ProductHypotheses(c_finite=True, relators_finite_c12=True, not_virtually_free=True)


def vc_flags():
    return Flags(finitely_generated=True, small_centralizers=True, acc_finite_subgroups=True)


def test_scp_fin_equalities():
    pa = DimensionProfile(name="A", gd_fin=Interval.point(3), cd_fin=Interval.point(2))
    pb = DimensionProfile(name="B", gd_fin=Interval.point(2), cd_fin=Interval.point(2))
    g, report = scp_dimensions(pa, pb, FULL_HYP)
    assert g.gd_fin == Interval.point(3)
    assert g.cd_fin == Interval.point(2)
    eq = {(b.target, b.value) for b in report.bounds if b.relation == "=="}
    assert ("gd_fin(G)", 3) in eq and ("cd_fin(G)", 2) in eq


def test_scp_floor_two():
    pa = DimensionProfile(name="A", gd_fin=Interval.point(2), cd_fin=Interval.point(2))
    pb = DimensionProfile(name="B", gd_fin=Interval.point(1), cd_fin=Interval.point(1))
    g, _ = scp_dimensions(pa, pb, FULL_HYP)
    assert g.gd_fin == Interval.point(2)
    assert g.cd_fin == Interval.point(2)


def test_scp_vc_bracket():
    pa = DimensionProfile(name="A", gd_fin=Interval.point(3), cd_fin=Interval.point(2),
                          gd_vc=Interval.at_most(3), cd_vc=Interval.at_most(2), flags=vc_flags())
    pb = DimensionProfile(name="B", gd_fin=Interval.point(3), cd_fin=Interval.point(2),
                          gd_vc=Interval.at_most(3), cd_vc=Interval.at_most(2), flags=vc_flags())
    g, _ = scp_dimensions(pa, pb, FULL_HYP)
    assert g.gd_vc == Interval(2, 3)
    assert g.cd_vc == Interval(2, 2)
    assert g.flags.small_centralizers is True
    assert g.flags.acc_finite_subgroups is True


def test_scp_ring_dimensions():
    pa = DimensionProfile(name="A", cd_ring={"Q": Interval.point(2), "Z": Interval.point(3)})
    pb = DimensionProfile(name="B", cd_ring={"Q": Interval.at_most(2), "Z": Interval.at_most(3)})
    g, report = scp_dimensions(pa, pb, FULL_HYP)
    assert g.cd_ring["Q"] == Interval.point(2)
    assert g.cd_ring["Z"] == Interval.point(3)
    eq = {(b.target, b.value) for b in report.bounds if b.relation == "=="}
    assert ("cd_Q(G)", 2) in eq and ("cd_Z(G)", 3) in eq


def test_scp_missing_hypothesis_withholds():
    pa = DimensionProfile(name="A", gd_fin=Interval.point(3))
    pb = DimensionProfile(name="B", gd_fin=Interval.point(2))
    g, report = scp_dimensions(pa, pb, ProductHypotheses(c_finite=True))
    assert g.gd_fin.is_unknown
    assert not report.bounds
    assert report.withheld


def test_scp_monotone():
    def run(a_gd):
        pa = DimensionProfile(name="A", gd_fin=Interval.point(a_gd), cd_fin=Interval.point(2))
        pb = DimensionProfile(name="B", gd_fin=Interval.point(2), cd_fin=Interval.point(2))
        return scp_dimensions(pa, pb, FULL_HYP)[0].gd_fin.lower

    values = [run(a) for a in (2, 3, 4, 5)]
    assert values == sorted(values)


# -- Eilenberg-Ganea ------------------------------------------------------------------------


def test_eg_verdicts():
    p = DimensionProfile(name="G", cd_fin=Interval.point(2), gd_fin=Interval.point(3))
    assert eilenberg_ganea_verdict(p, "fin") == "true"
    q = DimensionProfile(name="G", cd_fin=Interval.point(2), gd_fin=Interval.point(2))
    assert eilenberg_ganea_verdict(q, "fin") == "false"
    r = DimensionProfile(name="G", cd_vc=Interval.point(2), gd_vc=Interval(2, 3))
    assert eilenberg_ganea_verdict(r, "vc") == "unknown"
    with pytest.raises(SpecError):
        eilenberg_ganea_verdict(p, "everything")


def test_eg_round_trip_through_scp():
    # (2,3) x (<=2, <=2) quotient patterns keep the fin verdict
    pa = DimensionProfile(name="A", cd_fin=Interval.point(2), gd_fin=Interval.point(3))
    pb = DimensionProfile(name="B", cd_fin=Interval.point(2), gd_fin=Interval.at_most(2))
    g, _ = scp_dimensions(pa, pb, FULL_HYP)
    assert eilenberg_ganea_verdict(g, "fin") == "true"


# -- profile files -----------------------------------------------------------------------------


PRODUCT_PROFILE = """
group.A.cd_fin = 2
group.A.gd_fin = 3
group.A.cd_vc = <=2
group.A.gd_vc = <=3
group.A.cd_ring.Q = 2
group.A.cd_ring.Z = 3
group.A.flags = finitely_generated small_centralizers acc_finite_subgroups one_ended
group.B.cd_fin = 2
group.B.gd_fin = 2
group.B.cd_vc = <=2
group.B.gd_vc = <=2
group.B.cd_ring.Q = <=2
group.B.cd_ring.Z = <=3
group.B.flags = finitely_generated small_centralizers acc_finite_subgroups one_ended
group.B.flags.free = false
product.factors = A B
product.hypotheses = c_finite relators_finite_c12 not_virtually_free
"""


def test_parse_product_profile():
    pf = parse_profile(PRODUCT_PROFILE)
    assert pf.mode == "product"
    assert pf.product_factors == ("A", "B")
    assert pf.groups["A"].cd_fin == Interval.point(2)
    assert pf.groups["B"].flags.free is False
    assert pf.product_hypotheses == FULL_HYP
    g, _ = scp_dimensions(pf.groups["A"], pf.groups["B"], pf.product_hypotheses)
    assert eilenberg_ganea_verdict(g, "fin") == "true"


def test_parse_graph_profile():
    text = """
group.U.gd_fin = 3
group.U.cd_fin = 2
graph.vertices = U
graph.edge = U U finite
"""
    pf = parse_profile(text)
    assert pf.mode == "graph"
    report = graph_of_groups_bounds(
        GraphOfGroupsSpec(
            vertices=tuple(pf.groups[v] for v in pf.graph_vertices),
            edges_finite=pf.graph_edges_finite,
        )
    )
    assert any(b.target == "gd_fin(G)" and b.value == 3 for b in report.bounds)


def test_parse_profile_errors():
    with pytest.raises(ParseError):
        parse_profile("group.A.width = 3\n")
    with pytest.raises(ParseError):
        parse_profile("group.A.flags = sparkly\n")
    with pytest.raises(ParseError):
        parse_profile("# nothing declared\n")
    # several groups without a product/graph block: bare flag annotations
    assert parse_profile("group.A.cd_fin = 2\ngroup.B.cd_fin = 2\n").mode == "flags"
