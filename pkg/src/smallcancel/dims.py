"""Exact evaluator for dimension bounds of graph-of-groups and large quotients.

Everything here is arithmetic over user-supplied dimension annotations:
no classifying space is ever constructed.  Dimensions are tracked as
integer intervals (a point is a degenerate interval, an upper bound has
no floor), and every emitted bound carries a rule identifier plus the
hypotheses it consumed, so reports are auditable line by line.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .words import ParseError, SpecError


@dataclass(frozen=True)
class Interval:
    """[lower, upper] with None = unbounded on that side."""

    lower: Optional[int] = None
    upper: Optional[int] = None

    def __post_init__(self):
        for v in (self.lower, self.upper):
            if v is not None and v < 0:
                raise SpecError("dimensions are nonnegative")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise SpecError(f"empty interval [{self.lower}, {self.upper}]")

    @classmethod
    def point(cls, n: int) -> "Interval":
        return cls(n, n)

    @classmethod
    def at_most(cls, n: int) -> "Interval":
        return cls(None, n)

    @classmethod
    def at_least(cls, n: int) -> "Interval":
        return cls(n, None)

    @classmethod
    def unknown(cls) -> "Interval":
        return cls(None, None)

    @property
    def is_point(self) -> bool:
        return self.lower is not None and self.lower == self.upper

    @property
    def is_unknown(self) -> bool:
        return self.lower is None and self.upper is None

    def effective_lower(self) -> int:
        return 0 if self.lower is None else self.lower

    def meet_upper(self, bound: int) -> "Interval":
        """Tighten the upper end; never narrows below a stated lower bound."""
        if self.lower is not None and bound < self.lower:
            raise SpecError(
                f"bound {bound} would cut below the stated lower bound {self.lower}"
            )
        new_upper = bound if self.upper is None else min(self.upper, bound)
        return Interval(self.lower, new_upper)

    def meet_lower(self, bound: int) -> "Interval":
        if self.upper is not None and bound > self.upper:
            raise SpecError(
                f"lower bound {bound} contradicts the stated upper bound {self.upper}"
            )
        new_lower = bound if self.lower is None else max(self.lower, bound)
        return Interval(new_lower, self.upper)

    def format(self) -> str:
        if self.is_unknown:
            return "unknown"
        if self.is_point:
            return str(self.lower)
        if self.lower is None:
            return f"<= {self.upper}"
        if self.upper is None:
            return f">= {self.lower}"
        return f"[{self.lower}, {self.upper}]"


def max_of(intervals: Iterable[Interval], floor: int) -> Interval:
    """Exact interval image of max(x_1, ..., x_n, floor)."""
    lows = [floor]
    ups = [floor]
    unknown_upper = False
    for iv in intervals:
        lows.append(iv.effective_lower())
        if iv.upper is None:
            unknown_upper = True
        else:
            ups.append(iv.upper)
    lower = max(lows)
    upper = None if unknown_upper else max(ups)
    if upper is not None and upper < lower:
        upper = lower
    return Interval(lower, upper)


FLAG_NAMES = (
    "finitely_generated",
    "one_ended",
    "torsion_free",
    "small_centralizers",
    "acc_finite_subgroups",
    "virtually_free",
    "two_generated",
    "free",
)


@dataclass(frozen=True)
class Flags:
    finitely_generated: Optional[bool] = None
    one_ended: Optional[bool] = None
    torsion_free: Optional[bool] = None
    small_centralizers: Optional[bool] = None
    acc_finite_subgroups: Optional[bool] = None
    virtually_free: Optional[bool] = None
    two_generated: Optional[bool] = None
    free: Optional[bool] = None

    def get(self, name: str) -> Optional[bool]:
        return getattr(self, name)


@dataclass(frozen=True)
class DimensionProfile:
    name: str = "G"
    cd_fin: Interval = Interval.unknown()
    gd_fin: Interval = Interval.unknown()
    cd_vc: Interval = Interval.unknown()
    gd_vc: Interval = Interval.unknown()
    cd_ring: dict = field(default_factory=dict)  # ring tag -> Interval
    flags: Flags = Flags()

    def __post_init__(self):
        for cd, gd, fam in ((self.cd_fin, self.gd_fin, "fin"), (self.cd_vc, self.gd_vc, "vc")):
            if cd.is_point and gd.upper is not None and cd.lower > gd.upper:
                raise SpecError(f"cd_{fam} exceeds gd_{fam}")

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "cd_fin": self.cd_fin.format(),
            "gd_fin": self.gd_fin.format(),
            "cd_vc": self.cd_vc.format(),
            "gd_vc": self.gd_vc.format(),
            "cd_ring": {tag: iv.format() for tag, iv in sorted(self.cd_ring.items())},
            "flags": {n: self.flags.get(n) for n in FLAG_NAMES if self.flags.get(n) is not None},
        }


@dataclass(frozen=True)
class Bound:
    target: str
    relation: str  # "<=", ">=", "=="
    value: int
    rule: str
    hypotheses: tuple[str, ...]

    def format(self) -> str:
        hyp = ", ".join(self.hypotheses) if self.hypotheses else "none"
        return f"{self.target} {self.relation} {self.value}   [{self.rule}; hypotheses: {hyp}]"


@dataclass
class BoundReport:
    bounds: list[Bound] = field(default_factory=list)
    withheld: list[str] = field(default_factory=list)
    profile: Optional[DimensionProfile] = None

    def to_record(self) -> dict:
        return {
            "bounds": [
                {"target": b.target, "relation": b.relation, "value": b.value,
                 "rule": b.rule, "hypotheses": list(b.hypotheses)}
                for b in self.bounds
            ],
            "withheld": list(self.withheld),
            "profile": self.profile.to_record() if self.profile else None,
        }


# -- graph of groups ---------------------------------------------------------------


@dataclass(frozen=True)
class GraphOfGroupsSpec:
    vertices: tuple[DimensionProfile, ...]
    edges_finite: tuple[bool, ...]

    def __post_init__(self):
        if not self.vertices:
            raise SpecError("a graph of groups needs at least one vertex")


def graph_of_groups_bounds(spec: GraphOfGroupsSpec) -> BoundReport:
    """Dimension bounds for splittings over finite edge groups."""
    report = BoundReport()
    if not all(spec.edges_finite):
        report.withheld.append(
            "bounds withheld: an edge group is not finite, and the splitting "
            "bounds need finite edge stabilizers"
        )
        return report
    hyp = ("all edge groups finite",)
    fams = (
        ("gd_fin", [v.gd_fin for v in spec.vertices], 1, "bound:graph-of-groups:gd-fin"),
        ("cd_fin", [v.cd_fin for v in spec.vertices], 1, "bound:graph-of-groups:cd-fin"),
        ("gd_vc", [v.gd_vc for v in spec.vertices], 2, "bound:graph-of-groups:gd-vc"),
        ("cd_vc", [v.cd_vc for v in spec.vertices], 2, "bound:graph-of-groups:cd-vc"),
    )
    for target, ivs, floor, rule in fams:
        if any(iv.upper is None for iv in ivs):
            report.withheld.append(f"{target}: some vertex value is unbounded above")
            continue
        value = max([floor] + [iv.upper for iv in ivs])
        report.bounds.append(Bound(f"{target}(G)", "<=", value, rule, hyp))
    sharp_ok = all(
        v.flags.small_centralizers and v.flags.acc_finite_subgroups for v in spec.vertices
    )
    if sharp_ok:
        hyp2 = hyp + ("all vertex groups have small centralizers",
                      "all vertex groups satisfy acc on finite subgroups")
        for target, ivs, rule in (
            ("gd_vc", [v.gd_fin for v in spec.vertices], "bound:graph-of-groups:gd-vc-from-fin"),
            ("cd_vc", [v.cd_fin for v in spec.vertices], "bound:graph-of-groups:cd-vc-from-fin"),
        ):
            if any(iv.upper is None for iv in ivs):
                report.withheld.append(f"{target} (sharp): some vertex fin value is unbounded above")
                continue
            value = max([2] + [iv.upper for iv in ivs])
            report.bounds.append(Bound(f"{target}(G)", "<=", value, rule, hyp2))
    else:
        report.withheld.append(
            "sharper vc-from-fin bounds withheld: small centralizers / acc flags "
            "are not asserted for every vertex group"
        )
    return report


# -- single profile tightening --------------------------------------------------------


def vcyc_from_fin(p: DimensionProfile) -> tuple[DimensionProfile, BoundReport]:
    """gd_vc <= max(gd_fin, 2) and cd_vc <= max(cd_fin, 2) under the two flags."""
    report = BoundReport()
    if not (p.flags.small_centralizers and p.flags.acc_finite_subgroups):
        report.withheld.append(
            "no-op: needs small_centralizers and acc_finite_subgroups asserted"
        )
        report.profile = p
        return p, report
    hyp = ("small centralizers", "acc on finite subgroups")
    new = p
    for fam, fin_iv, vc_iv in (("gd", p.gd_fin, p.gd_vc), ("cd", p.cd_fin, p.cd_vc)):
        if fin_iv.upper is None:
            report.withheld.append(f"{fam}_vc: {fam}_fin has no upper bound")
            continue
        bound = max(fin_iv.upper, 2)
        tightened = (p.gd_vc if fam == "gd" else p.cd_vc).meet_upper(bound)
        new = replace(new, **{f"{fam}_vc": tightened})
        report.bounds.append(
            Bound(f"{fam}_vc({p.name})", "<=", bound, "bound:vc-from-fin", hyp)
        )
    report.profile = new
    return new, report


# -- small cancellation products ---------------------------------------------------------


@dataclass(frozen=True)
class ProductHypotheses:
    c_finite: bool = False
    relators_finite_c12: bool = False
    not_virtually_free: bool = False

    def missing(self) -> list[str]:
        out = []
        if not self.c_finite:
            out.append("amalgamated subgroup finite")
        if not self.relators_finite_c12:
            out.append("finite symmetrized relator set with metric constant 1/12")
        if not self.not_virtually_free:
            out.append("quotient not virtually free")
        return out


def scp_dimensions(
    pa: DimensionProfile, pb: DimensionProfile, hyp: ProductHypotheses, name: str = "G"
) -> tuple[DimensionProfile, BoundReport]:
    """Dimension profile of the quotient of the product by the relator set."""
    report = BoundReport()
    missing = hyp.missing()
    if missing:
        report.withheld.extend(f"all outputs withheld: missing hypothesis: {m}" for m in missing)
        profile = DimensionProfile(name=name)
        report.profile = profile
        return profile, report
    base_hyp = (
        "amalgamated subgroup finite",
        "finite symmetrized relator set with metric constant 1/12",
        "quotient not virtually free",
    )
    gd_fin = max_of([pa.gd_fin, pb.gd_fin], floor=2)
    cd_fin = max_of([pa.cd_fin, pb.cd_fin], floor=2)
    for target, iv in (("gd_fin", gd_fin), ("cd_fin", cd_fin)):
        if iv.is_point:
            report.bounds.append(
                Bound(f"{target}({name})", "==", iv.lower, "scp:fin-equality", base_hyp)
            )
        else:
            report.withheld.append(f"{target}: factor values not fully decided ({iv.format()})")

    vc_ready = all(
        p.flags.finitely_generated and p.flags.small_centralizers and p.flags.acc_finite_subgroups
        for p in (pa, pb)
    )
    flags = Flags()
    gd_vc = Interval.unknown()
    cd_vc = Interval.unknown()
    if vc_ready:
        vc_hyp = base_hyp + (
            "factors finitely generated",
            "factors have small centralizers",
            "factors satisfy acc on finite subgroups",
        )
        flags = Flags(
            finitely_generated=True,
            small_centralizers=True,
            acc_finite_subgroups=True,
            virtually_free=False,
        )
        report.bounds.append(Bound(f"small_centralizers({name})", "==", 1, "scp:centralizers-propagate", vc_hyp))
        report.bounds.append(Bound(f"acc_finite_subgroups({name})", "==", 1, "scp:acc-propagates", vc_hyp))
        for fam, a_vc, b_vc, fin in (
            ("gd", pa.gd_vc, pb.gd_vc, gd_fin),
            ("cd", pa.cd_vc, pb.cd_vc, cd_fin),
        ):
            lower = max(2, a_vc.effective_lower(), b_vc.effective_lower())
            upper = fin.upper
            iv = Interval(lower, upper)
            if fam == "gd":
                gd_vc = iv
            else:
                cd_vc = iv
            report.bounds.append(Bound(f"{fam}_vc({name})", ">=", lower, "scp:vc-bracket", vc_hyp))
            if upper is not None:
                report.bounds.append(Bound(f"{fam}_vc({name})", "<=", upper, "scp:vc-bracket", vc_hyp))
    else:
        report.withheld.append(
            "vc interval withheld: needs both factors finitely generated with "
            "small centralizers and acc on finite subgroups"
        )
        flags = Flags(virtually_free=False)

    cd_ring = {}
    for tag in sorted(set(pa.cd_ring) & set(pb.cd_ring)):
        iv = max_of([pa.cd_ring[tag], pb.cd_ring[tag]], floor=2)
        cd_ring[tag] = iv
        if iv.is_point:
            report.bounds.append(
                Bound(f"cd_{tag}({name})", "==", iv.lower, "scp:ring-equality", base_hyp)
            )
    for tag in sorted(set(pa.cd_ring) ^ set(pb.cd_ring)):
        report.withheld.append(f"cd_{tag}: annotated on one factor only")

    profile = DimensionProfile(
        name=name, cd_fin=cd_fin, gd_fin=gd_fin, cd_vc=cd_vc, gd_vc=gd_vc,
        cd_ring=cd_ring, flags=flags,
    )
    report.profile = profile
    return profile, report


# -- Eilenberg-Ganea verdicts --------------------------------------------------------------


def eilenberg_ganea_verdict(p: DimensionProfile, family: str) -> str:
    """'true' / 'false' / 'unknown': is (cd, gd) = (2, 3) for the family?"""
    if family == "fin":
        cd, gd = p.cd_fin, p.gd_fin
    elif family == "vc":
        cd, gd = p.cd_vc, p.gd_vc
    else:
        raise SpecError(f"unknown family {family!r} (use fin or vc)")
    if cd.is_point and gd.is_point:
        return "true" if (cd.lower, gd.lower) == (2, 3) else "false"
    # decided impossibility without full points
    if cd.upper is not None and cd.upper < 2:
        return "false"
    if cd.lower is not None and cd.lower > 2:
        return "false"
    if gd.upper is not None and gd.upper < 3:
        return "false"
    if gd.lower is not None and gd.lower > 3:
        return "false"
    return "unknown"


# -- profile files -----------------------------------------------------------------------------


def parse_dim_value(text: str) -> Interval:
    text = text.strip()
    if text == "unknown":
        return Interval.unknown()
    if text.startswith("<="):
        return Interval.at_most(int(text[2:]))
    if text.startswith(">="):
        return Interval.at_least(int(text[2:]))
    if text.startswith("[") and text.endswith("]"):
        lo, hi = text[1:-1].split(",")
        return Interval(int(lo), int(hi))
    try:
        return Interval.point(int(text))
    except ValueError:
        raise ParseError(f"bad dimension value {text!r}") from None


@dataclass(frozen=True)
class ProfileFile:
    groups: dict  # name -> DimensionProfile
    mode: str     # "single" | "product" | "graph"
    product_factors: tuple[str, ...] = ()
    product_hypotheses: ProductHypotheses = ProductHypotheses()
    graph_vertices: tuple[str, ...] = ()
    graph_edges_finite: tuple[bool, ...] = ()


_DIM_KEYS = {"cd_fin", "gd_fin", "cd_vc", "gd_vc"}


def parse_profile(text: str) -> ProfileFile:
    """Key-value profile schema: group.<NAME>.<field> plus product./graph. blocks."""
    from .words import _parse_keyvals

    groups: dict[str, dict] = {}
    product_factors: tuple[str, ...] = ()
    hyp_names: list[str] = []
    graph_vertices: tuple[str, ...] = ()
    graph_edges: list[bool] = []
    for key, val in _parse_keyvals(text):
        parts = key.split(".")
        if parts[0] == "group" and len(parts) >= 3:
            bucket = groups.setdefault(parts[1], {"dims": {}, "rings": {}, "flags": {}})
            fieldname = ".".join(parts[2:])
            if fieldname in _DIM_KEYS:
                bucket["dims"][fieldname] = parse_dim_value(val)
            elif fieldname.startswith("cd_ring."):
                bucket["rings"][fieldname.split(".", 1)[1]] = parse_dim_value(val)
            elif fieldname == "flags":
                for fl in val.split():
                    if fl not in FLAG_NAMES:
                        raise ParseError(f"unknown flag {fl!r}")
                    bucket["flags"][fl] = True
            elif fieldname.startswith("flags."):
                fl = fieldname.split(".", 1)[1]
                if fl not in FLAG_NAMES:
                    raise ParseError(f"unknown flag {fl!r}")
                bucket["flags"][fl] = val.strip().lower() in ("true", "1", "yes")
            else:
                raise ParseError(f"unknown profile key {key!r}")
        elif key == "product.factors":
            product_factors = tuple(val.split())
        elif key == "product.hypotheses":
            hyp_names = val.split()
        elif key == "graph.vertices":
            graph_vertices = tuple(val.split())
        elif key == "graph.edge":
            parts = val.split()
            if len(parts) != 3 or parts[2] not in ("finite", "infinite"):
                raise ParseError(f"graph.edge wants 'U V finite|infinite', got {val!r}")
            graph_edges.append(parts[2] == "finite")
        else:
            raise ParseError(f"unknown profile key {key!r}")

    profiles = {}
    for name, bucket in groups.items():
        profiles[name] = DimensionProfile(
            name=name,
            cd_fin=bucket["dims"].get("cd_fin", Interval.unknown()),
            gd_fin=bucket["dims"].get("gd_fin", Interval.unknown()),
            cd_vc=bucket["dims"].get("cd_vc", Interval.unknown()),
            gd_vc=bucket["dims"].get("gd_vc", Interval.unknown()),
            cd_ring=bucket["rings"],
            flags=Flags(**bucket["flags"]),
        )
    known_hyps = {"c_finite", "relators_finite_c12", "not_virtually_free"}
    for h in hyp_names:
        if h not in known_hyps:
            raise ParseError(f"unknown product hypothesis {h!r}")
    hyp = ProductHypotheses(**{h: True for h in hyp_names})
    if product_factors:
        if len(product_factors) != 2 or any(f not in profiles for f in product_factors):
            raise ParseError("product.factors must name two declared groups")
        return ProfileFile(groups=profiles, mode="product",
                           product_factors=product_factors, product_hypotheses=hyp)
    if graph_vertices:
        if any(v not in profiles for v in graph_vertices):
            raise ParseError("graph.vertices must name declared groups")
        return ProfileFile(groups=profiles, mode="graph",
                           graph_vertices=graph_vertices,
                           graph_edges_finite=tuple(graph_edges))
    if len(profiles) == 1:
        return ProfileFile(groups=profiles, mode="single")
    if profiles:
        return ProfileFile(groups=profiles, mode="flags")
    raise ParseError("profile file declares no groups")
