"""
Picard-three checks: the five-relation family without a fiber-type
contraction is never ch_2-nef, and the closed forms on its test surfaces
agree with the intersection engine.
"""
import logging
from typing import Dict, List, Optional, Tuple

from sympy import Rational

from catalog import (
    BatyrevParams,
    batyrev_case1_cone,
    batyrev_case2_cone,
    batyrev_relation_degrees,
    batyrev_s1_cone,
    build_family,
    grid_parameters,
)
from chern import (
    NOT_NEF,
    batyrev_case1_formula,
    batyrev_case2_formula,
    batyrev_s1_formula,
    chern_value,
    classify,
    format_rational,
    hirzebruch_ch2_formula,
    nefness_obstructions,
    s1_upper_bound,
)
from fan import Cone, Fan, has_fiber_type_relation, is_fano, primitive_relations

from .pool import map_members
from .records import VerificationRecord, compare, crashed, named_relations

logger = logging.getLogger(__name__)

ANCHOR = "Picard three without Fano contraction: ch_2 not nef"


def expected_picard_relations(params: BatyrevParams) -> List[Dict[str, int]]:
    """Linear equivalences from the dual basis of G(Sigma) minus {v1, z1, u1}."""
    p0, p1, p2, p3, p4 = params.p
    relations = [{f"v{i}": 1, "v1": -1} for i in range(2, p0 + 1)]
    relations += [{f"y{i}": 1, "u1": 1, "v1": -1} for i in range(1, p1 + 1)]
    for i, ci in enumerate(params.c, start=2):
        relations.append({k: v for k, v in {f"z{i}": 1, "z1": -1, "v1": ci}.items() if v != 0})
    for i, bi in enumerate(params.b, start=1):
        relations.append({f"t{i}": 1, "z1": -1, "u1": -1, "v1": bi + 1})
    relations += [{f"u{i}": 1, "u1": -1} for i in range(2, p4 + 1)]
    return relations


def _basis_names(params: BatyrevParams) -> List[str]:
    p0, p1, p2, p3, p4 = params.p
    return ([f"v{i}" for i in range(2, p0 + 1)] + [f"y{i}" for i in range(1, p1 + 1)]
            + [f"z{i}" for i in range(2, p2 + 1)] + [f"t{i}" for i in range(1, p3 + 1)]
            + [f"u{i}" for i in range(2, p4 + 1)])


def negative_surface(fan: Fan, params: BatyrevParams) -> Optional[Tuple[Cone, Rational]]:
    """The first of S_1 and the two product surfaces on which ch_2 is negative, if any."""
    for cone in (batyrev_s1_cone(fan, params), batyrev_case1_cone(fan, params), batyrev_case2_cone(fan, params)):
        if cone is None:
            continue
        value = chern_value(fan, 2, cone)
        if value < 0:
            return cone, value
    return None


def ch2_classification(fan: Fan, params: BatyrevParams, full: bool) -> Tuple[str, str]:
    """
    Classification of ch_2 with a detail string.

    Without a full sweep a negative named surface settles not_nef; otherwise
    every codimension-two cone is evaluated.
    """
    if not full:
        found = negative_surface(fan, params)
        if found is not None:
            cone, value = found
            return NOT_NEF, f"{format_rational(value)} on {fan.ray_names(cone)}"
    report = classify(fan, 2)
    return report.classification, f"min {format_rational(report.min_value)} on {fan.ray_names(report.witness)}"


def member_records(params: BatyrevParams, full: bool = True) -> List[VerificationRecord]:
    tag = BatyrevChecks.tag(params)
    fan = build_family("batyrev", params)
    degrees = batyrev_relation_degrees(params)
    records = [
        compare(f"{tag}.picard_number", ANCHOR, 3, fan.picard_number),
        compare(f"{tag}.relation_degrees", ANCHOR, sorted(degrees),
                sorted(relation.degree for relation in primitive_relations(fan))),
        compare(f"{tag}.fano", ANCHOR, all(deg > 0 for deg in degrees), is_fano(fan)),
        compare(f"{tag}.fiber_type_relation", ANCHOR, True, has_fiber_type_relation(fan)),
        compare(f"{tag}.picard_relations", ANCHOR, expected_picard_relations(params),
                named_relations(fan, _basis_names(params))),
    ]

    s1 = batyrev_s1_cone(fan, params)
    doubled_s1 = 2 * chern_value(fan, 2, s1)
    records.append(compare(f"{tag}.s1", ANCHOR, batyrev_s1_formula(params, doubled=True), doubled_s1))
    records.append(compare(f"{tag}.s1_upper_bound", ANCHOR, True,
                           doubled_s1 <= s1_upper_bound(params), f"value {doubled_s1}"))

    case1 = batyrev_case1_cone(fan, params)
    if case1 is not None:
        value = 2 * chern_value(fan, 2, case1)
        records.append(compare(f"{tag}.case1", ANCHOR, batyrev_case1_formula(params, doubled=True), value))
        records.append(compare(f"{tag}.case1_surface_formula", ANCHOR, value,
                               2 * hirzebruch_ch2_formula(fan, case1)))
    case2 = batyrev_case2_cone(fan, params)
    if case2 is not None:
        value = 2 * chern_value(fan, 2, case2)
        records.append(compare(f"{tag}.case2", ANCHOR, batyrev_case2_formula(params, doubled=True), value))
        records.append(compare(f"{tag}.case2_surface_formula", ANCHOR, value,
                               2 * hirzebruch_ch2_formula(fan, case2)))

    classification, details = ch2_classification(fan, params, full)
    records.append(compare(f"{tag}.ch2", ANCHOR, NOT_NEF, classification, details))
    records.append(compare(f"{tag}.obstructed", ANCHOR, True, len(nefness_obstructions(params)) > 0))
    return records


def check_member(params: BatyrevParams, full: bool = True) -> List[VerificationRecord]:
    """member_records for one grid member, reduced to a failed record if it raises."""
    try:
        return member_records(params, full)
    except Exception as e:
        return [crashed(BatyrevChecks.tag(params), ANCHOR, e)]


class BatyrevChecks:
    """
    Checks over the Picard-three grid with p_i <= max_p, p2 <= max_p2, b_i, c_i <= max_bc.

    Members whose b_i, c_i are all <= full_bc get a full ch_2 sweep; the rest
    are shown not nef through a negative named surface where one exists.
    """

    def __init__(self, max_bc: int = 3, max_p: int = 2, max_p2: int = 3, workers: int = 1, full_bc: int = 1):
        self.bounds = {"max_p": max_p, "max_p2": max_p2, "max_bc": max_bc}
        self.workers = max(1, workers)
        self.full_bc = full_bc

    def run(self) -> List[VerificationRecord]:
        jobs = [(params, self.full_sweep(params)) for params in grid_parameters("batyrev", self.bounds)]
        records = map_members(check_member, jobs, self.workers)
        logger.info(f"Picard three: {len(jobs)} fans, {len(records)} records")
        return records

    def full_sweep(self, params: BatyrevParams) -> bool:
        return max(params.b + params.c, default=0) <= self.full_bc

    @staticmethod
    def tag(params: BatyrevParams) -> str:
        return "batyrev.p{}.b{}.c{}".format(*("".join(map(str, x)) for x in (params.p, params.b, params.c)))

    def check(self, params: BatyrevParams) -> List[VerificationRecord]:
        return member_records(params, self.full_sweep(params))
