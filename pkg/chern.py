"""
Chern Character Positivity

Evaluates ch_k(X) = (1/k!)(D_1^k + ... + D_n^k) against invariant subvarieties
V(tau), classifies ch_k as positive, nef or neither, and carries the
closed-form values used to cross-check the engine: the Hirzebruch-surface
formula and the Picard-three family formulas.
"""
import logging
from dataclasses import dataclass
from math import factorial
from typing import Any, Dict, List, Tuple

from sympy import Rational

from catalog import BatyrevParams
from errors import ConsistencyError, DimensionError, ParameterError, SurfaceTypeError
from fan import Cone, Fan, is_fano, is_weak_fano, wall_relation
from intersect import get_engine, resolve_cone

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEF_NOT_POSITIVE = "nef_not_positive"
NOT_NEF = "not_nef"

# Escape conditions a ch_2-nef Picard-three fan would have to meet
S1_NONNEGATIVE = "b1 >= 1 and p2 > p3"
CASE1_ABSENT = "p3 = 1"
CASE2_NONNEGATIVE = "p2 = 2 and c2 - 2(b1+1) >= 0"
S1_REDUCED_NONNEGATIVE = "b1 >= 2c2 + p1 + p4 + 1"


@dataclass(frozen=True)
class ChernValue:
    k: int
    cone: Cone
    value: Rational


@dataclass
class PositivityReport:
    k: int
    values: List[ChernValue]
    min_value: Rational
    witness: Cone
    classification: str

    @property
    def is_positive(self) -> bool:
        return self.classification == POSITIVE

    @property
    def is_nef(self) -> bool:
        return self.classification != NOT_NEF


@dataclass(frozen=True)
class HirzebruchWallData:
    """
    Link data of a codimension-two cone whose surface is F_alpha.

    w1 + w3 + sum(a_i x_i) = 0 and w2 + w4 - alpha w1 + sum(e_i x_i) = 0,
    with a and e keyed by the rays x_i of tau.
    """
    tau: Cone
    w: Tuple[int, int, int, int]
    alpha: int
    a: Tuple[Tuple[int, int], ...]
    e: Tuple[Tuple[int, int], ...]

    def value(self) -> Rational:
        a = dict(self.a)
        e = dict(self.e)
        squares = sum(v * v for v in a.values())
        cross = sum(a[x] * e.get(x, 0) for x in a)
        return Rational(self.alpha * (2 + squares) + 2 * (-self.alpha + cross), 2)


def _check_k(fan: Fan, k: int) -> None:
    if not 1 <= k <= fan.rank:
        raise DimensionError(f"k must lie in 1..{fan.rank}, got {k}")


def chern_terms(fan: Fan, k: int, tau) -> Dict[int, int]:
    """Per-ray values (D_x^k . V(tau))."""
    _check_k(fan, k)
    tau = resolve_cone(fan, tau)
    if tau.dim != fan.rank - k:
        raise DimensionError(f"ch_{k} pairs with cones of dimension {fan.rank - k}, got {tau.dim}")
    engine = get_engine(fan)
    return {ray.id: engine.monomial([ray.id] * k, tau) for ray in fan.rays}


def power_sum(fan: Fan, k: int, tau) -> int:
    """(D_1^k + ... + D_n^k) . V(tau), i.e. k! times the ch_k value."""
    return int(sum(chern_terms(fan, k, tau).values()))


def chern_value(fan: Fan, k: int, tau) -> Rational:
    """(ch_k(X) . V(tau)), summed over the common denominator k! and reduced once."""
    return Rational(power_sum(fan, k, tau), factorial(k))


def _classification(values: List[ChernValue]) -> str:
    if all(v.value > 0 for v in values):
        return POSITIVE
    if all(v.value >= 0 for v in values):
        return NEF_NOT_POSITIVE
    return NOT_NEF


def classify(fan: Fan, k: int) -> PositivityReport:
    """
    Positivity of ch_k against every invariant subvariety of dimension k.

    Args:
        fan: validated complete fan
        k: degree, 1 <= k <= rank

    Returns:
        PositivityReport whose witness is the first cone (by ray indices)
        attaining the minimum value
    """
    _check_k(fan, k)
    values = [ChernValue(k, cone, chern_value(fan, k, cone)) for cone in fan.cones_of_dim(fan.rank - k)]
    witness = min(values, key=lambda v: v.value)
    report = PositivityReport(k, values, witness.value, witness.cone, _classification(values))
    logger.debug(f"ch_{k}: {report.classification} over {len(values)} cones, minimum {report.min_value} "
                 f"on {fan.ray_names(report.witness)}")
    return report


def ch1_report(fan: Fan) -> PositivityReport:
    """ch_1 against all wall curves; must agree with the Fano and weak Fano tests."""
    report = classify(fan, 1)
    fano = is_fano(fan)
    weak = is_weak_fano(fan)
    if report.is_positive != fano or report.is_nef != weak:
        raise ConsistencyError(f"ch_1 is {report.classification} but is_fano={fano}, is_weak_fano={weak}")
    return report


def _link_cycle(fan: Fan, tau: Cone) -> List[int]:
    owners = fan.maximal_cones_containing(tau)
    if len(owners) != 4:
        raise SurfaceTypeError(f"Cone {fan.ray_names(tau)} lies in {len(owners)} maximal cones, expected 4")
    neighbours: Dict[int, List[int]] = {}
    for index in owners:
        pair = [x for x in fan.maximal_cones[index].ray_ids if x not in tau]
        neighbours.setdefault(pair[0], []).append(pair[1])
        neighbours.setdefault(pair[1], []).append(pair[0])
    if len(neighbours) != 4 or any(len(n) != 2 for n in neighbours.values()):
        raise SurfaceTypeError(f"Link of {fan.ray_names(tau)} is not a 4-cycle")
    start = min(neighbours)
    cycle = [start, min(neighbours[start])]
    while len(cycle) < 4:
        current, previous = cycle[-1], cycle[-2]
        cycle.append(next(n for n in neighbours[current] if n != previous))
    return cycle


def hirzebruch_wall_data(fan: Fan, tau) -> HirzebruchWallData:
    """
    Orient the link w1 w2 w3 w4 of tau so that the relations take the
    Hirzebruch shape with alpha >= 0.
    """
    tau = resolve_cone(fan, tau)
    if tau.dim != fan.rank - 2:
        raise DimensionError(f"Expected a cone of dimension {fan.rank - 2}, got {tau.dim}")
    cycle = _link_cycle(fan, tau)

    def relation_at(ray_id: int) -> Dict[int, int]:
        return wall_relation(fan, tau.with_ray(ray_id)).coefficient_map()

    candidates = []
    for shift in (0, 1):
        p, q, p2, q2 = cycle[shift], cycle[shift + 1], cycle[(shift + 2) % 4], cycle[(shift + 3) % 4]
        # p, p2 opposite; the walls at q and q2 must have no term in q, q2
        if relation_at(q)[q] == 0 and relation_at(q2)[q2] == 0:
            a = tuple((x, relation_at(q)[x]) for x in tau.ray_ids)
            for w1, w3 in ((p, p2), (p2, p)):
                at_w1 = relation_at(w1)
                if at_w1[w1] <= 0:
                    e = tuple((x, at_w1[x]) for x in tau.ray_ids)
                    candidates.append(HirzebruchWallData(tau, (w1, q, w3, q2), -at_w1[w1], a, e))
    if not candidates:
        raise SurfaceTypeError(f"Surface of {fan.ray_names(tau)} is not a Hirzebruch surface")

    values = {c.value() for c in candidates}
    if len(values) > 1:
        raise ConsistencyError(f"Orientations of {fan.ray_names(tau)} disagree: {sorted(values)}")
    return candidates[0]


def hirzebruch_ch2_formula(fan: Fan, tau) -> Rational:
    """(ch_2 . S) = (alpha(2 + sum a_i^2) + 2(-alpha + sum a_i e_i)) / 2 for S = F_alpha."""
    return hirzebruch_wall_data(fan, tau).value()


def _halve(value: int, doubled: bool) -> Rational:
    return Rational(value) if doubled else Rational(value, 2)


def batyrev_s1_formula(params: BatyrevParams, doubled: bool = False) -> Rational:
    """
    Closed form of (ch_2 . S_1), S_1 the surface of G(Sigma) minus {v1, y1, z1, t1, u1}.

    doubled=True returns 2(ch_2 . S_1).
    """
    p0, p1, p2, p3, p4 = params.p
    b, c = params.b, params.c
    b1 = b[0]
    value = -p1 - p4 + b1 * p2 - 2 * sum(c) - (b1 + 1) + sum(b1 - 2 * bi - 1 for bi in b[1:])
    return _halve(value, doubled)


def batyrev_case1_formula(params: BatyrevParams, doubled: bool = False) -> Rational:
    """(ch_2 . S) on the P^1 x P^1 of G(Sigma) minus {v1, z1, z2, t1, t2}; needs p2, p3 >= 2."""
    p0, p1, p2, p3, p4 = params.p
    if p2 < 2 or p3 < 2:
        raise ParameterError(f"Surface missing {{v1,z1,z2,t1,t2}} needs p2, p3 >= 2, got p={params.p}")
    return _halve(2 * (-p1 - p4), doubled)


def batyrev_case2_formula(params: BatyrevParams, doubled: bool = False) -> Rational:
    """
    (ch_2 . S) on the F_{c2} of G(Sigma) minus {v1, y1, z1, z2, u1}; needs p2 >= 2.

    Doubled: c2(p2 + p3) - 2(c2 + ... + c_p2) - 2 sum(b_i + 1).
    """
    p0, p1, p2, p3, p4 = params.p
    if p2 < 2:
        raise ParameterError(f"Surface missing {{v1,y1,z1,z2,u1}} needs p2 >= 2, got p={params.p}")
    c2 = params.c[0]
    value = c2 * (p2 + p3) - 2 * sum(params.c) - 2 * sum(bi + 1 for bi in params.b)
    return _halve(value, doubled)


def s1_upper_bound(params: BatyrevParams) -> int:
    """Upper bound -p1 - p3 - p4 + b1(p2 - p3) of 2(ch_2 . S_1)."""
    p0, p1, p2, p3, p4 = params.p
    return -p1 - p3 - p4 + params.b[0] * (p2 - p3)


def nefness_obstructions(params: BatyrevParams) -> List[str]:
    """
    Conditions a ch_2-nef fan with these parameters would need but which fail.

    The four conditions cannot hold together, so the list is never empty.
    """
    p0, p1, p2, p3, p4 = params.p
    b1 = params.b[0]
    c2 = params.c[0] if params.c else 0
    failed = []
    if not (b1 >= 1 and p2 > p3):
        failed.append(S1_NONNEGATIVE)
    if p3 != 1:
        failed.append(CASE1_ABSENT)
    if not (p2 == 2 and c2 - 2 * (b1 + 1) >= 0):
        failed.append(CASE2_NONNEGATIVE)
    if not b1 >= 2 * c2 + p1 + p4 + 1:
        failed.append(S1_REDUCED_NONNEGATIVE)
    if not failed:
        raise ConsistencyError(f"No obstruction to ch_2-nefness found for {params}")
    return failed


def format_rational(value) -> str:
    """Canonical "p/q" (or "p") string of an exact scalar."""
    value = Rational(value)
    return str(value.p) if value.q == 1 else f"{value.p}/{value.q}"


def report_to_dict(fan: Fan, report: PositivityReport, include_values: bool = False) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "k": report.k,
        "classification": report.classification,
        "min_value": format_rational(report.min_value),
        "witness_cone": fan.ray_names(report.witness),
    }
    if include_values:
        data["values"] = [
            {"cone": fan.ray_names(v.cone), "value": format_rational(v.value)} for v in report.values
        ]
    return data
