"""
Fan Catalog

Constructors for the fan families with named rays:

- projective_space: P^d
- kleinschmidt_bundle: P^{s-1}-bundles over P^{d-s+1} (every Picard-two fan)
- example_41: the P^{d-2}-bundle over P^2 with twist (a, 0, ..., 0)
- batyrev_picard3: Picard-three fans without a fiber-type contraction

plus deterministic parameter grids and the named test cones used by the
verification suites.
"""
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from typing import Any, Dict, Iterator, List, Optional, Tuple

from errors import ConsistencyError, InvalidFanError, ParameterError
from fan import Cone, Fan, build_fan, is_projective, primitive_relations

logger = logging.getLogger(__name__)

FAMILY_ALIASES = {
    "pn": "projective_space",
    "projective_space": "projective_space",
    "kleinschmidt": "kleinschmidt",
    "example41": "example41",
    "batyrev3": "batyrev",
    "batyrev": "batyrev",
}

# (collection, {ray name: coefficient}) as stated relations: sum(collection) = sum(coefficient * ray)
ExpectedRelation = Tuple[Tuple[str, ...], Dict[str, int]]


def canonical_family(name: str) -> str:
    if name not in FAMILY_ALIASES:
        raise ParameterError(f"Unknown family {name!r}; choose from {sorted(FAMILY_ALIASES)}")
    return FAMILY_ALIASES[name]


@dataclass(frozen=True)
class ProjectiveSpaceParams:
    d: int

    def validate(self) -> "ProjectiveSpaceParams":
        if self.d < 1:
            raise ParameterError(f"Projective space needs d >= 1, got {self.d}")
        return self

    def key(self) -> Tuple:
        return (self.d,)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d}


@dataclass(frozen=True)
class BundleParams:
    """P^{s-1}-bundle over P^{d-s+1} with twists a_1 >= ... >= a_{s-1} >= 0."""
    d: int
    s: int
    twists: Tuple[int, ...]

    def validate(self) -> "BundleParams":
        if self.s < 2 or self.d < self.s:
            raise ParameterError(f"Bundle needs d > s - 1 >= 1, got d={self.d}, s={self.s}")
        if len(self.twists) != self.s - 1:
            raise ParameterError(f"Expected {self.s - 1} twists, got {list(self.twists)}")
        if any(a < 0 for a in self.twists):
            raise ParameterError(f"Twists must be non-negative, got {list(self.twists)}")
        if list(self.twists) != sorted(self.twists, reverse=True):
            raise ParameterError(f"Twists must be non-increasing, got {list(self.twists)}")
        return self

    def key(self) -> Tuple:
        return (self.d, self.s, self.twists)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "s": self.s, "twists": list(self.twists)}


@dataclass(frozen=True)
class Example41Params:
    d: int
    a: int

    def validate(self) -> "Example41Params":
        if self.d < 3 or self.a < 1:
            raise ParameterError(f"Bundle over P^2 needs d >= 3 and a >= 1, got d={self.d}, a={self.a}")
        return self

    def key(self) -> Tuple:
        return (self.d, self.a)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "a": self.a}


@dataclass(frozen=True)
class BatyrevParams:
    """
    p = (p0, ..., p4) block sizes, b = (b_1..b_p3), c = (c_2..c_p2).

    Normalized parameters keep the minimum of b and of c in front.
    """
    p: Tuple[int, int, int, int, int]
    b: Tuple[int, ...]
    c: Tuple[int, ...] = field(default=())

    @property
    def d(self) -> int:
        return sum(self.p) - 3

    def validate(self) -> "BatyrevParams":
        if len(self.p) != 5 or any(pi < 1 for pi in self.p):
            raise ParameterError(f"Need five positive block sizes, got {list(self.p)}")
        p0, p1, p2, p3, p4 = self.p
        if len(self.b) != p3:
            raise ParameterError(f"Expected p3={p3} values of b, got {list(self.b)}")
        if len(self.c) != p2 - 1:
            raise ParameterError(f"Expected p2-1={p2 - 1} values of c, got {list(self.c)}")
        if any(x < 0 for x in self.b + self.c):
            raise ParameterError(f"b and c must be non-negative, got b={list(self.b)}, c={list(self.c)}")
        return self

    def normalized(self) -> "BatyrevParams":
        b = _min_first(self.b)
        c = _min_first(self.c)
        if (b, c) != (self.b, self.c):
            logger.info(f"Normalized Batyrev parameters: b {list(self.b)} -> {list(b)}, c {list(self.c)} -> {list(c)}")
        return replace(self, b=b, c=c)

    def key(self) -> Tuple:
        return (self.p, self.b, self.c)

    def to_dict(self) -> Dict[str, Any]:
        return {"p": list(self.p), "b": list(self.b), "c": list(self.c)}


def _min_first(values: Tuple[int, ...]) -> Tuple[int, ...]:
    if not values:
        return values
    i = values.index(min(values))
    return (values[i],) + values[:i] + values[i + 1:]


def projective_space(d: int) -> Fan:
    """P^d: rays e_1..e_d and -(e_1 + ... + e_d), named x0..xd."""
    ProjectiveSpaceParams(d).validate()
    rays = [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]
    rays.append(tuple(-1 for _ in range(d)))
    cones = list(combinations(range(d + 1), d))
    return build_fan(rays, cones, names=[f"x{i}" for i in range(d + 1)])


def _bundle_fan(d: int, s: int, twists: Tuple[int, ...], x_names: List[str], y_names: List[str]) -> Fan:
    num_x = d - s + 2

    def unit(i: int) -> List[int]:
        return [1 if j == i else 0 for j in range(d)]

    ys = [unit(i) for i in range(s - 1)]
    xs = [unit(s - 1 + i) for i in range(num_x - 1)]
    ys.append([-sum(y[j] for y in ys) for j in range(d)])
    xs.append([sum(a * y[j] for a, y in zip(twists, ys)) - sum(x[j] for x in xs) for j in range(d)])

    rays = xs + ys
    x_ids = range(num_x)
    y_ids = range(num_x, num_x + s)
    cones = [[i for i in range(num_x + s) if i not in (x, y)] for x in x_ids for y in y_ids]
    return build_fan(rays, cones, names=x_names + y_names)


def bundle_relations(params: BundleParams) -> List[ExpectedRelation]:
    """x_1 + ... + x_{d-s+2} = sum(a_i y_i) and y_1 + ... + y_s = 0."""
    num_x = params.d - params.s + 2
    xs = tuple(f"x{i}" for i in range(1, num_x + 1))
    ys = tuple(f"y{i}" for i in range(1, params.s + 1))
    twisted = {f"y{i}": a for i, a in enumerate(params.twists, start=1) if a > 0}
    return [(xs, twisted), (ys, {})]


def kleinschmidt_bundle(params: BundleParams) -> Fan:
    """
    Fan of P(O(a_1) + ... + O(a_{s-1}) + O) over P^{d-s+1}.

    y_1..y_{s-1} and x_1..x_{d-s+1} are the standard basis,
    y_s = -(y_1 + ... + y_{s-1}) and x_{d-s+2} = sum(a_i y_i) - (x_1 + ... + x_{d-s+1}).
    Maximal cones omit one x and one y.
    """
    params.validate()
    num_x = params.d - params.s + 2
    fan = _bundle_fan(params.d, params.s, params.twists,
                      [f"x{i}" for i in range(1, num_x + 1)],
                      [f"y{i}" for i in range(1, params.s + 1)])
    _assert_relations(fan, bundle_relations(params), f"bundle {params.to_dict()}")
    return fan


def example_41(d: int, a: int) -> Fan:
    """P^{d-2}-bundle over P^2 with x1 + x2 + x3 = a y1 and y1 + ... + y_{d-1} = 0."""
    Example41Params(d, a).validate()
    return kleinschmidt_bundle(BundleParams(d, d - 1, (a,) + (0,) * (d - 3)))


def _batyrev_names(params: BatyrevParams) -> Dict[str, List[str]]:
    return {
        letter: [f"{letter}{i}" for i in range(1, size + 1)]
        for letter, size in zip("vyztu", params.p)
    }


def expected_batyrev_relations(params: BatyrevParams) -> List[ExpectedRelation]:
    """The five primitive relations of the Picard-three family, in V∪Y, Y∪Z, Z∪T, T∪U, U∪V order."""
    n = _batyrev_names(params)
    c_terms = {f"z{i}": ci for i, ci in enumerate(params.c, start=2) if ci > 0}
    return [
        (tuple(n["v"] + n["y"]), {**c_terms, **{f"t{i}": bi + 1 for i, bi in enumerate(params.b, start=1)}}),
        (tuple(n["y"] + n["z"]), {u: 1 for u in n["u"]}),
        (tuple(n["z"] + n["t"]), {}),
        (tuple(n["t"] + n["u"]), {y: 1 for y in n["y"]}),
        (tuple(n["u"] + n["v"]), {**c_terms, **{f"t{i}": bi for i, bi in enumerate(params.b, start=1) if bi > 0}}),
    ]


def batyrev_relation_degrees(params: BatyrevParams) -> List[int]:
    """Anticanonical degrees of the five primitive relations."""
    p0, p1, p2, p3, p4 = params.p
    sum_b = sum(params.b)
    sum_c = sum(params.c)
    return [
        p0 + p1 - sum_c - (sum_b + p3),
        p1 + p2 - p4,
        p2 + p3,
        p3 + p4 - p1,
        p4 + p0 - sum_c - sum_b,
    ]


def batyrev_picard3(params: BatyrevParams) -> Fan:
    """
    Build the Picard-three fan with the five stated primitive relations.

    The rays of G(Sigma) minus {v1, z1, u1} form the standard basis in the order
    v2.., y.., z2.., t.., u2..; z1, u1 and v1 are solved from the relations.
    Maximal cones are the d-subsets containing none of the five collections.
    """
    params = params.validate().normalized()
    n = _batyrev_names(params)
    d = params.d
    basis_names = n["v"][1:] + n["y"] + n["z"][1:] + n["t"] + n["u"][1:]
    vectors: Dict[str, List[int]] = {
        name: [1 if j == i else 0 for j in range(d)] for i, name in enumerate(basis_names)
    }

    def combine(terms: List[Tuple[int, str]]) -> List[int]:
        return [sum(coefficient * vectors[name][j] for coefficient, name in terms) for j in range(d)]

    vectors["z1"] = combine([(-1, z) for z in n["z"][1:]] + [(-1, t) for t in n["t"]])
    vectors["u1"] = combine([(1, y) for y in n["y"]] + [(1, z) for z in n["z"]] + [(-1, u) for u in n["u"][1:]])
    vectors["v1"] = combine(
        [(ci, f"z{i}") for i, ci in enumerate(params.c, start=2)]
        + [(bi + 1, f"t{i}") for i, bi in enumerate(params.b, start=1)]
        + [(-1, v) for v in n["v"][1:]]
        + [(-1, y) for y in n["y"]]
    )

    names = n["v"] + n["y"] + n["z"] + n["t"] + n["u"]
    index = {name: i for i, name in enumerate(names)}
    collections = [set(index[x] for x in collection) for collection, _ in expected_batyrev_relations(params)]
    cones = [
        subset for subset in combinations(range(len(names)), d)
        if not any(collection <= set(subset) for collection in collections)
    ]
    try:
        fan = build_fan([vectors[name] for name in names], cones, names=names)
    except InvalidFanError as e:
        raise ConsistencyError(f"Picard-three construction failed for {params.to_dict()}: {e}") from e

    _assert_relations(fan, expected_batyrev_relations(params), f"Picard-three fan {params.to_dict()}")
    return fan


def _assert_relations(fan: Fan, expected: List[ExpectedRelation], label: str) -> None:
    """Recompute the primitive relations and compare them with the stated ones."""
    computed = set()
    for relation in primitive_relations(fan):
        collection = tuple(sorted(fan.rays[i].name for i in relation.collection.ray_ids))
        rhs = tuple(sorted((fan.rays[i].name, a) for i, a in relation.coefficients))
        computed.add((collection, rhs))
    wanted = {(tuple(sorted(collection)), tuple(sorted(rhs.items()))) for collection, rhs in expected}
    if computed != wanted:
        raise ConsistencyError(f"Primitive relations of {label} differ from the stated ones: "
                               f"computed {sorted(computed)}, expected {sorted(wanted)}")
    projective, _ = is_projective(fan)
    if not projective:
        raise ConsistencyError(f"{label} is not projective")


def batyrev_s1_cone(fan: Fan, params: BatyrevParams) -> Cone:
    """The cone of S_1: G(Sigma) minus {v1, y1, z1, t1, u1}."""
    return _complement_cone(fan, {"v1", "y1", "z1", "t1", "u1"})


def batyrev_case1_cone(fan: Fan, params: BatyrevParams) -> Optional[Cone]:
    """G(Sigma) minus {v1, z1, z2, t1, t2}; None unless p2, p3 >= 2."""
    if params.p[2] < 2 or params.p[3] < 2:
        return None
    return _complement_cone(fan, {"v1", "z1", "z2", "t1", "t2"})


def batyrev_case2_cone(fan: Fan, params: BatyrevParams) -> Optional[Cone]:
    """G(Sigma) minus {v1, y1, z1, z2, u1}; None unless p2 >= 2."""
    if params.p[2] < 2:
        return None
    return _complement_cone(fan, {"v1", "y1", "z1", "z2", "u1"})


def _complement_cone(fan: Fan, removed: set) -> Cone:
    return fan.cone([ray.name for ray in fan.rays if ray.name not in removed])


def bundle_test_cones(fan: Fan, d: int, k: int) -> Tuple[Cone, Cone]:
    """V_1 = {x1..x_{d-k}} and V_2 = {x1..x_{d-k-1}, y1} on the P^1-bundle over P^{d-1}."""
    if not 1 <= k < d:
        raise ParameterError(f"Need 1 <= k < d, got k={k}, d={d}")
    v1 = [f"x{i}" for i in range(1, d - k + 1)]
    v2 = [f"x{i}" for i in range(1, d - k)] + ["y1"]
    return fan.cone(v1), fan.cone(v2)


def four_term_test_cone(fan: Fan, params: BundleParams) -> Cone:
    """
    Four-dimensional test subvariety on a Picard-two fan with d >= 5.

    s = 3: {x1..x_{d-5}, y1}; s >= 4: {x1..x_{d-s}, y1..y_{s-4}}.
    """
    d, s = params.d, params.s
    if d < 5 or s < 3:
        raise ParameterError(f"Test cone needs d >= 5 and s >= 3, got d={d}, s={s}")
    if s == 3:
        names = [f"x{i}" for i in range(1, d - 4)] + ["y1"]
    else:
        names = [f"x{i}" for i in range(1, d - s + 1)] + [f"y{i}" for i in range(1, s - 3)]
    return fan.cone(names)


@lru_cache(maxsize=None)
def build_family(family: str, params) -> Fan:
    """Dispatch a parameter record to its constructor; fans are shared per (family, params)."""
    family = canonical_family(family)
    if family == "projective_space":
        return projective_space(params.d)
    if family == "kleinschmidt":
        return kleinschmidt_bundle(params)
    if family == "example41":
        return example_41(params.d, params.a)
    return batyrev_picard3(params)


def grid_parameters(family: str, bounds: Optional[Dict[str, int]] = None) -> List:
    """
    Parameter records of a family within bounds, in deterministic order.

    Bound keys: projective_space min_d/max_d; kleinschmidt min_d/max_d/max_s/max_twist;
    example41 min_d/max_d/max_a; batyrev max_p/max_p2/max_bc.
    """
    family = canonical_family(family)
    bounds = dict(bounds or {})
    records: List = []
    if family == "projective_space":
        records = [ProjectiveSpaceParams(d) for d in range(bounds.get("min_d", 1), bounds.get("max_d", 6) + 1)]
    elif family == "kleinschmidt":
        for d in range(bounds.get("min_d", 2), bounds.get("max_d", 7) + 1):
            for s in range(2, min(d, bounds.get("max_s", 5)) + 1):
                for twists in combinations_with_replacement(range(bounds.get("max_twist", 3), -1, -1), s - 1):
                    records.append(BundleParams(d, s, tuple(twists)))
    elif family == "example41":
        for d in range(bounds.get("min_d", 3), bounds.get("max_d", 6) + 1):
            for a in range(1, bounds.get("max_a", 3) + 1):
                records.append(Example41Params(d, a))
    else:
        max_p = bounds.get("max_p", 2)
        max_p2 = bounds.get("max_p2", max_p)
        max_bc = bounds.get("max_bc", 2)
        for p in product(range(1, max_p + 1), range(1, max_p + 1), range(1, max_p2 + 1),
                         range(1, max_p + 1), range(1, max_p + 1)):
            for b in combinations_with_replacement(range(max_bc + 1), p[3]):
                for c in combinations_with_replacement(range(max_bc + 1), p[2] - 1):
                    records.append(BatyrevParams(tuple(p), tuple(b), tuple(c)))
    return sorted(records, key=lambda r: r.key())


def grid(family: str, bounds: Optional[Dict[str, int]] = None) -> Iterator[Tuple[Any, Fan]]:
    """Stream (params, fan) over a family grid; every fan is validated on construction."""
    for params in grid_parameters(family, bounds):
        yield params, build_family(family, params)
