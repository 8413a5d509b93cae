"""
Intersection Engine

Exact intersection numbers of torus-invariant divisors against torus-invariant
cycles V(sigma) on a smooth complete fan.

Products use the smooth toric Chow ring rules: D_x . V(sigma) is V(sigma + x)
when x is not in sigma (zero when sigma + x is not a cone); when x is in sigma,
D_x is first replaced by a linearly equivalent divisor supported away from a
maximal cone containing sigma.
"""
import logging
import threading
import weakref
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from sympy import Rational

from errors import ConsistencyError, DimensionError, InvalidFanError
from exact_linalg import dual_functional, pairing
from fan import ZERO_CONE, Cone, Fan, RayRef, wall_relation

logger = logging.getLogger(__name__)

Scalar = Union[int, Rational]


@dataclass
class TorusCycle:
    """
    A formal combination of invariant subvarieties V(sigma).

    codim is the common dimension of the keyed cones, which is the
    codimension of every V(sigma) in the sum.
    """
    codim: int
    terms: Dict[Cone, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        for cone in self.terms:
            if cone.dim != self.codim:
                raise DimensionError(f"Cone {cone.ray_ids} has dimension {cone.dim}, expected {self.codim}")
        self.terms = {cone: c for cone, c in self.terms.items() if c != 0}

    def is_zero(self) -> bool:
        return not self.terms

    def scaled(self, factor: Scalar) -> "TorusCycle":
        return TorusCycle(self.codim, {cone: factor * c for cone, c in self.terms.items()})


@dataclass
class Divisor:
    """A torus-invariant divisor sum(c_x D_x), keyed by ray index."""
    coefficients: Dict[int, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        self.coefficients = {int(x): c for x, c in self.coefficients.items() if c != 0}

    def coefficient(self, ray_id: int) -> Scalar:
        return self.coefficients.get(ray_id, 0)

    def __add__(self, other: "Divisor") -> "Divisor":
        merged = dict(self.coefficients)
        for x, c in other.coefficients.items():
            merged[x] = merged.get(x, 0) + c
        return Divisor(merged)

    def __neg__(self) -> "Divisor":
        return Divisor({x: -c for x, c in self.coefficients.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)


@dataclass(frozen=True)
class MonomialKey:
    """Memo key: a sorted multiset of rays multiplied onto V(base)."""
    rays: Tuple[int, ...]
    base: Cone

    @classmethod
    def of(cls, rays: Iterable[int], base: Cone) -> "MonomialKey":
        return cls(tuple(sorted(rays)), base)


@dataclass(frozen=True)
class WallCurve:
    """The invariant curve V(wall) with its numerical class over G(Sigma)."""
    cycle: TorusCycle
    relation: Tuple[int, ...]


class IntersectionEngine:
    """
    Per-fan memoizing evaluator of products D_x1 ... D_xk . V(sigma).

    Instances are shared through get_engine; both caches only grow and
    insertions are serialized with a lock.
    """

    def __init__(self, fan: Fan):
        self.fan = fan
        self._products: Dict[Tuple[int, Cone], Dict[Cone, int]] = {}
        self._monomials: Dict[MonomialKey, int] = {}
        self._lock = threading.Lock()

    def prime_times_cone(self, x: int, sigma: Cone) -> Dict[Cone, int]:
        """D_x . V(sigma) as {cone: coefficient}, cones of dimension dim(sigma) + 1."""
        key = (x, sigma)
        cached = self._products.get(key)
        if cached is not None:
            return cached
        if sigma.dim >= self.fan.rank:
            raise DimensionError(f"Cannot multiply a point class by a divisor (cone {sigma.ray_ids})")
        result = self._expand(x, sigma)
        with self._lock:
            self._products.setdefault(key, result)
        return result

    def _expand(self, x: int, sigma: Cone) -> Dict[Cone, int]:
        fan = self.fan
        if x not in sigma:
            joined = sigma.with_ray(x)
            return {joined: 1} if fan.is_face(joined.ray_ids) else {}

        # D_x ~ -sum(<m,u> D_u) over rays u outside the smallest-index maximal cone containing sigma
        owner = fan.maximal_cones_containing(sigma)[0]
        cone = fan.maximal_cones[owner]
        m = fan.dual_rows(owner)[cone.ray_ids.index(x)]
        result: Dict[Cone, int] = {}
        for ray in fan.rays:
            if ray.id in cone:
                continue
            coefficient = -pairing(m, ray.vector)
            if coefficient == 0:
                continue
            joined = sigma.with_ray(ray.id)
            if fan.is_face(joined.ray_ids):
                result[joined] = result.get(joined, 0) + coefficient
        return {c: v for c, v in result.items() if v != 0}

    def monomial(self, rays: Sequence[int], base: Cone) -> int:
        """
        Degree of D_r1 ... D_rk . V(base) where k + dim(base) = rank.

        Rays outside the base cone are multiplied first, since those
        products never need a rewrite.
        """
        if len(rays) + base.dim != self.fan.rank:
            raise DimensionError(f"{len(rays)} divisors against a cone of dimension {base.dim} "
                                 f"in rank {self.fan.rank}")
        return self._monomial(MonomialKey.of(rays, base))

    def _monomial(self, key: MonomialKey) -> int:
        if not key.rays:
            return 1
        cached = self._monomials.get(key)
        if cached is not None:
            return cached

        outside = [x for x in key.rays if x not in key.base]
        x = outside[0] if outside else key.rays[0]
        rest = list(key.rays)
        rest.remove(x)
        total = 0
        for cone, coefficient in self.prime_times_cone(x, key.base).items():
            total += coefficient * self._monomial(MonomialKey.of(rest, cone))

        with self._lock:
            self._monomials.setdefault(key, total)
        return total

    def cache_sizes(self) -> Dict[str, int]:
        return {"products": len(self._products), "monomials": len(self._monomials)}


_engines: "weakref.WeakKeyDictionary[Fan, IntersectionEngine]" = weakref.WeakKeyDictionary()
_engines_lock = threading.Lock()


def get_engine(fan: Fan) -> IntersectionEngine:
    """The shared engine of a fan, created on first use."""
    with _engines_lock:
        engine = _engines.get(fan)
        if engine is None:
            engine = IntersectionEngine(fan)
            _engines[fan] = engine
        return engine


def resolve_cone(fan: Fan, tau: Union[Cone, Iterable[RayRef]]) -> Cone:
    if isinstance(tau, Cone):
        if not fan.is_face(tau.ray_ids):
            raise InvalidFanError(f"Cone {tau.ray_ids} is not a cone of the fan")
        return tau
    return fan.cone(tau)


def fundamental_cycle(fan: Fan) -> TorusCycle:
    """The class of X itself: V(0) with coefficient 1."""
    return TorusCycle(0, {ZERO_CONE: 1})


def cycle_of_cone(fan: Fan, cone: Union[Cone, Iterable[RayRef]]) -> TorusCycle:
    cone = resolve_cone(fan, cone)
    return TorusCycle(cone.dim, {cone: 1})


def degree(fan: Fan, cycle: TorusCycle) -> Scalar:
    """Degree of a zero-cycle: the sum of its point-class coefficients."""
    if cycle.codim != fan.rank:
        raise DimensionError(f"Degree is defined for zero-cycles, got codimension {cycle.codim}")
    return sum(cycle.terms.values(), 0)


def mul_prime_divisor(fan: Fan, x: RayRef, cycle: TorusCycle) -> TorusCycle:
    """
    D_x . cycle.

    Args:
        fan: validated fan
        x: ray name or index
        cycle: cycle of codimension < rank

    Returns:
        A cycle of codimension cycle.codim + 1
    """
    ray_id = fan.ray_index(x)
    if cycle.codim >= fan.rank:
        raise DimensionError(f"Cycle of codimension {cycle.codim} cannot be cut further in rank {fan.rank}")
    engine = get_engine(fan)
    terms: Dict[Cone, Scalar] = {}
    for sigma, coefficient in cycle.terms.items():
        for cone, value in engine.prime_times_cone(ray_id, sigma).items():
            terms[cone] = terms.get(cone, 0) + coefficient * value
    return TorusCycle(cycle.codim + 1, terms)


def _as_rational(value: Scalar, context: str) -> Rational:
    result = Rational(value)
    if result.q != 1:
        raise ConsistencyError(f"Non-integral intersection number {result} for {context}")
    return result


def intersection_number(fan: Fan, rays: Sequence[RayRef]) -> Rational:
    """Top intersection number D_r1 ... D_rd of a multiset of d prime divisors."""
    if len(rays) != fan.rank:
        raise DimensionError(f"Need {fan.rank} divisors for a top intersection, got {len(rays)}")
    ray_ids = [fan.ray_index(r) for r in rays]
    return _as_rational(get_engine(fan).monomial(ray_ids, ZERO_CONE), f"rays {ray_ids}")


def intersect_against_subvariety(fan: Fan, rays: Sequence[RayRef],
                                 tau: Union[Cone, Iterable[RayRef]]) -> Rational:
    """(D_r1 ... D_rk . V(tau)) with k + dim(tau) = rank."""
    tau = resolve_cone(fan, tau)
    if len(rays) + tau.dim != fan.rank:
        raise DimensionError(f"{len(rays)} divisors against V(tau) with dim tau = {tau.dim} in rank {fan.rank}")
    ray_ids = [fan.ray_index(r) for r in rays]
    return _as_rational(get_engine(fan).monomial(ray_ids, tau), f"rays {ray_ids} on {tau.ray_ids}")


def intersect_divisors(fan: Fan, divisors: Sequence[Divisor],
                       tau: Union[Cone, Iterable[RayRef]] = ZERO_CONE) -> Rational:
    """Multilinear product of arbitrary invariant divisors against V(tau)."""
    tau = resolve_cone(fan, tau)
    if len(divisors) + tau.dim != fan.rank:
        raise DimensionError(f"{len(divisors)} divisors against V(tau) with dim tau = {tau.dim} in rank {fan.rank}")
    engine = get_engine(fan)
    total = Rational(0)
    supports = [sorted(d.coefficients.items()) for d in divisors]
    for choice in product(*supports):
        coefficient = Rational(1)
        for _, c in choice:
            coefficient *= c
        total += coefficient * engine.monomial([x for x, _ in choice], tau)
    return total


def curve_class_of_wall(fan: Fan, wall: Cone) -> WallCurve:
    """V(wall) paired with the wall relation read as a numerical 1-cycle."""
    relation = wall_relation(fan, wall)
    return WallCurve(cycle_of_cone(fan, wall), relation.as_vector(fan.num_rays))


def principal_divisor(fan: Fan, m: Sequence[int]) -> Divisor:
    """div(chi^m) = sum(<m, u> D_u)."""
    if len(m) != fan.rank:
        raise DimensionError(f"Covector of length {len(m)} in rank {fan.rank}")
    return Divisor({ray.id: pairing(m, ray.vector) for ray in fan.rays})


def picard_relations(fan: Fan, basis: Sequence[RayRef]) -> List[Divisor]:
    """
    Linear equivalences from the dual basis of d rays forming a lattice basis.

    For each basis ray b the principal divisor of its dual functional reads
    D_b + sum(<m_b, u> D_u) ~ 0, with u over the rays outside the basis.
    """
    basis_ids = [fan.ray_index(r) for r in basis]
    if len(set(basis_ids)) != fan.rank:
        raise DimensionError(f"Need {fan.rank} distinct basis rays, got {basis_ids}")
    vectors = [fan.rays[i].vector for i in basis_ids]
    relations = []
    for index in range(len(basis_ids)):
        m = dual_functional(vectors, index)
        relations.append(principal_divisor(fan, m))
    return relations
