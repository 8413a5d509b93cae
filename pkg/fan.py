"""
Fan Model

Smooth complete fans: validation, faces and walls, wall relations, primitive
collections and primitive relations, plus the Fano and projectivity tests
built on them. Also reads and writes the fan JSON format:

    { "rank": d, "rays": [{"name": str, "vector": [int, ...]}, ...],
      "maximal_cones": [[ray indices], ...] }
"""
import json
import logging
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Rational

import settings
from errors import (
    ConsistencyError,
    IncompleteFanError,
    InvalidFanError,
    NotAWallError,
    NotUnimodularError,
)
from exact_linalg import (
    STRICT,
    determinant,
    inverse_matrix,
    is_primitive,
    lp_feasible_strict,
)

logger = logging.getLogger(__name__)

RayRef = Union[int, str]


@dataclass(frozen=True)
class Ray:
    """A primitive generator of a one-dimensional cone."""
    id: int
    name: str
    vector: Tuple[int, ...]


@dataclass(frozen=True, order=True)
class Cone:
    """A cone of a smooth fan, identified by the sorted indices of its generators."""
    ray_ids: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ray_ids", tuple(sorted(set(int(i) for i in self.ray_ids))))

    @property
    def dim(self) -> int:
        return len(self.ray_ids)

    def __contains__(self, ray_id: int) -> bool:
        return ray_id in self.ray_ids

    def __iter__(self):
        return iter(self.ray_ids)

    def with_ray(self, ray_id: int) -> "Cone":
        return Cone(self.ray_ids + (ray_id,))

    def without_ray(self, ray_id: int) -> "Cone":
        return Cone(tuple(i for i in self.ray_ids if i != ray_id))

    def issubset(self, other: "Cone") -> bool:
        return set(self.ray_ids) <= set(other.ray_ids)


ZERO_CONE = Cone(())


@dataclass(frozen=True)
class WallRelation:
    """
    The relation y1 + y2 + sum(a_i x_i) = 0 around a wall.

    coefficients maps every ray of the wall to its a_i.
    """
    wall: Cone
    opposite_rays: Tuple[int, int]
    coefficients: Tuple[Tuple[int, int], ...]

    def coefficient_map(self) -> Dict[int, int]:
        return dict(self.coefficients)

    def as_vector(self, num_rays: int) -> Tuple[int, ...]:
        """The relation as a numerical 1-cycle: one entry per ray of the fan."""
        vector = [0] * num_rays
        for y in self.opposite_rays:
            vector[y] = 1
        for ray_id, a in self.coefficients:
            vector[ray_id] = a
        return tuple(vector)

    @property
    def degree(self) -> int:
        """Anticanonical degree (-K . C) of the wall curve."""
        return 2 + sum(a for _, a in self.coefficients)


@dataclass(frozen=True, order=True)
class PrimitiveCollection:
    ray_ids: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ray_ids", tuple(sorted(set(int(i) for i in self.ray_ids))))

    def __len__(self):
        return len(self.ray_ids)


@dataclass(frozen=True)
class PrimitiveRelation:
    """
    sum(x for x in P) = sum(a_j y_j) with y_j the generators of sigma(P).

    coefficients holds (ray id, a_j) pairs with every a_j > 0.
    """
    collection: PrimitiveCollection
    sigma_P: Cone
    coefficients: Tuple[Tuple[int, int], ...]
    degree: int

    def coefficient_map(self) -> Dict[int, int]:
        return dict(self.coefficients)

    def is_disjoint(self) -> bool:
        return not set(self.collection.ray_ids) & set(self.sigma_P.ray_ids)

    def has_zero_rhs(self) -> bool:
        return self.sigma_P.dim == 0

    def as_vector(self, num_rays: int) -> Tuple[int, ...]:
        """The 1-cycle r(P): +1 on the collection, -a_j on sigma(P)."""
        vector = [0] * num_rays
        for ray_id in self.collection.ray_ids:
            vector[ray_id] += 1
        for ray_id, a in self.coefficients:
            vector[ray_id] -= a
        return tuple(vector)


class Fan:
    """
    A smooth simplicial fan in Z^rank.

    Built through build_fan, which validates the input. Faces, wall
    incidences and dual bases of the maximal cones are computed on
    construction; the object is not modified afterwards except for lazily
    filled caches of derived data.
    """

    def __init__(self, rank: int, rays: List[Ray], maximal_cones: List[Cone]):
        self.rank = rank
        self.rays = list(rays)
        self.maximal_cones = list(maximal_cones)
        self._name_index = {ray.name: ray.id for ray in self.rays}

        faces = set()
        for cone in self.maximal_cones:
            for size in range(cone.dim + 1):
                for subset in combinations(cone.ray_ids, size):
                    faces.add(subset)
        self._face_set = faces
        self.faces: Dict[int, List[Cone]] = {}
        for subset in sorted(faces, key=lambda s: (len(s), s)):
            self.faces.setdefault(len(subset), []).append(Cone(subset))

        # wall -> indices of maximal cones containing it
        self.wall_incidences: Dict[Cone, List[int]] = {}
        for index, cone in enumerate(self.maximal_cones):
            for ray_id in cone.ray_ids:
                self.wall_incidences.setdefault(cone.without_ray(ray_id), []).append(index)

        # Row i of _dual_rows[k] is the dual functional of the i-th generator of maximal cone k
        self._dual_rows: List[Tuple[Tuple[int, ...], ...]] = []
        for cone in self.maximal_cones:
            inverse = inverse_matrix([self.rays[i].vector for i in cone.ray_ids])
            self._dual_rows.append(tuple(
                tuple(int(entry) for entry in inverse.row(row)) for row in range(self.rank)
            ))

        self._wall_relations: Dict[Cone, WallRelation] = {}
        self._primitive_relations: Optional[List[PrimitiveRelation]] = None

    def __repr__(self):
        return f"<Fan(rank={self.rank}, rays={len(self.rays)}, maximal_cones={len(self.maximal_cones)})>"

    @property
    def num_rays(self) -> int:
        return len(self.rays)

    @property
    def picard_number(self) -> int:
        return len(self.rays) - self.rank

    @property
    def walls(self) -> List[Cone]:
        """Codimension-one cones lying in exactly two maximal cones, sorted."""
        return sorted(w for w, owners in self.wall_incidences.items() if len(owners) == 2)

    def ray_index(self, ref: RayRef) -> int:
        """Resolve a ray name or index to its index."""
        if isinstance(ref, str):
            if ref not in self._name_index:
                raise InvalidFanError(f"Unknown ray name {ref!r}")
            return self._name_index[ref]
        index = int(ref)
        if not 0 <= index < len(self.rays):
            raise InvalidFanError(f"Ray index {index} out of range 0..{len(self.rays) - 1}")
        return index

    def ray_names(self, cone: Cone) -> List[str]:
        return [self.rays[i].name for i in cone.ray_ids]

    def is_face(self, ray_ids: Iterable[int]) -> bool:
        return tuple(sorted(set(ray_ids))) in self._face_set

    def cone(self, refs: Iterable[RayRef]) -> Cone:
        """The cone spanned by the given rays (names or indices); must be a face."""
        cone = Cone(tuple(self.ray_index(ref) for ref in refs))
        if cone.ray_ids not in self._face_set:
            raise InvalidFanError(f"Rays {self.ray_names(cone)} do not span a cone of the fan")
        return cone

    def cones_of_dim(self, dim: int) -> List[Cone]:
        return list(self.faces.get(dim, []))

    def maximal_cones_containing(self, cone: Cone) -> List[int]:
        """Indices of the maximal cones having the given cone as a face, ascending."""
        wanted = set(cone.ray_ids)
        return [i for i, m in enumerate(self.maximal_cones) if wanted <= set(m.ray_ids)]

    def dual_rows(self, max_index: int) -> Tuple[Tuple[int, ...], ...]:
        return self._dual_rows[max_index]

    def coordinates(self, max_index: int, vector: Sequence[int]) -> Tuple[int, ...]:
        """Coordinates of an integer vector in the basis of a maximal cone."""
        return tuple(sum(a * int(b) for a, b in zip(row, vector)) for row in self._dual_rows[max_index])


def build_fan(rays: Sequence[Sequence[int]], maximal_cones: Sequence[Iterable[int]],
              names: Optional[Sequence[str]] = None, require_complete: bool = True) -> Fan:
    """
    Validate raw rays and maximal cones and build a Fan.

    Args:
        rays: primitive integer vectors, all of the same length d
        maximal_cones: index lists of size d
        names: optional ray labels, defaults to r0, r1, ...
        require_complete: reject fans that fail validate_complete

    Returns:
        The validated Fan with faces, walls and wall relations computed
    """
    if not rays:
        raise InvalidFanError("A fan needs at least one ray")
    rank = len(rays[0])
    if rank < 1:
        raise InvalidFanError("Rays must have positive length")
    if names is None:
        names = [f"r{i}" for i in range(len(rays))]
    if len(names) != len(rays):
        raise InvalidFanError(f"Got {len(names)} names for {len(rays)} rays")
    if len(set(names)) != len(names):
        raise InvalidFanError(f"Ray names are not unique: {list(names)}")

    ray_objects = []
    seen = {}
    for index, (name, raw) in enumerate(zip(names, rays)):
        vector = tuple(int(v) for v in raw)
        if len(vector) != rank:
            raise InvalidFanError(f"Ray {name} has length {len(vector)}, expected {rank}")
        if not is_primitive(vector):
            raise InvalidFanError(f"Ray {name}={vector} is zero or not primitive")
        if vector in seen:
            raise InvalidFanError(f"Rays {seen[vector]} and {name} are equal: {vector}")
        seen[vector] = name
        ray_objects.append(Ray(index, str(name), vector))

    cone_objects = []
    for raw in maximal_cones:
        ids = [int(i) for i in raw]
        if any(not 0 <= i < len(ray_objects) for i in ids):
            raise InvalidFanError(f"Maximal cone {ids} refers to a missing ray")
        cone = Cone(tuple(ids))
        if cone.dim != rank or len(ids) != rank:
            raise InvalidFanError(f"Maximal cone {ids} does not have {rank} distinct generators")
        if cone in cone_objects:
            raise InvalidFanError(f"Maximal cone {ids} is listed twice")
        det = determinant([ray_objects[i].vector for i in cone.ray_ids])
        if abs(det) != 1:
            raise InvalidFanError(f"Maximal cone {[names[i] for i in cone.ray_ids]} is not smooth (det {det})")
        cone_objects.append(cone)
    if not cone_objects:
        raise InvalidFanError("A fan needs at least one maximal cone")
    used = {i for cone in cone_objects for i in cone.ray_ids}
    unused = [ray.name for ray in ray_objects if ray.id not in used]
    if unused:
        raise InvalidFanError(f"Rays {unused} lie in no maximal cone")

    fan = Fan(rank, ray_objects, cone_objects)

    for wall, owners in fan.wall_incidences.items():
        if len(owners) > 2:
            raise InvalidFanError(f"Wall {fan.ray_names(wall)} lies in {len(owners)} maximal cones")
        if len(owners) == 2:
            fan._wall_relations[wall] = _compute_wall_relation(fan, wall, owners)

    if require_complete and not validate_complete(fan):
        raise IncompleteFanError(f"Fan with rays {list(names)} does not cover R^{rank}")

    logger.debug(f"Built fan: rank {rank}, {len(ray_objects)} rays, {len(cone_objects)} maximal cones, "
                 f"{len(fan.walls)} walls")
    return fan


def _compute_wall_relation(fan: Fan, wall: Cone, owners: List[int]) -> WallRelation:
    first, second = sorted(owners)
    y1 = next(i for i in fan.maximal_cones[first].ray_ids if i not in wall)
    y2 = next(i for i in fan.maximal_cones[second].ray_ids if i not in wall)
    coords = dict(zip(fan.maximal_cones[first].ray_ids, fan.coordinates(first, fan.rays[y2].vector)))
    if coords[y1] != -1:
        raise InvalidFanError(
            f"Maximal cones around wall {fan.ray_names(wall)} overlap: "
            f"{fan.rays[y2].name} is not on the opposite side of {fan.rays[y1].name}"
        )
    # y2 = -y1 + sum(c_i x_i)  =>  y1 + y2 - sum(c_i x_i) = 0
    coefficients = tuple((x, -coords[x]) for x in wall.ray_ids)
    return WallRelation(wall, (y1, y2), coefficients)


def validate_complete(fan: Fan) -> bool:
    """
    Completeness test: every codimension-one face lies in exactly two maximal
    cones, the dual graph is connected, and a seeded sample of lattice points
    all lie in some maximal cone.
    """
    for wall, owners in fan.wall_incidences.items():
        if len(owners) != 2:
            logger.debug(f"Face {fan.ray_names(wall)} lies in {len(owners)} maximal cone(s)")
            return False

    reached = {0}
    queue = deque([0])
    while queue:
        current = queue.popleft()
        for ray_id in fan.maximal_cones[current].ray_ids:
            for neighbour in fan.wall_incidences[fan.maximal_cones[current].without_ray(ray_id)]:
                if neighbour not in reached:
                    reached.add(neighbour)
                    queue.append(neighbour)
    if len(reached) != len(fan.maximal_cones):
        logger.debug(f"Dual graph is disconnected: reached {len(reached)} of {len(fan.maximal_cones)} cones")
        return False

    rng = np.random.default_rng(settings.AUDIT_SEED)
    samples = rng.integers(-settings.AUDIT_RADIUS, settings.AUDIT_RADIUS + 1,
                           size=(settings.AUDIT_SAMPLES, fan.rank))
    for point in samples:
        vector = [int(v) for v in point]
        if not any(min(fan.coordinates(k, vector)) >= 0 for k in range(len(fan.maximal_cones))):
            logger.warning(f"Completeness audit: point {vector} lies in no maximal cone")
            return False
    return True


def wall_relation(fan: Fan, wall: Cone) -> WallRelation:
    """The relation y1 + y2 + sum(a_i x_i) = 0 of a wall."""
    if wall not in fan._wall_relations:
        raise NotAWallError(f"Cone {fan.ray_names(wall) if all(0 <= i < fan.num_rays for i in wall) else wall} "
                            f"is not a wall of the fan")
    return fan._wall_relations[wall]


def anticanonical_degree_of_wall(fan: Fan, wall: Cone) -> int:
    """(-K_X . C_tau) = 2 + sum(a_i)."""
    return wall_relation(fan, wall).degree


def is_projective(fan: Fan) -> Tuple[bool, Optional[Tuple[Rational, ...]]]:
    """
    Toric Nakai-Moishezon test: look for a divisor positive on every wall curve.

    Divisors are taken modulo linear equivalence by fixing zero coefficients on
    the rays of the first maximal cone, so the unknowns are the remaining
    Picard-number many coefficients.

    Returns:
        (True, coefficients per ray) for an ample witness, or (False, None)
    """
    fixed = set(fan.maximal_cones[0].ray_ids)
    free = [i for i in range(fan.num_rays) if i not in fixed]
    curves = sorted({rel.as_vector(fan.num_rays) for rel in fan._wall_relations.values()})
    constraints = [(tuple(vector[i] for i in free), STRICT) for vector in curves]
    solution = lp_feasible_strict(constraints, len(free))
    if solution is None:
        return False, None
    witness = [Rational(0)] * fan.num_rays
    for i, value in zip(free, solution):
        witness[i] = value
    logger.debug(f"Ample witness over {len(curves)} distinct wall curves: {witness}")
    return True, tuple(witness)


def primitive_collections(fan: Fan) -> List[PrimitiveCollection]:
    """All minimal non-faces, by increasing size."""
    found = []
    for size in range(2, fan.rank + 2):
        for subset in combinations(range(fan.num_rays), size):
            if fan.is_face(subset):
                continue
            if all(fan.is_face(smaller) for smaller in combinations(subset, size - 1)):
                found.append(PrimitiveCollection(subset))
    return found


def primitive_relation(fan: Fan, collection: Union[PrimitiveCollection, Iterable[int]]) -> PrimitiveRelation:
    """
    The primitive relation of a primitive collection.

    Locates the cone whose relative interior contains the sum of the
    collection by scanning maximal cones for non-negative coordinates.
    """
    if not isinstance(collection, PrimitiveCollection):
        collection = PrimitiveCollection(tuple(collection))
    total = [0] * fan.rank
    for ray_id in collection.ray_ids:
        for axis, value in enumerate(fan.rays[ray_id].vector):
            total[axis] += value

    if not any(total):
        return PrimitiveRelation(collection, ZERO_CONE, (), len(collection))

    for index, cone in enumerate(fan.maximal_cones):
        coords = fan.coordinates(index, total)
        if min(coords) < 0:
            continue
        coefficients = tuple((ray_id, c) for ray_id, c in zip(cone.ray_ids, coords) if c > 0)
        sigma = Cone(tuple(ray_id for ray_id, _ in coefficients))
        relation = PrimitiveRelation(collection, sigma, coefficients,
                                     len(collection) - sum(c for _, c in coefficients))
        if not relation.is_disjoint():
            logger.warning(f"Primitive collection {[fan.rays[i].name for i in collection.ray_ids]} meets "
                           f"its own sigma(P) {fan.ray_names(sigma)}")
        return relation

    raise ConsistencyError(f"Sum of collection {collection.ray_ids} lies in no maximal cone; the fan is corrupted")


def primitive_relations(fan: Fan) -> List[PrimitiveRelation]:
    """Primitive relations of every primitive collection, cached on the fan."""
    if fan._primitive_relations is None:
        fan._primitive_relations = [primitive_relation(fan, p) for p in primitive_collections(fan)]
    return list(fan._primitive_relations)


def is_fano(fan: Fan) -> bool:
    """Fano iff every primitive relation has positive anticanonical degree."""
    return all(rel.degree > 0 for rel in primitive_relations(fan))


def is_weak_fano(fan: Fan) -> bool:
    """Weak Fano iff every wall curve has non-negative anticanonical degree."""
    return all(rel.degree >= 0 for rel in fan._wall_relations.values())


def has_fiber_type_relation(fan: Fan) -> bool:
    """Heuristic Fano-contraction detector: a primitive relation summing to zero."""
    return any(rel.has_zero_rhs() for rel in primitive_relations(fan))


def check_fano_criteria(fan: Fan) -> bool:
    """Compare the primitive-relation Fano test with the wall-curve test."""
    by_relations = is_fano(fan)
    by_walls = all(rel.degree > 0 for rel in fan._wall_relations.values())
    if by_relations != by_walls:
        raise ConsistencyError(f"Fano tests disagree: primitive relations say {by_relations}, "
                               f"wall curves say {by_walls}")
    return by_relations


def transform_fan(fan: Fan, matrix: Sequence[Sequence[int]]) -> Fan:
    """Apply a unimodular change of lattice basis v -> M v to every ray."""
    det = determinant(matrix)
    if abs(det) != 1:
        raise NotUnimodularError(f"Transform has determinant {det}")
    rays = [tuple(sum(int(m) * v for m, v in zip(row, ray.vector)) for row in matrix) for ray in fan.rays]
    return build_fan(rays, [cone.ray_ids for cone in fan.maximal_cones],
                     names=[ray.name for ray in fan.rays])


def fan_to_dict(fan: Fan) -> Dict:
    return {
        "rank": fan.rank,
        "rays": [{"name": ray.name, "vector": list(ray.vector)} for ray in fan.rays],
        "maximal_cones": [list(cone.ray_ids) for cone in fan.maximal_cones],
    }


def fan_from_dict(data: Dict) -> Fan:
    """Build a validated Fan from the JSON structure."""
    try:
        rank = int(data["rank"])
        names = [str(entry["name"]) for entry in data["rays"]]
        vectors = [[int(v) for v in entry["vector"]] for entry in data["rays"]]
        cones = [[int(i) for i in cone] for cone in data["maximal_cones"]]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidFanError(f"Malformed fan description: {e}") from e
    if any(len(v) != rank for v in vectors):
        raise InvalidFanError(f"Ray lengths do not match rank {rank}")
    return build_fan(vectors, cones, names=names)


def load_fan(path: str) -> Fan:
    with open(path) as f:
        data = json.load(f)
    return fan_from_dict(data)


def dump_fan(fan: Fan, path: Optional[str] = None) -> str:
    """Serialize a fan to JSON, writing it to path when given."""
    text = json.dumps(fan_to_dict(fan), indent=2, sort_keys=True)
    if path:
        with open(path, "w") as f:
            f.write(text + "\n")
        logger.info(f"Fan written to {path}")
    return text
