"""
Exact Linear Algebra

Integer and rational linear algebra for lattice computations: determinants,
coordinates in a basis, dual bases and a small exact feasibility solver.
Everything is arbitrary precision; there is no floating point in this module.
"""
import logging
from math import gcd
from typing import List, Optional, Sequence, Tuple

import sympy
from sympy import Rational

from errors import DimensionError, SingularMatrixError, NotUnimodularError, ConsistencyError

logger = logging.getLogger(__name__)

IntegerVector = Tuple[int, ...]
Covector = Tuple[int, ...]

STRICT = ">0"
EQUAL = "=0"


def _as_matrix(rows: Sequence[Sequence[int]]) -> sympy.Matrix:
    """Build a square sympy matrix, rejecting ragged or non-square input."""
    size = len(rows)
    if any(len(row) != size for row in rows):
        raise DimensionError(f"Expected a {size}x{size} matrix, got row lengths {[len(r) for r in rows]}")
    return sympy.Matrix(rows)


def pairing(m: Sequence[int], v: Sequence[int]) -> int:
    """Integer pairing <m, v> between a covector and a lattice vector."""
    if len(m) != len(v):
        raise DimensionError(f"Cannot pair vectors of lengths {len(m)} and {len(v)}")
    return sum(a * b for a, b in zip(m, v))


def is_primitive(v: Sequence[int]) -> bool:
    """True for nonzero integer vectors whose entries have gcd 1."""
    g = 0
    for entry in v:
        g = gcd(g, int(entry))
    return g == 1


def determinant(m: Sequence[Sequence[int]]) -> int:
    """
    Exact determinant of a square integer matrix.

    Args:
        m: rows of the matrix

    Returns:
        The determinant as a Python integer
    """
    if len(m) == 0:
        return 1
    return int(_as_matrix(m).det(method="bareiss"))


def inverse_matrix(basis: Sequence[Sequence[int]]) -> sympy.Matrix:
    """
    Inverse of the matrix whose columns are the given basis vectors.

    Row i of the result is the functional that reads off the i-th
    coordinate in this basis.
    """
    columns = _as_matrix(basis).T
    if columns.det(method="bareiss") == 0:
        raise SingularMatrixError(f"Basis {list(map(tuple, basis))} is singular")
    return columns.inv()


def solve_in_basis(basis: Sequence[Sequence[int]], target: Sequence[int]) -> List[Rational]:
    """
    Coordinates of target in the given basis.

    Args:
        basis: d linearly independent vectors of length d
        target: vector of length d

    Returns:
        Rationals c with sum(c[i] * basis[i]) == target
    """
    if len(target) != len(basis):
        raise DimensionError(f"Target of length {len(target)} does not match a basis of size {len(basis)}")
    inverse = inverse_matrix(basis)
    coords = inverse * sympy.Matrix(list(target))
    return [Rational(c) for c in coords]


def dual_functional(basis: Sequence[Sequence[int]], index: int) -> Covector:
    """
    Dual basis element for a unimodular basis.

    Returns the covector m with <m, basis[index]> = 1 and <m, basis[j]> = 0
    for every other j.
    """
    if not 0 <= index < len(basis):
        raise DimensionError(f"Index {index} out of range for a basis of size {len(basis)}")
    det = determinant(basis)
    if abs(det) != 1:
        raise NotUnimodularError(f"Basis has determinant {det}, expected +-1")
    inverse = inverse_matrix(basis)
    return tuple(int(entry) for entry in inverse.row(index))


def lp_feasible_strict(constraints: Sequence[Tuple[Sequence[int], str]],
                       num_vars: Optional[int] = None) -> Optional[Tuple[Rational, ...]]:
    """
    Decide feasibility of a homogeneous system of strict inequalities and equations.

    Each constraint is (covector, relation) with relation ">0" or "=0". Strict
    inequalities are replaced by ">= 1", which is equivalent for homogeneous
    systems. Solved by phase one of the simplex method over the rationals with
    Bland's rule.

    Args:
        constraints: list of (coefficients, relation) pairs
        num_vars: number of unknowns; inferred from the first constraint if omitted

    Returns:
        A witness point with every constraint satisfied, or None if infeasible
    """
    if num_vars is None:
        num_vars = len(constraints[0][0]) if constraints else 0
    for coeffs, relation in constraints:
        if len(coeffs) != num_vars:
            raise DimensionError(f"Constraint {tuple(coeffs)} has {len(coeffs)} entries, expected {num_vars}")
        if relation not in (STRICT, EQUAL):
            raise ValueError(f"Unknown relation {relation!r}; use '{STRICT}' or '{EQUAL}'")

    if not constraints:
        return tuple(Rational(0) for _ in range(num_vars))

    tableau = _SimplexTableau(constraints, num_vars)
    witness = tableau.find_feasible_point()
    if witness is None:
        return None

    for coeffs, relation in constraints:
        value = sum(Rational(a) * x for a, x in zip(coeffs, witness))
        if (relation == STRICT and value < 1) or (relation == EQUAL and value != 0):
            raise ConsistencyError(f"Simplex witness {witness} violates {tuple(coeffs)} {relation}")
    return witness


class _SimplexTableau:
    """
    Phase-one simplex tableau for A x (>= 1 | = 0) with free x.

    Free variables are split as x = p - q with p, q >= 0. Column layout is
    p_0..p_{n-1}, q_0..q_{n-1}, one surplus per strict row, one artificial per row.
    """

    def __init__(self, constraints, num_vars: int):
        self.num_vars = num_vars
        strict_rows = [i for i, (_, rel) in enumerate(constraints) if rel == STRICT]
        self.num_rows = len(constraints)
        self.num_surplus = len(strict_rows)
        self.first_artificial = 2 * num_vars + self.num_surplus
        self.num_cols = self.first_artificial + self.num_rows

        self.rows: List[List[Rational]] = []
        self.rhs: List[Rational] = []
        surplus_col = {row: 2 * num_vars + k for k, row in enumerate(strict_rows)}
        for i, (coeffs, relation) in enumerate(constraints):
            row = [Rational(0)] * self.num_cols
            for j, a in enumerate(coeffs):
                row[j] = Rational(a)
                row[num_vars + j] = -Rational(a)
            if relation == STRICT:
                row[surplus_col[i]] = Rational(-1)
            row[self.first_artificial + i] = Rational(1)
            self.rows.append(row)
            self.rhs.append(Rational(1) if relation == STRICT else Rational(0))

        self.basis = [self.first_artificial + i for i in range(self.num_rows)]
        # Reduced costs of the phase-one objective (minimize the sum of artificials)
        self.costs = [Rational(0)] * self.num_cols
        for j in range(self.first_artificial):
            self.costs[j] = -sum((row[j] for row in self.rows), Rational(0))

    def _pivot(self, r: int, c: int) -> None:
        pivot_row = self.rows[r]
        piv = pivot_row[c]
        self.rows[r] = [entry / piv for entry in pivot_row]
        self.rhs[r] = self.rhs[r] / piv
        pivot_row = self.rows[r]
        for i in range(self.num_rows):
            if i == r:
                continue
            factor = self.rows[i][c]
            if factor == 0:
                continue
            self.rows[i] = [a - factor * b for a, b in zip(self.rows[i], pivot_row)]
            self.rhs[i] = self.rhs[i] - factor * self.rhs[r]
        factor = self.costs[c]
        if factor != 0:
            self.costs = [a - factor * b for a, b in zip(self.costs, pivot_row)]
        self.basis[r] = c

    def find_feasible_point(self) -> Optional[Tuple[Rational, ...]]:
        iterations = 0
        while True:
            # Bland's rule: lowest-index improving column, artificials never re-enter
            entering = next((j for j in range(self.first_artificial) if self.costs[j] < 0), None)
            if entering is None:
                break
            best = None
            for i in range(self.num_rows):
                a = self.rows[i][entering]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                # Phase one is bounded below by zero, so this cannot happen
                raise ConsistencyError("Phase-one simplex reported an unbounded direction")
            self._pivot(best[1], entering)
            iterations += 1

        objective = sum((self.rhs[i] for i, col in enumerate(self.basis) if col >= self.first_artificial), Rational(0))
        logger.debug(f"Phase-one simplex finished after {iterations} pivots, objective {objective}")
        if objective != 0:
            return None

        values = [Rational(0)] * self.num_cols
        for i, col in enumerate(self.basis):
            values[col] = self.rhs[i]
        n = self.num_vars
        return tuple(values[j] - values[n + j] for j in range(n))
