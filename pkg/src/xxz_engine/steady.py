"""Stationary populations of the four-level rate equation.

Three routes, kept deliberately independent so they can cross-validate:

* ``steady_state_solve`` -- the primary path: build the Pauli generator M
  (dP/dt = M P), replace one row with the normalization constraint and
  solve the 4x4 linear system.
* ``steady_state_closed_form`` -- the analytic elimination of the same
  balance equations in terms of the per-pair aggregates E_ij / A_ij;
  a validation artifact, not the primary path.
* ``gibbs_state`` -- thermal populations, the exact stationary state
  whenever both reservoirs share one temperature.

Populations in deeply gapped, low-temperature configurations span hundreds
of orders of magnitude; the solver polishes components below
``TINY_POPULATION`` with an exact back-substitution on their sub-block so
that even ~1e-90 occupations keep relative (not just absolute) accuracy.
Heat currents and entropy production inherit their sign from those tiny
components, so this matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baths import RateSet
from .model import EigenSystem

#: Slack on the [0, 1] range and on the sum-to-one constraint.
POPULATION_ATOL = 1e-12

#: Components below this are re-solved by back-substitution for relative accuracy.
TINY_POPULATION = 1e-12

#: Acceptable stationarity residual max|M P| of a returned steady state.
RESIDUAL_TOL = 1e-12

#: Denominator floor below which the closed-form expressions are meaningless.
_CLOSED_FORM_FLOOR = 1e-14


class SteadyStateError(RuntimeError):
    """Base class for steady-state computation failures."""


class NonUniqueSteadyStateError(SteadyStateError):
    """The rate network does not pin down a unique stationary distribution."""


class ClosedFormInapplicableError(SteadyStateError):
    """A closed-form denominator vanished; fall back to the linear solver."""


@dataclass(frozen=True)
class PopulationVector:
    """Occupation probabilities (P1, P2, P3, P4); normalized, each in [0, 1]."""

    p: tuple[float, float, float, float]

    def __post_init__(self):
        total = 0.0
        for value in self.p:
            if not math.isfinite(value):
                raise ValueError(f"population must be finite, got {value!r}")
            if value < -POPULATION_ATOL or value > 1.0 + POPULATION_ATOL:
                raise ValueError(f"population {value!r} outside [0, 1]")
            total += value
        if abs(total - 1.0) > POPULATION_ATOL:
            raise ValueError(f"populations sum to {total!r}, expected 1")

    def probability(self, state: int) -> float:
        """Occupation of state ``state`` in 1..4."""
        return self.p[state - 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.p, dtype=float)


@dataclass(frozen=True)
class RateGenerator:
    """Generator M of the population dynamics dP/dt = M P.

    Columns sum to zero to within one ulp (probability conservation is
    compensated into the diagonal at construction) and off-diagonal entries
    are nonnegative.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.shape != (4, 4):
            raise ValueError(f"generator must be 4x4, got {m.shape}")
        off = m - np.diag(np.diag(m))
        if np.any(off < 0.0):
            raise ValueError("off-diagonal generator entries must be >= 0")
        scale = max(np.abs(m).max(), 1.0)
        if np.abs(m.sum(axis=0)).max() > 1e-15 * scale * 4:
            raise ValueError("generator columns must sum to zero")
        m.setflags(write=False)


def _generator_rows(rates: RateSet) -> list[list[float]]:
    """Generator rows as plain floats; columns compensated to sum to zero."""
    m = [[0.0] * 4 for _ in range(4)]
    for entry in rates.entries:
        u, l = entry.upper - 1, entry.lower - 1
        m[l][u] += entry.emission_total
        m[u][l] += entry.absorption_total
    for col in range(4):
        off = 0.0
        for row in range(4):
            if row != col:
                off += m[row][col]
        m[col][col] = -off
        for _ in range(3):  # compensate the re-summation rounding away
            residual = m[0][col] + m[1][col] + m[2][col] + m[3][col]
            if residual == 0.0:
                break
            m[col][col] -= residual
    return m


def generator_matrix(rates: RateSet) -> RateGenerator:
    """Assemble the Pauli generator from per-pair emission/absorption totals.

    Each canonical pair (u, l) contributes emission u -> l and absorption
    l -> u; the diagonal is set to the negated off-diagonal column sum so
    the column sums vanish to the last bit.
    """
    return RateGenerator(matrix=np.array(_generator_rows(rates)))


class _SingularSystem(Exception):
    """Internal: the pivoted elimination hit a zero pivot."""


def _lu_solve(a_rows: list[list[float]], b: list[float]) -> list[float]:
    """Gaussian elimination with deterministic partial pivoting (n <= 4)."""
    n = len(b)
    a = [row[:] for row in a_rows]
    x = list(b)
    for col in range(n):
        pivot_row = col
        pivot = abs(a[col][col])
        for row in range(col + 1, n):
            candidate = abs(a[row][col])
            if candidate > pivot:
                pivot, pivot_row = candidate, row
        if pivot == 0.0:
            raise _SingularSystem(f"zero pivot in column {col}")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            x[col], x[pivot_row] = x[pivot_row], x[col]
        lead = a[col][col]
        for row in range(col + 1, n):
            factor = a[row][col] / lead
            if factor != 0.0:
                arow, acol = a[row], a[col]
                for k in range(col + 1, n):
                    arow[k] -= factor * acol[k]
                x[row] -= factor * x[col]
            a[row][col] = 0.0
    for col in range(n - 1, -1, -1):
        acc = x[col]
        arow = a[col]
        for k in range(col + 1, n):
            acc -= arow[k] * x[k]
        x[col] = acc / arow[col]
    return x


def _polish_tiny_components(m: list[list[float]], p: list[float]) -> list[float]:
    """Re-solve the tiny-population sub-block by direct back-substitution.

    The row-replacement solve leaves components far below the norm of the
    solution with absolute (machine-epsilon level) instead of relative
    accuracy.  At stationarity those components satisfy their own balance
    equations with the large components as sources, a small strictly
    dominated linear system with nonnegative data that solves to
    componentwise relative accuracy.
    """
    tiny = [i for i in range(4) if abs(p[i]) < TINY_POPULATION]
    big = [i for i in range(4) if abs(p[i]) >= TINY_POPULATION]
    if not tiny or not big:
        return p
    sub = [[m[r][c] for c in tiny] for r in tiny]
    rhs = [-sum(m[r][c] * p[c] for c in big) for r in tiny]
    try:
        solved = _lu_solve(sub, rhs)
    except _SingularSystem:
        return p  # degenerate sub-block: keep the unpolished values
    p = list(p)
    for index, value in zip(tiny, solved):
        p[index] = value
    return p


def steady_state_solve(rates: RateSet) -> PopulationVector:
    """Unique stationary distribution of the rate network.

    Replaces the first generator row with the normalization constraint
    (any single row is redundant: the columns of M sum to zero) and solves
    the resulting 4x4 system with one step of iterative refinement plus the
    tiny-component polish.  Raises ``NonUniqueSteadyStateError`` when the
    constrained system is singular or the solution fails the stationarity
    residual -- e.g. all rates zero, or a level graph that splits into
    disconnected pieces at zero temperature.
    """
    m = _generator_rows(rates)
    a = [[1.0, 1.0, 1.0, 1.0], m[1], m[2], m[3]]
    b = [1.0, 0.0, 0.0, 0.0]
    try:
        p = _lu_solve(a, b)
        shortfall = [bi - sum(ai * pi for ai, pi in zip(row, p))
                     for row, bi in zip(a, b)]
        correction = _lu_solve(a, shortfall)
        p = [pi + ci for pi, ci in zip(p, correction)]
    except _SingularSystem as exc:
        raise NonUniqueSteadyStateError(
            "constrained steady-state system is singular (disconnected or "
            "rate-free level graph)"
        ) from exc
    if not all(math.isfinite(x) for x in p):
        raise NonUniqueSteadyStateError("steady-state solve produced non-finite values")
    p = _polish_tiny_components(m, p)
    residual = max(abs(sum(m[r][c] * p[c] for c in range(4))) for r in range(4))
    if residual > RESIDUAL_TOL:
        raise NonUniqueSteadyStateError(
            f"stationarity residual {residual:.3e} exceeds {RESIDUAL_TOL:g}; "
            "the steady state is not uniquely determined"
        )
    return PopulationVector(p=(p[0], p[1], p[2], p[3]))


def _directed_aggregates(rates: RateSet):
    """Map canonical rates onto downhill/uphill flows in fixed pair labels.

    Returns (E, A) keyed by pair (i, j) with i in {1,2}, j in {3,4}:
    E[(i,j)] is the total rate carrying population i -> j and A[(i,j)] the
    reverse.  When the pair is inverted (state j above state i) the roles
    of emission and absorption swap.
    """
    e_flow = {}
    a_flow = {}
    for entry in rates.entries:
        i, j = entry.pair
        if entry.upper == i:
            e_flow[(i, j)] = entry.emission_total
            a_flow[(i, j)] = entry.absorption_total
        else:
            e_flow[(i, j)] = entry.absorption_total
            a_flow[(i, j)] = entry.emission_total
    return e_flow, a_flow


def steady_state_closed_form(rates: RateSet) -> PopulationVector:
    """Analytic stationary populations from the pairwise aggregates.

    Eliminates P1 and P2 through their own balance equations, solves for
    the ratio P4/P3 = r2/r1 from the state-3 balance, and normalizes:

        P1/P3 = (A13 r1 + A14 r2) / (r1 (E13 + E14)),
        P2/P3 = (A23 r1 + A24 r2) / (r1 (E23 + E24)),
        P4/P3 = r2 / r1,

    with E_ij/A_ij the total downhill/uphill rates between states i and j
    in the fixed (i in {1,2}, j in {3,4}) labeling.  Raises
    ``ClosedFormInapplicableError`` whenever a denominator falls below
    ``_CLOSED_FORM_FLOOR`` (frozen reservoirs can underflow entire
    aggregates to zero); callers then fall back to ``steady_state_solve``.
    """
    e_flow, a_flow = _directed_aggregates(rates)
    e13, e14 = e_flow[(1, 3)], e_flow[(1, 4)]
    e23, e24 = e_flow[(2, 3)], e_flow[(2, 4)]
    a13, a14 = a_flow[(1, 3)], a_flow[(1, 4)]
    a23, a24 = a_flow[(2, 3)], a_flow[(2, 4)]

    out1 = e13 + e14  # total outflow of state 1
    out2 = e23 + e24
    into3 = a13 + a23  # total outflow of state 3
    for name, value in (("E13+E14", out1), ("E23+E24", out2), ("A13+A23", into3)):
        if abs(value) < _CLOSED_FORM_FLOOR:
            raise ClosedFormInapplicableError(f"aggregate {name} = {value:g} is too small")

    r1 = e13 * a14 / (into3 * out1) + e23 * a24 / (into3 * out2)
    r2 = 1.0 - e13 * a13 / (into3 * out1) - e23 * a23 / (into3 * out2)
    if abs(r1 * out1) < _CLOSED_FORM_FLOOR or abs(r1 * out2) < _CLOSED_FORM_FLOOR:
        raise ClosedFormInapplicableError(f"ratio denominator r1 = {r1:g} is too small")

    ratio1 = (a13 * r1 + a14 * r2) / (r1 * out1)
    ratio2 = (a23 * r1 + a24 * r2) / (r1 * out2)
    ratio4 = r2 / r1
    p3 = 1.0 / (ratio1 + ratio2 + ratio4 + 1.0)
    return PopulationVector(p=(ratio1 * p3, ratio2 * p3, p3, ratio4 * p3))


def gibbs_state(eigen: EigenSystem, T: float) -> PopulationVector:
    """Thermal populations P_i = exp(-E_i/T)/Z, shifted by the ground energy
    before exponentiation so low temperatures cannot overflow."""
    if not (isinstance(T, (int, float)) and math.isfinite(T)) or T <= 0.0:
        raise ValueError(f"temperature must be positive and finite, got {T!r}")
    energies = eigen.as_array()
    weights = np.exp(-(energies - energies.min()) / T)
    weights /= weights.sum()
    return PopulationVector(p=tuple(float(w) for w in weights))
