"""Deterministic local hidden variable strategies as exponents in Z_N.

A strategy fixes, for every party and every setting label on the menu, which
detector fires: ``I_l(s) = gamma_N ** a[l, s]``.  A perfect correlation
``prod_l I_l(s_l) = gamma_N ** e`` is then the linear congruence
``sum_l a[l, s_l] = e (mod N)``.

Constraint systems are solved two ways that never share code:

* :func:`solve_congruences` diagonalizes the coefficient matrix with
  unimodular integer row/column operations (valid for composite N, where
  plain Gaussian elimination breaks on non-invertible pivots);
* :func:`enumerate_consistent` checks every strategy against every row.

:func:`achievable_values` runs both when the strategy space fits under the
enumeration cap and refuses to answer if they disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .angles import BellValue, root_of_unity
from .errors import CapExceededError, SolverMismatchError

ENUMERATION_CAP = 10**8

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class ProductConstraint:
    """``prod_l I_l(choice[l]) == gamma_N ** exponent``."""

    choice: tuple[str, ...]
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "choice", tuple(self.choice))
        e = self.exponent
        if isinstance(e, BellValue):
            e = e.exponent
        object.__setattr__(self, "exponent", int(e))


@dataclass(frozen=True)
class LhvStrategy:
    """Exponent table ``assignments[l][s]`` for party l and menu label s."""

    dim: int
    menu: tuple[str, ...]
    assignments: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "menu", tuple(self.menu))
        rows = tuple(tuple(int(a) for a in row) for row in self.assignments)
        for row in rows:
            if len(row) != len(self.menu):
                raise ValueError("each party needs one exponent per menu label")
            if any(not 0 <= a < self.dim for a in row):
                raise ValueError(f"exponents must lie in 0..{self.dim - 1}")
        object.__setattr__(self, "assignments", rows)

    @property
    def parties(self) -> int:
        return len(self.assignments)

    @property
    def vector(self) -> tuple[int, ...]:
        return tuple(a for row in self.assignments for a in row)

    @classmethod
    def from_vector(cls, dim, parties, menu, vec) -> LhvStrategy:
        k = len(menu)
        return cls(dim, menu, tuple(tuple(vec[l * k:(l + 1) * k]) for l in range(parties)))

    def exponent(self, party: int, label: str) -> int:
        """Exponent for 0-based ``party`` at ``label``."""
        try:
            s = self.menu.index(label)
        except ValueError:
            raise KeyError(f"unknown setting label {label!r}") from None
        return self.assignments[party][s]


@dataclass(frozen=True)
class CongruenceSystem:
    """``matrix @ x == rhs (mod modulus)`` over variables ``x[(l, s)]``.

    Column ``l * len(menu) + s`` belongs to party ``l`` (0-based) and menu
    label ``s``.
    """

    modulus: int
    parties: int
    menu: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]

    @property
    def n_vars(self) -> int:
        return self.parties * len(self.menu)

    @property
    def variables(self) -> list[tuple[int, str]]:
        return [(l, s) for l in range(self.parties) for s in self.menu]

    def row_for(self, choice: Sequence[str]) -> tuple[int, ...]:
        """Coefficient row of the product ``prod_l I_l(choice[l])``."""
        if len(choice) != self.parties:
            raise ValueError(f"choice needs {self.parties} labels, got {len(choice)}")
        row = [0] * self.n_vars
        k = len(self.menu)
        for l, label in enumerate(choice):
            if label not in self.menu:
                raise KeyError(f"unknown setting label {label!r}")
            row[l * k + self.menu.index(label)] += 1
        return tuple(row)


@dataclass(frozen=True)
class SolutionSet:
    """All solutions ``particular + span(kernel_basis)`` over Z_N.

    ``count`` is exact.  ``kernel_basis`` generates the homogeneous solution
    group; it need not be independent (for composite N it is a set of
    generators of cyclic summands).
    """

    status: str
    system: CongruenceSystem = field(repr=False)
    particular: LhvStrategy | None
    kernel_basis: tuple[tuple[int, ...], ...]
    count: int

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT

    def contains(self, vec: Sequence[int]) -> bool:
        sys = self.system
        return all(
            sum(c * x for c, x in zip(row, vec)) % sys.modulus == b % sys.modulus
            for row, b in zip(sys.matrix, sys.rhs)
        )

    def values_at(self, row: Sequence[int]) -> frozenset[int]:
        """Every exponent ``row @ x mod N`` over the solution set."""
        if not self.consistent:
            return frozenset()
        n = self.system.modulus
        base = _dot(row, self.particular.vector) % n
        step = n
        for k in self.kernel_basis:
            step = math.gcd(step, _dot(row, k) % n)
        return frozenset((base + t * step) % n for t in range(n // step))


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def _infer_menu(constraints, probe=None) -> tuple[str, ...]:
    menu: list[str] = []
    choices = [c.choice for c in constraints]
    if probe is not None:
        choices.append(tuple(probe))
    for choice in choices:
        for label in choice:
            if label not in menu:
                menu.append(label)
    if not menu:
        raise ValueError("setting menu is empty; pass menu= explicitly")
    return tuple(menu)


def _coerce(constraints) -> list[ProductConstraint]:
    out = []
    for c in constraints:
        if isinstance(c, ProductConstraint):
            out.append(c)
        elif isinstance(c, dict):
            out.append(ProductConstraint(c["choice"], c["exponent"]))
        else:
            choice, e = c
            out.append(ProductConstraint(choice, e))
    return out


def strategy_value(strategy: LhvStrategy, choice: Sequence[str]) -> BellValue:
    if len(choice) != strategy.parties:
        raise ValueError(f"choice needs {strategy.parties} labels, got {len(choice)}")
    e = sum(strategy.exponent(l, label) for l, label in enumerate(choice))
    return BellValue(e, strategy.dim)


def to_congruences(
    dim: int,
    parties: int,
    constraints: Iterable,
    menu: Sequence[str] | None = None,
) -> CongruenceSystem:
    constraints = _coerce(constraints)
    menu = tuple(menu) if menu is not None else _infer_menu(constraints)
    shell = CongruenceSystem(dim, parties, menu, (), ())
    matrix = tuple(shell.row_for(c.choice) for c in constraints)
    rhs = tuple(c.exponent % dim for c in constraints)
    return CongruenceSystem(dim, parties, menu, matrix, rhs)


# -- algebraic solver ------------------------------------------------------


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b)``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def _diagonalize(matrix, rhs, n):
    """Reduce ``A x = b (mod n)`` to ``D y = c`` with ``x = V y``.

    Only determinant-one row and column combinations (plus swaps) are used,
    so ``V`` stays invertible mod n for any n.  Returns ``(diag, c, V)``
    where ``diag`` has ``min(rows, cols)`` entries.
    """
    a = [[x % n for x in row] for row in matrix]
    c = [x % n for x in rhs]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def row_combine(t, i):
        p, q = a[t][t], a[i][t]
        if q % p == 0:
            f = q // p
            a[i] = [(y - f * x) % n for x, y in zip(a[t], a[i])]
            c[i] = (c[i] - f * c[t]) % n
            return
        g, s, u = _egcd(p, q)
        pg, qg = p // g, q // g
        a[t], a[i] = (
            [(s * x + u * y) % n for x, y in zip(a[t], a[i])],
            [(-qg * x + pg * y) % n for x, y in zip(a[t], a[i])],
        )
        c[t], c[i] = (s * c[t] + u * c[i]) % n, (-qg * c[t] + pg * c[i]) % n

    def col_combine(t, j):
        p, q = a[t][t], a[t][j]
        if q % p == 0:
            f = q // p
            for mat in (a, v):
                for r in mat:
                    r[j] = (r[j] - f * r[t]) % n
            return
        g, s, u = _egcd(p, q)
        pg, qg = p // g, q // g
        for mat in (a, v):
            for r in mat:
                r[t], r[j] = (s * r[t] + u * r[j]) % n, (-qg * r[t] + pg * r[j]) % n

    for t in range(min(rows, cols)):
        nonzero = [(a[i][j], i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        a[t], a[pi] = a[pi], a[t]
        c[t], c[pi] = c[pi], c[t]
        for mat in (a, v):
            for r in mat:
                r[t], r[pj] = r[pj], r[t]
        while True:
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    row_combine(t, i)
                    dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    col_combine(t, j)
                    dirty = True
            if not dirty:
                break
    diag = [a[i][i] for i in range(min(rows, cols))]
    return diag, c, v


def solve_congruences(system: CongruenceSystem) -> SolutionSet:
    n = system.modulus
    if n < 2:
        raise ValueError("modulus must be >= 2")
    nv = system.n_vars
    if not system.matrix:
        basis = tuple(tuple(int(i == j) for j in range(nv)) for i in range(nv))
        zero = LhvStrategy.from_vector(n, system.parties, system.menu, [0] * nv)
        return SolutionSet(CONSISTENT, system, zero, basis, n**nv)

    diag, c, v = _diagonalize(system.matrix, system.rhs, n)
    r = len(diag)
    # rows past the diagonal read 0 == c[i]
    if any(c[i] % n for i in range(r, len(c))):
        return SolutionSet(INCONSISTENT, system, None, (), 0)

    y0 = [0] * nv
    gens_y: list[list[int]] = []
    count = 1
    for i in range(nv):
        if i < r:
            g = math.gcd(diag[i], n)
            if c[i] % g:
                return SolutionSet(INCONSISTENT, system, None, (), 0)
            ng = n // g
            if ng > 1:
                y0[i] = (c[i] // g) * pow(diag[i] // g, -1, ng) % ng
        else:
            g = n
        count *= g
        if g > 1:
            gen = [0] * nv
            gen[i] = n // g
            gens_y.append(gen)

    def to_x(y):
        return tuple(sum(v[row][k] * y[k] for k in range(nv)) % n for row in range(nv))

    x0 = to_x(y0)
    particular = LhvStrategy.from_vector(n, system.parties, system.menu, x0)
    basis = tuple(to_x(g) for g in gens_y)
    return SolutionSet(CONSISTENT, system, particular, basis, count)


# -- brute force -----------------------------------------------------------


def _space_size(system: CongruenceSystem) -> int:
    return system.modulus**system.n_vars


def _digit_table(n: int, k: int) -> np.ndarray:
    """All k-digit base-n tuples in lexicographic order, shape ``(n**k, k)``."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((n,) * k, dtype=np.int64).reshape(k, -1).T


def _brute_force(system, probe_row=None, keep=False, cap=None):
    """Check every strategy in Z_N^vars against every row.

    The variables are split into a leading and a trailing half.  Trailing
    assignments are grouped by their partial row sums; a leading assignment
    then matches exactly the trailing group whose sums complete the rhs.
    Every strategy is still examined, once per half.
    """
    cap = ENUMERATION_CAP if cap is None else cap
    size = _space_size(system)
    if size > cap:
        raise CapExceededError(
            size, cap, "strategy enumeration (use solve_congruences instead)"
        )
    n, nv = system.modulus, system.n_vars
    n_trail = nv // 2
    n_lead = nv - n_trail
    mat = np.array(system.matrix, dtype=np.int64).reshape(len(system.matrix), nv)
    rhs = np.array(system.rhs, dtype=np.int64) % n
    probe = np.zeros(nv, dtype=np.int64) if probe_row is None else np.array(probe_row, dtype=np.int64)

    lead = _digit_table(n, n_lead)
    trail = _digit_table(n, n_trail)
    lead_sums = (lead @ mat[:, :n_lead].T) % n
    trail_sums = (trail @ mat[:, n_lead:].T) % n
    lead_probe = (lead @ probe[:n_lead]) % n
    trail_probe = (trail @ probe[n_lead:]) % n

    groups: dict[tuple, list[int]] = {}
    for j, key in enumerate(map(tuple, trail_sums.tolist())):
        groups.setdefault(key, []).append(j)
    group_values = {
        key: set(trail_probe[idx].tolist()) for key, idx in groups.items()
    }

    count = 0
    values: set[int] = set()
    kept = [] if keep else None
    targets = ((rhs[None, :] - lead_sums) % n).tolist()
    for i, target in enumerate(map(tuple, targets)):
        members = groups.get(target)
        if not members:
            continue
        count += len(members)
        if probe_row is not None:
            p = int(lead_probe[i])
            values.update((p + s) % n for s in group_values[target])
        if keep:
            head = lead[i].tolist()
            kept.extend(head + trail[j].tolist() for j in members)
    return count, values, kept


def enumerate_consistent(
    dim: int,
    parties: int,
    constraints: Iterable,
    menu: Sequence[str] | None = None,
    cap: int | None = None,
) -> list[LhvStrategy]:
    """Every strategy meeting all constraints, in lexicographic order."""
    system = to_congruences(dim, parties, constraints, menu)
    _, _, kept = _brute_force(system, keep=True, cap=cap)
    return [LhvStrategy.from_vector(dim, parties, system.menu, vec) for vec in kept]


def count_consistent(dim, parties, constraints, menu=None, cap=None) -> int:
    system = to_congruences(dim, parties, constraints, menu)
    return _brute_force(system, cap=cap)[0]


def achievable_values(
    dim: int,
    parties: int,
    constraints: Iterable,
    probe: Sequence[str],
    menu: Sequence[str] | None = None,
    cap: int | None = None,
) -> frozenset[BellValue]:
    """Values ``prod_l I_l(probe[l])`` taken over all consistent strategies.

    The algebraic answer is always computed.  When the strategy space is at
    most ``cap`` the brute-force answer is computed as well, and a mismatch
    raises :class:`SolverMismatchError`.
    """
    constraints = _coerce(constraints)
    if menu is None:
        menu = _infer_menu(constraints, probe)
    system = to_congruences(dim, parties, constraints, menu)
    row = system.row_for(probe)
    solution = solve_congruences(system)
    exps = solution.values_at(row)
    cap = ENUMERATION_CAP if cap is None else cap
    if _space_size(system) <= cap:
        count, brute, _ = _brute_force(system, probe_row=row, cap=cap)
        if count != solution.count or brute != set(exps):
            raise SolverMismatchError(
                f"algebraic count {solution.count} values {sorted(exps)} vs "
                f"enumeration count {count} values {sorted(brute)}"
            )
    return frozenset(BellValue(e, dim) for e in exps)


def mixture_correlation(
    weighted: Iterable[tuple[LhvStrategy, float]], choice: Sequence[str]
) -> complex:
    """``sum_lambda w(lambda) * prod_l I_l(choice[l], lambda)``."""
    weighted = list(weighted)
    if not weighted:
        raise ValueError("mixture is empty")
    if any(w < 0 for _, w in weighted):
        raise ValueError("mixture weights must be nonnegative")
    total = math.fsum(w for _, w in weighted)
    if abs(total - 1) > 1e-12:
        raise ValueError(f"mixture weights sum to {total!r}, not 1")
    acc = 0j
    for strategy, w in weighted:
        e = strategy_value(strategy, choice)
        acc += w * root_of_unity(e.exponent, e.order)
    return acc
