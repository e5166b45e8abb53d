"""Exact constructors for the concrete arrangements used as fixtures.

Coordinates on a direct sum of copies of R^n are laid out copy-major: the
a-th coordinate of the b-th copy (both 1-based) sits at index (b-1)*n + (a-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arrangements import Arrangement, g_closure
from .errors import BadParam
from .exact import Subspace, block_diag, identity
from .groups import FiniteMatrixGroup, GroupElement, generate, trivial_group
from .ration import Ration


@dataclass
class Instance:
    name: str
    arrangement: Arrangement
    group: FiniteMatrixGroup
    notes: str = ""
    symmetry: FiniteMatrixGroup | None = None  # group used to close the seed subspace
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = self.arrangement.to_json(self.group)
        d["name"] = self.name
        d["notes"] = self.notes
        if self.params:
            d["params"] = self.params
        return d


def _unit(m: int, i: int) -> list:
    row = [0] * m
    row[i] = 1
    return row


def w_n(n: int) -> Subspace:
    """W_n = {x in R^n : x_1 + ... + x_n = 0}."""
    if n < 2:
        raise BadParam("W_n needs n >= 2")
    return Subspace([[1] * n], n)


def w_n_sum(n: int, copies: int) -> Subspace:
    """(W_n)^{+copies} inside R^{n*copies}."""
    if n < 2 or copies < 1:
        raise BadParam("need n >= 2 and at least one copy")
    m = n * copies
    rows = []
    for b in range(copies):
        row = [0] * m
        for a in range(n):
            row[b * n + a] = 1
        rows.append(row)
    return Subspace(rows, m)


def shift_matrix(n: int, step: int = 1):
    """Permutation matrix of x -> (x_n, x_1, ..., x_{n-1}) (step 1) or its powers."""
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        M[i][(i - step) % n] = 1
    return M


def reversal_matrix(n: int):
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        M[i][n - 1 - i] = 1
    return M


def _diag(M, copies: int) -> GroupElement:
    return GroupElement(block_diag([tuple(tuple(Fraction(x) for x in row) for row in M)] * copies))


def dihedral_generators(n: int, copies: int = 1) -> list[GroupElement]:
    """Shift omega and reversal sigma, acting diagonally on copies of R^n."""
    if n < 2 or copies < 1:
        raise BadParam("need n >= 2 and at least one copy")
    return [_diag(shift_matrix(n), copies), _diag(reversal_matrix(n), copies)]


def dihedral_group(n: int, copies: int = 1) -> FiniteMatrixGroup:
    return generate(dihedral_generators(n, copies))


def cyclic_group(n: int, copies: int = 1) -> FiniteMatrixGroup:
    return generate([_diag(shift_matrix(n), copies)])


def half_turn_group(n: int, copies: int = 1) -> FiniteMatrixGroup:
    """The subgroup generated by the shift to the power n/2 (order 2)."""
    if n % 2:
        raise BadParam("the half-turn subgroup needs even n")
    return generate([_diag(shift_matrix(n, n // 2), copies)])


def origin_plane() -> Instance:
    A = Arrangement([Subspace(identity(2), 2)], 2, ["origin"])
    return Instance(
        "origin_plane",
        A,
        trivial_group(2),
        "origin of R^2 with forms x1, x2; its blow-up in R^4 is cut out by x1 = x4 = 0",
    )


def shift_orbit(n: int = 3) -> Instance:
    """Orbit of {x_{1,1} = x_{1,2} = x_{1,3} = 0} under Z/n acting diagonally on W_n^{+3}."""
    if n < 3 or n % 2 == 0:
        raise BadParam("shift_orbit needs an odd n >= 3")
    m = 3 * n
    V = w_n_sum(n, 3)
    L = Subspace(list(V.forms) + [_unit(m, b * n) for b in range(3)], m)
    # the shift here runs (x_1..x_n) -> (x_2, ..., x_n, x_1)
    G = generate([_diag(shift_matrix(n, -1), 3)])
    A = g_closure(G, Arrangement([L], V, ["L"]))
    return Instance(
        "shift_orbit",
        A,
        G,
        f"Z/{n} acting by the cyclic shift on W_{n}^3; arrangement is the orbit of L",
        G,
        {"n": n},
    )


def five_atoms() -> Instance:
    """Orbit of {x1 = x2 = x3 = x4 + x5 = 0} in W_5 under the Z/5 shift."""
    V = w_n(5)
    L = Subspace([[1, 1, 1, 1, 1], _unit(5, 0), _unit(5, 1), _unit(5, 2), [0, 0, 0, 1, 1]], 5)
    G = generate([_diag(shift_matrix(5, -1), 1)])
    A = g_closure(G, Arrangement([L], V, ["L"]))
    return Instance("five_atoms", A, G, "Z/5 acting on W_5 by the cyclic shift", G)


def _block_equalities(ration: Ration, m: int, copy: int) -> list[list[int]]:
    n, half = ration.n, ration.n // 2
    rows = []
    for block in ration.blocks()[: ration.k]:
        row = [0] * m
        for s in block:
            row[copy * n + s] += 1
            row[copy * n + s + half] -= 1
        rows.append(row)
    return rows


def _angle_equalities(ration: Ration, m: int, copy: int) -> list[list[int]]:
    n, half = ration.n, ration.n // 2
    rows = []
    for start in ration.boundaries():
        row = [0] * m
        for s in range(start, start + half):
            row[copy * n + s] = 1
        rows.append(row)
    return rows


def fan_test_space(ration: Ration, j: int) -> Instance:
    """D_2n-closure of the block-balance subspace L_fan in (W_n)^{+(j-1)}; checked against the half-turn Z/2."""
    if j < 2:
        raise BadParam("the fan test space needs j >= 2")
    n, copies = ration.n, j - 1
    m = n * copies
    V = w_n_sum(n, copies)
    rows = list(V.forms)
    for i in range(copies):
        rows += _block_equalities(ration, m, i)
    L = Subspace(rows, m)
    D = dihedral_group(n, copies)
    A = g_closure(D, Arrangement([L], V, ["L_fan"]))
    return Instance(
        "fan_test",
        A,
        half_turn_group(n, copies),
        f"fan test space: ration {ration}, j={j}; closure under D_{2 * n}, checked with Z/2",
        D,
        {"ration": list(ration.parts), "j": j},
    )


def straight_cut_test_space(ration: Ration, j: int) -> Instance:
    """D_2n-closure of the half-plane subspace L_cut in W_n + (W_n)^{+(j-1)}; checked against the half-turn Z/2."""
    if j < 1:
        raise BadParam("the straight-cut test space needs j >= 1")
    n = ration.n
    m = n * j
    V = w_n_sum(n, j)
    rows = list(V.forms) + _angle_equalities(ration, m, 0)
    for i in range(1, j):
        rows += _block_equalities(ration, m, i)
    L = Subspace(rows, m)
    D = dihedral_group(n, j)
    A = g_closure(D, Arrangement([L], V, ["L_cut"]))
    return Instance(
        "straight_cut_test",
        A,
        half_turn_group(n, j),
        f"straight-cut test space: ration {ration}, j={j}; closure under D_{2 * n}, checked with Z/2",
        D,
        {"ration": list(ration.parts), "j": j},
    )


BUILDERS = {
    "origin_plane": lambda **kw: origin_plane(),
    "shift_orbit": lambda n=3, **kw: shift_orbit(n),
    "five_atoms": lambda **kw: five_atoms(),
    "fan_test": lambda ration, j=2, **kw: fan_test_space(ration, j),
    "straight_cut_test": lambda ration, j=1, **kw: straight_cut_test_space(ration, j),
}
