"""Finite groups of rational matrices acting on R^m and on its subspaces."""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Sequence

from .errors import AmbientMismatch, BadParam, CapExceeded, NotRealizable, PreconditionViolated
from .exact import (
    Matrix,
    Subspace,
    as_matrix,
    block_diag,
    identity,
    intersect,
    mat_inv,
    mat_mul,
    mat_sub,
    nullspace,
    rank,
    rref,
)

DEFAULT_CAP = 10_000


class GroupElement:
    """An invertible m x m rational matrix; caches its inverse."""

    __slots__ = ("matrix", "_inverse")

    def __init__(self, matrix):
        M = as_matrix(matrix)
        m = len(M)
        if any(len(row) != m for row in M):
            raise BadParam("group elements must be square matrices")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "_inverse", None)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def inverse(self) -> Matrix:
        if self._inverse is None:
            object.__setattr__(self, "_inverse", mat_inv(self.matrix))
        return self._inverse

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(mat_mul(self.matrix, other.matrix))

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"GroupElement({[[str(x) for x in row] for row in self.matrix]})"

    def is_identity(self) -> bool:
        return self.matrix == identity(self.dim)


class FiniteMatrixGroup:
    """A finite matrix group given by generators, with its full element list.

    Elements are enumerated breadth-first over generator words, so the order
    is deterministic and ``elements[0]`` is the identity.
    """

    def __init__(self, generators: Sequence[GroupElement], elements: Sequence[GroupElement], ambient_dim: int):
        self.generators = tuple(generators)
        self.elements = tuple(elements)
        self.ambient_dim = ambient_dim
        self.identity_index = 0

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"FiniteMatrixGroup(order={self.order}, ambient_dim={self.ambient_dim})"

    def is_trivial(self) -> bool:
        return self.order == 1

    def non_identity(self):
        return self.elements[1:]

    def is_abelian(self) -> bool:
        gens = self.generators
        return all((a * b) == (b * a) for i, a in enumerate(gens) for b in gens[i + 1:])

    def elementary_abelian_prime(self) -> int | None:
        """The prime p if this group is (Z/p)^r with r >= 1, else None."""
        if self.order == 1 or not self.is_abelian():
            return None
        n, p = self.order, None
        for q in range(2, n + 1):
            if n % q == 0:
                p = q
                break
        while n % p == 0:
            n //= p
        if n != 1:
            return None
        e = GroupElement(identity(self.ambient_dim))
        for g in self.elements:
            h = g
            for _ in range(p - 1):
                h = h * g
            if h != e:
                return None
        return p

    def to_json(self) -> dict:
        from .exact import matrix_to_json

        return {"generators": [matrix_to_json(g.matrix) for g in self.generators]}


def generate(gens: Sequence, cap: int = DEFAULT_CAP, ambient_dim: int | None = None) -> FiniteMatrixGroup:
    """Close a set of invertible matrices under multiplication.

    In a finite group closure under products already gives inverses.
    """
    gens = [g if isinstance(g, GroupElement) else GroupElement(g) for g in gens]
    if ambient_dim is None:
        if not gens:
            raise BadParam("need generators or an explicit ambient dimension")
        ambient_dim = gens[0].dim
    for g in gens:
        if g.dim != ambient_dim:
            raise AmbientMismatch(f"generator of size {g.dim} in R^{ambient_dim}")
        if rank(g.matrix) != ambient_dim:
            raise BadParam("generator is not invertible")
    e = GroupElement(identity(ambient_dim))
    elements = [e]
    seen = {e}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x * g
            if y not in seen:
                if len(elements) >= cap:
                    raise CapExceeded(f"group has more than {cap} elements (or is infinite)")
                seen.add(y)
                elements.append(y)
                queue.append(y)
    return FiniteMatrixGroup(gens, elements, ambient_dim)


def trivial_group(m: int) -> FiniteMatrixGroup:
    return generate([], ambient_dim=m)


def diagonal_group(G: FiniteMatrixGroup, copies: int) -> FiniteMatrixGroup:
    """G acting diagonally on (R^m)^copies via block-diagonal matrices."""
    gens = [GroupElement(block_diag([g.matrix] * copies)) for g in G.generators]
    return generate(gens, cap=max(G.order, 1), ambient_dim=G.ambient_dim * copies)


def act_on_subspace(g: GroupElement, S: Subspace) -> Subspace:
    """gS = {gx : x in S}; its forms are F g^-1."""
    if g.dim != S.ambient_dim:
        raise AmbientMismatch(f"group element of size {g.dim} on R^{S.ambient_dim}")
    if not S.forms:
        return S
    return Subspace(mat_mul(S.forms, g.inverse), S.ambient_dim)


def fixed_subspace(G: FiniteMatrixGroup, V: Subspace | None = None) -> Subspace:
    m = G.ambient_dim
    if V is None:
        V = Subspace.whole(m)
    if V.ambient_dim != m:
        raise AmbientMismatch(f"group on R^{m}, subspace in R^{V.ambient_dim}")
    rows = list(V.forms)
    I = identity(m)
    for g in G.generators:
        rows.extend(mat_sub(g.matrix, I))
    return Subspace(rows, m)


def orbit(G: FiniteMatrixGroup, S: Subspace) -> list[Subspace]:
    if S.ambient_dim != G.ambient_dim:
        raise AmbientMismatch(f"group on R^{G.ambient_dim}, subspace in R^{S.ambient_dim}")
    out, seen = [], set()
    for g in G.elements:
        T = act_on_subspace(g, S)
        if T not in seen:
            seen.add(T)
            out.append(T)
    return out


def preserves(G: FiniteMatrixGroup, V: Subspace) -> bool:
    return all(act_on_subspace(g, V) == V for g in G.generators)


def _coords(vec, basis_rref: Matrix, pivots: list[int]) -> list[Fraction]:
    # basis in RREF: coordinates are the entries at the pivot columns
    return [vec[p] for p in pivots]


def _induced_matrix(g: GroupElement, basis: Matrix, pivots: list[int]) -> Matrix:
    """Matrix of xi -> xi g^-1 on the row space spanned by an RREF basis."""
    images = mat_mul(basis, g.inverse)
    return tuple(tuple(_coords(row, basis, pivots)) for row in images)


def sign_eigenforms(G: FiniteMatrixGroup, L: Subspace, ambient: Subspace | None = None) -> list[tuple]:
    """Defining forms of L on which every group element acts by +1 or -1.

    Returns codim_ambient(L) forms which, together with the ambient's own
    forms, cut out L, and satisfy xi g^-1 = +-xi for every g in G.  Works by
    splitting the form space of L into joint eigenspaces of the generators.
    """
    m = G.ambient_dim
    if ambient is None:
        ambient = Subspace.whole(m)
    if L.ambient_dim != m or ambient.ambient_dim != m:
        raise AmbientMismatch("group and subspace live in different spaces")
    for idx, g in enumerate(G.elements):
        if act_on_subspace(g, L) != L:
            raise PreconditionViolated(f"group element #{idx} moves the subspace")
    if not L.forms:
        return []
    basis = L.forms
    r = len(basis)
    pivots = [next(c for c, x in enumerate(row) if x != 0) for row in basis]
    I = identity(r)
    mats = [_induced_matrix(g, basis, pivots) for g in G.generators]
    for A in mats:
        if mat_mul(A, A) != I:
            raise NotRealizable("a generator acts on the form space with an eigenvalue other than +-1")
    for i, A in enumerate(mats):
        for B in mats[i + 1:]:
            if mat_mul(A, B) != mat_mul(B, A):
                raise NotRealizable("the induced action on the form space is not simultaneously diagonalizable")
    # joint eigenspaces, as coordinate vectors in the basis
    spaces = [identity(r)]
    for A in mats:
        plus, minus = mat_sub(A, I), tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, I))
        split = []
        for S in spaces:
            for M in (plus, minus):
                # vectors c in span(S) with c A = +-c, i.e. c (A -+ I) = 0
                coeffs = nullspace(_transpose_mul(S, M), len(S)) if S else ()
                if coeffs:
                    vecs = rref(mat_mul(coeffs, S), r)
                    split.append(vecs)
        spaces = split
    # eigenform candidates, then greedy completion of the ambient's forms
    candidates = []
    for S in spaces:
        candidates.extend(mat_mul(S, basis))
    chosen = []
    current = list(ambient.forms)
    base_rank = rank(current) if current else 0
    for xi in candidates:
        if rank(current + [xi]) > base_rank:
            current.append(xi)
            base_rank += 1
            chosen.append(tuple(xi))
    return chosen


def _transpose_mul(S: Matrix, M: Matrix) -> Matrix:
    # rows of (S M)^T so that nullspace gives left-kernel coefficients of S M
    return tuple(zip(*mat_mul(S, M)))


def sign_of(xi, g: GroupElement) -> int:
    """+1 or -1 if xi g^-1 = +-xi, else 0."""
    img = mat_mul((tuple(xi),), g.inverse)[0]
    if tuple(img) == tuple(xi):
        return 1
    if tuple(-x for x in img) == tuple(xi):
        return -1
    return 0
