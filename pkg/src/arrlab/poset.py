"""Intersection posets, order complexes and Goresky-MacPherson Betti numbers."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .errors import BadElement, CapExceeded, EmptyArrangement
from .exact import FieldDescriptor, Subspace, contains, intersect

DEFAULT_POSET_CAP = 50_000


class IntersectionPoset:
    """Intersections of an arrangement ordered by reverse inclusion.

    ``elements[0]`` is the bottom (the ambient).  The remaining elements are
    sorted by (codimension, canonical forms).  ``i < j`` in the poset iff
    ``elements[j]`` is strictly contained in ``elements[i]``.
    """

    def __init__(self, elements: Sequence[Subspace]):
        bottom, rest = elements[0], sorted(set(elements[1:]) - {elements[0]}, key=Subspace.sort_key)
        self.elements = [bottom] + rest
        n = len(self.elements)
        dims = [S.dim for S in self.elements]
        self.above = [set() for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if dims[j] < dims[i] and contains(self.elements[i], self.elements[j]):
                    self.above[i].add(j)
        self.covers = []
        for i in range(n):
            for j in sorted(self.above[i]):
                if not any(j in self.above[k] for k in self.above[i]):
                    self.covers.append((i, j))

    @property
    def bottom(self) -> Subspace:
        return self.elements[0]

    def __len__(self):
        return len(self.elements)

    def index(self, S: Subspace) -> int:
        try:
            return self.elements.index(S)
        except ValueError:
            raise BadElement("subspace is not an element of the poset") from None

    def strict_pairs(self):
        for i, ups in enumerate(self.above):
            for j in sorted(ups):
                yield i, j

    def less(self, i: int, j: int) -> bool:
        return j in self.above[i]

    def codim(self, i: int) -> int:
        return self.bottom.dim - self.elements[i].dim


def intersection_poset(A, cap: int = DEFAULT_POSET_CAP) -> IntersectionPoset:
    if not A.members:
        raise EmptyArrangement("the arrangement has no members")
    known = set(A.members)
    frontier = list(A.members)
    while frontier:
        new = []
        for x in frontier:
            for L in A.members:
                y = intersect(x, L)
                if y not in known:
                    known.add(y)
                    new.append(y)
                    if len(known) + 1 > cap:
                        raise CapExceeded(f"intersection poset exceeds {cap} elements")
        frontier = new
    return IntersectionPoset([A.ambient] + sorted(known, key=Subspace.sort_key))


@dataclass
class SimplicialComplex:
    """Finite simplicial complex given by its facets (vertex-index tuples)."""

    n_vertices: int
    facets: list = field(default_factory=list)
    labels: list = field(default_factory=list)

    def faces(self) -> dict[int, list[tuple]]:
        """All non-empty faces grouped by dimension, each a sorted tuple."""
        seen: dict[int, set] = {}
        for F in self.facets:
            F = tuple(sorted(F))
            for size in range(1, len(F) + 1):
                seen.setdefault(size - 1, set()).update(combinations(F, size))
        return {q: sorted(s) for q, s in sorted(seen.items())}

    @property
    def dimension(self) -> int:
        return max((len(F) - 1 for F in self.facets), default=-1)

    def f_vector(self) -> dict[int, int]:
        f = {-1: 1}
        f.update({q: len(s) for q, s in self.faces().items()})
        return f

    def reduced_euler_characteristic(self) -> int:
        return sum((-1) ** q * c for q, c in self.f_vector().items())


def order_complex(P: IntersectionPoset, x) -> SimplicialComplex:
    """Order complex of the open interval (bottom, x)."""
    i = x if isinstance(x, int) else P.index(x)
    if i == 0 or not 0 <= i < len(P):
        raise BadElement("order complex needs an element above the bottom")
    verts = [v for v in range(1, len(P)) if P.less(v, i)]
    pos = {v: t for t, v in enumerate(verts)}
    facets = []

    def extend(chain):
        last = chain[-1]
        nxt = [v for v in verts if P.less(last, v)]
        if not nxt:
            facets.append(tuple(sorted(pos[c] for c in chain)))
            return
        for v in nxt:
            extend(chain + [v])

    minimal = [v for v in verts if not any(P.less(u, v) for u in verts)]
    for v in minimal:
        extend([v])
    return SimplicialComplex(len(verts), sorted(set(facets)), verts)


def boundary_matrices(K: SimplicialComplex) -> dict[int, list[list[int]]]:
    """Integer boundary matrices of the augmented chain complex.

    ``d[q]`` maps q-chains to (q-1)-chains; rows index (q-1)-faces,
    columns index q-faces; the (-1)-face is the empty simplex.
    """
    faces = K.faces()
    faces[-1] = [()]
    d = {}
    for q in sorted(faces):
        if q == -1:
            continue
        lower = {f: r for r, f in enumerate(faces[q - 1])}
        M = [[0] * len(faces[q]) for _ in lower]
        for c, s in enumerate(faces[q]):
            for t in range(len(s)):
                M[lower[s[:t] + s[t + 1:]]][c] = (-1) ** t
        d[q] = M
    return d


@dataclass
class BettiTable:
    field: FieldDescriptor
    betti: dict = field(default_factory=dict)
    reduced: bool = False

    def __getitem__(self, degree: int) -> int:
        return self.betti.get(degree, 0)

    def to_json(self) -> dict:
        return {"field": self.field.label, "betti": {str(k): v for k, v in sorted(self.betti.items()) if v}}


def reduced_betti(K: SimplicialComplex, f: FieldDescriptor) -> BettiTable:
    faces = K.faces()
    counts = {-1: 1, **{q: len(s) for q, s in faces.items()}}
    d = boundary_matrices(K)
    ranks = {q: (f.rank(M) if M and M[0] else 0) for q, M in d.items()}
    betti = {}
    for q, c in counts.items():
        b = c - ranks.get(q, 0) - ranks.get(q + 1, 0)
        if b:
            betti[q] = b
    return BettiTable(f, betti, reduced=True)


def gm_betti(A, f: FieldDescriptor, poset: IntersectionPoset | None = None) -> BettiTable:
    """Betti numbers of the complement via the Goresky-MacPherson formula.

    reduced b^i(M_A) = sum over x > bottom of reduced b_{codim(x)-2-i}(order complex (bottom, x)).
    """
    P = poset if poset is not None else intersection_poset(A)
    reduced: dict[int, int] = {}
    for x in range(1, len(P)):
        c = P.codim(x)
        for q, b in reduced_betti(order_complex(P, x), f).betti.items():
            i = c - 2 - q
            reduced[i] = reduced.get(i, 0) + b
    betti = {i: b for i, b in reduced.items() if b}
    betti[0] = betti.get(0, 0) + 1
    return BettiTable(f, dict(sorted(betti.items())), reduced=False)


def hasse_dot(P: IntersectionPoset, name: str = "hasse") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, S in enumerate(P.elements):
        tag = "0^" if i == 0 else f"x{i}"
        lines.append(f'  n{i} [label="{tag}\\ndim {S.dim}, codim {P.codim(i)}"];')
    for i, j in P.covers:
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
