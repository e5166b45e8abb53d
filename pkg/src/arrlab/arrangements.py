"""Subspace arrangements: codimension, c-arrangements, G-closure, blow-ups."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    AmbientMismatch,
    AmbientNotPreserved,
    BadExplicitForms,
    BadParam,
    EmptyArrangement,
    NotContained,
)
from .exact import (
    Subspace,
    as_matrix,
    codim_in,
    contains,
    matrix_to_json,
    rank,
    to_fraction,
)
from .groups import (
    FiniteMatrixGroup,
    GroupElement,
    act_on_subspace,
    diagonal_group,
    fixed_subspace,
    generate,
    orbit,
    preserves,
    sign_eigenforms,
    trivial_group,
)


class Arrangement:
    """A finite family of distinct proper subspaces of an ambient V in R^m."""

    def __init__(self, members: Sequence[Subspace], ambient: Subspace | int, names: Sequence[str] | None = None):
        if isinstance(ambient, int):
            ambient = Subspace.whole(ambient)
        m = ambient.ambient_dim
        members = list(members)
        if names is None:
            names = [f"L{i + 1}" for i in range(len(members))]
        names = list(names)
        if len(names) != len(members):
            raise BadParam("one name per member required")
        seen = set()
        for name, L in zip(names, members):
            if L.ambient_dim != m:
                raise AmbientMismatch(f"member {name} lives in R^{L.ambient_dim}, ambient in R^{m}")
            if not contains(ambient, L):
                raise NotContained(f"member {name} is not contained in the ambient subspace")
            if L == ambient:
                raise BadParam(f"member {name} equals the ambient subspace")
            if L in seen:
                raise BadParam(f"member {name} is listed twice")
            seen.add(L)
        self.ambient = ambient
        self.members = tuple(members)
        self.names = tuple(names)

    @property
    def ambient_dim(self) -> int:
        return self.ambient.ambient_dim

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return f"Arrangement({len(self.members)} members in a {self.ambient.dim}-dim ambient of R^{self.ambient_dim})"

    def __eq__(self, other):
        if not isinstance(other, Arrangement):
            return NotImplemented
        return self.ambient == other.ambient and set(self.members) == set(other.members)

    def codim(self, L: Subspace) -> int:
        return codim_in(L, self.ambient)

    def name_of(self, L: Subspace) -> str:
        return self.names[self.members.index(L)]

    def in_complement(self, x) -> bool:
        return self.ambient.contains_vector(x) and not any(L.contains_vector(x) for L in self.members)

    def to_json(self, group: FiniteMatrixGroup | None = None) -> dict:
        d = {
            "ambient_dim": self.ambient_dim,
            "members": [{"name": n, "forms": matrix_to_json(L.forms)} for n, L in zip(self.names, self.members)],
        }
        if self.ambient.forms:
            d["ambient_forms"] = matrix_to_json(self.ambient.forms)
        if group is not None:
            d["group"] = group.to_json()
        return d


def arrangement_from_json(data: dict) -> tuple[Arrangement, FiniteMatrixGroup]:
    """Parse the arrangement JSON schema; returns the arrangement and its group."""
    try:
        m = int(data["ambient_dim"])
        ambient = Subspace(as_matrix(data.get("ambient_forms") or []), m)
        members, names = [], []
        for i, entry in enumerate(data["members"]):
            members.append(Subspace(as_matrix(entry["forms"]), m))
            names.append(str(entry.get("name", f"L{i + 1}")))
        gens = (data.get("group") or {}).get("generators") or []
    except (KeyError, TypeError) as exc:
        raise BadParam(f"malformed arrangement JSON: {exc}") from exc
    group = generate([GroupElement(g) for g in gens], ambient_dim=m) if gens else trivial_group(m)
    return Arrangement(members, ambient, names), group


def load_arrangement(path) -> tuple[Arrangement, FiniteMatrixGroup]:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BadParam(f"{path}: not valid JSON ({exc})") from exc
    return arrangement_from_json(data)


def _require_members(A: Arrangement):
    if not A.members:
        raise EmptyArrangement("the arrangement has no members")


def maximal_members(A: Arrangement) -> list[Subspace]:
    out = []
    for L in A.members:
        if not any(M != L and contains(M, L) for M in A.members):
            out.append(L)
    return out


def arrangement_codim(A: Arrangement) -> int:
    _require_members(A)
    return min(A.codim(L) for L in A.members)


def is_c_arrangement(A: Arrangement, c: int) -> bool:
    """Maximal members all of codim c, and c | codim_y(x) for all x < y in the intersection poset."""
    _require_members(A)
    from .poset import intersection_poset

    if c <= 0:
        return False
    if any(A.codim(L) != c for L in maximal_members(A)):
        return False
    P = intersection_poset(A)
    dims = [S.dim for S in P.elements]
    for i, j in P.strict_pairs():
        # element j lies strictly inside element i
        if (dims[i] - dims[j]) % c:
            return False
    return True


def g_closure(G: FiniteMatrixGroup, A: Arrangement) -> Arrangement:
    _check_group(G, A)
    members, names, seen = [], [], set()
    for name, L in zip(A.names, A.members):
        for t, T in enumerate(orbit(G, L)):
            if T not in seen:
                seen.add(T)
                members.append(T)
                names.append(name if t == 0 else f"{name}.{t}")
    return Arrangement(members, A.ambient, names)


def is_g_invariant(G: FiniteMatrixGroup, A: Arrangement) -> bool:
    _check_group(G, A)
    have = set(A.members)
    return all(act_on_subspace(g, L) in have for g in G.generators for L in A.members)


def _check_group(G: FiniteMatrixGroup, A: Arrangement):
    if G.ambient_dim != A.ambient_dim:
        raise AmbientMismatch(f"group on R^{G.ambient_dim}, arrangement in R^{A.ambient_dim}")
    if not preserves(G, A.ambient):
        raise AmbientNotPreserved("the group does not preserve the ambient subspace")


@dataclass
class BlowUpResult:
    arrangement: Arrangement
    blocks: list  # (offset in ambient copies, k_i) per maximal element
    chosen_forms: list  # forms xi_{i,1..k_i} per maximal element
    source_members: list = field(default_factory=list)
    choice: str = "auto"

    @property
    def copies(self) -> int:
        return sum(k for _, k in self.blocks)

    def to_json(self, group: FiniteMatrixGroup | None = None) -> dict:
        d = self.arrangement.to_json(group)
        d["blowup"] = {
            "choice": self.choice,
            "copies": self.copies,
            "blocks": [{"offset": o, "k": k} for o, k in self.blocks],
            "chosen_forms": [matrix_to_json(f) for f in self.chosen_forms],
        }
        return d


def _complete_forms(L: Subspace, V: Subspace, candidates) -> list[tuple]:
    """Greedily pick candidates independent modulo V's forms."""
    current = list(V.forms)
    r = len(current)
    chosen = []
    for xi in candidates:
        if rank(current + [tuple(xi)]) > r:
            current.append(tuple(xi))
            r += 1
            chosen.append(tuple(xi))
    return chosen


def _check_explicit(L: Subspace, V: Subspace, forms, k: int) -> list[tuple]:
    m = V.ambient_dim
    try:
        forms = [tuple(to_fraction(x) for x in row) for row in forms]
    except BadParam as exc:
        raise BadExplicitForms(str(exc)) from exc
    if len(forms) != k or any(len(f) != m for f in forms):
        raise BadExplicitForms(f"expected {k} forms of length {m}")
    if rank(list(V.forms) + forms) != len(V.forms) + k:
        raise BadExplicitForms("supplied forms are dependent modulo the ambient")
    if Subspace(list(V.forms) + forms, m) != L:
        raise BadExplicitForms("supplied forms do not define the member")
    return forms


def blow_up(A: Arrangement, choice="auto", group: FiniteMatrixGroup | None = None, forms=None) -> BlowUpResult:
    """Blow-up of A in V^K, K = k_1 + ... + k_w, built from the maximal members.

    ``choice`` is ``"auto"`` (RREF rows), ``"equivariant"`` (+-eigenforms
    for ``group``) or ``"explicit"`` (``forms``: one list of k_i forms per
    maximal member).  Form xi_{i,j} is read on the j-th copy of block i.
    """
    _require_members(A)
    V = A.ambient
    m = A.ambient_dim
    maxima = maximal_members(A)
    if len(maxima) < len(A.members):
        warnings.warn(f"blow-up ignores {len(A.members) - len(maxima)} non-maximal member(s)", stacklevel=2)
    if choice == "equivariant" and group is None:
        raise BadParam("equivariant blow-up needs a group")
    if choice == "explicit" and (forms is None or len(forms) != len(maxima)):
        raise BadExplicitForms("explicit blow-up needs one list of forms per maximal member")

    chosen = []
    for i, L in enumerate(maxima):
        k = A.codim(L)
        if choice == "auto":
            xi = _complete_forms(L, V, L.forms)
        elif choice == "equivariant":
            xi = sign_eigenforms(group, L, V)
        elif choice == "explicit":
            xi = _check_explicit(L, V, forms[i], k)
        else:
            raise BadParam(f"unknown blow-up choice {choice!r}")
        assert len(xi) == k
        chosen.append(xi)

    K = sum(len(x) for x in chosen)
    total = m * K
    zero = Fraction(0)

    def on_copy(row, copy):
        return (zero,) * (m * copy) + tuple(row) + (zero,) * (total - m * (copy + 1))

    ambient_rows = [on_copy(row, c) for c in range(K) for row in V.forms]
    big_ambient = Subspace(ambient_rows, total)
    members, blocks, offset = [], [], 0
    for xi in chosen:
        rows = ambient_rows + [on_copy(f, offset + j) for j, f in enumerate(xi)]
        members.append(Subspace(rows, total))
        blocks.append((offset, len(xi)))
        offset += len(xi)
    names = [f"B({A.name_of(L)})" for L in maxima]
    return BlowUpResult(Arrangement(members, big_ambient, names), blocks, chosen, list(maxima), choice)


def diagonal_embed(x, K: int) -> tuple:
    return tuple(x) * K


def diagonal_action(G: FiniteMatrixGroup, blow: BlowUpResult) -> FiniteMatrixGroup:
    return diagonal_group(G, blow.copies)


def check_condition_E(A: Arrangement, G: FiniteMatrixGroup) -> bool:
    _check_group(G, A)
    F = fixed_subspace(G, A.ambient)
    return all(contains(L, F) for L in A.members)
