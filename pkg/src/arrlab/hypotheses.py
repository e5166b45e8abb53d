"""Checker for the five hypotheses of the Borsuk-Ulam theorem for arrangement complements.

Conditions (B) and (E) are decided exactly.  Conditions (C) and (D) are only
certified through known sufficient conditions; otherwise they come back
``Unknown``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arrangements import (
    Arrangement,
    _check_group,
    arrangement_codim,
    blow_up,
    check_condition_E,
    g_closure,
    maximal_members,
)
from .errors import BadParam, EmptyArrangement, NotRealizable
from .exact import FieldDescriptor, Subspace, contains, identity, mat_sub, matrix_to_json
from .groups import FiniteMatrixGroup, act_on_subspace, diagonal_group, fixed_subspace

SATISFIED = "Satisfied"
SUFFICIENT = "SatisfiedBySufficientCondition"
VIOLATED = "Violated"
UNKNOWN = "Unknown"

THEOREM_APPLIES = "TheoremApplies"
NOT_APPLICABLE = "NotApplicable"
INCONCLUSIVE = "Inconclusive"


@dataclass
class TheoremInput:
    arrangement: Arrangement
    group: FiniteMatrixGroup
    field: FieldDescriptor
    connectivity_n: int
    reduce_to_min_codim: bool = False
    blowup_choice: str = "equivariant"  # falls back to "auto" when +-forms do not exist

    def __post_init__(self):
        if self.connectivity_n < 2:
            raise BadParam("the connectivity n must be at least 2")
        if self.blowup_choice not in ("equivariant", "auto"):
            raise BadParam(f"unknown blow-up choice {self.blowup_choice!r}")


@dataclass
class ConditionVerdict:
    status: str
    reason: str = ""
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return self.status in (SATISFIED, SUFFICIENT)

    def to_json(self) -> dict:
        d = {"status": self.status, "reason": self.reason}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class HypothesisReport:
    conditions: dict
    reduced_arrangement: Arrangement
    blowup: dict = field(default_factory=dict)
    overall: str = INCONCLUSIVE
    verdict: str = ""

    def to_json(self) -> dict:
        return {
            "conditions": {k: v.to_json() for k, v in sorted(self.conditions.items())},
            "reduced_members": list(self.reduced_arrangement.names),
            "blowup": self.blowup,
            "overall": self.overall,
            "verdict": self.verdict,
        }


def reduce_min_codim(A: Arrangement) -> Arrangement:
    """Keep the maximal members of minimal codimension."""
    if not A.members:
        raise EmptyArrangement("the arrangement has no members")
    maxima = maximal_members(A)
    c = min(A.codim(L) for L in maxima)
    keep = [L for L in maxima if A.codim(L) == c]
    return Arrangement(keep, A.ambient, [A.name_of(L) for L in keep])


def element_fixed_subspace(g, V: Subspace) -> Subspace:
    return Subspace(list(V.forms) + list(mat_sub(g.matrix, identity(g.dim))), V.ambient_dim)


def check_free_on_complement(A: Arrangement, G: FiniteMatrixGroup) -> bool:
    """Free iff the fixed space of every g != e lies inside some member."""
    _check_group(G, A)
    for g in G.non_identity():
        F = element_fixed_subspace(g, A.ambient)
        if not any(contains(L, F) for L in A.members):
            return False
    return True


def _condition_A(A: Arrangement, n: int, reduced: bool) -> ConditionVerdict:
    codims = sorted({A.codim(L) for L in maximal_members(A)})
    if len(codims) > 1:
        return ConditionVerdict(
            UNKNOWN, f"maximal members have mixed codimensions {codims}; enable the minimal-codimension reduction"
        )
    c = codims[0]
    if 2 <= c <= n + 1:
        why = f"all maximal members have codimension {c}, and 2 <= {c} <= n+1 = {n + 1}"
        if reduced:
            why += " (after restricting to maximal members of minimal codimension)"
        return ConditionVerdict(SATISFIED, why)
    return ConditionVerdict(VIOLATED, f"common codimension {c} is outside [2, n+1] = [2, {n + 1}]")


def _condition_B(A: Arrangement, G: FiniteMatrixGroup) -> ConditionVerdict:
    maxima = maximal_members(A)
    for idx, g in enumerate(G.elements):
        for L in maxima:
            if act_on_subspace(g, L) != L:
                name = A.name_of(L)
                return ConditionVerdict(
                    VIOLATED,
                    f"group element #{idx} moves maximal member {name}",
                    {"element_index": idx, "element": matrix_to_json(g.matrix), "member": name},
                )
    return ConditionVerdict(SATISFIED, "every group element fixes every maximal member")


def _condition_E(A: Arrangement, G: FiniteMatrixGroup) -> ConditionVerdict:
    if check_condition_E(A, G):
        return ConditionVerdict(SATISFIED, "every member contains the fixed subspace of the group")
    F = fixed_subspace(G, A.ambient)
    for name, L in zip(A.names, A.members):
        if not contains(L, F):
            return ConditionVerdict(
                VIOLATED,
                f"member {name} does not contain the {F.dim}-dimensional fixed subspace",
                {"member": name, "fixed_subspace_forms": matrix_to_json(F.forms)},
            )
    raise AssertionError("unreachable")


def check_hypotheses(inp: TheoremInput) -> HypothesisReport:
    A0, G, k, n = inp.arrangement, inp.group, inp.field, inp.connectivity_n
    _check_group(G, A0)
    if not A0.members:
        raise EmptyArrangement("the arrangement has no members")
    A = reduce_min_codim(A0) if inp.reduce_to_min_codim else A0
    char = k.characteristic
    cond = {}

    cond["A"] = _condition_A(A, n, inp.reduce_to_min_codim)
    cond["B"] = _condition_B(A, G)

    # blow-up, equivariant when possible
    blow, blow_note = None, ""
    if inp.blowup_choice == "equivariant" and cond["B"].ok:
        try:
            blow = blow_up(A, "equivariant", group=G)
        except NotRealizable as exc:
            blow_note = f"no +-1 eigenforms: {exc}"
    elif inp.blowup_choice == "equivariant":
        blow_note = "condition (B) fails, so no equivariant choice of forms exists"
    if blow is None:
        blow = _quiet_blow_up(A)
    DG = diagonal_group(G, blow.copies)
    target = blow.arrangement
    invariant_blowup = all(act_on_subspace(g, L) in set(target.members) for g in DG.generators for L in target.members)
    if not invariant_blowup:
        target = g_closure(DG, target)

    if G.is_trivial():
        cond["C"] = ConditionVerdict(SATISFIED, "the trivial group acts trivially on cohomology")
    elif not cond["B"].ok:
        cond["C"] = ConditionVerdict(UNKNOWN, "condition (B) fails; no sufficient condition for (C) applies")
    elif blow.choice == "equivariant" and char == 2:
        cond["C"] = ConditionVerdict(
            SUFFICIENT,
            "every maximal member has defining forms with g.xi = +-xi and the field has characteristic 2, "
            "so G fixes the intersection poset of the blow-up elementwise and the signs vanish",
        )
    elif blow.choice == "equivariant":
        cond["C"] = ConditionVerdict(UNKNOWN, f"+-1 eigenforms exist but the field {k.label} has characteristic != 2")
    else:
        cond["C"] = ConditionVerdict(UNKNOWN, blow_note or "no equivariant choice of forms was attempted")

    cond["D"] = _condition_D(G, DG, target, char)
    cond["E"] = _condition_E(A, G)

    if all(v.ok for v in cond.values()):
        overall = THEOREM_APPLIES
        verdict = (
            f"no G-map X -> M_A exists for any G-space X with H^i(X;{k.label})=0, 1 <= i <= {n}"
        )
    elif any(v.status == VIOLATED for v in cond.values()):
        overall = NOT_APPLICABLE
        bad = ", ".join(c for c, v in sorted(cond.items()) if v.status == VIOLATED)
        verdict = f"the theorem does not apply: condition(s) {bad} violated"
    else:
        overall = INCONCLUSIVE
        unk = ", ".join(c for c, v in sorted(cond.items()) if v.status == UNKNOWN)
        verdict = f"inconclusive: condition(s) {unk} could not be certified"

    meta = {
        "choice": blow.choice,
        "copies": blow.copies,
        "blocks": [{"offset": o, "k": kk} for o, kk in blow.blocks],
        "ambient_dim": blow.arrangement.ambient_dim,
        "invariant_under_diagonal_action": invariant_blowup,
    }
    if blow_note:
        meta["note"] = blow_note
    return HypothesisReport(cond, A, meta, overall, verdict)


def _quiet_blow_up(A: Arrangement):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return blow_up(A, "auto")


def _condition_D(G, DG, target: Arrangement, char: int) -> ConditionVerdict:
    if G.is_trivial():
        return ConditionVerdict(VIOLATED, "for the trivial group the map from H*(BG) is injective")
    if char and G.order % char == 0 and check_free_on_complement(target, DG):
        return ConditionVerdict(
            SUFFICIENT,
            f"G acts freely on the blow-up complement and char {char} divides |G| = {G.order}",
        )
    p = G.elementary_abelian_prime()
    if p is not None and char == p:
        F = fixed_subspace(DG, target.ambient)
        if any(contains(L, F) for L in target.members):
            return ConditionVerdict(
                SUFFICIENT,
                f"G is elementary abelian of exponent {p} = char and acts without fixed points on the blow-up complement",
            )
    return ConditionVerdict(UNKNOWN, "no sufficient condition for (D) applies")
