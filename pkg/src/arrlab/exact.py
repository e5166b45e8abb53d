"""Exact rational linear algebra and canonical linear subspaces.

Matrices are tuples of tuples of :class:`fractions.Fraction`.  A subspace of
R^m is stored by the reduced row-echelon form of its defining forms, so two
subspaces are equal exactly when their form matrices are identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import AmbientMismatch, BadParam, NotContained

Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


# -- scalars -----------------------------------------------------------------

def to_fraction(x) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction.

    Non-integral floats are rejected: they are not exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise BadParam(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if x.is_integer():
            return Fraction(int(x))
        raise BadParam(f"floating point value {x!r} is not exact; use a 'p/q' string")
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise BadParam(f"cannot parse rational {x!r}") from exc
    raise BadParam(f"not a rational: {x!r}")


def rational_to_json(q: Fraction):
    q = Fraction(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


# -- matrices ----------------------------------------------------------------

def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(to_fraction(x) for x in row) for row in rows)


def identity(m: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(m)) for i in range(m))


def zeros(r: int, c: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(c)) for _ in range(r))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    # row-by-row over the nonzero entries; group matrices are mostly zeros
    ncols = len(B[0]) if B else 0
    support = [[(j, b) for j, b in enumerate(row) if b] for row in B]
    out = []
    for row in A:
        acc = [Fraction(0)] * ncols
        for k, a in enumerate(row):
            if a:
                for j, b in support[k]:
                    acc[j] += a * b
        out.append(tuple(acc))
    return tuple(out)


def mat_vec(A: Matrix, x: Sequence) -> tuple:
    return tuple(sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in A)


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    size = sum(len(b) for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        k = len(b)
        for row in b:
            rows.append((Fraction(0),) * offset + tuple(row) + (Fraction(0),) * (size - offset - k))
        offset += k
    return tuple(rows)


def _rref_rows(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv if x else x for x in rows[r]]
        prow = rows[r]
        # the matrices here are mostly sparse; only touch the pivot row's support
        support = [(j, y) for j, y in enumerate(prow) if y]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f != 0:
                    row = list(rows[i])
                    for j, y in support:
                        row[j] -= f * y
                    rows[i] = row
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref(M, ncols: int | None = None) -> Matrix:
    """Reduced row-echelon form with zero rows removed."""
    rows = [[to_fraction(x) for x in row] for row in M]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    reduced, _ = _rref_rows(rows, ncols)
    return tuple(tuple(r) for r in reduced)


def rref_pivots(M, ncols: int | None = None) -> tuple[Matrix, list[int]]:
    rows = [[to_fraction(x) for x in row] for row in M]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    reduced, pivots = _rref_rows(rows, ncols)
    return tuple(tuple(r) for r in reduced), pivots


def rank(M) -> int:
    return len(rref(M))


def nullspace(M, ncols: int) -> Matrix:
    """Basis of {x : M x = 0}, one free variable per basis vector."""
    R, pivots = rref_pivots(M, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(tuple(v))
    return tuple(basis)


def mat_inv(A: Matrix) -> Matrix:
    m = len(A)
    aug = [list(row) + list(e) for row, e in zip(A, identity(m))]
    R, pivots = _rref_rows(aug, m)
    if pivots != list(range(m)):
        raise BadParam("matrix is singular")
    return tuple(tuple(row[m:]) for row in R)


def integer_rows(M) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in M:
        row = [to_fraction(x) for x in row]
        den = 1
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def rank_bareiss(M) -> int:
    """Fraction-free Gaussian elimination rank over Q."""
    rows = integer_rows(M)
    if not rows:
        return 0
    ncols = len(rows[0])
    nrows = len(rows)
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        for i in range(r + 1, nrows):
            a = rows[i][c]
            rows[i] = [(pv * x - a * y) // prev for x, y in zip(rows[i], rows[r])]
        prev = pv
        r += 1
    return r


def rank_mod_p(M, p: int) -> int:
    rows = []
    for row in M:
        vals = []
        for x in row:
            x = to_fraction(x)
            if x.denominator % p == 0:
                raise BadParam(f"entry {x} has a denominator divisible by {p}")
            vals.append(x.numerator * pow(x.denominator, -1, p) % p)
        rows.append(vals)
    if not rows:
        return 0
    ncols = len(rows[0])
    nrows = len(rows)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        prow = [x * inv % p for x in rows[r]]
        rows[r] = prow
        for i in range(r + 1, nrows):
            f = rows[i][c]
            if f:
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], prow)]
        r += 1
    return r


# -- fields ------------------------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldDescriptor:
    kind: str  # "rationals" or "prime-field"
    p: int | None = None

    def __post_init__(self):
        if self.kind == "rationals":
            if self.p is not None:
                raise BadParam("the rationals take no modulus")
        elif self.kind == "prime-field":
            if self.p is None or not _is_prime(self.p):
                raise BadParam(f"F_p needs a prime p, got {self.p!r}")
        else:
            raise BadParam(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls):
        return cls("rationals")

    @classmethod
    def prime(cls, p: int):
        return cls("prime-field", p)

    @classmethod
    def parse(cls, text: str) -> "FieldDescriptor":
        """Accepts ``q``, ``Q``, ``f:5``, ``F5``."""
        t = text.strip().lower()
        if t in ("q", "qq", "rationals"):
            return cls.rationals()
        for prefix in ("f:", "f", "gf"):
            if t.startswith(prefix) and t[len(prefix):].isdigit():
                return cls.prime(int(t[len(prefix):]))
        raise BadParam(f"cannot parse field {text!r}; use q or f:<p>")

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == "rationals" else self.p

    @property
    def label(self) -> str:
        return "Q" if self.kind == "rationals" else f"F{self.p}"

    def rank(self, M) -> int:
        if self.kind == "rationals":
            return rank_bareiss(M)
        return rank_mod_p(M, self.p)


# -- subspaces ---------------------------------------------------------------

class Subspace:
    """Linear subspace of R^m, stored by canonical defining forms."""

    __slots__ = ("ambient_dim", "forms", "_hash", "_pivots")

    def __init__(self, forms, ambient_dim: int):
        if ambient_dim < 0:
            raise BadParam("ambient dimension must be non-negative")
        forms = [tuple(row) for row in forms]
        for row in forms:
            if len(row) != ambient_dim:
                raise AmbientMismatch(f"form of length {len(row)} in R^{ambient_dim}")
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "forms", rref(forms, ambient_dim))
        object.__setattr__(self, "_hash", hash((ambient_dim, self.forms)))
        object.__setattr__(self, "_pivots", tuple(next(c for c, x in enumerate(row) if x) for row in self.forms))

    def in_form_space(self, xi) -> bool:
        """True iff the linear form xi vanishes on this subspace."""
        v = list(xi)
        for row, p in zip(self.forms, self._pivots):
            f = v[p]
            if f:
                for j in range(p, len(v)):
                    if row[j]:
                        v[j] -= f * row[j]
        return not any(v)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def whole(cls, m: int) -> "Subspace":
        return cls((), m)

    @classmethod
    def zero(cls, m: int) -> "Subspace":
        return cls(identity(m), m)

    @classmethod
    def from_span(cls, vectors, m: int) -> "Subspace":
        vecs = as_matrix(vectors)
        if not vecs:
            return cls.zero(m)
        return cls(nullspace(vecs, m), m)

    @property
    def codim(self) -> int:
        return len(self.forms)

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.forms)

    def basis(self) -> Matrix:
        return nullspace(self.forms, self.ambient_dim)

    def contains_vector(self, x) -> bool:
        return all(v == 0 for v in mat_vec(self.forms, [to_fraction(t) for t in x]))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.forms == other.forms

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (self.codim, self.forms)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim}, forms={forms_str(self.forms)})"

    def intersect(self, other):
        return intersect(self, other)

    def contains(self, inner):
        return contains(self, inner)

    def __add__(self, other):
        return span_sum(self, other)


def _check_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatch(f"R^{a.ambient_dim} vs R^{b.ambient_dim}")


def intersect(s1: Subspace, s2: Subspace) -> Subspace:
    _check_ambient(s1, s2)
    return Subspace(s1.forms + s2.forms, s1.ambient_dim)


def contains(outer: Subspace, inner: Subspace) -> bool:
    """True iff inner is a subspace of outer."""
    _check_ambient(outer, inner)
    if outer.codim > inner.codim:
        return False
    # row space of outer.forms inside row space of inner.forms
    return all(inner.in_form_space(xi) for xi in outer.forms)


def codim_in(s: Subspace, v: Subspace) -> int:
    if not contains(v, s):
        raise NotContained("subspace is not contained in the given ambient")
    return v.dim - s.dim


def span_sum(s1: Subspace, s2: Subspace) -> Subspace:
    _check_ambient(s1, s2)
    return Subspace.from_span(s1.basis() + s2.basis(), s1.ambient_dim)


def forms_str(forms: Matrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in forms) + "]"


def matrix_to_json(M: Matrix) -> list:
    return [[rational_to_json(x) for x in row] for row in M]
