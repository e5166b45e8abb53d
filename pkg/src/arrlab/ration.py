from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadParam


@dataclass(frozen=True)
class Ration:
    """Integer ration a_1..a_2k with a_i = a_{k+i}, summing to n.

    The normalized proportions a_i/n are derived (see :attr:`alphas`).
    """

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(a) for a in self.parts)
        object.__setattr__(self, "parts", parts)
        if len(parts) < 2 or len(parts) % 2:
            raise BadParam(f"a ration needs an even number (>= 2) of parts, got {len(parts)}")
        if any(a < 1 for a in parts):
            raise BadParam("ration parts must be positive integers")
        k = len(parts) // 2
        if parts[:k] != parts[k:]:
            raise BadParam(f"ration must satisfy a_i = a_(k+i): {parts}")

    @classmethod
    def parse(cls, text: str) -> "Ration":
        try:
            return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))
        except ValueError as exc:
            raise BadParam(f"cannot parse ration {text!r}") from exc

    @property
    def k(self) -> int:
        return len(self.parts) // 2

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def alphas(self) -> tuple:
        return tuple(Fraction(a, self.n) for a in self.parts)

    def blocks(self) -> list[range]:
        """Sector index ranges (0-based) of the 2k consecutive blocks."""
        out, start = [], 0
        for a in self.parts:
            out.append(range(start, start + a))
            start += a
        return out

    def boundaries(self) -> list[int]:
        """0-based index of the first sector of blocks 1..k (beta_l - 1)."""
        return [b.start for b in self.blocks()[: self.k]]

    def __str__(self):
        return ",".join(str(a) for a in self.parts)
