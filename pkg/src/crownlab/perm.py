"""Permutations of {0, ..., n-1}.

Points are 0-indexed internally and 1-indexed in all text I/O.  Permutations
act on the right and products read left to right: ``(p * q)(x) == q(p(x))``.
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Sequence


def _check_images(images: Sequence[int]) -> None:
    if sorted(images) != list(range(len(images))):
        raise ValueError(f"not a permutation: {list(images)}")


class Permutation:
    """An immutable bijection of ``range(degree)``."""

    __slots__ = ("images", "_hash")

    def __init__(self, images: Iterable[int], check: bool = True):
        images = tuple(images)
        if check:
            _check_images(images)
        if not images:
            raise ValueError("permutations need positive degree")
        self.images = images
        self._hash = hash(images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree), check=False)

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build from 0-indexed cycles, e.g. ``from_cycles(4, [(0, 1), (2, 3)])``."""
        images = list(range(degree))
        seen = set()
        for cycle in cycles:
            for a in cycle:
                if not 0 <= a < degree:
                    raise ValueError(f"point {a} outside degree {degree}")
                if a in seen:
                    raise ValueError(f"point {a} repeated in cycles")
                seen.add(a)
            for a, b in zip(cycle, tuple(cycle[1:]) + tuple(cycle[:1])):
                images[a] = b
        return cls(images, check=False)

    @classmethod
    def parse(cls, text: str, degree: int | None = None) -> "Permutation":
        """Parse 1-indexed disjoint cycle notation such as ``(1,2,3)(4,5)``."""
        cycles = parse_cycles(text)
        biggest = max((max(c) for c in cycles if c), default=0)
        if degree is None:
            degree = max(biggest + 1, 1)
        elif biggest >= degree:
            raise ValueError(f"{text!r} moves point {biggest + 1} > degree {degree}")
        return cls.from_cycles(degree, cycles)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if not isinstance(other, Permutation):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        q = other.images
        return Permutation([q[i] for i in self.images], check=False)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv, check=False)

    __invert__ = inverse

    def __pow__(self, e: int) -> "Permutation":
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = Permutation.identity(self.degree)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self, by: "Permutation") -> "Permutation":
        """Return ``by^-1 * self * by``; maps ``by(x)`` to ``by(self(x))``."""
        return by.inverse() * self * by

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cycle = [start]
            seen[start] = True
            j = self.images[start]
            while j != start:
                cycle.append(j)
                seen[j] = True
                j = self.images[j]
            if len(cycle) > 1 or include_fixed:
                out.append(tuple(cycle))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        """Sorted cycle lengths, fixed points included."""
        return tuple(sorted((len(c) for c in self.cycles(include_fixed=True)), reverse=True))

    def order(self) -> int:
        return math.lcm(*self.cycle_type())

    def support(self) -> list[int]:
        return [i for i, j in enumerate(self.images) if i != j]

    def extend(self, degree: int, offset: int = 0) -> "Permutation":
        """Embed into degree ``degree``, acting on ``offset .. offset+self.degree-1``."""
        if offset + self.degree > degree:
            raise ValueError("embedding does not fit")
        images = list(range(degree))
        for i, j in enumerate(self.images):
            images[offset + i] = offset + j
        return Permutation(images, check=False)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return format_cycles(self)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, degree={self.degree})"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str) -> list[tuple[int, ...]]:
    """Return 0-indexed cycles from 1-indexed cycle notation."""
    text = text.strip()
    if re.sub(r"\s+", "", _CYCLE_RE.sub("", text)):
        raise ValueError(f"could not parse permutation {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(text):
        body = body.strip()
        if not body:
            continue
        points = [int(tok) - 1 for tok in re.split(r"[,\s]+", body) if tok]
        if any(p < 0 for p in points):
            raise ValueError(f"points are 1-indexed in {text!r}")
        cycles.append(tuple(points))
    return cycles


def format_cycles(p: Permutation) -> str:
    """1-indexed disjoint cycle notation; ``()`` for the identity."""
    cycles = p.cycles()
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(a + 1) for a in c) + ")" for c in cycles)


def cycle_type_of(images: Sequence[int]) -> tuple[int, ...]:
    """Cycle type of a raw image tuple."""
    return Permutation(images, check=False).cycle_type()
