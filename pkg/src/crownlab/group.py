"""Permutation groups: stabilizer chains, orbits, blocks, normal closures and
coset actions.

All permutations act on the right (see :mod:`crownlab.perm`).  Chain internals
work on raw image tuples for speed; the public surface speaks
:class:`~crownlab.perm.Permutation`.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import caps as _caps
from .caps import CapExceeded, HypothesisError
from .perm import Permutation

Images = tuple


def _mul(p: Images, q: Images) -> Images:
    return tuple([q[i] for i in p])


def _inv(p: Images) -> Images:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def _is_id(p: Images) -> bool:
    return all(i == j for i, j in enumerate(p))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Left-to-right product: apply ``p`` first, then ``q``."""
    return p * q


@dataclass
class _Level:
    base: int
    identity: Images
    gens: list = field(default_factory=list)
    trans: dict = field(default_factory=dict)      # point -> u with u[base] == point
    trans_inv: dict = field(default_factory=dict)
    checked: set = field(default_factory=set)      # (point, gen index) Schreier pairs done

    def __post_init__(self):
        self.trans[self.base] = self.identity
        self.trans_inv[self.base] = self.identity

    def add_gen(self, g: Images) -> None:
        self.gens.append(g)
        # Extend the orbit without disturbing existing transversal entries.
        frontier = list(self.trans)
        while frontier:
            nxt = []
            for beta in frontier:
                u = self.trans[beta]
                for s in self.gens:
                    gamma = s[beta]
                    if gamma not in self.trans:
                        v = _mul(u, s)
                        self.trans[gamma] = v
                        self.trans_inv[gamma] = _inv(v)
                        nxt.append(gamma)
            frontier = nxt


class StabilizerChain:
    """Base and strong generating set built by deterministic Schreier-Sims.

    The base starts with ``base_prefix`` and is extended by the smallest point
    moved by whichever element first needs a new level.
    """

    def __init__(self, degree: int, gens: Iterable[Images], base_prefix: Sequence[int] = ()):
        self.degree = degree
        self.identity = tuple(range(degree))
        self.levels: list[_Level] = []
        for b in base_prefix:
            self.levels.append(_Level(b, self.identity))
        gens = [g for g in gens if not _is_id(g)]
        for g in gens:
            self._place(g)
        self._complete(len(self.levels) - 1)

    @property
    def base(self) -> list[int]:
        return [lvl.base for lvl in self.levels]

    def _place(self, g: Images) -> None:
        """Add ``g`` to every level whose earlier base points it fixes."""
        for i, lvl in enumerate(self.levels):
            lvl.add_gen(g)
            if g[lvl.base] != lvl.base:
                return
        moved = next(x for x in range(self.degree) if g[x] != x)
        lvl = _Level(moved, self.identity)
        self.levels.append(lvl)
        lvl.add_gen(g)

    def sift(self, g: Images, start: int = 0) -> tuple[Images, int]:
        """Strip ``g`` through levels ``start..``; return (residue, drop level)."""
        for i in range(start, len(self.levels)):
            lvl = self.levels[i]
            beta = g[lvl.base]
            uinv = lvl.trans_inv.get(beta)
            if uinv is None:
                return g, i
            g = _mul(g, uinv)
        return g, len(self.levels)

    def _add_residue(self, h: Images, first: int, drop: int) -> None:
        for j in range(first, min(drop, len(self.levels) - 1) + 1):
            self.levels[j].add_gen(h)
        if drop == len(self.levels):
            moved = next(x for x in range(self.degree) if h[x] != x)
            lvl = _Level(moved, self.identity)
            self.levels.append(lvl)
            lvl.add_gen(h)

    def _complete(self, i: int) -> None:
        while i >= 0:
            lvl = self.levels[i]
            found = None
            for beta in list(lvl.trans):
                u = lvl.trans[beta]
                for si, s in enumerate(lvl.gens):
                    if (beta, si) in lvl.checked:
                        continue
                    lvl.checked.add((beta, si))
                    h = _mul(_mul(u, s), lvl.trans_inv[s[beta]])
                    if _is_id(h):
                        continue
                    residue, drop = self.sift(h, i + 1)
                    if not _is_id(residue):
                        found = (residue, drop)
                        break
                if found:
                    break
            if found:
                residue, drop = found
                self._add_residue(residue, i + 1, drop)
                i = drop
            else:
                i -= 1

    def add_generator(self, g: Images) -> bool:
        """Enlarge the group by ``g``; returns False if ``g`` was already a member."""
        residue, drop = self.sift(g)
        if _is_id(residue):
            return False
        self._add_residue(residue, 0, drop)
        self._complete(min(drop, len(self.levels) - 1))
        return True

    def order(self) -> int:
        return math.prod(len(lvl.trans) for lvl in self.levels)

    def contains(self, g: Images) -> bool:
        if len(g) != self.degree:
            return False
        residue, _ = self.sift(g)
        return _is_id(residue)

    def strong_generators(self) -> list[Images]:
        seen, out = set(), []
        for lvl in self.levels:
            for g in lvl.gens:
                if g not in seen:
                    seen.add(g)
                    out.append(g)
        return out

    def level_generators(self, i: int) -> list[Images]:
        """Generators of the pointwise stabilizer of the first ``i`` base points."""
        if i >= len(self.levels):
            return []
        return list(self.levels[i].gens)

    def random_element(self, rng: random.Random) -> Images:
        """Uniform random element: a product of random transversal entries."""
        g = self.identity
        for lvl in reversed(self.levels):
            keys = list(lvl.trans)
            g = _mul(g, lvl.trans[keys[rng.randrange(len(keys))]])
        return g

    def elements(self) -> Iterator[Images]:
        """Every element exactly once, in a deterministic order."""
        def rec(i: int, prefix: Images) -> Iterator[Images]:
            if i < 0:
                yield prefix
                return
            for u in self.levels[i].trans.values():
                yield from rec(i - 1, _mul(prefix, u))
        yield from rec(len(self.levels) - 1, self.identity)


def build_chain(G: "PermGroup", base_prefix: Sequence[int] = ()) -> StabilizerChain:
    return StabilizerChain(G.degree, [g.images for g in G.generators], base_prefix)


class PermGroup:
    """A finitely generated permutation group with a lazily built chain."""

    def __init__(self, generators: Iterable[Permutation], degree: int | None = None):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise ValueError("need a degree or at least one generator")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise ValueError(f"generator {g} has degree {g.degree}, expected {degree}")
        if not gens:
            gens = [Permutation.identity(degree)]
        self.degree = degree
        self.generators = gens
        self._chain: StabilizerChain | None = None
        self._elements: list[Images] | None = None

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls([], degree)

    @classmethod
    def from_images(cls, images: Iterable[Images], degree: int) -> "PermGroup":
        return cls([Permutation(g, check=False) for g in images], degree)

    @property
    def chain(self) -> StabilizerChain:
        if self._chain is None:
            self._chain = build_chain(self)
        return self._chain

    def order(self) -> int:
        return self.chain.order()

    def __len__(self) -> int:
        return self.order()

    def contains(self, p: Permutation) -> bool:
        return p.degree == self.degree and self.chain.contains(p.images)

    __contains__ = contains

    def is_trivial(self) -> bool:
        return all(g.is_identity() for g in self.generators)

    def orbit(self, alpha: int) -> set[int]:
        return orbit(self, alpha)

    def orbits(self) -> list[list[int]]:
        return orbits(self)

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and all(g in other for g in self.generators)

    def is_normal_in(self, other: "PermGroup") -> bool:
        if not self.is_subgroup_of(other):
            return False
        return all(m.conjugate(g) in self for g in other.generators for m in self.generators)

    def is_abelian(self) -> bool:
        gs = self.generators
        return all(a * b == b * a for i, a in enumerate(gs) for b in gs[i + 1:])

    def random_element(self, rng: random.Random) -> Permutation:
        return Permutation(self.chain.random_element(rng), check=False)

    def element_images(self, cap: int | None = None) -> list[Images]:
        """All elements as image tuples (cached); raises CapExceeded above the cap."""
        cap = _caps.get_caps().element if cap is None else cap
        if self._elements is None:
            n = self.order()
            if n > cap:
                raise CapExceeded("element enumeration", n, cap)
            self._elements = list(self.chain.elements())
        return self._elements

    def elements(self, cap: int | None = None) -> list[Permutation]:
        return [Permutation(g, check=False) for g in self.element_images(cap)]

    def stabilizer(self, alpha: int) -> "PermGroup":
        return point_stabilizer(self, alpha)

    def subgroup(self, gens: Iterable[Permutation]) -> "PermGroup":
        return PermGroup(list(gens), self.degree)

    def __repr__(self) -> str:
        gens = ", ".join(str(g) for g in self.generators)
        return f"PermGroup(degree={self.degree}, gens=[{gens}])"


def orbit(G: PermGroup, alpha: int) -> set[int]:
    """Closure of ``{alpha}`` under the generators of ``G``."""
    if not 0 <= alpha < G.degree:
        raise ValueError(f"point {alpha} outside degree {G.degree}")
    gens = [g.images for g in G.generators]
    seen = {alpha}
    stack = [alpha]
    while stack:
        x = stack.pop()
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def orbits(G: PermGroup) -> list[list[int]]:
    """All orbits, each sorted, listed by smallest point."""
    out, seen = [], set()
    for x in range(G.degree):
        if x not in seen:
            o = orbit(G, x)
            seen |= o
            out.append(sorted(o))
    return out


def point_stabilizer(G: PermGroup, alpha: int) -> PermGroup:
    """Stabilizer of ``alpha`` from a chain whose base starts at ``alpha``."""
    return pointwise_stabilizer(G, [alpha])


def pointwise_stabilizer(G: PermGroup, points: Sequence[int]) -> PermGroup:
    chain = build_chain(G, points)
    gens = chain.level_generators(len(points))
    H = PermGroup.from_images(gens, G.degree)
    # The tail of this chain is a valid chain for H.
    tail = StabilizerChain.__new__(StabilizerChain)
    tail.degree = G.degree
    tail.identity = chain.identity
    tail.levels = chain.levels[len(points):]
    H._chain = tail
    return H


def normal_closure(G: PermGroup, seeds: Iterable[Permutation]) -> PermGroup:
    """Smallest normal subgroup of ``G`` containing ``seeds``."""
    seeds = list(seeds)
    for s in seeds:
        if s not in G:
            raise HypothesisError(f"seed {s} is not in the group")
    seeds = [s for s in seeds if not s.is_identity()]
    if not seeds:
        return PermGroup.trivial(G.degree)
    chain = StabilizerChain(G.degree, [s.images for s in seeds])
    gens = [s.images for s in seeds]
    conj = [(g.images, _inv(g.images)) for g in G.generators]
    i = 0
    while i < len(gens):
        m = gens[i]
        for g, ginv in conj:
            c = _mul(_mul(ginv, m), g)
            if chain.add_generator(c):
                gens.append(c)
        i += 1
    N = PermGroup.from_images(gens, G.degree)
    N._chain = chain
    return N


def commutator_subgroup(G: PermGroup) -> PermGroup:
    gens = G.generators
    comms = []
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            c = a.inverse() * b.inverse() * a * b
            if not c.is_identity():
                comms.append(c)
    return normal_closure(G, comms)


@dataclass
class BlockSystem:
    degree: int
    blocks: list[list[int]]
    block_of: list[int]

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    def __len__(self) -> int:
        return len(self.blocks)


def m_orbit_blocks(G: PermGroup, M: PermGroup) -> BlockSystem:
    """The orbits of a normal subgroup ``M`` of transitive ``G`` as a block system."""
    if not G.is_transitive():
        raise HypothesisError("G is not transitive")
    if not M.is_normal_in(G):
        raise HypothesisError("M is not a normal subgroup of G")
    blocks = orbits(M)
    block_of = [0] * G.degree
    for i, b in enumerate(blocks):
        for x in b:
            block_of[x] = i
    sizes = {len(b) for b in blocks}
    if len(sizes) != 1 or G.degree % len(blocks[0]):
        raise AssertionError(f"M-orbits of unequal sizes {sorted(sizes)}")
    return BlockSystem(G.degree, blocks, block_of)


def block_action(G: PermGroup, system: BlockSystem) -> PermGroup:
    """The permutation group induced by ``G`` on the blocks of ``system``."""
    gens = []
    for g in G.generators:
        images = [system.block_of[g(b[0])] for b in system.blocks]
        gens.append(Permutation(images))
    return PermGroup(gens, len(system.blocks))


class CosetAction:
    """``G`` acting by right multiplication on the right cosets of ``H``."""

    def __init__(self, G: PermGroup, H: PermGroup, index_cap: int | None = None):
        if not H.is_subgroup_of(G):
            raise HypothesisError("H is not a subgroup of G")
        cap = _caps.get_caps().index if index_cap is None else index_cap
        index = G.order() // H.order()
        if index > cap:
            raise CapExceeded("coset index", index, cap)
        self.G, self.H = G, H
        self._hchain = H.chain
        self.reps: list[Images] = [G.chain.identity]
        self._keys = {self._key(G.chain.identity): 0}
        gens = [g.images for g in G.generators]
        i = 0
        while i < len(self.reps):
            r = self.reps[i]
            for g in gens:
                y = _mul(r, g)
                k = self._key(y)
                if k not in self._keys:
                    self._keys[k] = len(self.reps)
                    self.reps.append(y)
            i += 1
        if len(self.reps) != index:
            raise AssertionError(f"found {len(self.reps)} cosets, expected {index}")
        self.image = PermGroup([self.act(g) for g in G.generators], len(self.reps))
        self._kernel: PermGroup | None = None

    def _key(self, y: Images) -> Images:
        # Lexicographically least base image over the coset H*y.
        for lvl in self._hchain.levels:
            best, best_u = None, None
            for c, u in lvl.trans.items():
                v = y[c]
                if best is None or v < best:
                    best, best_u = v, u
            y = _mul(best_u, y)
        return y

    def coset_of(self, g: Permutation) -> int:
        return self._keys[self._key(g.images)]

    def act(self, g: Permutation) -> Permutation:
        """Image of ``g`` in the coset action."""
        images = [self._keys[self._key(_mul(r, g.images))] for r in self.reps]
        return Permutation(images, check=False)

    @property
    def kernel(self) -> PermGroup:
        if self._kernel is None:
            self._kernel = self._compute_kernel()
        return self._kernel

    def _compute_kernel(self) -> PermGroup:
        n, m = self.G.degree, len(self.reps)
        if self.image.order() == self.G.order():
            return PermGroup.trivial(n)
        combined = []
        for g in self.G.generators:
            a = self.act(g)
            combined.append(g.images + tuple(n + x for x in a.images))
        chain = StabilizerChain(n + m, combined, base_prefix=range(n, n + m))
        gens = [g[:n] for g in chain.level_generators(m)]
        return PermGroup.from_images(gens, n)


def coset_action(G: PermGroup, H: PermGroup) -> tuple[PermGroup, PermGroup]:
    """Return (image on |G:H| points, kernel = core of H in G)."""
    act = CosetAction(G, H)
    return act.image, act.kernel


def quotient(G: PermGroup, N: PermGroup) -> CosetAction:
    """``G/N`` realized as the regular coset action on ``N``."""
    if not N.is_normal_in(G):
        raise HypothesisError("N is not normal in G")
    return CosetAction(G, N)


def abelian_invariants_of_abelian(A: PermGroup) -> list[int]:
    """Invariant factors (each dividing the next) of an abelian group."""
    n = A.order()
    if n == 1:
        return []
    orders = [Permutation(g, check=False).order() for g in A.element_images()]
    primary: list[int] = []
    for p in _prime_factors(n):
        # count[k] = #{x : x^(p^k) = 1} = p^(sum_i min(e_i, k))
        logs = [0]
        k = 1
        while True:
            c = sum(1 for o in orders if (p ** k) % o == 0)
            logs.append(round(math.log(c, p)))
            if c == p ** _multiplicity(n, p):
                break
            k += 1
        # number of cyclic factors of order >= p^k is logs[k] - logs[k-1]
        ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))] + [0]
        for k in range(1, len(logs)):
            primary.extend([p ** k] * (ge[k - 1] - ge[k]))
    return _primary_to_invariant(primary)


def _p_part(m: int, p: int) -> int:
    out = 1
    while m % p == 0:
        m //= p
        out *= p
    return out


def _multiplicity(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _primary_to_invariant(primary: list[int]) -> list[int]:
    by_prime: dict[int, list[int]] = {}
    for q in primary:
        by_prime.setdefault(_prime_factors(q)[0], []).append(q)
    for v in by_prime.values():
        v.sort(reverse=True)
    rank = max((len(v) for v in by_prime.values()), default=0)
    out = []
    for i in range(rank):
        out.append(math.prod(v[i] for v in by_prime.values() if i < len(v)))
    return sorted(out)


def abelian_invariants(G: PermGroup) -> list[int]:
    """Invariant factors of ``G/[G,G]``; an empty list means ``G`` is perfect."""
    D = commutator_subgroup(G)
    if D.order() == G.order():
        return []
    Q = quotient(G, D).image
    return abelian_invariants_of_abelian(Q)


def conjugators(ys: Sequence[Permutation], zs: Sequence[Permutation],
                first_only: bool = False) -> list[Permutation]:
    """All ``s`` with ``s^-1 * y_i * s == z_i`` for every i (backtracking on points)."""
    if len(ys) != len(zs):
        raise ValueError("need equally many elements on both sides")
    if not ys:
        raise ValueError("need at least one element")
    n = ys[0].degree
    yy = [y.images for y in ys]
    zz = [z.images for z in zs]
    if any(y.cycle_type() != z.cycle_type() for y, z in zip(ys, zs)):
        return []
    roots, seen = [], [False] * n
    for x in range(n):
        if not seen[x]:
            roots.append(x)
            stack = [x]
            seen[x] = True
            while stack:
                a = stack.pop()
                for y in yy:
                    b = y[a]
                    if not seen[b]:
                        seen[b] = True
                        stack.append(b)
    sigma = [-1] * n
    used = [False] * n
    out: list[Permutation] = []

    def propagate(r: int, a: int, trail: list[int]) -> bool:
        sigma[r], used[a] = a, True
        trail.append(r)
        stack = [r]
        while stack:
            x = stack.pop()
            sx = sigma[x]
            for y, z in zip(yy, zz):
                u, t = y[x], z[sx]
                if sigma[u] == -1:
                    if used[t]:
                        return False
                    sigma[u], used[t] = t, True
                    trail.append(u)
                    stack.append(u)
                elif sigma[u] != t:
                    return False
        return True

    def rec(k: int) -> bool:
        if k == len(roots):
            out.append(Permutation(sigma, check=False))
            return first_only
        r = roots[k]
        for a in range(n):
            if used[a]:
                continue
            trail: list[int] = []
            ok = propagate(r, a, trail)
            if ok and rec(k + 1):
                return True
            for x in trail:
                used[sigma[x]] = False
                sigma[x] = -1
        return False

    rec(0)
    return out


def symmetric_normalizer(S: PermGroup, gens: Sequence[Permutation] | None = None) -> PermGroup:
    """Normalizer of ``S`` in the full symmetric group of its degree.

    Every coset of ``S`` in the normalizer contains an element conjugating the
    first generator to a fixed class representative of ``S``, so only those
    images need to be tried.
    """
    gens = list(S.generators if gens is None else gens)
    gens = [g for g in gens if not g.is_identity()] or [Permutation.identity(S.degree)]
    elems = S.elements()
    y1 = gens[0]
    typed = [e for e in elems if e.cycle_type() == y1.cycle_type()]
    reps: list[Permutation] = []
    covered: set[Permutation] = set()
    for e in typed:
        if e in covered:
            continue
        reps.append(e)
        covered |= {e.conjugate(s) for s in elems}
    extra: list[Permutation] = []
    N = PermGroup(list(S.generators), S.degree)
    by_type = {}
    for e in elems:
        by_type.setdefault(e.cycle_type(), []).append(e)
    rest_choices = [by_type.get(g.cycle_type(), []) for g in gens[1:]]
    for z1 in reps:
        for rest in itertools.product(*rest_choices):
            for s in conjugators(gens, [z1, *rest]):
                if s not in N:
                    extra.append(s)
                    N = PermGroup(list(S.generators) + extra, S.degree)
    return N
