"""Subgroup lattices of small groups, Moebius values and Eulerian counts.

Subgroups are found class by class: for a class representative ``H`` every
one-element extension ``<H, g>`` is formed with ``g`` running over orbit
representatives of ``g -> v^-1 h1 g h2 v`` (``h1, h2`` in ``H``, ``v`` in the
normalizer).  Each new class is then expanded into all of its conjugates, so
the finished lattice holds every subgroup exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .caps import CapExceeded, get_caps
from .elements import ElementIndex, extension_representatives, mask_key, mask_to_int
from .group import PermGroup


@dataclass
class SubgroupNode:
    elements: int              # bitset over the parent's element index
    order: int
    class_id: int
    generators: list[int]
    maximal: bool = False
    normal: bool = False

    def __contains__(self, other: "SubgroupNode") -> bool:
        return other.elements & self.elements == other.elements


@dataclass
class SubgroupLattice:
    parent: PermGroup
    index: ElementIndex
    nodes: list[SubgroupNode]
    mobius: dict[int, int] = field(default_factory=dict)   # node position -> mu(H, G)
    class_sizes: list[int] = field(default_factory=list)
    _covers: list[list[int]] | None = None

    @property
    def top(self) -> int:
        return len(self.nodes) - 1

    @property
    def bottom(self) -> int:
        return 0

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[SubgroupNode]:
        return iter(self.nodes)

    def mask(self, node: SubgroupNode) -> np.ndarray:
        bits = np.frombuffer(node.elements.to_bytes((self.index.m + 7) // 8, "little"), dtype=np.uint8)
        return np.unpackbits(bits, bitorder="little")[: self.index.m].astype(bool)

    def group(self, node: SubgroupNode) -> PermGroup:
        return PermGroup([self.index.perm(g) for g in node.generators], self.parent.degree)

    def covers(self) -> list[list[int]]:
        """Hasse diagram: ``covers()[i]`` lists the nodes covering node ``i``."""
        if self._covers is None:
            above: list[list[int]] = []
            for i, h in enumerate(self.nodes):
                sup = [j for j in range(i + 1, len(self.nodes))
                       if self.nodes[j].order > h.order and h in self.nodes[j]]
                above.append(sup)
            covers = []
            for i, sup in enumerate(above):
                sset = set(sup)
                covers.append([j for j in sup if not any(k in sset and j in above[k] for k in sup)])
            self._covers = covers
        return self._covers

    def dump(self) -> str:
        """One ``order=<k> mobius=<m> maximal=<0|1>`` line per node."""
        lines = []
        for pos, node in enumerate(self.nodes):
            lines.append(f"order={node.order} mobius={self.mobius.get(pos, 0)} maximal={int(node.maximal)}")
        return "\n".join(lines) + "\n"


def enumerate_subgroups(G: PermGroup, cap: int | None = None) -> SubgroupLattice:
    """Every subgroup of ``G`` with inclusion data and Moebius values."""
    cap = get_caps().lattice if cap is None else cap
    n = G.order()
    if n > cap:
        raise CapExceeded("subgroup lattice", n, cap)
    index = ElementIndex.of_group(G, cap=max(cap, n))
    m = index.m
    full = np.ones(m, dtype=bool)
    ggens = index.generators_of(full)

    trivial = np.zeros(m, dtype=bool)
    trivial[index.identity] = True
    reps: list[tuple[np.ndarray, list[int]]] = [(trivial, [])]
    seen: dict[bytes, int] = {mask_key(trivial): 0}
    all_masks: list[np.ndarray] = [trivial]
    all_class: list[int] = [0]
    all_gens: list[list[int]] = [[]]
    class_sizes = [1]

    def add_class(mask: np.ndarray, gens: list[int]) -> None:
        cid = len(reps)
        reps.append((mask, gens))
        # all conjugates via the conjugation action of the generators
        frontier = [(mask, gens)]
        size = 0
        while frontier:
            nxt = []
            for mk, gs in frontier:
                size += 1
                for x in ggens:
                    cm = index.conjugate_mask(mk, x)
                    key = mask_key(cm)
                    if key in seen:
                        continue
                    cg = [int(v) for v in index.conj(gs, x)] if gs else []
                    seen[key] = len(all_masks)
                    all_masks.append(cm)
                    all_class.append(cid)
                    all_gens.append(cg)
                    nxt.append((cm, cg))
            frontier = nxt
        class_sizes.append(size)

    i = 0
    while i < len(reps):
        mask, gens = reps[i]
        for g in extension_representatives(index, mask, gens):
            k = index.extend(mask, gens, g)
            key = mask_key(k)
            if key in seen:
                continue
            kg = gens + [g]
            seen[key] = len(all_masks)
            all_masks.append(k)
            all_class.append(len(reps))
            all_gens.append(kg)
            add_class(k, kg)
        i += 1

    order = sorted(range(len(all_masks)), key=lambda j: (int(all_masks[j].sum()), j))
    nodes = []
    for j in order:
        mk = all_masks[j]
        nodes.append(SubgroupNode(mask_to_int(mk), int(mk.sum()), all_class[j], all_gens[j]))
    lattice = SubgroupLattice(G, index, nodes, class_sizes=class_sizes)
    _mark_normal(lattice)
    _mark_maximal(lattice)
    _compute_mobius(lattice)
    return lattice


def _mark_normal(lattice: SubgroupLattice) -> None:
    counts: dict[int, int] = {}
    for node in lattice.nodes:
        counts[node.class_id] = counts.get(node.class_id, 0) + 1
    for node in lattice.nodes:
        node.normal = counts[node.class_id] == 1


def _mark_maximal(lattice: SubgroupLattice) -> None:
    top = lattice.nodes[-1]
    found: list[SubgroupNode] = []
    for node in reversed(lattice.nodes[:-1]):
        if not any(node.order < mx.order and node in mx for mx in found):
            node.maximal = True
            found.append(node)
    top.maximal = False


def _compute_mobius(lattice: SubgroupLattice) -> None:
    # mu(G, G) = 1 and mu(H, G) = -sum_{K > H} mu(K, G); only nonzero terms kept.
    nodes = lattice.nodes
    mob: dict[int, int] = {len(nodes) - 1: 1}
    nonzero = [(len(nodes) - 1, nodes[-1])]
    for pos in range(len(nodes) - 2, -1, -1):
        h = nodes[pos]
        s = sum(mob[p] for p, k in nonzero if k.order > h.order and h in k)
        mob[pos] = -s
        if s:
            nonzero.append((pos, h))
    lattice.mobius = mob


def maximal_subgroups(lattice: SubgroupLattice) -> list[SubgroupNode]:
    return [node for node in lattice.nodes if node.maximal]


def eulerian_phi(lattice: SubgroupLattice, d: int) -> int:
    """Number of ordered ``d``-tuples generating the parent group."""
    return sum(mu * lattice.nodes[pos].order ** d for pos, mu in lattice.mobius.items() if mu)


def eulerian_probability(lattice: SubgroupLattice, d: int) -> Fraction:
    return Fraction(eulerian_phi(lattice, d), lattice.nodes[-1].order ** d)


def minimal_normal_subgroups(G: PermGroup, cap: int | None = None) -> list[PermGroup]:
    """Minimal normal subgroups, as the minimal normal closures of class representatives."""
    index = ElementIndex.of_group(G, cap)
    return [index.mask_to_group(mk) for mk in _minimal_normal_masks(index)]


def _normal_closure_mask(index: ElementIndex, cls: np.ndarray) -> np.ndarray:
    gens: list[int] = []
    mask = np.zeros(index.m, dtype=bool)
    mask[index.identity] = True
    for c in cls:
        if not mask[c]:
            gens.append(int(c))
            mask = index.closure(gens, start=mask)
    return mask


def _minimal_normal_masks(index: ElementIndex) -> list[np.ndarray]:
    closures = []
    keys = set()
    for cls in index.conjugacy_classes():
        if index.identity in cls:
            continue
        mk = _normal_closure_mask(index, cls)
        key = mask_key(mk)
        if key not in keys:
            keys.add(key)
            closures.append(mk)
    closures.sort(key=lambda mk: int(mk.sum()))
    minimal = []
    for mk in closures:
        if not any((mn & mk).sum() == mn.sum() for mn in minimal):
            minimal.append(mk)
    return minimal


def socle(G: PermGroup, cap: int | None = None) -> PermGroup:
    index = ElementIndex.of_group(G, cap)
    gens: list[int] = []
    for mk in _minimal_normal_masks(index):
        gens.extend(index.generators_of(mk))
    return index.mask_to_group(index.closure(gens))

