"""Dense element enumeration of a small permutation group.

Elements are rows of an ``(m, n)`` integer array and are addressed by index.
Subgroups are boolean masks over those indices, which makes closures,
conjugation and normalizers plain numpy operations.  This is the substrate for
the subgroup lattice, the minimal-transitivity search and the census.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .caps import CapExceeded, get_caps
from .group import PermGroup
from .perm import Permutation


_DENSE_TABLE_LIMIT = 1 << 24


class ElementIndex:
    """Indexed elements of a group with vectorized products."""

    def __init__(self, rows: np.ndarray, base: Sequence[int] | None = None):
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        self.rows = rows
        self.m, self.n = rows.shape
        if base is None:
            base = range(self.n)
        self.base = np.asarray(list(base), dtype=np.int64)
        if len(self.base) * math.log2(max(self.n, 2)) > 62:
            raise ValueError("base too long for 64-bit element codes")
        self._weights = self.n ** np.arange(len(self.base), dtype=np.int64)
        codes = self.encode(rows)
        order = np.argsort(codes, kind="stable")
        self._sorted_codes = codes[order]
        self._sorted_index = order
        if len(np.unique(self._sorted_codes)) != self.m:
            raise ValueError("base does not separate the elements")
        self._table = None
        span = self.n ** len(self.base)
        if span <= _DENSE_TABLE_LIMIT:
            self._table = np.full(span, -1, dtype=np.int32)
            self._table[codes] = np.arange(self.m)
        self.identity = int(self.lookup(np.arange(self.n)[None, :])[0])
        inv = np.empty_like(rows)
        inv[np.arange(self.m)[:, None], rows] = np.arange(self.n)[None, :]
        self.inverse = self.lookup(inv)
        self._cycle_types = None

    @classmethod
    def of_group(cls, G: PermGroup, cap: int | None = None) -> "ElementIndex":
        cap = get_caps().element if cap is None else cap
        images = G.element_images(cap)
        base = G.chain.base if G.degree > 15 else None
        if base is not None and not base:
            base = [0]
        return cls(np.array(images, dtype=np.int64).reshape(len(images), G.degree), base)

    @classmethod
    def symmetric(cls, n: int, cap: int | None = None) -> "ElementIndex":
        cap = get_caps().element if cap is None else cap
        if math.factorial(n) > cap:
            raise CapExceeded("element enumeration", math.factorial(n), cap)
        rows = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        return cls(rows.reshape(-1, n))

    # -- encoding -----------------------------------------------------------
    def encode(self, rows: np.ndarray) -> np.ndarray:
        return rows[:, self.base] @ self._weights

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Indices of the given element rows (which must lie in the group)."""
        codes = self.encode(rows)
        if self._table is not None:
            idx = self._table[codes]
            if idx.size and idx.min() < 0:
                raise KeyError("element not in group")
            return idx.astype(np.int64)
        pos = np.searchsorted(self._sorted_codes, codes)
        pos = np.minimum(pos, self.m - 1)
        if not np.array_equal(self._sorted_codes[pos], codes):
            raise KeyError("element not in group")
        return self._sorted_index[pos]

    def index_of(self, p: Permutation | Sequence[int]) -> int:
        images = p.images if isinstance(p, Permutation) else tuple(p)
        return int(self.lookup(np.asarray(images, dtype=np.int64)[None, :])[0])

    def contains_rows(self, rows: np.ndarray) -> np.ndarray:
        codes = self.encode(rows)
        pos = np.minimum(np.searchsorted(self._sorted_codes, codes), self.m - 1)
        ok = self._sorted_codes[pos] == codes
        # codes only see the base; confirm full rows for the hits
        idx = self._sorted_index[pos]
        ok &= (self.rows[idx] == rows).all(axis=1)
        return ok

    def perm(self, i: int) -> Permutation:
        return Permutation(self.rows[i].tolist(), check=False)

    # -- products -----------------------------------------------------------
    def mul(self, a, b) -> np.ndarray:
        """Indices of ``a[i] * b[i]`` (apply a first); scalars broadcast."""
        a = np.atleast_1d(np.asarray(a))
        b = np.atleast_1d(np.asarray(b))
        ra = self.rows[a]
        rb = self.rows[b]
        if len(rb) == 1 and len(ra) > 1:
            prod = rb[0][ra]
        elif len(ra) == 1 and len(rb) > 1:
            prod = rb[:, ra[0]]
        else:
            prod = np.take_along_axis(rb, ra, axis=1)
        return self.lookup(prod)

    def conj(self, a, x) -> np.ndarray:
        """Indices of ``x^-1 a x``."""
        x = np.atleast_1d(np.asarray(x))
        return self.mul(self.mul(self.inverse[x], a), x)

    def orders(self) -> np.ndarray:
        ct = self.cycle_lengths()
        return np.lcm.reduce(ct, axis=1)

    def cycle_lengths(self) -> np.ndarray:
        """``[i, x]`` = length of the cycle through ``x`` of element ``i``."""
        if self._cycle_types is None:
            lengths = np.zeros((self.m, self.n), dtype=np.int64)
            start = np.arange(self.n)[None, :].repeat(self.m, axis=0)
            cur = start.copy()
            r = np.arange(self.m)[:, None]
            for j in range(1, self.n + 1):
                cur = self.rows[r, cur]
                hit = (cur == start) & (lengths == 0)
                lengths[hit] = j
            self._cycle_types = lengths
        return self._cycle_types

    def cycle_type_codes(self) -> np.ndarray:
        """An integer per element identifying its cycle type."""
        ct = np.sort(self.cycle_lengths(), axis=1)
        w = (self.n + 1) ** np.arange(self.n, dtype=np.int64) if self.n <= 15 else None
        if w is None:
            return np.unique(ct, axis=0, return_inverse=True)[1].ravel()
        return ct @ w

    # -- subgroups ----------------------------------------------------------
    def closure(self, gens: Iterable[int], start: np.ndarray | None = None) -> np.ndarray:
        """Mask of the subgroup generated by ``gens`` (and ``start`` if given)."""
        gens = [int(g) for g in gens]
        mask = np.zeros(self.m, dtype=bool)
        if start is not None:
            # start is a subgroup mask; its elements seed the frontier.
            mask |= start
            frontier = np.flatnonzero(start)
        else:
            mask[self.identity] = True
            frontier = np.array([self.identity])
        while frontier.size:
            new = np.concatenate([self.mul(frontier, g) for g in gens]) if gens else frontier[:0]
            new = np.unique(new[~mask[new]])
            mask[new] = True
            frontier = new
        return mask

    def extend(self, mask: np.ndarray, gens: Sequence[int], g: int) -> np.ndarray:
        """Mask of ``<H, g>`` where ``mask`` is the subgroup ``H = <gens>``."""
        return self.closure(list(gens) + [g], start=mask)

    def generators_of(self, mask: np.ndarray) -> list[int]:
        """A small generating set of the subgroup ``mask`` (greedy, deterministic)."""
        members = np.flatnonzero(mask)
        ords = self.orders()[members]
        # prefer elements of large order first
        members = members[np.argsort(-ords, kind="stable")]
        gens: list[int] = []
        cur = np.zeros(self.m, dtype=bool)
        cur[self.identity] = True
        have, target = 1, int(mask.sum())
        for x in members:
            if have == target:
                break
            if not cur[x]:
                gens.append(int(x))
                cur = self.closure(gens)
                have = int(cur.sum())
        return gens

    def normalizer(self, mask: np.ndarray, gens: Sequence[int], within: np.ndarray | None = None) -> np.ndarray:
        """Mask of the normalizer of subgroup ``<gens>`` (elements of ``within``)."""
        cand = np.arange(self.m) if within is None else np.flatnonzero(within)
        ok = np.ones(len(cand), dtype=bool)
        for h in gens:
            ok &= mask[self.conj(h, cand)]
        out = np.zeros(self.m, dtype=bool)
        out[cand[ok]] = True
        return out

    def conjugate_mask(self, mask: np.ndarray, x: int) -> np.ndarray:
        out = np.zeros(self.m, dtype=bool)
        out[self.conj(np.flatnonzero(mask), x)] = True
        return out

    def find_conjugator(self, gens_a: Sequence[int], mask_b: np.ndarray,
                        within: np.ndarray | None = None) -> int | None:
        """Some ``x`` with ``<gens_a>^x`` inside ``mask_b`` (assumed equal order)."""
        cand = np.arange(self.m) if within is None else np.flatnonzero(within)
        ok = np.ones(len(cand), dtype=bool)
        for h in gens_a:
            sel = cand[ok]
            if not len(sel):
                return None
            ok[ok] = mask_b[self.conj(h, sel)]
        hits = cand[ok]
        return int(hits[0]) if len(hits) else None

    def conjugacy_classes(self, acting: Sequence[int] | None = None) -> list[np.ndarray]:
        """Classes under conjugation by ``acting`` (default: the group generators)."""
        if acting is None:
            acting = self.generators_of(np.ones(self.m, dtype=bool))
        labels = self.action_orbits([self.conj(np.arange(self.m), x) for x in acting])
        return _group_by_label(labels)

    def action_orbits(self, images: Sequence[np.ndarray]) -> np.ndarray:
        """Component labels of the index graph with edges ``i -> f[i]``."""
        if not images:
            return np.arange(self.m)
        src = np.concatenate([np.arange(self.m)] * len(images))
        dst = np.concatenate(images)
        graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(self.m, self.m))
        _, labels = connected_components(graph, directed=True, connection="weak")
        return labels

    def point_orbit_labels(self, gens: Sequence[int]) -> np.ndarray:
        """Label of each point's orbit under ``<gens>`` (labels = min point)."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in gens:
            for x, y in enumerate(self.rows[g].tolist()):
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)
        return np.array([find(x) for x in range(self.n)])

    def mask_to_group(self, mask: np.ndarray) -> PermGroup:
        gens = self.generators_of(mask)
        return PermGroup([self.perm(g) for g in gens], self.n)


def _group_by_label(labels: np.ndarray) -> list[np.ndarray]:
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    cuts = np.flatnonzero(np.diff(sorted_labels)) + 1
    groups = np.split(order, cuts)
    groups.sort(key=lambda g: int(g.min()))
    return [np.sort(g) for g in groups]


def mask_key(mask: np.ndarray) -> bytes:
    return np.packbits(mask).tobytes()


def mask_to_int(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


class SubgroupRegistry:
    """Subgroups deduplicated up to conjugacy inside an ambient ElementIndex.

    A cheap invariant (order, point-orbit lengths, cycle-type census) buckets
    candidates; collisions are settled by an explicit conjugator search.
    """

    def __init__(self, index: ElementIndex, acting: np.ndarray | None = None):
        self.index = index
        self.acting = acting
        self._ctype = index.cycle_type_codes()
        self.buckets: dict[tuple, list[int]] = {}
        self.masks: list[np.ndarray] = []
        self.gens: list[list[int]] = []
        self.exact: dict[bytes, int] = {}

    def invariant(self, mask: np.ndarray, gens: Sequence[int]) -> tuple:
        lab = self.index.point_orbit_labels(gens)
        orbit_sizes = tuple(sorted(np.bincount(lab, minlength=self.index.n)[np.unique(lab)]))
        types, counts = np.unique(self._ctype[mask], return_counts=True)
        return (int(mask.sum()), orbit_sizes, tuple(types.tolist()), tuple(counts.tolist()))

    def register(self, mask: np.ndarray, gens: Sequence[int] | None = None) -> tuple[int, bool]:
        """Return (class id, is_new)."""
        key = mask_key(mask)
        if key in self.exact:
            return self.exact[key], False
        if gens is None:
            gens = self.index.generators_of(mask)
        inv = self.invariant(mask, gens)
        for cid in self.buckets.get(inv, []):
            if self.index.find_conjugator(gens, self.masks[cid], self.acting) is not None:
                self.exact[key] = cid
                return cid, False
        cid = len(self.masks)
        self.masks.append(mask)
        self.gens.append(list(gens))
        self.buckets.setdefault(inv, []).append(cid)
        self.exact[key] = cid
        return cid, True

    def __len__(self) -> int:
        return len(self.masks)


def extension_representatives(index: ElementIndex, mask: np.ndarray, gens: Sequence[int],
                              within: np.ndarray | None = None) -> list[int]:
    """One ``g`` per orbit of ``(h1, h2, v): g -> v^-1 h1 g h2 v`` outside ``H``.

    ``<H, g>`` is constant on these orbits up to conjugacy by the normalizer,
    so these representatives reach every one-element extension of ``H``.
    """
    N = index.normalizer(mask, gens, within)
    ngens = index.generators_of(N)
    allidx = np.arange(index.m)
    images = []
    for h in gens:
        images.append(index.mul(h, allidx))
        images.append(index.mul(allidx, h))
    for v in ngens:
        images.append(index.conj(allidx, v))
    labels = index.action_orbits(images)
    if within is not None:
        labels = np.where(within, labels, -1)
    reps = []
    seen = set()
    for i in range(index.m):
        lab = int(labels[i])
        if lab < 0 or lab in seen:
            continue
        seen.add(lab)
        if not mask[i]:
            reps.append(i)
    return reps
