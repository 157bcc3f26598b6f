"""Census of minimally transitive groups of small degree, and catalog files.

The built-in search walks orbit-merging chains inside ``S_n`` with subgroups
kept up to ``S_n``-conjugacy, so it is exhaustive; degree 8 is the default cap.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .caps import CapExceeded
from .elements import ElementIndex, SubgroupRegistry
from .group import PermGroup, abelian_invariants
from .mintrans import Verdict, check_theorem, merging_chain_search
from .perm import Permutation

log = logging.getLogger(__name__)

CENSUS_DEGREE_CAP = 8


@dataclass
class CensusEntry:
    group: PermGroup
    name: str
    minimal: bool

    def sort_key(self) -> tuple:
        types = sorted(g.cycle_type() for g in self.group.generators)
        return (self.group.order(), types)


def minimally_transitive_classes(n: int) -> list[PermGroup]:
    """Representatives of the ``S_n``-classes of minimally transitive subgroups."""
    if n > CENSUS_DEGREE_CAP:
        raise CapExceeded("built-in census degree", n, CENSUS_DEGREE_CAP)
    if n == 1:
        return [PermGroup.trivial(1)]
    index = ElementIndex.symmetric(n)
    transitive = SubgroupRegistry(index)
    for mask, gens in merging_chain_search(index, skip_full=False):
        transitive.register(mask, gens)
    # Every minimally transitive subgroup is reached by some chain, so a found
    # class is minimal iff no smaller found class embeds in it up to conjugacy.
    order = [int(mk.sum()) for mk in transitive.masks]
    ranked = sorted(range(len(order)), key=order.__getitem__)
    minimal: list[int] = []
    for cid in ranked:
        mask = transitive.masks[cid]
        below = [u for u in ranked if order[u] < order[cid] and order[cid] % order[u] == 0]
        is_min = all(index.find_conjugator(transitive.gens[u], mask) is None for u in below)
        log.debug("degree %d: transitive class %d of order %d, minimal=%s",
                  n, cid, order[cid], is_min)
        if is_min:
            minimal.append(cid)
    out = [PermGroup([index.perm(g) for g in transitive.gens[cid]], n) for cid in minimal]
    out.sort(key=lambda G: (G.order(), sorted(g.cycle_type() for g in G.generators)))
    return out


def group_name(G: PermGroup) -> str:
    """A short structural label for small groups (best effort, for reports)."""
    order = G.order()
    if order == 1:
        return "1"
    if G.is_abelian():
        inv = abelian_invariants(G)
        if len(inv) == 1:
            return f"C{inv[0]}"
        if len(set(inv)) == 1:
            return f"C{inv[0]}^{len(inv)}"
        return "x".join(f"C{q}" for q in inv)
    elems = G.elements()
    orders = [e.order() for e in elems]
    invol = orders.count(2)
    if order == 6:
        return "S3"
    if order == 8:
        return "D4" if invol == 5 else "Q8"
    if order == 12:
        if orders.count(3) == 8 and 6 not in orders:
            return "A4"
        return "D6" if invol == 7 else "Dic3"
    if order == 24 and orders.count(2) == 9 and 4 in orders:
        return "S4"
    if order == 2 * (order // 2) and invol == order // 2 + (1 if (order // 2) % 2 == 0 else 0) \
            and max(orders) == order // 2:
        return f"D{order // 2}"
    return f"G{order}"


def census(n: int | None = None, catalog: str | Path | None = None, seed: int = 0) -> list[Verdict]:
    """Verdict records for every minimally transitive class of degree ``n``
    (built-in search), or for every group in a catalog file."""
    records = []
    if catalog is not None:
        for name, G in read_catalog(catalog):
            records.append(check_theorem(G, name=name, seed=seed))
        return records
    if n is None:
        raise ValueError("need a degree or a catalog")
    names: dict[str, int] = {}
    for G in minimally_transitive_classes(n):
        base = group_name(G)
        names[base] = names.get(base, 0) + 1
        label = base if names[base] == 1 else f"{base}#{names[base]}"
        records.append(check_theorem(G, name=label, seed=seed))
    return records


# -- group and catalog files ---------------------------------------------------

def parse_group_block(lines: Iterable[str]) -> tuple[dict, PermGroup]:
    """Parse one group file block; returns (metadata from ``# key: value``, group)."""
    meta: dict[str, str] = {}
    degree = None
    gens: list[Permutation] = []
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                meta[key.strip().lower()] = value.strip()
            continue
        line = line.split("#", 1)[0].strip()
        if degree is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "degree":
                raise ValueError(f"expected 'degree n', got {line!r}")
            degree = int(parts[1])
            if degree < 1:
                raise ValueError("degree must be positive")
            continue
        gens.append(Permutation.parse(line, degree))
    if degree is None:
        raise ValueError("group block without a 'degree' line")
    return meta, PermGroup(gens, degree)


def read_group_file(path: str | Path) -> PermGroup:
    return parse_group_block(Path(path).read_text().splitlines())[1]


def read_catalog(path: str | Path) -> list[tuple[str, PermGroup]]:
    """Blocks separated by ``---`` lines, each optionally labelled ``# name: ...``."""
    blocks: list[list[str]] = [[]]
    for line in Path(path).read_text().splitlines():
        if line.strip() == "---":
            blocks.append([])
        else:
            blocks[-1].append(line)
    out = []
    for i, block in enumerate(blocks):
        if not any(l.strip() and not l.strip().startswith("#") for l in block):
            continue
        meta, G = parse_group_block(block)
        out.append((meta.get("name", f"group{i + 1}"), G))
    return out


def format_group(G: PermGroup, name: str | None = None, meta: dict | None = None) -> str:
    lines = []
    if name:
        lines.append(f"# name: {name}")
    for k, v in (meta or {}).items():
        lines.append(f"# {k}: {v}")
    lines.append(f"degree {G.degree}")
    lines.extend(str(g) for g in G.generators)
    return "\n".join(lines) + "\n"
