import itertools
import os

from hypothesis import HealthCheck, settings

from crownlab.group import PermGroup
from crownlab.perm import Permutation

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def grp(*cycles: str, degree: int | None = None) -> PermGroup:
    """A group from 1-indexed cycle strings; degree defaults to the largest point."""
    if degree is None:
        degree = max(Permutation.parse(c).degree for c in cycles)
    return PermGroup([Permutation.parse(c, degree) for c in cycles], degree)


def symmetric(n: int) -> PermGroup:
    return grp("(1,2)", "(" + ",".join(map(str, range(1, n + 1))) + ")", degree=n)


def cyclic(n: int) -> PermGroup:
    if n == 1:
        return PermGroup.trivial(1)
    return grp("(" + ",".join(map(str, range(1, n + 1))) + ")", degree=n)


def alternating(n: int) -> PermGroup:
    from crownlab.gamma import alternating as alt
    return alt(n)


def dihedral(n: int) -> PermGroup:
    """The symmetries of an n-gon, on n points."""
    rot = "(" + ",".join(map(str, range(1, n + 1))) + ")"
    refl = "".join(f"({i},{n + 2 - i})" for i in range(2, n + 1) if i < n + 2 - i)
    return grp(rot, refl or "()", degree=n)


def direct_product(*groups: PermGroup) -> PermGroup:
    total = sum(G.degree for G in groups)
    gens, offset = [], 0
    for G in groups:
        gens.extend(g.extend(total, offset) for g in G.generators)
        offset += G.degree
    return PermGroup(gens, total)


def brute_force_phi(G: PermGroup, d: int) -> int:
    """Count generating d-tuples by closing every tuple (independent of the lattice)."""
    elems = G.elements()
    order = G.order()
    return sum(1 for tup in itertools.product(elems, repeat=d)
               if PermGroup(list(tup), G.degree).order() == order)


def brute_force_subgroups(G: PermGroup) -> set[frozenset]:
    """All subgroups as element sets, by closing every pair of cyclic subgroups
    repeatedly.  Slow; for orders up to about 120."""
    elems = G.elements()

    def close(gens):
        seen = {Permutation.identity(G.degree)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x * g
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    subs = {close([])}
    frontier = list(subs)
    while frontier:
        nxt = []
        for H in frontier:
            for g in elems:
                if g not in H:
                    K = close(list(H) + [g]) if len(H) < 8 else close(_gens_of(H) + [g])
                    if K not in subs:
                        subs.add(K)
                        nxt.append(K)
        frontier = nxt
    return subs


def _gens_of(H: frozenset) -> list:
    # a small generating set: add elements until the closure is H
    gens: list = []
    have = {next(iter(H)) ** 0}
    for h in sorted(H):
        if h not in have:
            gens.append(h)
            have = set(PermGroup(gens, h.degree).elements())
            if len(have) == len(H):
                break
    return gens


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
