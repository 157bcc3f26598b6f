"""Minimal transitivity, minimal generator numbers and the d(G) <= mu(n)+1 check.

Searching for a proper transitive subgroup uses orbit-merging chains: starting
from the trivial group, repeatedly adjoin one element that fuses at least two
current orbits.  Every minimally transitive subgroup ``T`` is reached this way
(while a subgroup of ``T`` is intransitive, some generator of ``T`` fuses two
of its orbits), and every chain has at most ``n - 1`` steps, so exhausting the
chains up to conjugacy decides minimal transitivity exactly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .caps import CapExceeded, HypothesisError, get_caps
from .elements import ElementIndex, SubgroupRegistry, extension_representatives
from .group import (
    PermGroup,
    StabilizerChain,
    abelian_invariants,
    block_action,
    coset_action,
    m_orbit_blocks,
    orbit,
    point_stabilizer,
)
from .perm import Permutation


@dataclass(frozen=True)
class Factorization:
    n: int
    exponents: dict

    @property
    def omega(self) -> int:
        return sum(self.exponents.values())

    @property
    def mu(self) -> int:
        return max(self.exponents.values(), default=0)


def omega_mu(n: int) -> Factorization:
    """Trial-division factorization with omega(n) and mu(n) derivable."""
    if n < 1:
        raise ValueError("n must be positive")
    exps: dict[int, int] = {}
    m, p = n, 2
    while p * p <= m:
        while m % p == 0:
            exps[p] = exps.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        exps[m] = exps.get(m, 0) + 1
    return Factorization(n, exps)


def mu_plus_one(n: int) -> int:
    return omega_mu(n).mu + 1


# -- orbit-merging chain search ----------------------------------------------

def _transitive(index: ElementIndex, gens) -> bool:
    lab = index.point_orbit_labels(gens)
    return bool((lab == lab[0]).all())


def merging_chain_search(index: ElementIndex, skip_full: bool = True,
                         budget: int | None = None) -> Iterator[tuple[np.ndarray, list[int]]]:
    """Yield transitive subgroups reached by orbit-merging chains.

    Intransitive intermediates are deduplicated up to conjugacy in the ambient
    group; yielded transitive subgroups are not deduplicated.  The ambient
    group itself is skipped when ``skip_full``.
    """
    budget = get_caps().search if budget is None else budget
    registry = SubgroupRegistry(index)
    trivial = np.zeros(index.m, dtype=bool)
    trivial[index.identity] = True
    registry.register(trivial, [])
    work = 0
    i = 0
    while i < len(registry):
        mask, gens = registry.masks[i], registry.gens[i]
        labels = index.point_orbit_labels(gens)
        reps = np.asarray(extension_representatives(index, mask, gens), dtype=np.int64)
        if len(reps):
            merging = (labels[index.rows[reps]] != labels[None, :]).any(axis=1)
            reps = reps[merging]
        for g in reps.tolist():
            work += 1
            if work > budget:
                raise CapExceeded("merging-chain search", work, budget)
            k = index.extend(mask, gens, g)
            kg = gens + [g]
            if _transitive(index, kg):
                if skip_full and k.all():
                    continue
                yield k, kg
            else:
                registry.register(k, kg)
        i += 1


@dataclass
class MinTransVerdict:
    minimally_transitive: bool | None
    witness: PermGroup | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return bool(self.minimally_transitive)


def is_minimally_transitive(G: PermGroup, budget: int | None = None) -> MinTransVerdict:
    """Decide whether every proper subgroup of transitive ``G`` is intransitive.

    On ``False`` the witness is a proper transitive subgroup.  If enumeration
    or search caps are hit the verdict is ``None`` (indeterminate), never a
    guess.
    """
    if not G.is_transitive():
        raise HypothesisError("G is not transitive")
    if G.degree == 1:
        return MinTransVerdict(True, reason="degree 1")
    # cheap witnesses first: a generator that is already transitive
    for g in G.generators:
        H = PermGroup([g], G.degree)
        if H.is_transitive() and H.order() < G.order():
            return MinTransVerdict(False, H, "transitive cyclic subgroup")
    try:
        index = ElementIndex.of_group(G)
        found = next(merging_chain_search(index, budget=budget), None)
    except CapExceeded as exc:
        return MinTransVerdict(None, reason=str(exc))
    if found is None:
        return MinTransVerdict(True, reason="exhaustive merging-chain search")
    mask, gens = found
    return MinTransVerdict(False, index.mask_to_group(mask), "merging-chain search")


# -- minimal generator number -------------------------------------------------

@dataclass
class GenerationCertificate:
    d: int
    witness: list[Permutation] | None
    exhaustive: bool
    lower_bound: int
    method: str          # how the lower bound was established

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "witness": None if self.witness is None else [str(w) for w in self.witness],
            "exhaustive": self.exhaustive,
            "lower_bound": self.lower_bound,
            "method": self.method,
        }


def generates(G: PermGroup, elements, order: int | None = None) -> bool:
    order = G.order() if order is None else order
    chain = StabilizerChain(G.degree, [e.images for e in elements])
    return chain.order() == order


def d_min(G: PermGroup, seed: int = 0, trials: int = 200,
          search_budget: int | None = None) -> GenerationCertificate:
    """The smallest size of a generating set, with a certificate of confidence.

    Upper bounds come from seeded random search (and the given generators);
    the lower bound is the abelian-quotient rank, raised by exhaustive search
    over tuples whose first entry is a conjugacy class representative.
    """
    order = G.order()
    if order == 1:
        return GenerationCertificate(0, [], True, 0, "trivial")
    budget = get_caps().search if search_budget is None else search_budget
    try:
        rank = len(abelian_invariants(G))
        lower, method = max(rank, 1), "abelian-rank"
    except CapExceeded:
        lower, method = 1, "nontrivial"

    gens = [g for g in G.generators if not g.is_identity()]
    upper, witness = len(gens), gens
    rng = random.Random(seed)
    for d in range(lower, upper):
        hit = None
        for _ in range(trials):
            tup = [G.random_element(rng) for _ in range(d)]
            if generates(G, tup, order):
                hit = tup
                break
        if hit is not None:
            upper, witness = d, hit
            break
    if upper == lower:
        return GenerationCertificate(upper, witness, True, lower, method)

    try:
        index = ElementIndex.of_group(G)
    except CapExceeded:
        return GenerationCertificate(upper, witness, False, lower, method)
    classes = index.conjugacy_classes()
    reps = [int(c[0]) for c in classes]
    while upper > lower:
        try:
            tup = _exhaustive_tuple(index, reps, upper - 1, budget)
        except CapExceeded:
            return GenerationCertificate(upper, witness, False, lower, method)
        if tup is None:
            return GenerationCertificate(upper, witness, True, upper, "exhaustive")
        upper, witness = upper - 1, [index.perm(t) for t in tup]
    return GenerationCertificate(upper, witness, True, lower, method)


def _exhaustive_tuple(index: ElementIndex, reps: list[int], d: int, budget: int):
    """A generating d-tuple with first entry a class representative, or None.

    Generation does not depend on the order of the remaining entries, so they
    range over multisets.
    """
    m = index.m
    if d == 0:
        return [] if m == 1 else None
    if d == 1:
        orders = index.orders()
        for r in reps:
            if orders[r] == m:
                return [r]
        return None
    count = 0
    for first in reps:
        for rest in itertools.combinations_with_replacement(range(m), d - 1):
            count += 1
            if count > budget:
                raise CapExceeded("generator tuple search", count, budget)
            if int(index.closure((first,) + rest).sum()) == m:
                return [first, *rest]
    return None


# -- the theorem check ---------------------------------------------------------

@dataclass
class Verdict:
    degree: int
    name: str
    order: int
    mu_plus_1: int
    minimally_transitive: bool | None
    certificate: GenerationCertificate | None
    status: str            # pass | fail | not-applicable | indeterminate
    notes: list[str] = field(default_factory=list)
    generators: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "not-applicable")

    def to_dict(self) -> dict:
        cert = self.certificate
        return {
            "degree": self.degree,
            "name": self.name,
            "order": self.order,
            "d": None if cert is None else cert.d,
            "mu_plus_1": self.mu_plus_1,
            "minimally_transitive": self.minimally_transitive,
            "pass": self.status == "pass",
            "status": self.status,
            "certificates": {} if cert is None else cert.to_dict(),
            "generators": self.generators,
            "notes": self.notes,
        }


def check_theorem(G: PermGroup, name: str = "", seed: int = 0) -> Verdict:
    """Check ``d(G) <= mu(n)+1`` for a minimally transitive group of degree n."""
    n = G.degree
    bound = mu_plus_one(n)
    gens = [str(g) for g in G.generators]
    if not G.is_transitive():
        return Verdict(n, name, G.order(), bound, None, None, "not-applicable",
                       ["group is not transitive"], gens)
    mt = is_minimally_transitive(G)
    if mt.minimally_transitive is False:
        note = f"proper transitive subgroup of order {mt.witness.order()}"
        return Verdict(n, name, G.order(), bound, False, None, "not-applicable", [note], gens)
    cert = d_min(G, seed=seed)
    notes = []
    if mt.minimally_transitive is None:
        status = "indeterminate"
        notes.append(mt.reason)
    elif cert.d <= bound:
        status = "pass"
    elif cert.exhaustive:
        status = "fail"
    else:
        status = "indeterminate"
        notes.append("generator lower bound not certified")
    return Verdict(n, name, G.order(), bound, mt.minimally_transitive, cert, status, notes, gens)


# -- quotients on M-orbits -------------------------------------------------------

@dataclass
class QuotientVerdict:
    blocks: int
    index_AM: int
    block_size: int
    image_order: int
    coset_image_order: int
    image_minimally_transitive: bool | None

    @property
    def ok(self) -> bool:
        return (self.blocks == self.index_AM and self.image_order == self.coset_image_order
                and self.image_minimally_transitive is True)


def quotient_min_transitive(G: PermGroup, M: PermGroup) -> QuotientVerdict:
    """Act on the M-orbits and check the image is minimally transitive.

    The number of blocks is compared against ``|G : AM|`` (A a point
    stabilizer), computed from group orders alone.
    """
    if M.is_trivial():
        raise HypothesisError("M must be nontrivial")
    system = m_orbit_blocks(G, M)
    image = block_action(G, system)
    A = point_stabilizer(G, 0)
    AM = PermGroup(A.generators + M.generators, G.degree)
    index_AM = G.order() // AM.order()
    coset_image, _ = coset_action(G, AM)
    if image.degree == 1:
        mt = True
    else:
        mt = is_minimally_transitive(image).minimally_transitive
    return QuotientVerdict(len(system), index_AM, system.block_size, image.order(),
                           coset_image.order(), mt)


def orbit_sizes(G: PermGroup) -> list[int]:
    seen, sizes = set(), []
    for x in range(G.degree):
        if x not in seen:
            o = orbit(G, x)
            seen |= o
            sizes.append(len(o))
    return sizes
