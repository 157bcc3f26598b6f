"""Crown-based powers and conditional generation probabilities.

For ``L`` with unique minimal normal subgroup ``N`` the crown-based power
``L_k`` is realized on ``k`` disjoint copies of L's domain, generated by the
diagonal copies of L's generators together with N's generators placed in each
coordinate separately.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .caps import CapExceeded, HypothesisError, get_caps
from .elements import ElementIndex
from .group import CosetAction, PermGroup, StabilizerChain, symmetric_normalizer
from .lattice import enumerate_subgroups, eulerian_phi, minimal_normal_subgroups
from .mintrans import d_min
from .perm import Permutation

BOUND_53_90 = Fraction(53, 90)


class ThresholdExceeded(ValueError):
    """More Aut-inequivalent generating pairs were requested than exist."""


@dataclass
class CrownSpec:
    L: PermGroup
    N: PermGroup
    k: int
    abelian: bool = field(init=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        self.abelian = self.N.is_abelian()

    def validate(self) -> None:
        """Raise HypothesisError unless N is the unique minimal normal subgroup of L
        and, when abelian, complemented."""
        if not self.N.is_normal_in(self.L):
            raise HypothesisError("N is not normal in L")
        mins = minimal_normal_subgroups(self.L)
        if len(mins) != 1:
            raise HypothesisError(f"L has {len(mins)} minimal normal subgroups, need exactly one")
        if mins[0].order() != self.N.order() or not self.N.is_subgroup_of(mins[0]):
            raise HypothesisError("N is not the minimal normal subgroup of L")
        if self.abelian and find_complement(self.L, self.N) is None:
            raise HypothesisError("abelian N has no complement in L")


def find_complement(L: PermGroup, N: PermGroup) -> PermGroup | None:
    """A subgroup K with K * N = L and K meet N = 1, by exhaustive lattice search."""
    lattice = enumerate_subgroups(L)
    index = lattice.index
    nmask = np.zeros(index.m, dtype=bool)
    for g in N.element_images():
        nmask[index.index_of(g)] = True
    want = L.order() // N.order()
    for node in lattice.nodes:
        if node.order != want:
            continue
        mk = lattice.mask(node)
        if int((mk & nmask).sum()) == 1:
            return lattice.group(node)
    return None


def crown_power(spec: CrownSpec, validate: bool = False) -> PermGroup:
    """``L_k = diag(L^k) N^k`` on ``k * deg(L)`` points."""
    if validate:
        spec.validate()
    n, k = spec.L.degree, spec.k
    cap = get_caps().degree
    if n * k > cap:
        raise CapExceeded("crown degree", n * k, cap)
    total = n * k
    gens = []
    for g in spec.L.generators:
        images = []
        for c in range(k):
            images.extend(c * n + x for x in g.images)
        gens.append(Permutation(images, check=False))
    for h in spec.N.generators:
        if h.is_identity():
            continue
        for c in range(k):
            gens.append(h.extend(total, c * n))
    G = PermGroup(gens, total)
    expected = spec.N.order() ** (k - 1) * spec.L.order()
    if G.order() != expected:
        raise AssertionError(f"crown order {G.order()} != |N|^(k-1)|L| = {expected}")
    return G


def coordinates(x: Permutation, n: int, k: int) -> list[Permutation]:
    """Split an element of a k-fold product on k*n points into its coordinates."""
    out = []
    for c in range(k):
        block = x.images[c * n:(c + 1) * n]
        out.append(Permutation([v - c * n for v in block]))
    return out


def congruent_coordinates(x: Permutation, spec: CrownSpec) -> bool:
    """Whether all coordinates of ``x`` lie in one coset of N."""
    parts = coordinates(x, spec.L.degree, spec.k)
    return all((p * parts[0].inverse()) in spec.N for p in parts[1:])


# -- probabilities -------------------------------------------------------------

@dataclass
class ProbabilityEstimate:
    d: int
    value: Fraction | float
    exact: bool
    stderr: float = 0.0
    trials: int = 0
    accepted: int = 0
    successes: int = 0
    seed: int | None = None

    def to_dict(self) -> dict:
        value = (f"{self.value.numerator}/{self.value.denominator}"
                 if isinstance(self.value, Fraction) else self.value)
        out = {"d": self.d, "value": value, "exact": self.exact}
        if not self.exact:
            out.update(stderr=self.stderr, trials=self.trials, accepted=self.accepted,
                       successes=self.successes, seed=self.seed)
        return out


def quotient_group(L: PermGroup, N: PermGroup) -> CosetAction:
    if not N.is_normal_in(L):
        raise HypothesisError("N is not normal in L")
    return CosetAction(L, N)


def p_ln_exact(L: PermGroup, N: PermGroup, d: int) -> ProbabilityEstimate:
    """``phi_L(d) / (phi_{L/N}(d) |N|^d)`` as an exact rational."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    Q = quotient_group(L, N).image
    phi_l = eulerian_phi(enumerate_subgroups(L), d)
    phi_q = eulerian_phi(enumerate_subgroups(Q), d)
    if phi_q == 0:
        raise HypothesisError(f"L/N is not {d}-generated; the conditional probability is undefined")
    return ProbabilityEstimate(d, Fraction(phi_l, phi_q * N.order() ** d), True)


def p_ln_montecarlo(L: PermGroup, N: PermGroup, d: int, trials: int = 100_000,
                    seed: int = 0, shards: int = 1) -> ProbabilityEstimate:
    """Rejection-sampling estimate of the conditional generation probability.

    Trial ``t`` of shard ``s`` draws from ``Random(seed + s)``; shard counts
    are summed, so the aggregate is independent of how shards are scheduled.
    """
    if d == 0:
        return ProbabilityEstimate(0, 0.0, False, 0.0, trials, trials, 0, seed)
    act = quotient_group(L, N)
    q_order = act.image.order()
    l_order = L.order()
    chain = L.chain
    gen_cache: dict[tuple, bool] = {}
    img_cache: dict[tuple, tuple] = {}

    def image(x: tuple) -> tuple:
        r = img_cache.get(x)
        if r is None:
            r = img_cache[x] = act.act(Permutation(x, check=False)).images
        return r

    def gen_ok(tup: tuple, degree: int, order: int, cache: dict) -> bool:
        r = cache.get(tup)
        if r is None:
            r = cache[tup] = StabilizerChain(degree, tup).order() == order
        return r

    quot_cache: dict[tuple, bool] = {}
    accepted = successes = 0
    per_shard = [trials // shards + (1 if s < trials % shards else 0) for s in range(shards)]
    for s, count in enumerate(per_shard):
        rng = random.Random(seed + s)
        for _ in range(count):
            tup = tuple(chain.random_element(rng) for _ in range(d))
            if q_order > 1:
                imgs = tuple(image(x) for x in tup)
                if not gen_ok(imgs, act.image.degree, q_order, quot_cache):
                    continue
            accepted += 1
            if gen_ok(tup, L.degree, l_order, gen_cache):
                successes += 1
    if accepted == 0:
        raise HypothesisError("no sampled tuple generated L/N; conditioning event not met")
    p = successes / accepted
    stderr = math.sqrt(p * (1 - p) / accepted)
    return ProbabilityEstimate(d, p, False, stderr, trials, accepted, successes, seed)


# -- thresholds ------------------------------------------------------------------

@dataclass
class CAutBound:
    """Upper bound ``t |S|^t |Out(S)|`` for the centralizer of L/N in Aut(N)."""
    t: int
    s_order: int
    out_order: int
    exact: int | None = None

    @property
    def bound(self) -> int:
        return self.t * self.s_order ** self.t * self.out_order

    @property
    def value(self) -> int:
        return self.bound if self.exact is None else self.exact

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __post_init__(self):
        if self.exact is not None and self.exact > self.bound:
            raise ValueError(f"exact value {self.exact} exceeds bound {self.bound}")

    @classmethod
    def simple(cls, s_order: int, out_order: int, exact: bool = True) -> "CAutBound":
        """L = N = S simple: the centralizer is Aut(S) itself."""
        return cls(1, s_order, out_order, s_order * out_order if exact else None)


def crown_threshold(L: PermGroup, N: PermGroup, d: int, caut: CAutBound,
                    probability: Fraction | None = None) -> int:
    """``floor(P_{L,N}(d) |N|^d / c)``; a certified lower bound when ``c`` is only the bound."""
    if N.is_abelian():
        raise HypothesisError("N is abelian; use abelian_bound")
    if probability is None:
        probability = p_ln_exact(L, N, d).value
    return math.floor(probability * N.order() ** d / caut.value)


def abelian_bound(spec: CrownSpec, dL: int | None = None) -> int:
    """``max{d(L), k + 1}`` for abelian complemented N."""
    if not spec.abelian:
        raise HypothesisError("N is nonabelian")
    if dL is None:
        dL = d_min(spec.L).d
    return max(dL, spec.k + 1)


@dataclass
class Check5390:
    d: int
    probability: ProbabilityEstimate
    passed: bool


def check_53_90(L: PermGroup, N: PermGroup, d: int, exact: bool = True,
                trials: int = 100_000, seed: int = 0) -> Check5390:
    """Check ``P_{L,N}(d) >= 53/90`` (Monte Carlo passes within 3 standard errors)."""
    if N.is_abelian():
        raise HypothesisError("N must be nonabelian")
    mins = minimal_normal_subgroups(L)
    if len(mins) != 1 or mins[0].order() != N.order():
        raise HypothesisError("N must be the unique minimal normal subgroup of L")
    if d < d_min(L).d:
        raise HypothesisError("need d >= d(L)")
    if exact:
        est = p_ln_exact(L, N, d)
        return Check5390(d, est, est.value >= BOUND_53_90)
    est = p_ln_montecarlo(L, N, d, trials, seed)
    return Check5390(d, est, est.value + 3 * est.stderr >= float(BOUND_53_90))


# -- extremal crowns L = N = S ------------------------------------------------------

@dataclass
class HallPower:
    k: int
    pairs: list[tuple[Permutation, Permutation]]
    generators: tuple[Permutation, Permutation]
    group: PermGroup
    threshold: int


def aut_classes_of_generating_pairs(S: PermGroup, aut_order: int,
                                    limit: int | None = None) -> tuple[list[tuple[Permutation, Permutation]], int]:
    """Representatives of generating pairs of S up to Aut(S), with Aut(S) realized
    as the normalizer of S in its symmetric group.  Returns (reps, class count)."""
    Nz = symmetric_normalizer(S)
    if Nz.order() != aut_order:
        raise HypothesisError(
            f"normalizer of order {Nz.order()} does not realize |Aut(S)| = {aut_order}")
    index = ElementIndex.of_group(Nz)
    smask = np.zeros(index.m, dtype=bool)
    for g in S.element_images():
        smask[index.index_of(g)] = True
    selems = np.flatnonzero(smask)
    s_order = len(selems)
    nelems = np.arange(index.m)
    done = np.zeros((index.m, index.m), dtype=bool)
    reps = []
    count = 0
    for a in selems:
        for b in selems:
            if done[a, b]:
                continue
            if int(index.closure([a, b]).sum()) != s_order:
                done[a, b] = True
                continue
            # a free orbit of Aut(S) on generating pairs
            done[index.conj(a, nelems), index.conj(b, nelems)] = True
            count += 1
            if limit is None or len(reps) < limit:
                reps.append((index.perm(int(a)), index.perm(int(b))))
    return reps, count


def hall_power_generators(S: PermGroup, k: int, aut_order: int,
                          phi2: int | None = None) -> HallPower:
    """Two permutations on ``k * deg(S)`` points generating ``S^k``.

    Coordinate pairs are pairwise inequivalent under Aut(S); at most
    ``phi_S(2) / |Aut(S)|`` of them exist.
    """
    if phi2 is None:
        phi2 = eulerian_phi(enumerate_subgroups(S), 2)
    threshold = phi2 // aut_order
    if k > threshold:
        raise ThresholdExceeded(
            f"k={k} exceeds the {threshold} Aut-classes of generating pairs ({phi2}/{aut_order})")
    reps, count = aut_classes_of_generating_pairs(S, aut_order, limit=k)
    if count != threshold:
        raise AssertionError(f"counted {count} Aut-classes, expected {threshold}")
    if len(reps) < k:
        raise ThresholdExceeded(f"only {len(reps)} Aut-inequivalent generating pairs")
    n = S.degree
    total = n * k
    cap = get_caps().degree
    if total > cap:
        raise CapExceeded("hall power degree", total, cap)
    xs, ys = [], []
    for c, (a, b) in enumerate(reps):
        xs.extend(c * n + v for v in a.images)
        ys.extend(c * n + v for v in b.images)
    x, y = Permutation(xs), Permutation(ys)
    G = PermGroup([x, y], total)
    if G.order() != S.order() ** k:
        raise AssertionError("coordinate pairs failed to generate the full power")
    return HallPower(k, reps, (x, y), G, threshold)
