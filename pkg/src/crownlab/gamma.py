"""Small nonabelian simple groups, prime sets hitting every subgroup index, and
the numeric audit of the generator-number inequality chain.

Every proper subgroup of a simple group ``S`` must have an index divisible by
some prime of a short set ``Gamma(S)``.  Checking maximal subgroups suffices,
since every proper subgroup lies in one and its index is a multiple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .caps import HypothesisError
from .elements import ElementIndex
from .group import PermGroup, normal_closure
from .lattice import enumerate_subgroups, maximal_subgroups
from .mintrans import omega_mu
from .perm import Permutation


class UnknownGroupError(ValueError):
    """No catalog or table entry with the given name."""


def prime_divisors(n: int) -> set[int]:
    return set(omega_mu(n).exponents)


def is_prime(n: int) -> bool:
    return n >= 2 and omega_mu(n).omega == 1


@dataclass
class SimpleGroupEntry:
    name: str
    group: PermGroup
    order: int
    out_order: int
    family: str                 # "alternating" | "psl2" | "other"
    param: int | None = None    # r for A_r, q for L_2(q)
    large: bool = False

    @property
    def degree(self) -> int:
        return self.group.degree

    @property
    def generators(self) -> list[Permutation]:
        return self.group.generators

    @property
    def aut_order(self) -> int:
        return self.order * self.out_order

    @property
    def f(self) -> Fraction:
        """The prime-set budget: ``r/2 + 1`` for ``A_r`` and 4 otherwise."""
        if self.family == "alternating":
            return Fraction(self.param, 2) + 1
        return Fraction(4)

    def check_simple(self) -> bool:
        """Nonabelian, and every nontrivial normal closure is the whole group."""
        G = self.group
        if G.is_abelian():
            return False
        index = ElementIndex.of_group(G)
        for cls in index.conjugacy_classes():
            rep = int(cls[0])
            if rep != index.identity and normal_closure(G, [index.perm(rep)]).order() != self.order:
                return False
        return True


# -- constructions ------------------------------------------------------------

def alternating(r: int) -> PermGroup:
    if r < 3:
        raise ValueError("need r >= 3")
    three = Permutation.from_cycles(r, [[0, 1, 2]])
    if r % 2:
        long = Permutation.from_cycles(r, [list(range(r))])
    else:
        long = Permutation.from_cycles(r, [list(range(1, r))])
    return PermGroup([three, long], r)


def psl2_prime(p: int) -> PermGroup:
    """``PSL(2, p)`` on the projective line, points ``0..p-1`` and ``p`` for infinity."""
    inf = p

    def translate(x):
        return inf if x == inf else (x + 1) % p

    def invert(x):
        if x == inf:
            return 0
        if x == 0:
            return inf
        return (-pow(x, -1, p)) % p

    return PermGroup([Permutation([translate(x) for x in range(p + 1)]),
                      Permutation([invert(x) for x in range(p + 1)])], p + 1)


def _gf8_mul(a: int, b: int) -> int:
    # GF(8) = GF(2)[x] / (x^3 + x + 1), elements as 3-bit integers
    r = 0
    for i in range(3):
        if b >> i & 1:
            r ^= a << i
    for i in (4, 3):
        if r >> i & 1:
            r ^= 0b1011 << (i - 3)
    return r


def psl2_8() -> PermGroup:
    """``L_2(8)`` on the 9 points of the projective line over GF(8)."""
    inf = 8
    inv = {a: b for a in range(1, 8) for b in range(1, 8) if _gf8_mul(a, b) == 1}
    translate = [inf if x == inf else x ^ 1 for x in range(9)]
    invert = [0 if x == inf else inf if x == 0 else inv[x] for x in range(9)]
    scale = [inf if x == inf else _gf8_mul(2, x) for x in range(9)]
    return PermGroup([Permutation(translate), Permutation(invert), Permutation(scale)], 9)


def _projective_points(q_elems):
    """Normalized representatives of the 1-spaces of ``F^3`` (first nonzero = 1)."""
    pts = []
    for v in itertools.product(q_elems, repeat=3):
        nz = [c for c in v if c != 0]
        if nz and nz[0] == 1:
            pts.append(tuple(v))
    return pts


def psl3_3() -> PermGroup:
    """``L_3(3)`` on the 13 points of the projective plane over GF(3)."""
    pts = _projective_points(range(3))
    where = {v: i for i, v in enumerate(pts)}

    def normalize(v):
        lead = next(c for c in v if c)
        inv = lead  # 1 and 2 are self-inverse mod 3
        return tuple(c * inv % 3 for c in v)

    gens = []
    for i, j in itertools.permutations(range(3), 2):
        images = []
        for v in pts:
            w = list(v)
            w[i] = (w[i] + w[j]) % 3
            images.append(where[normalize(w)])
        gens.append(Permutation(images))
    return PermGroup(gens, 13)


class _GF9:
    """GF(9) = GF(3)[i] / (i^2 + 1), elements as pairs (a, b) meaning a + b i."""

    elements = [(a, b) for a in range(3) for b in range(3)]
    zero, one = (0, 0), (1, 0)

    @staticmethod
    def add(x, y):
        return ((x[0] + y[0]) % 3, (x[1] + y[1]) % 3)

    @staticmethod
    def mul(x, y):
        return ((x[0] * y[0] - x[1] * y[1]) % 3, (x[0] * y[1] + x[1] * y[0]) % 3)

    @staticmethod
    def conj(x):
        # the Frobenius x -> x^3
        return (x[0], (-x[1]) % 3)

    @classmethod
    def inv(cls, x):
        return next(y for y in cls.elements if cls.mul(x, y) == cls.one)


def psu3_3() -> PermGroup:
    """``U_3(3)`` on the 28 isotropic points of the Hermitian form ``sum x_i x_i^3``.

    Generated by unitary transvections ``x -> x + a (x, v) v`` for isotropic
    ``v`` and trace-zero ``a``.
    """
    F = _GF9

    def form(x, y):
        s = F.zero
        for a, b in zip(x, y):
            s = F.add(s, F.mul(a, F.conj(b)))
        return s

    def normalize(v):
        lead = next(c for c in v if c != F.zero)
        li = F.inv(lead)
        return tuple(F.mul(c, li) for c in v)

    vecs = [v for v in itertools.product(F.elements, repeat=3) if any(c != F.zero for c in v)]
    pts = sorted({normalize(v) for v in vecs if form(v, v) == F.zero})
    where = {v: i for i, v in enumerate(pts)}
    a = (0, 1)   # i + i^3 = 0
    gens = []
    for v in pts:
        images = []
        for x in pts:
            c = F.mul(a, form(x, v))
            w = tuple(F.add(xi, F.mul(c, vi)) for xi, vi in zip(x, v))
            images.append(where[normalize(w)])
        g = Permutation(images)
        if not g.is_identity():
            gens.append(g)
    return PermGroup(gens, len(pts))


_BUILTIN = [
    # name, builder, expected order, |Out|, family, parameter, large
    ("A5", lambda: alternating(5), 60, 2, "alternating", 5, False),
    ("A6", lambda: alternating(6), 360, 4, "alternating", 6, False),
    ("A7", lambda: alternating(7), 2520, 2, "alternating", 7, False),
    ("A8", lambda: alternating(8), 20160, 2, "alternating", 8, False),
    ("L2(7)", lambda: psl2_prime(7), 168, 2, "psl2", 7, False),
    ("L2(8)", psl2_8, 504, 3, "psl2", 8, False),
    ("L2(11)", lambda: psl2_prime(11), 660, 2, "psl2", 11, False),
    ("L3(3)", psl3_3, 5616, 2, "other", None, True),
    ("U3(3)", psu3_3, 6048, 2, "other", None, True),
]


@lru_cache(maxsize=None)
def _builtin_entry(name: str) -> SimpleGroupEntry:
    for nm, build, order, out, family, param, large in _BUILTIN:
        if nm == name:
            G = build()
            if G.order() != order:
                raise AssertionError(f"{name}: chain order {G.order()} != {order}")
            return SimpleGroupEntry(nm, G, order, out, family, param, large)
    raise UnknownGroupError(name)


def catalog(large: bool = False, path: str | Path | None = None) -> list[SimpleGroupEntry]:
    """The embedded simple groups (orders verified by chain), or a user catalog.

    User catalogs use the group-file format with ``# name:``, ``# out:`` and
    optionally ``# family: alternating <r>`` or ``# family: psl2 <q>`` comments.
    """
    if path is not None:
        return read_simple_catalog(path)
    return [_builtin_entry(row[0]) for row in _BUILTIN if large or not row[6]]


def read_simple_catalog(path: str | Path) -> list[SimpleGroupEntry]:
    from .census import parse_group_block
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
        if "out" not in meta:
            raise ValueError(f"catalog block {i + 1} lacks '# out: <k>' metadata")
        family, param = "other", None
        if "family" in meta:
            parts = meta["family"].split()
            family = parts[0]
            param = int(parts[1]) if len(parts) > 1 else None
            if family not in ("alternating", "psl2", "other"):
                raise ValueError(f"unknown family {family!r}")
            if family == "alternating" and param is None:
                raise ValueError("alternating family needs its degree")
        out.append(SimpleGroupEntry(meta.get("name", f"group{i + 1}"), G, G.order(),
                                    int(meta["out"]), family, param))
    return out


def entry(name: str, large: bool = True) -> SimpleGroupEntry:
    """Look up a built-in entry by name (case-insensitive, ``L2(7)`` or ``PSL2(7)``)."""
    key = name.strip().upper().replace("PSL", "L").replace("PSU", "U").replace("_", "")
    for row in _BUILTIN:
        if row[0].upper() == key:
            if row[6] and not large:
                raise HypothesisError(f"{row[0]} needs the large-lattice opt-in")
            return _builtin_entry(row[0])
    raise UnknownGroupError(name)


# -- prime sets -------------------------------------------------------------------

@dataclass
class GammaSet:
    primes: frozenset[int]
    source: str                 # alternating-rule | psl2-rule | table | user
    verified: bool = False

    def __post_init__(self):
        self.primes = frozenset(self.primes)
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise ValueError(f"not prime: {sorted(bad)}")

    def sorted(self) -> list[int]:
        return sorted(self.primes)

    def __len__(self) -> int:
        return len(self.primes)


def _primes_upto(r: int) -> list[int]:
    return [p for p in range(2, r + 1) if is_prime(p)]


def gamma_alternating(r: int) -> GammaSet:
    """Two largest primes ``p > q`` up to ``r``; if ``r`` is not prime add, for
    each ``p <= k < r``, the smallest prime divisor of ``C(r, k)``."""
    if r < 5:
        raise ValueError("alternating groups are simple only for r >= 5")
    primes = _primes_upto(r)
    p, q = primes[-1], primes[-2]
    if p == r:
        return GammaSet({r, q}, "alternating-rule")
    extra = {min(prime_divisors(math.comb(r, k))) for k in range(p, r)}
    return GammaSet(extra | {p, q}, "alternating-rule")


def gamma_psl2(p: int) -> GammaSet:
    """``{2, p}``: subgroup indices of ``L_2(p)`` are divisible by ``p`` or ``p + 1``."""
    if p < 5 or not is_prime(p):
        raise ValueError("need a prime p >= 5")
    return GammaSet({2, p}, "psl2-rule")


GAMMA_TABLE = {
    "L2(8)": {2, 3},
    "L3(3)": {2, 13},
    "U3(3)": {3, 7},
    "Sp4(8)": {2, 3},
}


def gamma_table(name: str) -> GammaSet:
    if name not in GAMMA_TABLE:
        raise UnknownGroupError(name)
    return GammaSet(GAMMA_TABLE[name], "table")


def gamma_for(S: SimpleGroupEntry) -> GammaSet:
    """The constructor-produced prime set for a catalog entry."""
    if S.family == "alternating":
        return gamma_alternating(S.param)
    if S.family == "psl2" and S.param is not None and is_prime(S.param):
        return gamma_psl2(S.param)
    return gamma_table(S.name)


@dataclass
class GammaVerdict:
    name: str
    primes: list[int]
    passed: bool
    within_budget: bool
    class_indices: list[int]         # one index per conjugacy class of maximal subgroups
    index_multiset: list[int]        # one index per maximal subgroup
    counterexample: int | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "gamma": self.primes, "pass": self.passed,
                "within_budget": self.within_budget, "class_indices": self.class_indices,
                "index_multiset": self.index_multiset, "counterexample": self.counterexample}


def verify_gamma(S: SimpleGroupEntry, gamma: GammaSet, cap: int | None = None) -> GammaVerdict:
    """Check every maximal subgroup index shares a prime with ``gamma``."""
    if not gamma.primes <= prime_divisors(S.order):
        stray = sorted(gamma.primes - prime_divisors(S.order))
        raise HypothesisError(f"primes {stray} do not divide |{S.name}| = {S.order}")
    lattice = enumerate_subgroups(S.group, cap)
    maxes = maximal_subgroups(lattice)
    indices = sorted(S.order // m.order for m in maxes)
    seen, per_class = set(), []
    for m in maxes:
        if m.class_id not in seen:
            seen.add(m.class_id)
            per_class.append(S.order // m.order)
    per_class.sort()
    bad = next((i for i in per_class if not prime_divisors(i) & gamma.primes), None)
    within = len(gamma) <= S.f
    passed = bad is None and within
    gamma.verified = passed
    return GammaVerdict(S.name, gamma.sorted(), passed, within, per_class, indices, bad)


@dataclass
class OutCheck:
    name: str
    out_order: int
    order: int
    passed: bool


def out_bound_check(S: SimpleGroupEntry) -> OutCheck:
    """``|Out(S)|^4 <= |S|`` in integer arithmetic."""
    return OutCheck(S.name, S.out_order, S.order, S.out_order ** 4 <= S.order)


# -- inequality chain ----------------------------------------------------------------

@dataclass
class AuditStep:
    label: str
    value: Fraction
    holds: bool | None = None

    def to_dict(self) -> dict:
        v = self.value
        return {"label": self.label,
                "value": str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}",
                "holds": self.holds}


@dataclass
class InequalityAudit:
    name: str
    t: int
    n: int
    k: int
    mu: int
    m: int
    steps: list[AuditStep] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return all(s.holds is not False for s in self.steps)

    def step(self, label: str) -> AuditStep:
        return next(s for s in self.steps if s.label == label)

    def to_dict(self) -> dict:
        return {"name": self.name, "t": self.t, "n": self.n, "k": self.k, "mu": self.mu,
                "m": self.m, "steps": [s.to_dict() for s in self.steps], "all_hold": self.all_hold}


def audit_inequality_chain(S: SimpleGroupEntry, t: int, n: int, k: int,
                           p_exact: Fraction | None = None) -> InequalityAudit:
    """Evaluate the numeric bounds on ``k`` for a chief factor ``S^t`` of a
    degree-``n`` group, in exact rational arithmetic."""
    if t < 1 or n < 1 or k < 1:
        raise ValueError("t, n and k must be positive")
    mu = omega_mu(n).mu
    m = mu + 1
    audit = InequalityAudit(S.name, t, n, k, mu, m)
    f_bound = S.f * mu + 1
    crown_bound = Fraction(53 * S.order ** (t * mu), 90 * t * S.out_order)
    caut = t * S.order ** t * S.out_order
    audit.steps.append(AuditStep("f(S)", S.f))
    audit.steps.append(AuditStep("(k-1)/f(S) <= mu", Fraction(k - 1) / S.f, Fraction(k - 1) / S.f <= mu))
    audit.steps.append(AuditStep("k <= f(S)mu+1", f_bound, k <= f_bound))
    audit.steps.append(AuditStep("k <= 53|S|^(t mu)/(90 t |Out|)", crown_bound, k <= crown_bound))
    audit.steps.append(AuditStep("f(S)mu+1 <= 53|S|^(t mu)/(90 t |Out|)", crown_bound - f_bound,
                                 f_bound <= crown_bound))
    audit.steps.append(AuditStep("t|S|^t|Out|", Fraction(caut)))
    if p_exact is not None:
        thr = Fraction(p_exact) * S.order ** (t * m) / caut
        audit.steps.append(AuditStep("k <= P|N|^m/c", thr, k <= thr))
    return audit
