"""
Weight sets - the subsets A of U(n) used as weights, and their orbits on Z_n
Named kinds: U(n), U(n)^2, Q_p, S(n) (Jacobi kernel), L(n;p'), explicit sets
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from services.errors import InvalidInputError, WeightSpecError
from services.logger import Logger
from services.residue_core import (
    FactoredModulus,
    ModulusLike,
    as_modulus,
    crt_pair,
    euler_phi,
    jacobi,
    legendre,
    units,
)


KIND_U = "U"
KIND_U_SQUARED = "Usq"
KIND_Q = "Q"
KIND_S = "S"
KIND_L = "L"
KIND_EXPLICIT = "explicit"

NAMED_KINDS = (KIND_U, KIND_U_SQUARED, KIND_Q, KIND_S, KIND_L)
ALL_KINDS = NAMED_KINDS + (KIND_EXPLICIT,)


@dataclass(frozen=True, eq=False)
class WeightSet:
    """A nonempty subset of Z_n without 0, with its orbit table when it is a group"""

    modulus: FactoredModulus
    kind: str
    spec: str
    members: Tuple[int, ...]
    members_mask: int
    is_group: bool
    orbit_rep: Optional[np.ndarray]
    p_prime: Optional[int] = None

    @property
    def n(self) -> int:
        return self.modulus.n

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return bool(self.members_mask >> (x % self.n) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightSet):
            return NotImplemented
        return self.n == other.n and self.members_mask == other.members_mask

    def __hash__(self) -> int:
        return hash((self.n, self.members_mask))

    def __repr__(self) -> str:
        return f"WeightSet({self.spec} mod {self.n}, |A|={len(self.members)}, group={self.is_group})"

    @property
    def members_array(self) -> np.ndarray:
        return np.fromiter(self.members, dtype=np.int64, count=len(self.members))

    def issubset(self, other: "WeightSet") -> bool:
        return self.n == other.n and self.members_mask & ~other.members_mask == 0

    def orbit_representatives(self, include_zero: bool = False) -> List[int]:
        """Search candidates: orbit minima for a group, every residue otherwise"""
        start = 0 if include_zero else 1
        if self.is_group:
            reps = np.unique(self.orbit_rep[start:])
            return [int(r) for r in reps if include_zero or r != 0]
        return list(range(start, self.n))

    def orbit_mask(self, x: int) -> int:
        """Bitset of A*x = {a*x mod n : a in A}"""
        return orbit_mask(self, x)


# === CONSTRUCTION ===

def _members_mask(values) -> int:
    mask = 0
    for v in values:
        mask |= 1 << int(v)
    return mask


def _is_closed_group(modulus: FactoredModulus, members: Tuple[int, ...]) -> bool:
    n = modulus.n
    member_set = set(members)
    if 1 not in member_set:
        return False
    if any(gcd(a, n) != 1 for a in members):
        return False
    return all(a * b % n in member_set for a in members for b in members)


def _orbit_table(modulus: FactoredModulus, members: Tuple[int, ...]) -> np.ndarray:
    n = modulus.n
    xs = np.arange(n, dtype=np.int64)
    table = xs.copy()
    for a in members:
        np.minimum(table, (xs * a) % n, out=table)
    table.flags.writeable = False
    return table


def _require_odd(modulus: FactoredModulus, kind: str):
    if not modulus.is_odd:
        raise InvalidInputError(f"Weight set {kind} needs an odd modulus, got {modulus.n}",
                                {'kind': kind, 'n': modulus.n})


def _named_members(kind: str, modulus: FactoredModulus, p_prime: Optional[int]) -> Tuple[int, ...]:
    n = modulus.n
    unit_list = units(modulus)
    if kind == KIND_U:
        return tuple(unit_list)
    if kind == KIND_U_SQUARED:
        _require_odd(modulus, kind)
        return tuple(sorted({a * a % n for a in unit_list}))
    if kind == KIND_Q:
        _require_odd(modulus, kind)
        if not modulus.is_prime:
            raise InvalidInputError(f"Q_p needs a prime modulus, got {n}", {'n': n})
        return tuple(a for a in unit_list if legendre(a, n) == 1)
    if kind == KIND_S:
        _require_odd(modulus, kind)
        return tuple(a for a in unit_list if jacobi(a, modulus) == 1)
    if kind == KIND_L:
        _require_odd(modulus, kind)
        if p_prime is None:
            raise InvalidInputError("L(n;p') needs the prime p'")
        if p_prime not in modulus.primes:
            raise InvalidInputError(f"{p_prime} is not a prime divisor of {n}",
                                    {'n': n, 'p_prime': p_prime})
        return tuple(a for a in unit_list if jacobi(a, modulus) == legendre(a, p_prime))
    raise InvalidInputError(f"Unknown weight set kind '{kind}'")


@lru_cache(maxsize=512)
def _build_cached(kind: str, n: int, p_prime: Optional[int], values: Optional[Tuple[int, ...]]) -> WeightSet:
    modulus = as_modulus(n)
    if kind == KIND_EXPLICIT:
        if not values:
            raise InvalidInputError("An explicit weight set must be nonempty")
        members = tuple(sorted(set(values)))
        if members[0] < 1 or members[-1] > n - 1:
            raise InvalidInputError(f"Explicit weights must lie in [1, {n - 1}]", {'values': members})
        is_group = _is_closed_group(modulus, members)
        spec = f"{KIND_EXPLICIT}:{','.join(str(v) for v in members)}"
    else:
        members = _named_members(kind, modulus, p_prime)
        is_group = True
        spec = f"{KIND_L}:{p_prime}" if kind == KIND_L else kind

    orbit_rep = _orbit_table(modulus, members) if is_group else None
    weights = WeightSet(
        modulus=modulus,
        kind=kind,
        spec=spec,
        members=members,
        members_mask=_members_mask(members),
        is_group=is_group,
        orbit_rep=orbit_rep,
        p_prime=p_prime if kind == KIND_L else None,
    )
    Logger.debug(f"Built {weights!r}")
    return weights


def build(kind: str, n: ModulusLike, p_prime: Optional[int] = None, values=None) -> WeightSet:
    """Construct a weight set of the given kind modulo n"""
    if kind not in ALL_KINDS:
        raise InvalidInputError(f"Unknown weight set kind '{kind}'", {'kind': kind})
    modulus = as_modulus(n)
    normalized = tuple(sorted(set(int(v) for v in values))) if values is not None else None
    return _build_cached(kind, modulus.n, p_prime, normalized)


# === SPEC STRINGS ===

def parse_weight_spec(spec: str, n: ModulusLike) -> WeightSet:
    """Parse 'U', 'Usq', 'Q', 'S', 'L:<p>' or 'explicit:<v1,v2,...>'"""
    text = (spec or "").strip()
    if not text:
        raise WeightSpecError(spec, "empty")
    head, _, tail = text.partition(":")
    if head in (KIND_U, KIND_U_SQUARED, KIND_Q, KIND_S):
        if tail:
            raise WeightSpecError(spec, f"kind {head} takes no argument")
        return build(head, n)
    if head == KIND_L:
        try:
            p_prime = int(tail)
        except ValueError:
            raise WeightSpecError(spec, "expected L:<prime divisor>")
        return build(KIND_L, n, p_prime=p_prime)
    if head == KIND_EXPLICIT:
        try:
            values = [int(v) for v in tail.split(",") if v.strip()]
        except ValueError:
            raise WeightSpecError(spec, "explicit values must be integers")
        return build(KIND_EXPLICIT, n, values=values)
    raise WeightSpecError(spec, f"unknown kind '{head}'")


# === QUERIES ===

def index_in_units(weights: WeightSet) -> int:
    """[U(n) : A] for a subgroup A"""
    if not weights.is_group:
        raise InvalidInputError(f"{weights.spec} is not a group", {'spec': weights.spec})
    return euler_phi(weights.modulus) // len(weights.members)


def w_count(a: int, n: ModulusLike) -> int:
    """Number of primes p_j | n with a mod p_j a non-residue (n squarefree)"""
    modulus = as_modulus(n)
    if not modulus.is_squarefree:
        raise InvalidInputError(f"w_count needs a squarefree modulus, got {modulus.n}")
    if not modulus.is_odd:
        raise InvalidInputError(f"w_count needs an odd modulus, got {modulus.n}")
    if gcd(a, modulus.n) != 1:
        raise InvalidInputError(f"{a} is not a unit modulo {modulus.n}")
    return sum(1 for p in modulus.primes if legendre(a, p) == -1)


def image_under_map(weights: WeightSet, m: int) -> FrozenSet[int]:
    """The exact set {a mod m : a in A}"""
    if m < 2 or weights.n % m != 0:
        raise InvalidInputError(f"{m} is not a divisor of {weights.n} that is at least 2",
                                {'n': weights.n, 'm': m})
    return frozenset(a % m for a in weights.members)


def orbit_canon(weights: WeightSet, x: int) -> int:
    """min {a*x mod n : a in A}"""
    if not weights.is_group:
        raise InvalidInputError(f"Orbit representatives need a group, {weights.spec} is not one")
    return int(weights.orbit_rep[x % weights.n])


def complement_in_units(weights: WeightSet) -> FrozenSet[int]:
    """U(n) minus A"""
    return frozenset(a for a in units(weights.modulus) if a not in weights)


def coset_representatives(weights: WeightSet) -> List[int]:
    """Least element of each coset c*A of U(n)/A"""
    if not weights.is_group:
        raise InvalidInputError(f"Cosets need a group, {weights.spec} is not one")
    n = weights.n
    members = weights.members_array
    seen = np.zeros(n, dtype=bool)
    reps = []
    for c in units(weights.modulus):
        if seen[c]:
            continue
        reps.append(c)
        seen[(members * c) % n] = True
    return reps


def cartesian_image_contains(weights: WeightSet, m1: int, m2: int,
                             first: FrozenSet[int], second: FrozenSet[int]) -> bool:
    """A1 x A2 inside psi(A) for the CRT isomorphism U(n) -> U(m1) x U(m2)"""
    n = weights.n
    if m1 * m2 != n or gcd(m1, m2) != 1:
        raise InvalidInputError(f"{m1} * {m2} is not a coprime split of {n}")
    return all(crt_pair(b, m1, c, m2) in weights for b in first for c in second)


# === ORBIT SETS ===

@lru_cache(maxsize=65536)
def _orbit_mask_for(weights: WeightSet, rep: int) -> int:
    products = np.unique((weights.members_array * rep) % weights.n)
    return _members_mask(products)


def orbit_mask(weights: WeightSet, x: int) -> int:
    """Bitset of A*x, cached per orbit representative"""
    x %= weights.n
    rep = int(weights.orbit_rep[x]) if weights.is_group else x
    return _orbit_mask_for(weights, rep)
