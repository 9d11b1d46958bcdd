"""
Zero-sum engine - weighted zero-sum questions over Z_n
Sum sets are Python int bitsets: bit i set <=> residue i reachable
"""

from dataclasses import dataclass
from math import gcd
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from services.errors import BudgetExceededError, InvalidInputError
from services.residue_core import FactoredModulus, ModulusLike, as_modulus
from services.weight_sets import WeightSet, build, image_under_map, KIND_U


DEFAULT_STRATIFY_CAP = 64


@dataclass(frozen=True)
class Seq:
    """A finite multiset over Z_n, terms kept sorted ascending"""

    modulus: FactoredModulus
    terms: Tuple[int, ...]

    def __post_init__(self):
        n = self.modulus.n
        if any(not 0 <= t < n for t in self.terms):
            raise InvalidInputError(f"Sequence terms must lie in [0, {n})", {'terms': self.terms})
        if list(self.terms) != sorted(self.terms):
            raise InvalidInputError("Sequence terms must be sorted", {'terms': self.terms})

    @property
    def n(self) -> int:
        return self.modulus.n

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def extended(self, x: int) -> "Seq":
        return seq(self.terms + (x,), self.modulus)


def seq(values: Iterable[int], n: ModulusLike) -> Seq:
    """Build a Seq from arbitrary integers, reducing mod n and sorting"""
    modulus = as_modulus(n)
    return Seq(modulus, tuple(sorted(int(v) % modulus.n for v in values)))


@dataclass(frozen=True)
class SumReach:
    """Sums reachable by weighted nonempty subsequences, optionally per length"""

    modulus: FactoredModulus
    reachable: int
    by_length: Optional[Tuple[int, ...]] = None

    def __contains__(self, c: int) -> bool:
        return bool(self.reachable >> (c % self.modulus.n) & 1)

    def as_set(self) -> FrozenSet[int]:
        return mask_to_set(self.reachable)

    def exact_length(self, j: int) -> FrozenSet[int]:
        if self.by_length is None:
            raise InvalidInputError("This reach was not computed with length stratification")
        if j >= len(self.by_length):
            return frozenset()
        return mask_to_set(self.by_length[j])


# === BITSET PRIMITIVES ===

def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_to_set(mask: int) -> FrozenSet[int]:
    result = []
    while mask:
        low = mask & -mask
        result.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(result)


def set_to_mask(values: Iterable[int], n: int) -> int:
    mask = 0
    for v in values:
        mask |= 1 << (int(v) % n)
    return mask


def rotate(mask: int, k: int, n: int) -> int:
    """Translate every residue in mask by k (mod n)"""
    k %= n
    if k == 0:
        return mask
    return ((mask << k) | (mask >> (n - k))) & full_mask(n)


def sumset(first: int, second: int, n: int) -> int:
    """Mod-n sumset, as the union of rotations by members of the sparser operand"""
    if not first or not second:
        return 0
    if first.bit_count() > second.bit_count():
        first, second = second, first
    full = full_mask(n)
    result = 0
    while first:
        low = first & -first
        k = low.bit_length() - 1
        first ^= low
        if k == 0:
            result |= second
        else:
            result |= ((second << k) | (second >> (n - k))) & full
        if result == full:
            break
    return result


def extend_reach(reachable: int, term_mask: int, n: int) -> int:
    """R <- R | A*x | (R + A*x)"""
    return reachable | term_mask | sumset(reachable, term_mask, n)


# === OPERATIONS ===

def _terms(sequence: Union[Seq, Sequence[int]]) -> Tuple[int, ...]:
    return sequence.terms if isinstance(sequence, Seq) else tuple(sequence)


def reach(sequence: Union[Seq, Sequence[int]], weights: WeightSet) -> SumReach:
    """Exact set of A-weighted sums over nonempty subsequences"""
    n = weights.n
    reachable = 0
    for x in _terms(sequence):
        reachable = extend_reach(reachable, weights.orbit_mask(x), n)
    return SumReach(weights.modulus, reachable)


def has_zero_sum_subseq(sequence: Union[Seq, Sequence[int]], weights: WeightSet) -> bool:
    """True iff some nonempty subsequence has an A-weighted sum equal to 0"""
    n = weights.n
    reachable = 0
    for x in _terms(sequence):
        if x % n == 0:
            return True
        reachable = extend_reach(reachable, weights.orbit_mask(x), n)
        if reachable & 1:
            return True
    return False


def is_zero_sum_free(sequence: Union[Seq, Sequence[int]], weights: WeightSet) -> bool:
    return not has_zero_sum_subseq(sequence, weights)


def is_zero_sum_seq(sequence: Union[Seq, Sequence[int]], weights: WeightSet) -> bool:
    """True iff weights on every term can make the whole sequence sum to 0"""
    terms = _terms(sequence)
    if not terms:
        raise InvalidInputError("A zero-sum sequence must have at least one term")
    n = weights.n
    totals = 1
    for x in terms:
        totals = sumset(totals, weights.orbit_mask(x), n)
    return bool(totals & 1)


def reach_by_length(sequence: Union[Seq, Sequence[int]], weights: WeightSet,
                    cap: int = DEFAULT_STRATIFY_CAP, max_length: Optional[int] = None) -> SumReach:
    """Stratified reach: by_length[j] holds the sums of exactly j weighted terms"""
    terms = _terms(sequence)
    if len(terms) > cap:
        raise BudgetExceededError(
            f"Stratified reach is capped at {cap} terms, got {len(terms)}",
            context={'cap': cap, 'length': len(terms)})
    n = weights.n
    top = len(terms) if max_length is None else min(len(terms), max_length)
    layers = [1] + [0] * top
    for i, x in enumerate(terms):
        term_mask = weights.orbit_mask(x)
        for j in range(min(i + 1, top), 0, -1):
            if layers[j - 1]:
                layers[j] |= sumset(layers[j - 1], term_mask, n)
    reachable = 0
    for layer in layers[1:]:
        reachable |= layer
    return SumReach(weights.modulus, reachable, tuple(layers))


def coset_sumset(pairs: Sequence[Tuple[Iterable[int], int]], n: ModulusLike) -> FrozenSet[int]:
    """Exact sum W_1*x_1 + ... + W_k*x_k over Z_n"""
    modulus = as_modulus(n)
    if not pairs:
        raise InvalidInputError("coset_sumset needs at least one (weights, x) pair")
    size = modulus.n
    totals = 1
    for weights, x in pairs:
        values = weights.members if isinstance(weights, WeightSet) else tuple(weights)
        if not values:
            raise InvalidInputError("Every weight set in a coset sum must be nonempty")
        totals = sumset(totals, set_to_mask((w * x for w in values), size), size)
    return mask_to_set(totals)


# === LIFTING CHECKS ===

def project(sequence: Sequence[int], m: int) -> List[int]:
    """Image of a sequence under the natural map Z_n -> Z_m"""
    return [int(x) % m for x in sequence]


def crt_zero_sum_lift(sequence: Sequence[int], n: ModulusLike) -> Tuple[bool, bool]:
    """(every prime-power image is U(p^r)-zero-sum, the sequence is U(n)-zero-sum)"""
    modulus = as_modulus(n)
    hypothesis = all(
        is_zero_sum_seq(project(sequence, q), build(KIND_U, q))
        for q in modulus.prime_power_components
    )
    return hypothesis, is_zero_sum_seq(sequence, build(KIND_U, modulus))


def lift_implies_zero_sum(sequence: Sequence[int], d: int, weights: WeightSet,
                          target: WeightSet, divide: bool = False) -> Tuple[bool, bool]:
    """
    Lifting check for sequences whose terms are all divisible by d.
    The image lives in Z_{n/d}: either x mod n/d (needs gcd(d, n/d) = 1)
    or (x/d) mod n/d when divide is set. Returns (hypothesis, conclusion).
    """
    n = weights.n
    if d <= 1 or n % d != 0 or d == n:
        raise InvalidInputError(f"{d} is not a proper divisor of {n}")
    n_prime = n // d
    if target.n != n_prime:
        raise InvalidInputError(f"Target weights live mod {target.n}, expected {n_prime}")
    terms = [int(x) % n for x in sequence]
    if any(x % d for x in terms):
        return False, is_zero_sum_seq(terms, weights)
    if not divide and gcd(d, n_prime) != 1:
        return False, is_zero_sum_seq(terms, weights)
    image = [(x // d) % n_prime for x in terms] if divide else project(terms, n_prime)
    contained = set(target.members) <= image_under_map(weights, n_prime)
    hypothesis = contained and is_zero_sum_seq(image, target)
    return hypothesis, is_zero_sum_seq(terms, weights)
