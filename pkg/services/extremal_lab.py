"""
Extremal lab - A-extremal sequences up to equivalence, and the structural
forms they are known to take for S(n), L(n;p') and moduli with one square prime
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from services.davenport_search import (
    Budget,
    ConstantRecord,
    davenport,
    walk_zero_sum_free,
)
from services.errors import BudgetExceededError, InvalidInputError
from services.logger import Logger
from services.residue_core import ModulusLike, as_modulus, units
from services.weight_sets import (
    KIND_L,
    KIND_Q,
    KIND_S,
    KIND_U,
    WeightSet,
    build,
    coset_representatives,
    parse_weight_spec,
)
from services.zerosum_engine import has_zero_sum_subseq


# === EXTREMALITY ORACLE ===

@lru_cache(maxsize=256)
def exact_davenport(n: int, spec: str) -> int:
    """D for (n, spec) from a full search; a truncated search is an error here"""
    record = davenport(n, parse_weight_spec(spec, n))
    if not record.is_exact:
        raise BudgetExceededError(f"D_{spec}({n}) only known as a lower bound {record.value}",
                                  partial=record, context={'n': n, 'spec': spec})
    return record.value


@lru_cache(maxsize=8192)
def _is_extremal_cached(terms: Tuple[int, ...], n: int, spec: str) -> bool:
    if len(terms) != exact_davenport(n, spec) - 1:
        return False
    return not has_zero_sum_subseq(terms, parse_weight_spec(spec, n))


def is_extremal(values: Sequence[int], n: int, spec: str) -> bool:
    """Zero-sum-free of length exactly D_A(n) - 1 for the weight spec over Z_n"""
    terms = tuple(sorted(int(v) % n for v in values))
    return _is_extremal_cached(terms, n, spec)


# === EQUIVALENCE ===

def canonical_equiv_form(terms: Sequence[int], weights: WeightSet) -> Tuple[int, ...]:
    """
    Least sorted tuple over the class of S: for every c in U(n) take the orbit
    minimum of each c*x_i, sort, and keep the lexicographically smallest row.
    Only defined when A is a subgroup of U(n).
    """
    n = weights.n
    if not weights.is_group:
        raise InvalidInputError(f"{weights.spec} mod {n} is not a group; no equivalence classes",
                                {'spec': weights.spec, 'n': n})
    values = [int(t) % n for t in terms]
    if not values:
        return ()
    multipliers = np.array(units(weights.modulus), dtype=np.int64)
    scaled = (multipliers[:, None] * np.array(values, dtype=np.int64)[None, :]) % n
    rows = np.sort(weights.orbit_rep[scaled], axis=1)
    best = np.lexsort(rows.T[::-1])[0]
    return tuple(int(v) for v in rows[best])


# === CLAUSE CATALOG ===

@dataclass(frozen=True)
class Clause:
    """One structural form; holds() sees a single ordering of one class member"""

    label: str
    description: str
    length: int
    holds: Callable[[Tuple[int, ...], WeightSet], bool]


def _non_residue_unit(value: int, weights: WeightSet) -> bool:
    value %= weights.n
    return gcd(value, weights.n) == 1 and value not in weights


def _residue_pair_form(y, weights):
    return y[0] in weights and _non_residue_unit(-y[1], weights)


def _units_extremal(y, weights):
    return is_extremal(y, weights.n, KIND_U)


def _jacobi_prime_split(y, weights):
    n = weights.n
    for p in weights.modulus.primes:
        if y[0] % p and all(t % p == 0 for t in y[1:]):
            if is_extremal(y[1:], n // p, KIND_U):
                return True
    return False


def _l3_divisible_form(y, weights):
    n_prime = weights.n // weights.p_prime
    return y[2] != 0 and y[2] % n_prime == 0 and is_extremal(y[:2], n_prime, KIND_S)


def _l3_prime_split(y, weights):
    n = weights.n
    for p in weights.modulus.primes:
        if y[0] % p and y[1] % p == 0 and y[2] % p == 0:
            spec = KIND_S if p == weights.p_prime else KIND_U
            if is_extremal(y[1:], n // p, spec):
                return True
    return False


def _l2_divisible_form(y, weights):
    q = weights.n // weights.p_prime
    return (y[0] != 0 and y[0] % q == 0 and y[1] % q != 0 and y[2] % q != 0
            and is_extremal(y[1:], q, KIND_Q))


def _l2_coprime_form(y, weights):
    p_prime = weights.p_prime
    q = weights.n // p_prime
    return (y[0] % p_prime != 0 and y[1] % p_prime == 0 and y[2] % p_prime == 0
            and is_extremal(y[1:], q, KIND_Q))


def _square_prime_parts(weights: WeightSet) -> Tuple[int, List[int]]:
    p_prime = next(p for p, r in weights.modulus.factors if r == 2)
    return p_prime, [p for p, r in weights.modulus.factors if r == 1]


def _coprime_to_square_prime(y, weights):
    p_prime, _ = _square_prime_parts(weights)
    if y[0] % p_prime == 0 or any(t % p_prime for t in y[1:]):
        return False
    n_prime = weights.n // p_prime
    reduced = [(t // p_prime) % n_prime for t in y[1:]]
    return is_extremal(reduced, n_prime, f"{KIND_L}:{p_prime}")


def _square_split_q(y, weights):
    p_prime, (q,) = _square_prime_parts(weights)
    square = p_prime * p_prime
    return (y[0] % q == 0 and y[1] % q == 0
            and is_extremal(y[:2], square, KIND_U) and is_extremal(y[2:], q, KIND_Q))


def _square_split_pair(y, weights):
    p_prime, others = _square_prime_parts(weights)
    n_prime = others[0] * others[1]
    return (y[2] % n_prime == 0 and y[3] % n_prime == 0
            and is_extremal(y[:2], n_prime, KIND_S)
            and is_extremal(y[2:], p_prime * p_prime, KIND_U))


def _one_square_prime(weights: WeightSet) -> bool:
    exponents = sorted(r for _, r in weights.modulus.factors)
    return exponents.count(2) == 1 and exponents[-1] == 2


def clause_catalog(weights: WeightSet) -> List[Clause]:
    """Structural forms that cover every A-extremal sequence for this (n, A), or [] if none are known"""
    modulus = weights.modulus
    if not modulus.is_odd or weights.kind not in (KIND_Q, KIND_S, KIND_L):
        return []
    omega = modulus.big_omega
    if weights.kind in (KIND_Q, KIND_S) and modulus.is_prime:
        return [Clause("exts.omega1.residue-form",
                       "y1 a quadratic residue, -y2 a non-residue", 2, _residue_pair_form)]
    if min(modulus.primes) < 7:
        return []

    if weights.kind == KIND_S and modulus.is_squarefree:
        clauses = [Clause("exts.prime-split-form",
                          "some prime p divides every term but y1, rest U(n/p)-extremal mod n/p",
                          omega, _jacobi_prime_split)]
        if omega == 2:
            clauses.append(Clause("exts.omega2.residue-form",
                                  "y1 in S(n), -y2 in U(n) minus S(n)", 2, _residue_pair_form))
        else:
            clauses.append(Clause("su.u-extremal", "U(n)-extremal", omega, _units_extremal))
        return clauses

    if weights.kind == KIND_L and modulus.is_squarefree:
        if omega == 2:
            return [
                Clause("extl2.divisible-q-form",
                       "q divides only y1 != 0, (y2, y3) mod q Q_q-extremal", 3, _l2_divisible_form),
                Clause("extl2.coprime-pprime-form",
                       "y1 the only term coprime to p', (y2, y3) mod q Q_q-extremal", 3, _l2_coprime_form),
            ]
        if omega == 3:
            return [
                Clause("extl3.divisible-nprime-form",
                       "n/p' divides y3 != 0, (y1, y2) mod n/p' S-extremal", 3, _l3_divisible_form),
                Clause("extl3.prime-split-form",
                       "some prime p divides every term but y1, rest U or S(n/p)-extremal mod n/p",
                       3, _l3_prime_split),
            ]
        return [Clause("extl.u-extremal", "U(n)-extremal", omega, _units_extremal)]

    if weights.kind == KIND_S and _one_square_prime(weights):
        distinct = modulus.small_omega
        if distinct == 2:
            length = omega + 1
            return [
                Clause("ds22.divisible-q-form",
                       "q divides y1 and y2, (y1, y2) mod p'^2 U-extremal, (y3, y4) mod q Q_q-extremal",
                       length, _square_split_q),
                Clause("ds22.coprime-pprime-form",
                       "y1 the only term coprime to p', y_i/p' mod p'q L(p'q;p')-extremal",
                       length, _coprime_to_square_prime),
            ]
        if distinct == 3:
            length = omega
            return [
                Clause("ds2w3.u-extremal", "U(n)-extremal", length, _units_extremal),
                Clause("ds2w3.coprime-pprime-form",
                       "y1 the only term coprime to p', y_i/p' mod n/p' L(n/p';p')-extremal",
                       length, _coprime_to_square_prime),
                Clause("ds2w3.split-form",
                       "(y1, y2) mod p1p2 S-extremal, p1p2 divides y3 and y4, their image mod p'^2 U-extremal",
                       length, _square_split_pair),
            ]
        return [Clause("ds2.u-extremal", "U(n)-extremal", omega, _units_extremal)]
    return []


def matching_clauses(terms: Sequence[int], weights: WeightSet,
                     catalog: Optional[List[Clause]] = None) -> List[str]:
    """
    Labels of the clauses some member of the class of `terms` satisfies.
    Every clause is invariant under per-term multiplication by A, so trying
    each coset representative of A in U(n) with each ordering covers the class.
    """
    catalog = clause_catalog(weights) if catalog is None else catalog
    n = weights.n
    values = tuple(int(t) % n for t in terms)
    if not catalog or not values or any(v == 0 for v in values):
        return []
    candidates = sorted({tuple(c * v % n for v in order)
                         for c in coset_representatives(weights)
                         for order in set(permutations(values))})
    labels = []
    for clause in catalog:
        if clause.length != len(values):
            continue
        if any(clause.holds(y, weights) for y in candidates):
            labels.append(clause.label)
    return sorted(labels)


def classify_extremal(terms: Sequence[int], weights: WeightSet,
                      davenport_value: Optional[int] = None) -> List[str]:
    """Labels for an A-extremal sequence; rejects anything that is not A-extremal"""
    n = weights.n
    value = davenport_value if davenport_value is not None else exact_davenport(n, weights.spec)
    values = [int(t) % n for t in terms]
    if len(values) != value - 1:
        raise InvalidInputError(f"Length {len(values)} is not D - 1 = {value - 1}",
                                {'terms': values, 'spec': weights.spec})
    if has_zero_sum_subseq(values, weights):
        raise InvalidInputError(f"{tuple(values)} has a {weights.spec}-weighted zero sum",
                                {'terms': values, 'spec': weights.spec})
    return matching_clauses(values, weights)


# === ENUMERATION ===

@dataclass
class ExtremalReport:
    n: int
    weight_spec: str
    davenport_value: int
    classes: List[Tuple[int, ...]] = field(default_factory=list)
    labels: List[List[str]] = field(default_factory=list)
    unmatched: List[Tuple[int, ...]] = field(default_factory=list)
    covered: bool = False
    partial: bool = False
    node_count: int = 0

    @property
    def overlaps(self) -> List[Tuple[int, ...]]:
        """Classes that satisfy more than one form"""
        return [c for c, l in zip(self.classes, self.labels) if len(l) > 1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'weights': self.weight_spec,
            'davenport': self.davenport_value,
            'classes': [{'terms': list(c), 'labels': list(l)} for c, l in zip(self.classes, self.labels)],
            'unmatched': [list(c) for c in self.unmatched],
            'overlaps': [list(c) for c in self.overlaps],
            'covered': self.covered,
            'partial': self.partial,
        }


def _collect_classes(weights: WeightSet, length: int, budget: Optional[Budget], jobs: int,
                     prune: bool) -> Tuple[List[Tuple[int, ...]], bool, int]:
    results, truncated = walk_zero_sum_free(weights, budget, jobs, collect_length=length, prune=prune)
    if weights.is_group:
        forms = {canonical_equiv_form(found, weights) for r in results for found in r.collected}
    else:
        forms = {tuple(sorted(found)) for r in results for found in r.collected}
    return sorted(forms), truncated, sum(r.node_count for r in results)


def enumerate_extremal(n: ModulusLike, weights: WeightSet, budget: Optional[Budget] = None,
                       jobs: int = 1, record: Optional[ConstantRecord] = None) -> ExtremalReport:
    """All A-extremal classes, each with the clause labels it satisfies"""
    modulus = as_modulus(n)
    if weights.n != modulus.n:
        raise InvalidInputError(f"Weights live mod {weights.n}, asked for extremal mod {modulus.n}")
    record = record or davenport(modulus, weights, budget, jobs)
    classes, truncated, nodes = _collect_classes(weights, record.value - 1, budget, jobs, prune=True)

    catalog = clause_catalog(weights)
    labels = [matching_clauses(c, weights, catalog) for c in classes]
    report = ExtremalReport(
        n=modulus.n,
        weight_spec=weights.spec,
        davenport_value=record.value,
        classes=classes,
        labels=labels,
        unmatched=[c for c, l in zip(classes, labels) if catalog and not l],
        covered=bool(catalog),
        partial=truncated or not record.is_exact,
        node_count=nodes,
    )
    Logger.info(f"{len(classes)} extremal classes for {weights.spec} mod {modulus.n}, "
                f"{len(report.unmatched)} unmatched")
    if report.partial:
        Logger.warning(f"Extremal enumeration for {weights.spec} mod {modulus.n} is partial")
    return report


def converse_check(weights: WeightSet, budget: Optional[Budget] = None, jobs: int = 1,
                   davenport_value: Optional[int] = None) -> List[Tuple[Tuple[int, ...], List[str]]]:
    """
    Walk every nonzero multiset of length D - 1 and return the ones that match
    a clause without being zero-sum-free. An empty list means every listed form
    really is extremal.
    """
    n = weights.n
    catalog = clause_catalog(weights)
    if not catalog:
        raise InvalidInputError(f"No structural forms are known for {weights.spec} mod {n}")
    value = davenport_value if davenport_value is not None else exact_davenport(n, weights.spec)
    forms, truncated, _ = _collect_classes(weights, value - 1, budget, jobs, prune=False)
    if truncated:
        raise BudgetExceededError(f"Converse walk for {weights.spec} mod {n} ran out of budget",
                                  context={'n': n, 'spec': weights.spec})
    failures = []
    for form in forms:
        labels = matching_clauses(form, weights, catalog)
        if labels and has_zero_sum_subseq(form, weights):
            failures.append((form, labels))
    if failures:
        Logger.warning(f"{len(failures)} forms for {weights.spec} mod {n} are not zero-sum-free")
    return failures


def check_su(n: ModulusLike, budget: Optional[Budget] = None, jobs: int = 1) -> bool:
    """S(n)-extremal and U(n)-extremal sequences coincide (n squarefree, three or more primes, all >= 7)"""
    modulus = as_modulus(n)
    if not modulus.is_squarefree or modulus.big_omega < 3 or min(modulus.primes) < 7:
        raise InvalidInputError(f"{modulus.n} must be squarefree with at least three primes, all >= 7",
                                {'n': modulus.n})
    s_weights = build(KIND_S, modulus)
    u_weights = build(KIND_U, modulus)
    s_report = enumerate_extremal(modulus, s_weights, budget, jobs)
    u_report = enumerate_extremal(modulus, u_weights, budget, jobs)
    if s_report.partial or u_report.partial:
        raise BudgetExceededError(f"Extremal enumeration mod {modulus.n} did not finish",
                                  context={'n': modulus.n})
    if s_report.davenport_value != u_report.davenport_value:
        return False

    u_classes = set(u_report.classes)
    if any(canonical_equiv_form(form, u_weights) not in u_classes for form in s_report.classes):
        return False

    # every twist of a U-class by coset representatives must land in an S-class
    s_classes = set(s_report.classes)
    cosets = coset_representatives(s_weights)
    for form in u_report.classes:
        for twist in product(cosets, repeat=len(form)):
            twisted = [c * x for c, x in zip(twist, form)]
            if canonical_equiv_form(twisted, s_weights) not in s_classes:
                return False
    return True
