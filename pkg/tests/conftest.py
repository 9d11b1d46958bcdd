"""
Shared fixtures and brute-force oracles for the Davenport lab tests
"""

import random
from itertools import combinations, combinations_with_replacement
from math import gcd

import pytest

from services.davenport_search import Budget
from services.weight_sets import build


SMALL_ODD_MODULI = (3, 5, 7, 9, 11, 13, 15, 21, 25, 27, 33, 35, 45)
STRUCTURE_MODULI = (15, 49, 77, 539, 1001)


@pytest.fixture
def rng():
    return random.Random(20261016)


@pytest.fixture
def small_budget():
    return Budget(max_nodes=200_000, max_seconds=120.0)


@pytest.fixture
def weights_factory():
    """build() with keyword shortcuts: weights_factory('S', 15), weights_factory('L', 77, 7)"""
    def make(kind, n, p_prime=None, values=None):
        return build(kind, n, p_prime=p_prime, values=values)
    return make


# === BRUTE-FORCE ORACLES ===

def brute_weighted_sums(terms, members, n):
    """Every sum a_1*x_1 + ... + a_k*x_k over all weight choices"""
    sums = {0}
    for x in terms:
        sums = {(s + a * x) % n for s in sums for a in members}
    return sums


def brute_reach(terms, members, n):
    """Sums of every nonempty subsequence with every weight choice"""
    reached = set()
    for size in range(1, len(terms) + 1):
        for subset in combinations(terms, size):
            reached |= brute_weighted_sums(subset, members, n)
    return reached


def brute_has_zero_sum(terms, members, n):
    for size in range(1, len(terms) + 1):
        for subset in combinations(terms, size):
            if 0 in brute_weighted_sums(subset, members, n):
                return True
    return False


def brute_davenport(members, n, max_length=None):
    """D_A(n) straight from the definition: try every multiset of nonzero residues"""
    longest = 0
    length = 1
    while max_length is None or length <= max_length:
        found = any(not brute_has_zero_sum(terms, members, n)
                    for terms in combinations_with_replacement(range(1, n), length))
        if not found:
            break
        longest = length
        length += 1
    return longest + 1


def brute_zero_sum_free(members, n, length):
    """Every nondecreasing zero-sum-free tuple of nonzero residues with the given length"""
    return [terms for terms in combinations_with_replacement(range(1, n), length)
            if not brute_has_zero_sum(terms, members, n)]


def brute_class_count(members, n, length):
    """
    Classes of zero-sum-free sequences under c*(a_1 x_1, ..., a_k x_k), counted by
    closing each sequence under unit scaling and single-term weight moves
    """
    unit_list = [c for c in range(1, n) if gcd(c, n) == 1]
    unseen = set(brute_zero_sum_free(members, n, length))
    classes = 0
    while unseen:
        classes += 1
        frontier = [unseen.pop()]
        while frontier:
            terms = frontier.pop()
            moves = [tuple(sorted(c * x % n for x in terms)) for c in unit_list]
            for i in range(len(terms)):
                for a in members:
                    moved = list(terms)
                    moved[i] = a * moved[i] % n
                    moves.append(tuple(sorted(moved)))
            for nxt in moves:
                if nxt in unseen:
                    unseen.remove(nxt)
                    frontier.append(nxt)
    return classes
