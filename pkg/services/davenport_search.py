"""
Davenport search - exact D_A(n) and E_A(n) by canonicalized exhaustive search
Plus the constructive lower-bound witnesses (chain witness, product witness)
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from services.errors import BudgetExceededError, InvalidInputError, InvariantBreachError
from services.logger import Logger
from services.residue_core import ModulusLike, as_modulus, quadratic_residues
from services.weight_sets import (
    KIND_L,
    KIND_Q,
    KIND_S,
    KIND_U,
    WeightSet,
    build,
    image_under_map,
)
from services.zerosum_engine import (
    Seq,
    extend_reach,
    has_zero_sum_subseq,
    reach_by_length,
    seq,
    sumset,
)


STATUS_EXACT = "exact"
STATUS_LOWER_BOUND = "lower_bound"
KIND_D = "D"
KIND_E = "E"


@dataclass(frozen=True)
class Budget:
    """Search limits; nodes are shared out evenly between top-level branches"""

    max_nodes: int = 5_000_000
    max_seconds: float = 600.0


@dataclass
class ConstantRecord:
    n: int
    weight_spec: str
    constant_kind: str
    value: int
    witness: Tuple[int, ...]
    status: str
    elapsed_ms: float = 0.0
    node_count: int = 0

    @property
    def is_exact(self) -> bool:
        return self.status == STATUS_EXACT

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['witness'] = list(self.witness)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConstantRecord":
        return cls(
            n=int(data['n']),
            weight_spec=str(data['weight_spec']),
            constant_kind=str(data['constant_kind']),
            value=int(data['value']),
            witness=tuple(int(x) for x in data['witness']),
            status=str(data['status']),
            elapsed_ms=float(data.get('elapsed_ms', 0.0)),
            node_count=int(data.get('node_count', 0)),
        )


class _Truncated(Exception):
    """Raised inside a branch walk when its budget runs out"""


@dataclass
class BranchResult:
    first: int
    best: Tuple[int, ...] = ()
    collected: List[Tuple[int, ...]] = field(default_factory=list)
    node_count: int = 0
    truncated: bool = False


# === CANDIDATES ===

def first_term_candidates(weights: WeightSet) -> List[int]:
    """
    First terms of canonical zero-sum-free multisets. For a group A any sequence
    of nonzero terms is equivalent to one whose least term is gcd(x, n) for the
    term x with the least gcd, so the first term may be restricted to divisors.
    """
    reps = weights.orbit_representatives()
    if not weights.is_group:
        return reps
    n = weights.n
    return [r for r in reps if n % r == 0]


def _allowed_after(weights: WeightSet, first: int, reps: List[int]) -> List[int]:
    if not weights.is_group:
        return [r for r in reps if r >= first]
    n = weights.n
    return [r for r in reps if r >= first and gcd(r, n) >= first]


# === BRANCH WALKERS (run in worker processes) ===

class _BranchWalker:
    """Depth-first walk over nondecreasing zero-sum-free multisets with one fixed first term"""

    def __init__(self, weights: WeightSet, first: int, candidates: List[int],
                 node_limit: int, deadline: float, collect_length: Optional[int], prune: bool):
        self.weights = weights
        self.n = weights.n
        self.candidates = candidates
        self.masks = [weights.orbit_mask(c) for c in candidates]
        self.node_limit = node_limit
        self.deadline = deadline
        self.collect_length = collect_length
        self.prune = prune
        self.result = BranchResult(first=first)

    def _tick(self):
        self.result.node_count += 1
        if self.result.node_count > self.node_limit:
            raise _Truncated()
        if self.result.node_count % 1024 == 0 and time.time() > self.deadline:
            raise _Truncated()

    def _visit(self, path: List[int], reachable: int, start: int):
        if len(path) > len(self.result.best):
            self.result.best = tuple(path)
        if self.collect_length is not None and len(path) == self.collect_length:
            self.result.collected.append(tuple(path))
            return
        for idx in range(start, len(self.candidates)):
            self._tick()
            extended = extend_reach(reachable, self.masks[idx], self.n)
            if self.prune and extended & 1:
                continue
            path.append(self.candidates[idx])
            self._visit(path, extended, idx)
            path.pop()

    def run(self) -> BranchResult:
        first = self.result.first
        reachable = self.weights.orbit_mask(first)
        self.result.node_count = 1
        if self.prune and reachable & 1:
            return self.result
        try:
            self._visit([first], reachable, 0)
        except _Truncated:
            self.result.truncated = True
        except RecursionError:
            self.result.truncated = True
        return self.result


def _walk_branch(task) -> BranchResult:
    weights, first, node_limit, deadline, collect_length, prune = task
    reps = weights.orbit_representatives()
    candidates = _allowed_after(weights, first, reps)
    walker = _BranchWalker(weights, first, candidates, node_limit, deadline, collect_length, prune)
    return walker.run()


class _LengthWalker:
    """Walk for E_A(n): multisets (zero allowed) without a weighted zero sum of length exactly n"""

    def __init__(self, weights: WeightSet, first: int, candidates: List[int],
                 node_limit: int, deadline: float):
        self.weights = weights
        self.n = weights.n
        self.candidates = candidates
        self.masks = [weights.orbit_mask(c) for c in candidates]
        self.node_limit = node_limit
        self.deadline = deadline
        self.result = BranchResult(first=first)

    def _extend(self, layers: List[int], term_mask: int, length: int) -> List[int]:
        n = self.n
        top = min(length + 1, n)
        extended = layers[:]
        for j in range(top, 0, -1):
            if layers[j - 1]:
                extended[j] |= sumset(layers[j - 1], term_mask, n)
        return extended

    def _visit(self, path: List[int], layers: List[int], start: int):
        if len(path) > len(self.result.best):
            self.result.best = tuple(path)
        for idx in range(start, len(self.candidates)):
            self.result.node_count += 1
            if self.result.node_count > self.node_limit:
                raise _Truncated()
            if self.result.node_count % 1024 == 0 and time.time() > self.deadline:
                raise _Truncated()
            extended = self._extend(layers, self.masks[idx], len(path))
            if extended[self.n] & 1:
                continue
            path.append(self.candidates[idx])
            self._visit(path, extended, idx)
            path.pop()

    def run(self) -> BranchResult:
        first_idx = self.candidates.index(self.result.first)
        layers = [1] + [0] * self.n
        layers = self._extend(layers, self.masks[first_idx], 0)
        self.result.node_count = 1
        try:
            self._visit([self.result.first], layers, first_idx)
        except (_Truncated, RecursionError):
            self.result.truncated = True
        return self.result


def _walk_length_branch(task) -> BranchResult:
    weights, first, node_limit, deadline = task
    candidates = weights.orbit_representatives(include_zero=True)
    walker = _LengthWalker(weights, first, candidates, node_limit, deadline)
    return walker.run()


def _run_tasks(worker: Callable, tasks: List[tuple], jobs: int) -> List[BranchResult]:
    """Map branch tasks in order; results come back in task order whatever jobs is"""
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as executor:
        return list(executor.map(worker, tasks))


def _split_nodes(budget: Budget, branches: int) -> int:
    return max(1, budget.max_nodes // max(1, branches))


# === PUBLIC SEARCHES ===

def walk_zero_sum_free(weights: WeightSet, budget: Optional[Budget] = None, jobs: int = 1,
                       collect_length: Optional[int] = None,
                       prune: bool = True) -> Tuple[List[BranchResult], bool]:
    """
    Run the canonical multiset walk over every first-term branch.
    With prune off every multiset of nonzero terms is visited (used by the
    converse clause checks). Returns (branch results, truncated).
    """
    budget = budget or Budget()
    firsts = first_term_candidates(weights)
    deadline = time.time() + budget.max_seconds
    node_limit = _split_nodes(budget, len(firsts))
    tasks = [(weights, first, node_limit, deadline, collect_length, prune) for first in firsts]
    results = _run_tasks(_walk_branch, tasks, jobs)
    return results, any(r.truncated for r in results)


def davenport(n: ModulusLike, weights: WeightSet, budget: Optional[Budget] = None,
              jobs: int = 1) -> ConstantRecord:
    """D_A(n): one more than the longest A-weighted zero-sum-free sequence"""
    modulus = as_modulus(n)
    if weights.n != modulus.n:
        raise InvalidInputError(f"Weights live mod {weights.n}, asked for D mod {modulus.n}")
    if not weights.members:
        raise InvalidInputError("Weight set must be nonempty")

    started = time.time()
    Logger.info(f"Davenport search: n={modulus.n}, A={weights.spec}, jobs={jobs}")
    results, truncated = walk_zero_sum_free(weights, budget, jobs)

    best: Tuple[int, ...] = ()
    for result in results:
        if len(result.best) > len(best):
            best = result.best
    seed = lower_bound_witness(weights)
    if seed is not None and len(seed) > len(best):
        if not truncated:
            raise InvariantBreachError(
                f"Exhaustive search found {len(best)} but a witness of length {len(seed)} exists",
                {'n': modulus.n, 'spec': weights.spec})
        best = seed.terms

    if has_zero_sum_subseq(best, weights):
        raise InvariantBreachError(f"Witness {best} has a weighted zero sum",
                                   {'n': modulus.n, 'spec': weights.spec})

    record = ConstantRecord(
        n=modulus.n,
        weight_spec=weights.spec,
        constant_kind=KIND_D,
        value=len(best) + 1,
        witness=tuple(sorted(best)),
        status=STATUS_LOWER_BOUND if truncated else STATUS_EXACT,
        elapsed_ms=round((time.time() - started) * 1000.0, 3),
        node_count=sum(r.node_count for r in results),
    )
    if truncated:
        Logger.warning(f"Budget exhausted for D mod {modulus.n} with {weights.spec}: "
                       f"lower bound {record.value}")
    else:
        Logger.info(f"D_{weights.spec}({modulus.n}) = {record.value} "
                    f"({record.node_count} nodes, {record.elapsed_ms} ms)")
    return record


def e_constant(n: ModulusLike, weights: WeightSet, budget: Optional[Budget] = None,
               jobs: int = 1, max_n: int = 21) -> ConstantRecord:
    """E_A(n): least m such that every length-m sequence has a weighted zero sum of length n"""
    modulus = as_modulus(n)
    if weights.n != modulus.n:
        raise InvalidInputError(f"Weights live mod {weights.n}, asked for E mod {modulus.n}")
    if modulus.n > max_n:
        raise BudgetExceededError(f"E_A(n) search is limited to n <= {max_n}, got {modulus.n}",
                                  context={'n': modulus.n, 'max_n': max_n})

    budget = budget or Budget()
    started = time.time()
    Logger.info(f"E search: n={modulus.n}, A={weights.spec}")
    firsts = weights.orbit_representatives(include_zero=True)
    deadline = time.time() + budget.max_seconds
    node_limit = _split_nodes(budget, len(firsts))
    tasks = [(weights, first, node_limit, deadline) for first in firsts]
    results = _run_tasks(_walk_length_branch, tasks, jobs)
    truncated = any(r.truncated for r in results)

    best: Tuple[int, ...] = ()
    for result in results:
        if len(result.best) > len(best):
            best = result.best

    layers = reach_by_length(best, weights, cap=max(len(best), 1), max_length=modulus.n).by_length
    if len(layers) > modulus.n and layers[modulus.n] & 1:
        raise InvariantBreachError(f"E witness {best} has a weighted zero sum of length {modulus.n}")

    record = ConstantRecord(
        n=modulus.n,
        weight_spec=weights.spec,
        constant_kind=KIND_E,
        value=len(best) + 1,
        witness=tuple(best),
        status=STATUS_LOWER_BOUND if truncated else STATUS_EXACT,
        elapsed_ms=round((time.time() - started) * 1000.0, 3),
        node_count=sum(r.node_count for r in results),
    )
    Logger.info(f"E_{weights.spec}({modulus.n}) = {record.value} [{record.status}]")
    return record


# === CONSTRUCTIVE WITNESSES ===

def canonical_chain_witness(n: ModulusLike) -> Seq:
    """(1, p1, p1*p2, ..., p1*...*p_{k-1}) for n = p1*...*pk with multiplicity"""
    modulus = as_modulus(n)
    terms = [1]
    for p in modulus.primes_with_multiplicity[:-1]:
        terms.append(terms[-1] * p)
    witness = seq(terms, modulus)
    if has_zero_sum_subseq(witness, build(KIND_U, modulus)):
        raise InvariantBreachError(f"Chain witness {witness.terms} mod {modulus.n} is not zero-sum-free")
    return witness


def dadd_witness(n: ModulusLike, m1: int, m2: int, weights: WeightSet, first: WeightSet,
                 second: WeightSet, s1: Sequence[int], s2: Sequence[int]) -> Seq:
    """Glue zero-sum-free sequences mod m1 and mod m2 into one mod n = m1*m2"""
    modulus = as_modulus(n)
    if m1 * m2 != modulus.n:
        raise InvalidInputError(f"{m1} * {m2} != {modulus.n}")
    if weights.n != modulus.n or first.n != m1 or second.n != m2:
        raise InvalidInputError("Weight sets do not live on n, m1 and m2")
    if not image_under_map(weights, m1) <= set(first.members):
        raise InvalidInputError(f"Image of {weights.spec} mod {m1} is not inside {first.spec}")
    if not image_under_map(weights, m2) <= set(second.members):
        raise InvalidInputError(f"Image of {weights.spec} mod {m2} is not inside {second.spec}")
    if has_zero_sum_subseq(s1, first):
        raise InvalidInputError(f"{tuple(s1)} is not {first.spec}-zero-sum-free mod {m1}")
    if has_zero_sum_subseq(s2, second):
        raise InvalidInputError(f"{tuple(s2)} is not {second.spec}-zero-sum-free mod {m2}")

    lifted = [m2 * (w % m1) for w in s1] + [y % m2 for y in s2]
    witness = seq(lifted, modulus)
    if has_zero_sum_subseq(witness, weights):
        raise InvariantBreachError(f"Product witness {witness.terms} mod {modulus.n} has a zero sum")
    return witness


def residue_pair_witness(p: int) -> Tuple[int, int]:
    """(1, y) with -y a non-residue mod p; Q_p-zero-sum-free"""
    residues = set(quadratic_residues(p))
    y = next(y for y in range(1, p) if (-y) % p not in residues)
    return 1, y


def lower_bound_witness(weights: WeightSet) -> Optional[Seq]:
    """Longest witness the constructive arguments give for A, or None"""
    modulus = weights.modulus
    n = modulus.n
    units_set = build(KIND_U, modulus)
    best: Optional[Seq] = None
    if weights.issubset(units_set):
        best = canonical_chain_witness(modulus)

    candidate = None
    if weights.kind in (KIND_Q, KIND_S) and modulus.is_prime and n > 2:
        candidate = seq(residue_pair_witness(n), modulus)
    elif weights.kind == KIND_L and modulus.is_squarefree and modulus.big_omega == 2:
        p_prime = weights.p_prime
        q = n // p_prime
        if q > 2:
            candidate = dadd_witness(modulus, p_prime, q, weights, build(KIND_U, p_prime),
                                     build(KIND_Q, q), (1,), residue_pair_witness(q))
    elif (weights.kind == KIND_S and modulus.small_omega == 2
          and sorted(r for _, r in modulus.factors) == [1, 2]):
        p_prime = next(p for p, r in modulus.factors if r == 2)
        q = next(p for p, r in modulus.factors if r == 1)
        m1 = p_prime * p_prime
        if q > 2:
            candidate = dadd_witness(modulus, m1, q, weights, build(KIND_U, m1), build(KIND_Q, q),
                                     canonical_chain_witness(m1).terms, residue_pair_witness(q))
    if candidate is not None and (best is None or len(candidate) > len(best)):
        best = candidate
    return best


# === CONSISTENCY ===

def monotonicity_violations(pairs: Sequence[Tuple[WeightSet, ConstantRecord, WeightSet, ConstantRecord]]
                            ) -> List[str]:
    """For A inside B with both values exact, D_A(n) >= D_B(n) must hold"""
    problems = []
    for small, small_record, large, large_record in pairs:
        if not small.issubset(large):
            continue
        if small_record.is_exact and large_record.is_exact and small_record.value < large_record.value:
            problems.append(
                f"D_{small.spec}({small.n}) = {small_record.value} < D_{large.spec}({large.n}) = {large_record.value}")
    return problems
