"""
VerifySuite - the embedded verification matrix and its runner
Every check has an id, inputs, an expected value and a short statement of the result it pins down
"""

import time
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Any, Callable, Dict, List, Optional, Tuple

from services.davenport_search import (
    Budget,
    ConstantRecord,
    canonical_chain_witness,
    davenport,
    e_constant,
    lower_bound_witness,
    monotonicity_violations,
)
from services.errors import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    BudgetExceededError,
    DavenportError,
    InvalidInputError,
)
from services.extremal_lab import (
    classify_extremal,
    check_su,
    converse_check,
    enumerate_extremal,
)
from services.logger import Logger
from services.residue_core import units
from services.weight_sets import (
    KIND_U_SQUARED,
    build,
    complement_in_units,
    index_in_units,
    parse_weight_spec,
)
from services.zerosum_engine import coset_sumset, has_zero_sum_subseq, is_zero_sum_seq


SUITE_CORE = "core"
SUITE_EXTREMAL = "extremal"
SUITE_FULL = "full"
SUITES = (SUITE_CORE, SUITE_EXTREMAL, SUITE_FULL)


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    suite: str
    kind: str
    params: Dict[str, Any]
    expected: Any
    anchor: str


@dataclass
class CheckOutcome:
    check_id: str
    expected: Any
    actual: Any
    passed: bool
    elapsed_ms: float
    anchor: str
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.check_id,
            'expected': self.expected,
            'actual': self.actual,
            'passed': self.passed,
            'elapsed_ms': self.elapsed_ms,
            'anchor': self.anchor,
            'note': self.note,
        }


@dataclass
class SuiteResult:
    suite: str
    outcomes: List[CheckOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    @property
    def failures(self) -> List[CheckOutcome]:
        return [o for o in self.outcomes if not o.passed]

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_CHECK_FAILED

    def to_dict(self) -> Dict[str, Any]:
        return {
            'suite': self.suite,
            'passed': self.passed,
            'checks': [o.to_dict() for o in self.outcomes],
        }


# === CHECK MATRIX ===

def _check(check_id, suite, kind, expected, anchor, **params) -> CheckSpec:
    return CheckSpec(check_id, suite, kind, params, expected, anchor)


_UNIT_BOUND = "D_U(n) = Omega(n) + 1"

CHECKS: Tuple[CheckSpec, ...] = (
    _check("core.members.S.15", SUITE_CORE, "members", [1, 2, 4, 8],
           "S(15) = {1, 2, 4, 8}", n=15, spec="S"),
    _check("core.index.S.15", SUITE_CORE, "index", 2, "S(n) has index 2 in U(n) unless n is a square", n=15, spec="S"),
    _check("core.index.S.77", SUITE_CORE, "index", 2, "S(n) has index 2 in U(n) unless n is a square", n=77, spec="S"),
    _check("core.index.S.539", SUITE_CORE, "index", 2, "S(n) has index 2 in U(n) unless n is a square", n=539, spec="S"),
    _check("core.index.S.1001", SUITE_CORE, "index", 2, "S(n) has index 2 in U(n) unless n is a square", n=1001, spec="S"),
    _check("core.index.S.49", SUITE_CORE, "index", 1, "S(n) = U(n) for a square n", n=49, spec="S"),

    _check("core.d.U.15", SUITE_CORE, "d_value", 3, _UNIT_BOUND, n=15, spec="U"),
    _check("core.d.U.49", SUITE_CORE, "d_value", 3, _UNIT_BOUND, n=49, spec="U"),
    _check("core.d.U.77", SUITE_CORE, "d_value", 3, _UNIT_BOUND, n=77, spec="U"),
    _check("core.d.U.539", SUITE_CORE, "d_value", 4, _UNIT_BOUND, n=539, spec="U"),
    _check("core.d.U.1001", SUITE_CORE, "d_value", 4, _UNIT_BOUND, n=1001, spec="U"),
    _check("core.d.Q.7", SUITE_CORE, "d_value", 3, "D_Q(p) = 3", n=7, spec="Q"),
    _check("core.d.Q.11", SUITE_CORE, "d_value", 3, "D_Q(p) = 3", n=11, spec="Q"),
    _check("core.d.Q.13", SUITE_CORE, "d_value", 3, "D_Q(p) = 3", n=13, spec="Q"),
    _check("core.d.S.7", SUITE_CORE, "d_value", 3, "D_S(p) = 3 for a prime p", n=7, spec="S"),
    _check("core.d.S.11", SUITE_CORE, "d_value", 3, "D_S(p) = 3 for a prime p", n=11, spec="S"),
    _check("core.d.S.13", SUITE_CORE, "d_value", 3, "D_S(p) = 3 for a prime p", n=13, spec="S"),
    _check("core.d.S.77", SUITE_CORE, "d_value", 3, "D_S(n) = Omega(n) + 1, n squarefree", n=77, spec="S"),
    _check("core.d.S.1001", SUITE_CORE, "d_value", 4, "D_S(n) = Omega(n) + 1, n squarefree", n=1001, spec="S"),
    _check("core.d.L7.77", SUITE_CORE, "d_value", 4, "D_L(p'q) = 4", n=77, spec="L:7"),
    _check("core.d.L11.77", SUITE_CORE, "d_value", 4, "D_L(p'q) = 4", n=77, spec="L:11"),
    _check("core.d.L7.1001", SUITE_CORE, "d_value", 4, "D_L(n) = Omega(n) + 1 when Omega(n) != 2", n=1001, spec="L:7"),
    _check("core.d.L11.1001", SUITE_CORE, "d_value", 4, "D_L(n) = Omega(n) + 1 when Omega(n) != 2", n=1001, spec="L:11"),
    _check("core.d.L13.1001", SUITE_CORE, "d_value", 4, "D_L(n) = Omega(n) + 1 when Omega(n) != 2", n=1001, spec="L:13"),
    _check("core.d.S.49", SUITE_CORE, "d_value", 3, "D_S(p'^2) = 3", n=49, spec="S"),
    _check("core.d.S.539", SUITE_CORE, "d_value", 5, "D_S(p'^2 q) = 5", n=539, spec="S"),
    _check("core.d.S.15", SUITE_CORE, "d_value", 4, "D_S(15) >= 4; exact value from the search", n=15, spec="S"),

    _check("core.witness.chain.49", SUITE_CORE, "chain_witness", 2, "chain witness is U(n)-zero-sum-free", n=49),
    _check("core.witness.chain.77", SUITE_CORE, "chain_witness", 2, "chain witness is U(n)-zero-sum-free", n=77),
    _check("core.witness.chain.539", SUITE_CORE, "chain_witness", 3, "chain witness is U(n)-zero-sum-free", n=539),
    _check("core.witness.chain.1001", SUITE_CORE, "chain_witness", 3, "chain witness is U(n)-zero-sum-free", n=1001),
    _check("core.witness.product.L7.77", SUITE_CORE, "product_witness", 3,
           "D_A(n) >= D_A1(m1) + D_A2(m2) - 1", n=77, spec="L:7"),
    _check("core.witness.product.S.539", SUITE_CORE, "product_witness", 4,
           "D_A(n) >= D_A1(m1) + D_A2(m2) - 1", n=539, spec="S"),

    _check("core.e.U.15", SUITE_CORE, "e_value", 17, "E_U(n) = Omega(n) + n", n=15, spec="U"),
    _check("core.e.Q.7", SUITE_CORE, "e_value", 9, "E_A(n) = D_A(n) + n - 1", n=7, spec="Q"),
    _check("core.e.U.7", SUITE_CORE, "e_value", 8, "E_U(p) = p + 1", n=7, spec="U"),
    _check("core.e-minus-d.U.15", SUITE_CORE, "e_minus_d", 14, "E_A(n) = D_A(n) + n - 1", n=15, spec="U"),
    _check("core.e-minus-d.Q.7", SUITE_CORE, "e_minus_d", 6, "E_A(n) = D_A(n) + n - 1", n=7, spec="Q"),
    _check("core.e-minus-d.U.7", SUITE_CORE, "e_minus_d", 6, "E_A(n) = D_A(n) + n - 1", n=7, spec="U"),

    _check("core.sumset.squares.7", SUITE_CORE, "square_triples", 0,
           "Ax1 + Ax2 + Ax3 = Z_p for A = U(p)^2, p >= 7", n=7),
    _check("core.sumset.squares.11", SUITE_CORE, "square_triples", 0,
           "Ax1 + Ax2 + Ax3 = Z_p for A = U(p)^2, p >= 7", n=11),
    _check("core.sumset.mixed.49", SUITE_CORE, "mixed_cosets", 0,
           "mixed square and non-square cosets still cover Z_49", n=49,
           triples=((1, 1, 1), (1, 2, 3), (2, 3, 5), (1, 6, 48), (3, 10, 19))),
    _check("core.sumset.small.5", SUITE_CORE, "zero_sum_seq", False,
           "U(5)^2-weighted sums of (1, 1, 1) miss 0", n=5, spec="Usq", terms=(1, 1, 1)),
    _check("core.sumset.small.3", SUITE_CORE, "zero_sum_seq", False,
           "U(3)^2-weighted sums of (1, 2, 1) miss 0", n=3, spec="Usq", terms=(1, 2, 1)),
    _check("core.monotonicity", SUITE_CORE, "monotonicity", 0,
           "A inside B implies D_A(n) >= D_B(n)",
           pairs=((77, "S", "U"), (77, "L:7", "U"), (1001, "S", "U"), (539, "S", "U"), (15, "S", "U"))),

    _check("extremal.classes.Q.7", SUITE_EXTREMAL, "extremal_classes", 1,
           "Q_p-extremal: x1 in Q_p, -x2 outside Q_p", n=7, spec="Q"),
    _check("extremal.classes.Q.11", SUITE_EXTREMAL, "extremal_classes", 1,
           "Q_p-extremal: x1 in Q_p, -x2 outside Q_p", n=11, spec="Q"),
    _check("extremal.unmatched.Q.7", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "Q_p-extremal: x1 in Q_p, -x2 outside Q_p", n=7, spec="Q"),
    _check("extremal.unmatched.Q.11", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "Q_p-extremal: x1 in Q_p, -x2 outside Q_p", n=11, spec="Q"),
    _check("extremal.converse.Q.7", SUITE_EXTREMAL, "extremal_converse", 0,
           "every residue-form pair is Q_p-extremal", n=7, spec="Q"),
    _check("extremal.converse.Q.11", SUITE_EXTREMAL, "extremal_converse", 0,
           "every residue-form pair is Q_p-extremal", n=11, spec="Q"),
    _check("extremal.unmatched.S.77", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "S(n)-extremal forms for Omega(n) = 2", n=77, spec="S"),
    _check("extremal.converse.S.77", SUITE_EXTREMAL, "extremal_converse", 0,
           "S(n)-extremal forms for Omega(n) = 2 are extremal", n=77, spec="S"),
    _check("extremal.su.1001", SUITE_EXTREMAL, "su", True,
           "S(n)- and U(n)-extremal sequences coincide for Omega(n) >= 3", n=1001),
    _check("extremal.unmatched.S.1001", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "S(n)-extremal forms for Omega(n) >= 3", n=1001, spec="S"),
    _check("extremal.label.S.1001", SUITE_EXTREMAL, "extremal_label_missing", 0,
           "every S(n)-extremal class has the prime-split form for Omega(n) >= 3",
           n=1001, spec="S", label="exts.prime-split-form"),
    _check("extremal.unmatched.L7.77", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "L(p'q;p')-extremal forms", n=77, spec="L:7"),
    _check("extremal.unmatched.L11.77", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "L(p'q;p')-extremal forms", n=77, spec="L:11"),
    _check("extremal.converse.L7.77", SUITE_EXTREMAL, "extremal_converse", 0,
           "L(p'q;p')-extremal forms are extremal", n=77, spec="L:7"),
    _check("extremal.unmatched.L7.1001", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "L(n;p')-extremal forms for Omega(n) = 3", n=1001, spec="L:7"),
    _check("extremal.unmatched.L11.1001", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "L(n;p')-extremal forms for Omega(n) = 3", n=1001, spec="L:11"),
    _check("extremal.unmatched.L13.1001", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "L(n;p')-extremal forms for Omega(n) = 3", n=1001, spec="L:13"),
    _check("extremal.converse.L7.1001", SUITE_EXTREMAL, "extremal_converse", 0,
           "L(n;p')-extremal forms for Omega(n) = 3 are extremal", n=1001, spec="L:7"),
    _check("extremal.unmatched.S.539", SUITE_EXTREMAL, "extremal_unmatched", 0,
           "S(p'^2 q)-extremal forms", n=539, spec="S"),
    _check("extremal.converse.S.539", SUITE_EXTREMAL, "extremal_converse", 0,
           "S(p'^2 q)-extremal forms are extremal", n=539, spec="S"),

    _check("full.spot.S.7007", SUITE_FULL, "spot_check", 0,
           "S(p1 p2 p'^2)-extremal forms on constructed samples", n=7007, spec="S", davenport=5,
           samples=((1, 7, 49, 539), (1, 1, 1716, 5005), (1, 7, 2009, 2009))),
)


def checks_for(suite: str) -> List[CheckSpec]:
    """Checks of a suite in declaration order; full runs everything"""
    if suite not in SUITES:
        raise InvalidInputError(f"Unknown suite '{suite}', expected one of {', '.join(SUITES)}")
    if suite == SUITE_FULL:
        return list(CHECKS)
    return [c for c in CHECKS if c.suite == suite]


def parse_perturbations(items: Optional[List[str]]) -> Dict[str, int]:
    """'CHECK_ID:DELTA' strings -> {check id: delta}"""
    known = {c.check_id for c in CHECKS}
    result: Dict[str, int] = {}
    for item in items or []:
        check_id, sep, delta = item.rpartition(":")
        if not sep or check_id not in known:
            raise InvalidInputError(f"Bad perturbation '{item}', expected CHECK_ID:DELTA with a known id")
        try:
            result[check_id] = int(delta)
        except ValueError:
            raise InvalidInputError(f"Perturbation delta must be an integer, got '{delta}'")
    return result


def _perturbed(expected: Any, delta: int) -> Any:
    if not delta:
        return expected
    if isinstance(expected, bool):
        return not expected
    if isinstance(expected, int):
        return expected + delta
    if isinstance(expected, list):
        return expected + [delta]
    return expected


class _NotExact(Exception):
    """A search ran out of budget where the check needs an exact value"""


# === RUNNER ===

class SuiteRunner:
    """Runs checks, sharing computed constants between them"""

    def __init__(self, budget: Optional[Budget] = None, jobs: int = 1, cache=None):
        self.budget = budget or Budget()
        self.jobs = jobs
        self.cache = cache
        self._records: Dict[Tuple[int, str, str], ConstantRecord] = {}
        self._handlers: Dict[str, Callable[[Dict[str, Any]], Any]] = {
            'members': self._members,
            'index': self._index,
            'd_value': self._d_value,
            'e_value': self._e_value,
            'e_minus_d': self._e_minus_d,
            'chain_witness': self._chain_witness,
            'product_witness': self._product_witness,
            'square_triples': self._square_triples,
            'mixed_cosets': self._mixed_cosets,
            'zero_sum_seq': self._zero_sum_seq,
            'monotonicity': self._monotonicity,
            'extremal_classes': self._extremal_classes,
            'extremal_unmatched': self._extremal_unmatched,
            'extremal_label_missing': self._extremal_label_missing,
            'extremal_converse': self._extremal_converse,
            'su': self._su,
            'spot_check': self._spot_check,
        }

    # --- constants ---

    def record(self, n: int, spec: str, constant_kind: str = "D") -> ConstantRecord:
        key = (n, spec, constant_kind)
        if key in self._records:
            return self._records[key]
        record = self.cache.get(n, spec, constant_kind) if self.cache else None
        if record is None or not record.is_exact:
            weights = parse_weight_spec(spec, n)
            if constant_kind == "D":
                record = davenport(n, weights, self.budget, self.jobs)
            else:
                record = e_constant(n, weights, self.budget, self.jobs)
            if self.cache and record.is_exact:
                self.cache.put(record)
        self._records[key] = record
        return record

    def _exact(self, n: int, spec: str, constant_kind: str = "D") -> int:
        record = self.record(n, spec, constant_kind)
        if not record.is_exact:
            raise _NotExact(f"{constant_kind}_{spec}({n}) >= {record.value} only")
        return record.value

    # --- handlers ---

    def _members(self, p):
        return list(parse_weight_spec(p['spec'], p['n']).members)

    def _index(self, p):
        return index_in_units(parse_weight_spec(p['spec'], p['n']))

    def _d_value(self, p):
        return self._exact(p['n'], p['spec'])

    def _e_value(self, p):
        return self._exact(p['n'], p['spec'], "E")

    def _e_minus_d(self, p):
        return self._exact(p['n'], p['spec'], "E") - self._exact(p['n'], p['spec'])

    def _chain_witness(self, p):
        return len(canonical_chain_witness(p['n']))

    def _product_witness(self, p):
        weights = parse_weight_spec(p['spec'], p['n'])
        witness = lower_bound_witness(weights)
        if witness is None or has_zero_sum_subseq(witness, weights):
            return -1
        return len(witness)

    def _square_triples(self, p):
        n = p['n']
        squares = build(KIND_U_SQUARED, n)
        full = frozenset(range(n))
        return sum(1 for triple in combinations_with_replacement(units(n), 3)
                   if coset_sumset([(squares, x) for x in triple], n) != full)

    def _mixed_cosets(self, p):
        n = p['n']
        squares = build(KIND_U_SQUARED, n)
        cosets = (squares.members, tuple(sorted(complement_in_units(squares))))
        full = frozenset(range(n))
        misses = 0
        for triple in p['triples']:
            for choice in product((0, 1), repeat=3):
                pairs = [(cosets[c], x) for c, x in zip(choice, triple)]
                if coset_sumset(pairs, n) != full:
                    misses += 1
        return misses

    def _zero_sum_seq(self, p):
        return is_zero_sum_seq(p['terms'], parse_weight_spec(p['spec'], p['n']))

    def _monotonicity(self, p):
        pairs = []
        for n, small_spec, large_spec in p['pairs']:
            pairs.append((parse_weight_spec(small_spec, n), self.record(n, small_spec),
                          parse_weight_spec(large_spec, n), self.record(n, large_spec)))
        return len(monotonicity_violations(pairs))

    def _report(self, p):
        weights = parse_weight_spec(p['spec'], p['n'])
        report = enumerate_extremal(p['n'], weights, self.budget, self.jobs,
                                    record=self.record(p['n'], p['spec']))
        if report.partial:
            raise _NotExact(f"extremal enumeration for {p['spec']} mod {p['n']} is partial")
        return report

    def _extremal_classes(self, p):
        return len(self._report(p).classes)

    def _extremal_unmatched(self, p):
        report = self._report(p)
        if not report.classes or not report.covered:
            return -1
        return len(report.unmatched)

    def _extremal_label_missing(self, p):
        report = self._report(p)
        if not report.classes:
            return -1
        return sum(1 for labels in report.labels if p['label'] not in labels)

    def _extremal_converse(self, p):
        weights = parse_weight_spec(p['spec'], p['n'])
        return len(converse_check(weights, self.budget, self.jobs, self._exact(p['n'], p['spec'])))

    def _su(self, p):
        return check_su(p['n'], self.budget, self.jobs)

    def _spot_check(self, p):
        weights = parse_weight_spec(p['spec'], p['n'])
        misses = 0
        for sample in p['samples']:
            try:
                labels = classify_extremal(sample, weights, p['davenport'])
            except InvalidInputError as e:
                Logger.warning(f"Spot-check sample {sample} rejected: {e}")
                labels = []
            if not labels:
                misses += 1
        return misses

    # --- driver ---

    def run_check(self, check: CheckSpec, delta: int = 0) -> CheckOutcome:
        expected = _perturbed(check.expected, delta)
        started = time.time()
        note = ""
        try:
            actual = self._handlers[check.kind](check.params)
        except (_NotExact, BudgetExceededError) as e:
            actual, note = None, f"budget: {e}"
        except DavenportError as e:
            actual, note = None, f"error: {e}"
        elapsed = round((time.time() - started) * 1000.0, 3)
        passed = actual is not None and actual == expected
        outcome = CheckOutcome(check.check_id, expected, actual, passed, elapsed, check.anchor, note)
        if passed:
            Logger.info(f"PASS {check.check_id}")
        else:
            Logger.warning(f"FAIL {check.check_id}: expected {expected}, got {actual} {note}".rstrip())
        return outcome

    def run(self, suite: str, perturb: Optional[Dict[str, int]] = None) -> SuiteResult:
        perturb = perturb or {}
        result = SuiteResult(suite=suite)
        for check in checks_for(suite):
            result.outcomes.append(self.run_check(check, perturb.get(check.check_id, 0)))
        Logger.info(f"Suite {suite}: {len(result.outcomes) - len(result.failures)}/{len(result.outcomes)} passed")
        return result


def run_suite(suite: str, budget: Optional[Budget] = None, jobs: int = 1,
              perturb: Optional[Dict[str, int]] = None, cache=None) -> SuiteResult:
    return SuiteRunner(budget, jobs, cache).run(suite, perturb)
