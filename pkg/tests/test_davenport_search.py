import pytest

from services.davenport_search import (
    STATUS_EXACT,
    STATUS_LOWER_BOUND,
    Budget,
    ConstantRecord,
    canonical_chain_witness,
    dadd_witness,
    davenport,
    e_constant,
    first_term_candidates,
    lower_bound_witness,
    monotonicity_violations,
    residue_pair_witness,
)
from services.errors import BudgetExceededError, InvalidInputError
from services.weight_sets import KIND_EXPLICIT, KIND_Q, KIND_S, KIND_U, build, parse_weight_spec
from services.zerosum_engine import has_zero_sum_subseq, is_zero_sum_free

from tests.conftest import brute_davenport


# === AGAINST THE DEFINITION ===

@pytest.mark.parametrize("n,spec", [
    (15, "U"), (15, "S"), (7, "Q"), (11, "Q"), (13, "Q"), (9, "U"), (9, "Usq"), (13, "Usq"),
    (5, "explicit:1"), (6, "explicit:1"), (7, "explicit:1,2"),
])
def test_davenport_matches_brute_force(n, spec):
    weights = parse_weight_spec(spec, n)
    record = davenport(n, weights)
    assert record.is_exact
    assert record.value == brute_davenport(weights.members, n)


@pytest.mark.slow
def test_davenport_matches_brute_force_mod_21():
    weights = parse_weight_spec("S", 21)
    assert davenport(21, weights).value == brute_davenport(weights.members, 21)


def test_classical_davenport_constant():
    assert davenport(5, parse_weight_spec("explicit:1", 5)).value == 5
    assert davenport(6, parse_weight_spec("explicit:1", 6)).value == 6


# === KNOWN VALUES ===

@pytest.mark.parametrize("n,spec,expected", [
    (15, "U", 3), (49, "U", 3), (77, "U", 3),
    (7, "Q", 3), (11, "Q", 3), (13, "Q", 3),
    (7, "S", 3), (11, "S", 3), (77, "S", 3), (49, "S", 3),
    (77, "L:7", 4), (77, "L:11", 4), (15, "S", 4),
])
def test_davenport_values(n, spec, expected):
    weights = parse_weight_spec(spec, n)
    record = davenport(n, weights)
    assert record.status == STATUS_EXACT
    assert record.value == expected
    assert len(record.witness) == expected - 1
    assert is_zero_sum_free(record.witness, weights)


@pytest.mark.slow
@pytest.mark.parametrize("n,spec,expected", [
    (539, "U", 4), (1001, "U", 4), (1001, "S", 4), (539, "S", 5),
    (1001, "L:7", 4), (1001, "L:11", 4), (1001, "L:13", 4),
])
def test_davenport_values_larger_moduli(n, spec, expected):
    record = davenport(n, parse_weight_spec(spec, n))
    assert record.is_exact
    assert record.value == expected


def test_search_is_independent_of_job_count():
    weights = build(KIND_S, 77)
    serial = davenport(77, weights, jobs=1)
    parallel = davenport(77, weights, jobs=2)
    assert serial.value == parallel.value
    assert serial.witness == parallel.witness


def test_exhausted_budget_reports_lower_bound():
    record = davenport(1001, build(KIND_U, 1001), Budget(max_nodes=3))
    assert record.status == STATUS_LOWER_BOUND
    assert not record.is_exact
    assert record.value >= 4
    assert not has_zero_sum_subseq(record.witness, build(KIND_U, 1001))


def test_davenport_rejects_mismatched_modulus():
    with pytest.raises(InvalidInputError):
        davenport(15, build(KIND_U, 21))


def test_first_term_candidates():
    assert first_term_candidates(build(KIND_U, 77)) == [1, 7, 11]
    assert first_term_candidates(build(KIND_S, 15)) == [1, 3, 5]
    assert first_term_candidates(build(KIND_EXPLICIT, 7, values=[1, 2])) == [1, 2, 3, 4, 5, 6]


# === E CONSTANT ===

@pytest.mark.parametrize("n,spec,expected", [(15, "U", 17), (7, "Q", 9), (7, "U", 8), (5, "U", 6)])
def test_e_constant_values(n, spec, expected):
    weights = parse_weight_spec(spec, n)
    record = e_constant(n, weights)
    assert record.is_exact
    assert record.constant_kind == "E"
    assert record.value == expected
    assert record.value - davenport(n, weights).value == n - 1


def test_e_constant_size_guard():
    with pytest.raises(BudgetExceededError):
        e_constant(23, build(KIND_U, 23))
    assert e_constant(23, build(KIND_U, 23), max_n=23, budget=Budget(max_nodes=1)).status == STATUS_LOWER_BOUND


# === WITNESSES ===

def test_canonical_chain_witness():
    assert canonical_chain_witness(539).terms == (1, 7, 49)
    assert canonical_chain_witness(1001).terms == (1, 7, 77)
    assert canonical_chain_witness(7007).terms == (1, 7, 49, 539)
    assert canonical_chain_witness(7).terms == (1,)


def test_residue_pair_witness():
    for p in (7, 11, 13, 101):
        pair = residue_pair_witness(p)
        assert pair[0] == 1
        assert is_zero_sum_free(pair, build(KIND_Q, p))


def test_dadd_witness_products():
    l77 = parse_weight_spec("L:7", 77)
    glued = dadd_witness(77, 7, 11, l77, build(KIND_U, 7), build(KIND_Q, 11), (1,), (1, 9))
    assert glued.terms == (1, 9, 11)

    s539 = build(KIND_S, 539)
    glued = dadd_witness(539, 49, 11, s539, build(KIND_U, 49), build(KIND_Q, 11), (1, 7), (1, 9))
    assert glued.terms == (1, 9, 11, 77)
    assert is_zero_sum_free(glued, s539)


def test_dadd_witness_rejects_bad_inputs():
    s539 = build(KIND_S, 539)
    with pytest.raises(InvalidInputError):
        dadd_witness(539, 49, 11, s539, build(KIND_U, 49), build(KIND_Q, 11), (1, 48), (1, 9))
    with pytest.raises(InvalidInputError):
        dadd_witness(77, 7, 11, build(KIND_U, 77), build(KIND_U, 7), build(KIND_Q, 11), (1,), (1, 9))
    with pytest.raises(InvalidInputError):
        dadd_witness(77, 7, 13, build(KIND_U, 77), build(KIND_U, 7), build(KIND_Q, 13), (1,), (1, 2))


def test_lower_bound_witness_lengths():
    assert len(lower_bound_witness(parse_weight_spec("L:7", 77))) == 3
    assert len(lower_bound_witness(build(KIND_S, 539))) == 4
    assert len(lower_bound_witness(build(KIND_U, 1001))) == 3
    assert lower_bound_witness(build(KIND_Q, 7)).terms == (1, 1)


# === RECORDS AND CONSISTENCY ===

def test_constant_record_dict_round_trip():
    record = ConstantRecord(15, "S", "D", 4, (1, 1, 1), STATUS_EXACT, 1.5, 12)
    data = record.to_dict()
    assert data['witness'] == [1, 1, 1]
    assert ConstantRecord.from_dict(data) == record


def test_monotonicity_violations():
    small, large = build(KIND_S, 77), build(KIND_U, 77)
    good = [(small, ConstantRecord(77, "S", "D", 3, (1, 2), STATUS_EXACT),
             large, ConstantRecord(77, "U", "D", 3, (1, 7), STATUS_EXACT))]
    assert monotonicity_violations(good) == []

    bad = [(small, ConstantRecord(77, "S", "D", 2, (1,), STATUS_EXACT),
            large, ConstantRecord(77, "U", "D", 3, (1, 7), STATUS_EXACT))]
    assert len(monotonicity_violations(bad)) == 1

    bound = [(small, ConstantRecord(77, "S", "D", 2, (1,), STATUS_LOWER_BOUND),
              large, ConstantRecord(77, "U", "D", 3, (1, 7), STATUS_EXACT))]
    assert monotonicity_violations(bound) == []
