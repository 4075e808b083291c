import numpy as np
import pytest
from scipy.linalg import eigvalsh

from fixtures import *
from kkt import *

h = 1 / np.sqrt(2)
zero = CoefficientVector([h, 0, 0, h])
one = CoefficientVector([h, 0, 0, -h])
plus = CoefficientVector([h, h, 0, 0])
y_plus = CoefficientVector([h, 0, h, 0])
mixed = CoefficientVector([h, 0, 0, 0])


def solve_on( r_o, members, support=None ):
    states = StateSet(members)
    support = tuple(range(len(members))) if support is None else support
    return solve_support(build_system(r_o, states, support), r_o, states)

def test_single_state( ):
    states = StateSet([zero])
    system = build_system(one, states, (0,))
    assert(np.array_equal(system.A, [[1.0]]) and np.array_equal(system.B, [1.0])), "K=1 system is the normalization row alone"
    pseudo = solve_support(system, one, states)
    assert(pseudo.feasible and np.array_equal(pseudo.values, [1.0]))
    assert(abs(pseudo.distance - 1) <= 1e-12), "orthogonal pure states are at distance 1"

def test_pairs( ):
    pseudo = solve_on(mixed, [zero, one])
    assert(np.allclose(pseudo.values, [0.5, 0.5], atol=1e-15))
    assert(pseudo.distance <= 1e-30)

    pseudo = solve_on(mixed, [zero, plus])
    assert(np.allclose(pseudo.values, [0.5, 0.5], atol=1e-15))
    assert(abs(pseudo.distance - 0.125) <= 1e-15)
    print("pairs success \\o/")

def test_rank_deficient( ):
    states = StateSet([zero, zero])
    system = build_system(mixed, states, (0, 1))
    assert(system.rank < system.K), "duplicate states must be rank deficient"
    pseudo = solve_support(system, mixed, states)
    assert(pseudo.rank_deficient and not pseudo.feasible and pseudo.outcome == RANK_DEFICIENT)

    pauli = get_fixture("example-ii").states
    system = build_system(mixed, pauli, tuple(range(6)))
    assert(system.rank < 6), "six qubit states cannot give a rank-6 system"
    assert(solve_support(system, mixed, pauli).outcome == RANK_DEFICIENT)

def test_infeasible_sign( ):
    # targets on the line through I/2 and |0>, inside and outside the segment
    target = CoefficientVector([h, 0, 0, 0.9 * h])
    pseudo = solve_on(target, [mixed, zero])
    assert(pseudo.feasible), "target between I/2 and |0> must be feasible"
    target = CoefficientVector([h, 0, 0, -0.5 * h])
    pseudo = solve_on(target, [mixed, zero])
    assert(not pseudo.feasible and pseudo.outcome == INFEASIBLE_SIGN and pseudo.distance is None)
    assert(abs(pseudo.values.sum() - 1) <= 1e-12), "normalization must hold without feasibility"

def test_system_entries( ):
    states = random_state_set(3, 5, 11)
    r_o = random_density(3, 12)
    support = (0, 2, 4)
    system = build_system(r_o, states, support)
    r = [states[i].coeffs for i in support]
    for i in range(2):
        for j in range(3):
            assert(abs(system.A[i, j] - (r[i] - r[2]) @ r[j]) <= 1e-14)
        assert(abs(system.B[i] - (r[i] - r[2]) @ r_o.coeffs) <= 1e-14)
    assert(np.array_equal(system.A[2], [1, 1, 1]) and system.B[2] == 1)
    assert(eigvalsh(system.gram)[0] >= -1e-10), "Hessian must be PSD"

def test_check_support( ):
    states = StateSet([zero, one, plus])
    with pytest.raises(EmptySupport):
        build_system(mixed, states, ())
    with pytest.raises(SupportIndexError):
        build_system(mixed, states, (0, 3))
    with pytest.raises(IndexError):
        build_system(mixed, states, (-1, 0))
    with pytest.raises(InvalidParameter):
        build_system(mixed, states, (1, 0))

def test_closed_k2( ):
    pseudo = closed_k2(mixed, zero, one)
    assert(np.allclose(pseudo.values, [0.5, 0.5], atol=1e-15))
    pseudo = closed_k2(zero, zero, plus)
    assert(pseudo.values[0] == 1), "target equal to r_1 gives p_1 = 1"
    with pytest.raises(DegeneratePair):
        closed_k2(mixed, zero, zero)

    fixture = get_fixture("example-i")
    r_o = fixture.family("r02-1").r_o2
    general = solve_on(r_o, [fixture.states[0], fixture.states[1]])
    closed = closed_k2(r_o, fixture.states[0], fixture.states[1])
    assert(np.allclose(closed.values, general.values, atol=1e-12, rtol=0)), "closed pair formula disagrees with the general solver"
    assert(closed.feasible == general.feasible)

def test_closed_k3( ):
    a, b, c = random_state_set(3, 3, 5)
    pseudo = closed_k3(c, a, b, c)
    assert(np.allclose(pseudo.values, [0, 0, 1], atol=1e-12))
    pseudo = closed_k3(mixed, zero, plus, y_plus)
    assert(np.allclose(pseudo.values, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)), "equilateral triple around I/2"
    middle = CoefficientVector((zero.coeffs + plus.coeffs) / 2)
    with pytest.raises(DegenerateTriple):
        closed_k3(mixed, zero, plus, middle)

    fixture = get_fixture("example-i")
    for variant in fixture.variants:
        r_o = fixture.family(variant).r_o2
        general = solve_on(r_o, list(fixture.states))
        closed = closed_k3(r_o, *fixture.states)
        assert(np.allclose(closed.values, general.values, atol=1e-10, rtol=0)), f"closed triple formula disagrees on {variant}"

def test_closed_forms_random( ):
    checked = 0
    for seed in range(100):
        d = 2 + seed % 2
        states = random_state_set(d, 3, seed)
        r_o = random_density(d, 1000 + seed)
        for support in [(0, 1), (0, 1, 2)]:
            system = build_system(r_o, states, support)
            if np.linalg.cond(system.A) > 1e4:
                continue
            general = solve_support(system, r_o, states)
            members = [states[i] for i in support]
            closed = closed_k2(r_o, *members) if len(support) == 2 else closed_k3(r_o, *members)
            assert(np.allclose(closed.values, general.values, atol=1e-10, rtol=0)), f"closed form mismatch for seed {seed}"
            assert(abs(general.values.sum() - 1) <= 1e-9)
            checked += 1
    assert(checked >= 150), "too many ill-conditioned instances skipped"

def test_stationarity( ):
    pseudo = solve_on(mixed, [zero, plus, y_plus])
    vectors = StateSet([zero, plus, y_plus]).matrix
    gaps = stationarity_gaps(pseudo.weights, vectors, mixed.coeffs)
    assert(np.allclose(gaps, 0, atol=1e-12)), "interior optimum must have equal gradient components"

    # vertex optimum for a target beyond |0>: zero gap on the support, positive elsewhere
    vectors = StateSet([zero, one, plus]).matrix
    beyond = np.array([h, 0, 0, 1.5 * h])
    gaps = stationarity_gaps([1, 0, 0], vectors, beyond)
    assert(np.allclose(gaps, [0, 0.5, 0.25], atol=1e-12)), "wrong directional derivatives at a vertex"

def test_solve_level( ):
    states = random_state_set(3, 6, 21)
    r_o = random_density(3, 22)
    gram, rhs = inner_products(r_o, states)
    supports = np.array([[0, 1, 2], [1, 3, 5], [0, 4, 5]])
    level = solve_level(gram, rhs, states.matrix, r_o.coeffs, supports)
    assert(len(level) == 3)
    for c, support in enumerate(supports):
        single = solve_support(build_system(r_o, states, tuple(support)), r_o, states)
        assert(np.allclose(level.values[c], single.values, atol=1e-14, rtol=0)), "batched and single solves disagree"
        assert(level.outcome(c) == single.outcome)

    # permuting a support permutes the pseudo-probabilities
    permuted = solve_level(gram, rhs, states.matrix, r_o.coeffs, np.array([[2, 0, 1]]))
    assert(np.allclose(permuted.values[0], level.values[0][[2, 0, 1]], atol=1e-12, rtol=0))
    if level.feasible[0]:
        assert(abs(permuted.distance[0] - level.distance[0]) <= 1e-12)
