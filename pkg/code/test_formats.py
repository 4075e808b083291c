import io
import json

import numpy as np
import pytest

from formats import *

h = 1 / np.sqrt(2)


def test_state_json( ):
    r = random_density(3, 4)
    assert(state_from_json(state_to_json(r)) == r)
    again = state_from_json(json.loads(json.dumps(state_to_json(r, as_matrix=True))))
    assert(np.allclose(again.coeffs, r.coeffs, atol=1e-13)), "matrix form does not reproduce the coefficients"

    mixed = state_from_json({"dim": 2, "matrix": [[{"re": 0.5, "im": 0}, {"re": 0, "im": 0}], [{"re": 0, "im": 0}, {"re": 0.5}]]})
    assert(np.allclose(mixed.coeffs, [h, 0, 0, 0], atol=1e-15))

def test_state_json_errors( ):
    bad = [
        [1, 2, 3, 4],
        {"dim": 2},
        {"dim": 2, "coeffs": [h, 0, 0, 0], "matrix": []},
        {"dim": 3, "coeffs": [h, 0, 0, 0]},
        {"coeffs": [h, 0, 0]},
        {"coeffs": ["a", 0, 0, 0]},
        {"matrix": [[{"re": 1}], [{"re": 0}, {"re": 0}]]},
        {"matrix": [[{"re": 1}, {"im": 0}], [{"re": 0}, {"re": 0}]]},
        {"matrix": [[{"re": 1}]]},
        {"coeffs": [h, float("nan"), 0, 0]},
        {"coeffs": [h, None, 0, 0]},
        {"matrix": [[{"re": float("inf")}, {"re": 0}], [{"re": 0}, {"re": 0}]]},
    ]
    for obj in bad:
        with pytest.raises(FormatError):
            state_from_json(obj)
    with pytest.raises(NotHermitian):
        state_from_json({"matrix": [[{"re": 1}, {"re": 1}], [{"re": 0}, {"re": 0}]]})

def test_state_set_json( ):
    states = random_state_set(2, 4, 9)
    obj = state_set_to_json(states)
    assert(obj["dim"] == 2 and len(obj["states"]) == 4 and obj["labels"][0] == "ginibre-9-0")
    again = state_set_from_json(obj)
    assert(all(a == b for a, b in zip(again, states)) and again.labels == states.labels)
    for bad in [{"states": []}, {"dim": 2}, {"dim": 3, "states": obj["states"]},
                {"states": obj["states"], "labels": ["only one"]},
                {"states": obj["states"][:1] + [state_to_json(random_density(3, 1))]}]:
        with pytest.raises(FormatError):
            state_set_from_json(bad)

def test_target_json( ):
    r = random_density(2, 1)
    assert(target_from_json(state_to_json(r)) == r)
    assert(target_from_json(state_set_to_json(StateSet([r]))) == r)
    with pytest.raises(FormatError):
        target_from_json(state_set_to_json(random_state_set(2, 2, 1)))

def test_files( tmp_path ):
    path = tmp_path / "set.json"
    states = random_state_set(3, 3, 2)
    write_json(state_set_to_json(states), path)
    assert(all(a == b for a, b in zip(load_state_set(path), states)))
    path.write_text("{ not json")
    with pytest.raises(FormatError):
        load_state_set(path)
    path.write_bytes(b"{\"dim\": 2, \"coeffs\": [0.7\xff]}")
    with pytest.raises(FormatError):
        load_state_set(path)

def test_fixture_json( ):
    obj = fixture_to_json(get_fixture("example-iii"))
    assert(obj["name"] == "example-iii" and len(obj["states"]) == 15)
    assert(sorted(obj["targets"]) == ["r01-1", "r01-2", "r02"])
    assert(len(obj["notes"]) == 1)
    assert(len(state_set_from_json(obj)) == 15), "a fixture dump is also a state set file"

def test_sweep_csv( ):
    records = [
        SweepRecord(0.0, 0.0123456789012345, 2, (0, 3), (0.25, 0.75)),
        SweepRecord(0.5, 1e-20, 1, (4,), (1.0,)),
    ]
    stream = io.StringIO()
    write_sweep_csv(records, stream)
    text = stream.getvalue()
    assert(text.splitlines()[0] == "k,distance,minimal_n,support,weights")
    assert(text.splitlines()[1] == "0,0.0123456789012,2,0;3,0.25;0.75")
    again = read_sweep_csv(io.StringIO(text))
    assert(len(again) == 2 and again[1].support == (4,) and again[1].weights == (1.0,))
    assert(abs(again[0].distance - records[0].distance) <= 1e-14)

    with pytest.raises(FormatError):
        read_sweep_csv(io.StringIO("k,distance\n0,1\n"))
    with pytest.raises(FormatError):
        read_sweep_csv(io.StringIO("k,distance,minimal_n,support,weights\n0,1,x,0,1\n"))
    with pytest.raises(FormatError):
        read_sweep_csv(io.StringIO("k,distance,minimal_n,support,weights\n0,1,2,0;1,1\n"))

def test_sweep_csv_resolves( ):
    fixture = get_fixture("example-ii")
    family = fixture.family("r01-3")
    records = minimal_support_profile(family, fixture.states, uniform_grid(6))
    stream = io.StringIO()
    write_sweep_csv(records, stream)
    for row in read_sweep_csv(io.StringIO(stream.getvalue())):
        solution = solve(interpolate(family, row.k), fixture.states)
        assert(abs(solution.distance - row.distance) <= 1e-9), "CSV row does not reproduce its distance"
        assert(solution.support == row.support)

def test_solution_report( ):
    states = StateSet([CoefficientVector([h, 0, 0, h]), CoefficientVector([h, 0, 0, -h])], ["up", "down"])
    solution = solve(CoefficientVector([h, 0, 0, 0]), states)
    report = solution_report(solution, states.labels)
    assert(report["support"] == [0, 1] and report["support_labels"] == ["up", "down"])
    assert(report["minimal_n"] == 2 and report["certified"] and not report["fallback"])
    assert(sum(report["case_trace"].values()) == report["evaluated_supports"])
    assert(json.loads(dumps(report)) == report)
