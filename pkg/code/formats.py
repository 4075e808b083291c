import csv
import json
import sys

import numpy as np

from fixtures import *
from search import *

SWEEP_FIELDS = ["k", "distance", "minimal_n", "support", "weights"]


def number( x ):
    return f"{x:.12g}"

def state_to_json( r, as_matrix=False ):
    if as_matrix:
        matrix = r.to_matrix()
        rows = [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in matrix]
        return {"dim": r.dim, "matrix": rows}
    return {"dim": r.dim, "coeffs": [float(c) for c in r.coeffs]}

def state_from_json( obj ):
    if not isinstance(obj, dict):
        raise FormatError(f"a state must be a JSON object, got {type(obj).__name__}")
    if ("coeffs" in obj) == ("matrix" in obj):
        raise FormatError("a state needs exactly one of 'coeffs' or 'matrix'")
    try:
        if "coeffs" in obj:
            coeffs = np.array(obj["coeffs"], dtype=np.float64)
            if not np.all(np.isfinite(coeffs)):
                raise FormatError("state coefficients must be finite numbers")
            r = CoefficientVector(coeffs)
        else:
            matrix = np.array([[complex(entry["re"], entry.get("im", 0.0)) for entry in row] for row in obj["matrix"]])
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise FormatError(f"state matrix must be square, got shape {matrix.shape}")
            if not np.all(np.isfinite(matrix)):
                raise FormatError("state matrix entries must be finite numbers")
            r = CoefficientVector.from_matrix(matrix)
    except InvalidDimension as error:
        raise FormatError(str(error)) from None
    except ApproxError:
        raise
    except (TypeError, KeyError, ValueError) as error:
        raise FormatError(f"malformed state: {error}") from None
    if "dim" in obj and obj["dim"] != r.dim:
        raise FormatError(f"declared dim {obj['dim']} does not match the data (d = {r.dim})")
    return r

def state_set_to_json( state_set, as_matrix=False ):
    obj = {"dim": state_set.dim, "states": [state_to_json(r, as_matrix) for r in state_set]}
    if state_set.labels is not None:
        obj["labels"] = list(state_set.labels)
    return obj

def state_set_from_json( obj ):
    if not isinstance(obj, dict) or not isinstance(obj.get("states"), list):
        raise FormatError("a state set must be a JSON object with a 'states' list")
    if len(obj["states"]) == 0:
        raise FormatError("a state set needs at least one state")
    members = [state_from_json(s) for s in obj["states"]]
    try:
        state_set = StateSet(members, obj.get("labels"))
    except (DimensionMismatch, InvalidParameter) as error:
        raise FormatError(str(error)) from None
    if "dim" in obj and obj["dim"] != state_set.dim:
        raise FormatError(f"declared dim {obj['dim']} does not match the states (d = {state_set.dim})")
    return state_set

def target_from_json( obj ):
    """A target is a single state, or a state set holding exactly one state."""
    if isinstance(obj, dict) and "states" in obj:
        state_set = state_set_from_json(obj)
        if len(state_set) != 1:
            raise FormatError(f"a target file holds one state, found {len(state_set)}")
        return state_set[0]
    return state_from_json(obj)

def read_json( path ):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as error:
        raise FormatError(f"{path}: {error}") from None

def dumps( obj ):
    return json.dumps(obj, indent=2, sort_keys=True)

def write_json( obj, path=None ):
    text = dumps(obj) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)

def load_state_set( path ):
    return state_set_from_json(read_json(path))

def load_target( path ):
    return target_from_json(read_json(path))

def fixture_to_json( fixture ):
    obj = state_set_to_json(fixture.states)
    obj["name"] = fixture.name
    obj["targets"] = {name: state_to_json(r) for name, r in fixture.targets().items()}
    obj["notes"] = list(fixture.notes)
    return obj

def solution_report( solution, labels=None ):
    report = {
        "distance": solution.distance,
        "weights": [float(w) for w in solution.weights],
        "support": list(solution.support),
        "minimal_n": solution.minimal_n,
        "evaluated_supports": solution.evaluated_supports,
        "certified": solution.certified,
        "fallback": solution.fallback,
        "case_trace": solution.trace_summary(),
    }
    if labels is not None:
        report["support_labels"] = [labels[i] for i in solution.support]
    return report

def sweep_row( record ):
    return {
        "k": number(record.k),
        "distance": number(record.distance),
        "minimal_n": str(record.minimal_n),
        "support": ";".join(str(i) for i in record.support),
        "weights": ";".join(number(w) for w in record.weights),
    }

def write_sweep_csv( records, stream ):
    writer = csv.DictWriter(stream, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(sweep_row(record))

def read_sweep_csv( stream ):
    reader = csv.DictReader(stream)
    if reader.fieldnames != SWEEP_FIELDS:
        raise FormatError(f"sweep header must be {','.join(SWEEP_FIELDS)}, got {reader.fieldnames}")
    records = []
    for line, row in enumerate(reader, start=2):
        try:
            support = tuple(int(i) for i in row["support"].split(";") if i != "")
            weights = tuple(float(w) for w in row["weights"].split(";") if w != "")
            records.append(SweepRecord(float(row["k"]), float(row["distance"]), int(row["minimal_n"]), support, weights))
        except (ValueError, AttributeError) as error:
            raise FormatError(f"sweep line {line}: {error}") from None
        if len(support) != len(weights):
            raise FormatError(f"sweep line {line}: {len(support)} support indices but {len(weights)} weights")
    return records
