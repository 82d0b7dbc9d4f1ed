import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qldpc_map.circuit_io import (
    emit_report, emit_reports, format_gate_circuit, format_rotation_list, parse_gate_circuit,
    parse_report_csv, parse_rotation_list,
)
from qldpc_map.cost import DEFAULT_TABLE, program_failure
from qldpc_map.errors import ParseError
from qldpc_map.pauli import RZ, T_GATE, PauliRotation, PauliString, PbcCircuit


class TestParseGateCircuit:
    def test_basic(self):
        c = parse_gate_circuit("QUBITS 2\nH 0\nCX 0 1\nT 1")
        assert c.n_qubits == 2
        assert [g.name for g in c.gates] == ["H", "CX", "T"]
        assert c.gates[1].qubits == (0, 1)

    def test_rz(self):
        c = parse_gate_circuit("QUBITS 1\nRZ 0.785398 0")
        assert len(c) == 1 and c.gates[0].theta == pytest.approx(0.785398)

    def test_comments_and_case(self):
        c = parse_gate_circuit("# header\nqubits 1  # one\n\nsdg 0\nMeasZ 0\n")
        assert [g.name for g in c.gates] == ["SDG", "MEASZ"]

    def test_cx_same_qubit(self):
        with pytest.raises(ParseError) as err:
            parse_gate_circuit("QUBITS 2\nCX 0 0")
        assert err.value.line == 2

    @pytest.mark.parametrize("text,line,col", [
        ("QUBITS 2\nH 0\nFOO 1", 3, 1),
        ("QUBITS 2\nH 2", 2, 3),
        ("QUBITS 1\nRZ abc 0", 2, 4),
        ("QUBITS 1\nRZ nan 0", 2, 4),
        ("H 0", 1, 1),
        ("QUBITS 2\nCX 0", 2, 1),
    ])
    def test_errors_carry_location(self, text, line, col):
        with pytest.raises(ParseError) as err:
            parse_gate_circuit(text)
        assert (err.value.line, err.value.column) == (line, col)
        assert f"line {line}" in str(err.value)

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_gate_circuit("# nothing\n")

    def test_format_roundtrip(self):
        text = "QUBITS 3\nH 0\nCX 0 2\nRZ 0.125 1\nTDG 2\nMEASZ 0\n"
        c = parse_gate_circuit(text)
        again = parse_gate_circuit(format_gate_circuit(c))
        assert [(g.name, g.qubits, g.theta) for g in again.gates] == [(g.name, g.qubits, g.theta) for g in c.gates]


class TestParseRotationList:
    def test_single(self):
        c = parse_rotation_list("QUBITS 3\nROT pi8 XIZ")
        assert len(c.rotations) == 1
        r = c.rotations[0]
        assert (r.angle, r.weight, r.pauli.letters) == (T_GATE, 1, "XIZ")

    def test_duplicates_merge(self):
        c = parse_rotation_list("QUBITS 3\nROT pi8 XIZ\nROT pi8 XIZ")
        assert len(c.rotations) == 1 and c.rotations[0].weight == 2

    def test_different_angles_do_not_merge(self):
        c = parse_rotation_list("QUBITS 3\nROT pi8 XIZ\nROT rz:0.5 XIZ\nROT pi8 -XIZ")
        assert len(c.rotations) == 3

    def test_weights_and_measurements(self):
        c = parse_rotation_list("QUBITS 2\nROT rz:-0.25 ZZ 4\nMEAS XX\nMEAS -ZI")
        r = c.rotations[0]
        assert r.angle == RZ and r.theta == -0.25 and r.weight == 4
        assert [str(m) for m in c.measurements] == ["+XX", "-ZI"]

    def test_bad_char(self):
        with pytest.raises(ParseError) as err:
            parse_rotation_list("QUBITS 3\nROT pi8 XQZ")
        assert err.value.line == 2

    @pytest.mark.parametrize("body", ["ROT pi8 XX", "ROT pi4 XIZ", "ROT pi8 XIZ 0", "ROT pi8 iXIZ", "FOO XIZ",
                                      "ROT rz:x XIZ", "MEAS"])
    def test_rejects(self, body):
        with pytest.raises(ParseError):
            parse_rotation_list("QUBITS 3\n" + body)

    def test_identity_rotation_is_trivial(self):
        c = parse_rotation_list("QUBITS 2\nROT pi8 II")
        assert c.rotations[0].trivial and not c.rotations[0].support


rotations = st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(
        st.text(alphabet="IXYZ", min_size=n, max_size=n),
        st.booleans(),
        st.one_of(st.none(), st.floats(-10, 10, allow_nan=False)),
        st.integers(1, 5)), max_size=6),
))


class TestRoundTrip:
    @given(rotations)
    def test_parse_format_identity(self, spec):
        n, rows = spec
        seen, rots = set(), []
        for word, neg, theta, w in rows:
            p = PauliString.from_str(("-" if neg else "") + word)
            key = (theta, p)
            if key in seen:
                continue
            seen.add(key)
            kind = RZ if theta is not None else T_GATE
            rots.append(PauliRotation(p, kind, theta, w, trivial=p.is_identity()))
        circuit = PbcCircuit(n, tuple(rots), (PauliString.from_str("Z" * n),))
        again = parse_rotation_list(format_rotation_list(circuit))
        assert again == circuit
        for a, b in zip(again.rotations, circuit.rotations):
            if a.theta is not None:
                assert math.isclose(a.theta, b.theta, rel_tol=0, abs_tol=1e-12)


class TestEmitReport:
    def test_empty_tally(self):
        doc = json.loads(emit_report(program_failure({})))
        assert doc["P_total"] == 0
        assert set(doc["counts"]) >= {"B", "C_routing", "C_synth", "T_inject", "idle"}
        assert all(v == 0 for v in doc["counts"].values())
        assert doc["schema_version"] == 1

    def test_single_routing_measurement(self):
        doc = json.loads(emit_report(program_failure({"C_routing": 1})))
        assert doc["P_non_fixed"] == pytest.approx(1 - (1 - 10 ** -7.4), rel=1e-12)
        assert DEFAULT_TABLE.P_C == pytest.approx(10 ** -7.4)

    def test_schema_fields(self):
        doc = json.loads(emit_report(program_failure({"B": 3}, policy="p", topology="line:2", seed=4)))
        for key in ("policy", "topology", "counts", "P_total", "P_non_fixed", "timesteps", "seed"):
            assert key in doc
        assert (doc["policy"], doc["topology"], doc["seed"]) == ("p", "line:2", 4)

    def test_deterministic_key_order(self):
        r = program_failure({"B": 3, "C_routing": 2})
        text = emit_report(r)
        assert text == emit_report(r)
        assert list(json.loads(text)) == sorted(json.loads(text))

    def test_csv_matches_json(self):
        r = program_failure({"B": 7, "C_routing": 2, "T_inject": 3}, policy="x", topology="line:3", seed=1)
        doc = json.loads(emit_report(r, "json"))
        row = parse_report_csv(emit_report(r, "csv"))[0]
        assert row["policy"] == doc["policy"]
        assert float(row["P_total"]) == doc["P_total"]
        assert float(row["P_non_fixed"]) == doc["P_non_fixed"]
        for k, v in doc["counts"].items():
            assert int(row[f"counts.{k}"]) == v

    def test_many_reports_csv(self):
        rs = [program_failure({"B": i}, policy="p", seed=i) for i in range(3)]
        rows = parse_report_csv(emit_reports(rs, "csv"))
        assert [int(r["counts.B"]) for r in rows] == [0, 1, 2]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report(program_failure({}), "xml")
