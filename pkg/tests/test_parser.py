import math

import pytest

from histq import (ParseError, emit_circuit, equivalent, parse_circuit,
                   validate)
from histq.examples import EXAMPLES, TELEPORTATION_TEXT
from histq.parser import parse_theta


def perr(text):
    with pytest.raises(ParseError) as ei:
        parse_circuit(text)
    return ei.value


def test_teleportation_structure():
    c = parse_circuit(TELEPORTATION_TEXT)
    assert c.mode == "seq"
    assert [g.gate.name for g in c.gates] == ["H", "CNOT", "CNOT", "H", "CZ", "CNOT"]
    names = [w.name for w in c.wires]
    assert names == ["x0", "x1", "b0", "b1", "b2", "c0", "c1", "c2", "c3"]
    assert c.wire("b0").in_value == 0 and c.wire("c0").in_value == 0
    assert c.wire("x0").in_value is None
    assert validate(c) == []


def test_header_enforced():
    e = perr("mode net\nwire a\n")
    assert e.line == 1 and "version 1" in str(e)
    e = perr("version 1\nwire a\n")
    assert "mode" in str(e)
    e = perr("version 2\nmode net\n")
    assert "version 1" in str(e)


def test_line_numbers_are_one_based():
    e = perr("version 1\nmode net\nwire a\ngate NOPE a\n")
    assert e.line == 4 and "unknown gate" in str(e)


def test_wire_and_gate_diagnostics():
    assert "declared twice" in str(perr("version 1\nmode net\nwire a\nwire a\n"))
    assert "undeclared wire" in str(
        perr("version 1\nmode net\nwire a\nwire b\ngate H a c\n"))
    assert "has 2 legs" in str(
        perr("version 1\nmode net\nwire a\ngate H a\n"))
    assert "net-mode directive" in str(
        perr("version 1\nmode seq\nqubit a\nwire b\n"))
    assert "seq-mode directive" in str(
        perr("version 1\nmode net\nqubit a\n"))


def test_phase_name_gets_a_hint():
    e = perr("version 1\nmode net\nwire a\ngate PHASE a\n")
    assert "phase" in str(e) and "directive" in str(e)


def test_theta_forms():
    assert parse_theta("pi", 1) == math.pi
    assert parse_theta("-pi", 1) == -math.pi
    assert parse_theta("pi/2", 1) == math.pi / 2
    assert parse_theta("-pi/4", 1) == -math.pi / 4
    assert parse_theta("0.7", 1) == 0.7
    with pytest.raises(ParseError):
        parse_theta("pie", 1)
    with pytest.raises(ParseError):
        parse_theta("pi/0", 1)


def test_phase_directive():
    c = parse_circuit("version 1\nmode net\nwire a in out\nwire b in out\n"
                      "phase pi/2 a b\n")
    g = c.gates[0].gate
    assert g.param == math.pi / 2 and g.n_legs == 2
    assert g.entries[1, 1] == 1j


def test_complemented_reads_net_only():
    c = parse_circuit("version 1\nmode net\nwire a in out\nwire b in\nwire c out\n"
                      "gate CNOT ~a b c\n")
    assert c.gates[0].negs == (True, False, False)
    e = perr("version 1\nmode seq\nqubit a\nqubit b\napply CNOT ~a b\n")
    assert "net-mode notation" in str(e)


def test_norm_directive():
    c = parse_circuit("version 1\nmode net\nnorm 3\nwire a in out\n")
    assert c.norm_shift == 3 and c.total_norm_exponent == 3


def test_custom_matrix_block():
    # custom gates bind their output legs first: a is produced, b consumed
    text = ("version 1\nmode net\n"
            "matrix R 1\n0:0 1:0\n1:0 0:0\n"
            "wire a out\nwire b in\ngate R a b\n")
    c = parse_circuit(text)
    assert c.gates[0].gate.entries[0, 1] == 1  # row 0 = output bit 0
    assert c.ends["a"].producer == (0, 0) and c.ends["b"].consumer == (0, 1)
    assert validate(c) == []


def test_custom_matrix_must_be_unitary():
    e = perr("version 1\nmode net\nmatrix B 1\n1:0 1:0\n0:0 1:0\nwire a in\n")
    assert e.line == 3 and "not unitary" in str(e)


def test_matrix_row_shape_checked():
    e = perr("version 1\nmode net\nmatrix R 1\n0:0 1:0\n1:0\nwire a in\n")
    assert "entries per row" in str(e) and e.line == 5
    e = perr("version 1\nmode net\nmatrix R 1\n0:0 1:0\n")
    assert "expected 2 rows" in str(e)
    e = perr("version 1\nmode net\nmatrix R 1\nx 1:0\n1:0 0:0\nwire a in\n")
    assert "RE:IM" in str(e)


def test_boundary_bits_checked():
    e = perr("version 1\nmode net\nwire a in=2\n")
    assert "0 or 1" in str(e)
    c = parse_circuit("version 1\nmode net\nwire a in=1 out=0\n")
    assert c.wire("a").in_value == 1 and c.wire("a").out_value == 0


def test_emit_parse_round_trip_teleportation():
    c = parse_circuit(TELEPORTATION_TEXT)
    text = emit_circuit(c)
    c2 = parse_circuit(text)
    assert validate(c2) == []
    ok, dev = equivalent(c, c2)
    assert ok, dev
    # emission is a fixed point
    assert emit_circuit(c2) == text


def test_emit_round_trip_all_examples():
    for name, text in EXAMPLES.items():
        c = parse_circuit(text)
        text2 = emit_circuit(c)
        c2 = parse_circuit(text2)
        assert validate(c2) == [], name
        assert emit_circuit(c2) == text2, name


def test_emit_folds_phase_norms():
    # a lone H becomes one phase line with its normalization on the norm line
    text = ("version 1\nmode net\nnorm 1\n"
            "wire a in\nwire b out\nphase pi a b\n")
    c = parse_circuit(text)
    assert emit_circuit(c) == ("version 1\nmode net\nnorm 1\n"
                               "wire a in\nwire b out\nphase pi a b\n")


def test_comments_and_blank_lines_ignored():
    c = parse_circuit("version 1\n# a comment\nmode net\n\nwire a in out\n")
    assert len(c.wires) == 1
