import math
import random

import pytest

from histq import (BUILTIN, Circuit, GateInstance, InterfaceMismatch, Wire,
                   apply_passes, canonicalize, classify_wires,
                   compute_constants, drop_dead_controlled_gates, equivalent,
                   interface, parse_circuit, phase_gate, propagate_constants,
                   short_xor_constant, validate)
from histq.examples import TELEPORTATION_TEXT
from histq.parser import emit_circuit

from conftest import random_circuit

PROPAGATED_TELEPORT = """\
version 1
mode net
norm 2
wire x0 in
wire x1 out
wire b1
wire b2 out
wire c3 out
gate XOR3 b1 x0 x1
phase pi b1 b2
phase pi b2 b1
gate XOR3 x1 b1 c3
"""


def net(text):
    return parse_circuit("version 1\nmode net\n" + text)


def test_cnot_becomes_xor():
    c = net("wire a in out\nwire b in\nwire d out\ngate CNOT a b d\n")
    cc = canonicalize(c)
    assert [g.gate.name for g in cc.gates] == ["XOR3"]
    assert cc.gates[0].wires == ("a", "b", "d")
    ok, dev = equivalent(c, cc)
    assert ok and dev == 0.0


def test_hadamard_becomes_phase():
    c = net("wire a in\nwire b out\ngate H a b\n")
    cc = canonicalize(c)
    g = cc.gates[0].gate
    assert g.name == "PHASE" and g.param == math.pi and g.norm_exponent == 1
    assert cc.gates[0].wires == ("a", "b")
    ok, dev = equivalent(c, cc)
    assert ok, dev


def test_diagonal_gates_fuse_their_wire():
    c = parse_circuit("version 1\nmode seq\nqubit a\n"
                      "apply H a\napply Z a\napply H a\n")
    cc = canonicalize(c)
    assert [w.name for w in cc.wires] == ["a0", "a1", "a3"]
    shapes = [(g.gate.name, g.gate.n_legs, g.wires) for g in cc.gates]
    assert shapes == [("PHASE", 2, ("a0", "a1")),
                      ("PHASE", 1, ("a1",)),
                      ("PHASE", 2, ("a1", "a3"))]
    ok, dev = equivalent(c, cc)
    assert ok, dev


def test_cz_fusion_keeps_control_leg():
    c = parse_circuit("version 1\nmode seq\nqubit a\nqubit b\n"
                      "apply H b\napply CZ a b\napply H b\n")
    cc = canonicalize(c)
    mid = cc.gates[1]
    assert mid.gate.name == "PHASE" and mid.gate.n_legs == 2
    assert mid.wires == ("a0", "b1")
    assert mid.gate.entries[1, 1] == -1
    ok, dev = equivalent(c, cc)
    assert ok, dev


def test_canonicalize_idempotent():
    rng = random.Random(3)
    for _ in range(40):
        c = random_circuit(rng)
        c1 = canonicalize(c)
        c2 = canonicalize(c1)
        assert c2.structural_key() == c1.structural_key()


def test_compute_constants_follows_forced_values():
    c = parse_circuit("version 1\nmode seq\nqubit a in=0\n"
                      "apply X a\napply X a\n")
    known = compute_constants(c)
    assert known == {"a0": 0, "a1": 1, "a2": 0}


def test_compute_constants_through_general_gates():
    # Y forces its output bit even though its entries are not 0/1
    c = parse_circuit("version 1\nmode seq\nqubit a in=1\napply Y a\n")
    assert compute_constants(c) == {"a0": 1, "a1": 0}
    # H forces nothing
    c = parse_circuit("version 1\nmode seq\nqubit a in=1\napply H a\n")
    assert compute_constants(c) == {"a0": 1}


def test_compute_constants_contradiction_is_none():
    c = parse_circuit("version 1\nmode seq\nqubit a in=0 out=0\napply X a\n")
    assert compute_constants(c) is None


def test_compute_constants_leaves_free_ends_alone():
    c = parse_circuit("version 1\nmode seq\nqubit a\napply X a\n")
    assert compute_constants(c) == {}


def test_drop_dead_removes_gate_reading_zero():
    a = Wire("a", in_value=0, out_bound=True)
    b = Wire("b", in_bound=True, out_bound=True)
    c = Circuit((a, b), (GateInstance(phase_gate(math.pi, 2, norm_exponent=1),
                                      ("a", "b")),))
    out, rep = drop_dead_controlled_gates(c)
    assert rep.changed and rep.details["dropped_gates"] == 1
    assert out.gates == () and out.norm_shift == 1
    ok, dev = equivalent(c, out)
    assert ok and dev < 1e-15


def test_drop_dead_trims_leg_reading_one():
    a = Wire("a", in_value=1, out_bound=True)
    b = Wire("b", in_bound=True, out_bound=True)
    c = Circuit((a, b), (GateInstance(phase_gate(0.7, 2), ("a", "b")),))
    out, rep = drop_dead_controlled_gates(c)
    assert rep.details["trimmed_legs"] == 1
    (g,) = out.gates
    assert g.wires == ("b",) and g.gate.n_legs == 1
    assert g.gate.entries[1] == phase_gate(0.7, 1).entries[1]
    ok, dev = equivalent(c, out)
    assert ok, dev


def test_drop_dead_skips_when_interface_would_grow():
    # the phase gate holds b's only attachment: removing it would free
    # b's begin end and change what queries can bind
    a = Wire("a", in_value=0)
    b = Wire("b")
    c = Circuit((a, b), (GateInstance(phase_gate(math.pi, 2), ("a", "b")),))
    out, rep = drop_dead_controlled_gates(c)
    assert not rep.changed and out.structural_key() == c.structural_key()


def test_short_xor_merges_on_constant_zero():
    c = net("wire s in\nwire m\nwire a in=0\nwire t out\n"
            "gate Y s m\ngate XOR3 a m t\n")
    out, rep = short_xor_constant(c)
    assert rep.changed
    assert [g.gate.name for g in out.gates] == ["Y"]
    assert out.gates[0].wires == ("s", "t")
    assert out.gates[0].negs == (False, False)
    assert [w.name for w in out.wires] == ["s", "t"]
    ok, dev = equivalent(c, out)
    assert ok, dev


def test_short_xor_constant_one_complements():
    c = net("wire s in\nwire u\nwire a in=1\nwire t out\n"
            "gate H s u\ngate XOR3 a u t\n")
    out, rep = short_xor_constant(c)
    assert rep.changed and "u->t~1" in rep.details["merged"]
    (g,) = out.gates
    assert g.gate.name == "H" and g.wires == ("s", "t")
    assert g.negs == (False, True)
    ok, dev = equivalent(c, out)
    assert ok, dev


def test_short_xor_skips_two_external_wires():
    # merging u and t would collapse two distinct query ends
    c = net("wire a in=0\nwire u in\nwire t out\ngate XOR3 a u t\n")
    out, rep = short_xor_constant(c)
    assert not rep.changed
    assert out.structural_key() == c.structural_key()


def test_short_xor_skips_interface_growth():
    # dropping the parity gate would leave m's out end open: skipped
    c = net("wire r in\nwire u\nwire s in=0\nwire m\nwire t out\n"
            "gate H r u\ngate Y s m\ngate XOR3 m u t\n")
    before = interface(c)
    out, rep = short_xor_constant(c)
    assert not rep.changed
    assert interface(out) == before


def test_propagate_reaches_teleportation_fixed_point():
    c = parse_circuit(TELEPORTATION_TEXT)
    cc = canonicalize(c)
    out, rep = propagate_constants(cc)
    assert rep.details == {"iterations": 2, "dropped_gates": 1,
                           "trimmed_legs": 0, "merged_wires": 1}
    assert [w.name for w in out.wires] == ["x0", "x1", "b1", "b2", "c3"]
    assert [(g.gate.name, g.wires) for g in out.gates] == [
        ("XOR3", ("b1", "x0", "x1")),
        ("PHASE", ("b1", "b2")),
        ("PHASE", ("b2", "b1")),
        ("XOR3", ("x1", "b1", "c3"))]
    assert out.norm_shift == 1 and out.total_norm_exponent == 2
    assert classify_wires(out)[0] == ("b1",)
    ok, dev = equivalent(c, out)
    assert ok and dev == 0.0
    assert emit_circuit(out) == PROPAGATED_TELEPORT


def test_emitted_fixed_point_reparses():
    c = parse_circuit(PROPAGATED_TELEPORT)
    assert validate(c) == []
    assert emit_circuit(c) == PROPAGATED_TELEPORT
    ok, dev = equivalent(c, parse_circuit(TELEPORTATION_TEXT))
    assert ok, dev


def test_apply_passes_runs_in_order():
    c = parse_circuit(TELEPORTATION_TEXT)
    out, reports = apply_passes(c, ["canonicalize", "propagate"])
    assert [r.name for r in reports] == ["canonicalize", "propagate"]
    assert all(r.changed for r in reports)
    lines = reports[1].lines()
    assert lines[0] == "pass=propagate changed=1"
    with pytest.raises(ValueError):
        apply_passes(c, ["no-such-pass"])


def test_every_pass_preserves_amplitudes():
    rng = random.Random(11)
    names = ["canonicalize", "drop-dead", "short-xor", "propagate"]
    for _ in range(60):
        c = random_circuit(rng)
        for name in names:
            out, _ = apply_passes(c, [name])
            ok, dev = equivalent(c, out, rng=random.Random(5))
            assert ok, (name, dev)


def test_equivalent_is_positional():
    a = net("wire p in out\n")
    b = net("wire z in out\n")
    ok, dev = equivalent(a, b)
    assert ok and dev == 0.0


def test_equivalent_detects_difference():
    a = net("wire p in\nwire q out\ngate X p q\n")
    b = net("wire p in\nwire q out\ngate I p q\n")
    ok, dev = equivalent(a, b)
    assert not ok and dev == 1.0


def test_equivalent_rejects_mismatched_interfaces():
    a = net("wire p in out\n")
    b = net("wire p in out\nwire q in out\n")
    with pytest.raises(InterfaceMismatch):
        equivalent(a, b)
