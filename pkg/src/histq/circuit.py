"""Circuit netlist: wires, gate instances, and wire classification.

A circuit is a set of named wires plus gates whose legs bind to wires.  Every
wire is a segment with two ends; each end is either attached to a gate leg or
open at the circuit boundary.  Directed legs claim ends (an output leg
produces, an input leg consumes), control legs tap a wire anywhere along it,
and symmetric legs fill whichever ends are still open — extra symmetric
attachments act as taps.

A wire is *external* when at least one of its ends is at the boundary: either
declared (``in``/``out``, with or without a pinned bit) or left unfilled by
gate legs.  External wire values come from the boundary; internal wires take
both values, one assignment per history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import UnboundWire, ValidationError
from .gates import BUILTIN, GateDef, Role, check_unitary, phase_gate


@dataclass(frozen=True)
class Wire:
    name: str
    in_bound: bool = False          # begins at the circuit boundary
    in_value: int | None = None     # pinned input bit, if any
    out_bound: bool = False
    out_value: int | None = None

    def __post_init__(self):
        if self.in_value is not None and not self.in_bound:
            object.__setattr__(self, "in_bound", True)
        if self.out_value is not None and not self.out_bound:
            object.__setattr__(self, "out_bound", True)


@dataclass(frozen=True)
class GateInstance:
    gate: GateDef
    wires: tuple[str, ...]
    negs: tuple[bool, ...] = ()  # per-leg complemented reads (from NOT-merges)

    def __post_init__(self):
        if len(self.wires) != self.gate.n_legs:
            raise ValidationError(
                f"gate {self.gate.name} has {self.gate.n_legs} legs, got "
                f"{len(self.wires)} wires")
        if not self.negs:
            object.__setattr__(self, "negs", (False,) * self.gate.n_legs)
        elif len(self.negs) != self.gate.n_legs:
            raise ValidationError("negation flags must match leg count")


@dataclass(frozen=True)
class WireEnds:
    """Resolved end attachments for one wire."""
    in_boundary: bool
    in_value: int | None
    out_boundary: bool
    out_value: int | None
    producer: tuple[int, int] | None   # (gate index, leg index) filling the begin end
    consumer: tuple[int, int] | None
    taps: tuple[tuple[int, int], ...]

    @property
    def internal(self) -> bool:
        return not (self.in_boundary or self.out_boundary)


class Circuit:
    """Immutable-by-convention netlist.  Wires keep declaration order, which
    fixes bit significance everywhere (first declared = most significant)."""

    def __init__(self, wires: Sequence[Wire], gates: Sequence[GateInstance],
                 mode: str = "net", norm_shift: int = 0):
        self.wires: tuple[Wire, ...] = tuple(wires)
        self.gates: tuple[GateInstance, ...] = tuple(gates)
        self.mode = mode
        self.norm_shift = int(norm_shift)
        names = [w.name for w in self.wires]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"duplicate wire declaration: {', '.join(dup)}")
        self._index = {w.name: w for w in self.wires}
        for g in self.gates:
            for wname in g.wires:
                if wname not in self._index:
                    raise ValidationError(
                        f"gate {g.gate.name} bound to undeclared wire {wname}")

    def wire(self, name: str) -> Wire:
        return self._index[name]

    def has_wire(self, name: str) -> bool:
        return name in self._index

    def replace(self, wires=None, gates=None, norm_shift=None) -> "Circuit":
        return Circuit(self.wires if wires is None else wires,
                       self.gates if gates is None else gates,
                       self.mode,
                       self.norm_shift if norm_shift is None else norm_shift)

    @cached_property
    def total_norm_exponent(self) -> int:
        return self.norm_shift + sum(g.gate.norm_exponent for g in self.gates)

    @cached_property
    def attachments(self) -> dict[str, list[tuple[int, int, Role]]]:
        att: dict[str, list[tuple[int, int, Role]]] = {w.name: [] for w in self.wires}
        for gi, g in enumerate(self.gates):
            for li, wname in enumerate(g.wires):
                att[wname].append((gi, li, g.gate.legs[li]))
        return att

    @cached_property
    def ends(self) -> dict[str, WireEnds]:
        out: dict[str, WireEnds] = {}
        for w in self.wires:
            producers = [(gi, li) for gi, li, r in self.attachments[w.name] if r is Role.OUT]
            consumers = [(gi, li) for gi, li, r in self.attachments[w.name] if r is Role.IN]
            syms = [(gi, li) for gi, li, r in self.attachments[w.name] if r is Role.SYM]
            taps = [(gi, li) for gi, li, r in self.attachments[w.name] if r is Role.CTRL]
            producer = producers[0] if producers else None
            consumer = consumers[0] if consumers else None
            # symmetric legs fill open ends, begin side first; leftovers tap
            if producer is None and not w.in_bound and syms:
                producer = syms.pop(0)
            if consumer is None and not w.out_bound and syms:
                consumer = syms.pop(0)
            taps += producers[1:] + consumers[1:] + syms
            out[w.name] = WireEnds(
                in_boundary=w.in_bound or producer is None,
                in_value=w.in_value,
                out_boundary=w.out_bound or consumer is None,
                out_value=w.out_value,
                producer=producer, consumer=consumer, taps=tuple(taps))
        return out

    @cached_property
    def input_wires(self) -> tuple[Wire, ...]:
        """Wires with a boundary begin end, declaration order."""
        return tuple(w for w in self.wires if self.ends[w.name].in_boundary)

    @cached_property
    def output_wires(self) -> tuple[Wire, ...]:
        return tuple(w for w in self.wires if self.ends[w.name].out_boundary)

    def structural_key(self):
        return (tuple((w.name, w.in_bound, w.in_value, w.out_bound, w.out_value)
                      for w in self.wires),
                tuple((g.gate.structural_key(), g.wires, g.negs) for g in self.gates),
                self.norm_shift)


def classify_wires(c: Circuit) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Partition wire names into (internal, external), each in declaration
    order.  Internal wires have both ends on gate legs; external wires touch
    the circuit boundary somewhere."""
    internal, external = [], []
    for w in c.wires:
        (internal if c.ends[w.name].internal else external).append(w.name)
    return tuple(internal), tuple(external)


def validate(c: Circuit) -> list[str]:
    """Structural diagnostics; an empty list means the circuit is well formed."""
    diags: list[str] = []
    for w in c.wires:
        att = c.attachments[w.name]
        producers = sum(1 for _, _, r in att if r is Role.OUT) + (1 if w.in_bound else 0)
        consumers = sum(1 for _, _, r in att if r is Role.IN) + (1 if w.out_bound else 0)
        if producers > 1:
            diags.append(f"wire {w.name}: more than one producer"
                         + (" (boundary binding plus gate output)" if w.in_bound else ""))
        if consumers > 1:
            diags.append(f"wire {w.name}: more than one consumer"
                         + (" (boundary binding plus gate input)" if w.out_bound else ""))
    for gi, g in enumerate(c.gates):
        ins = len(g.gate.leg_indices(Role.IN))
        outs = len(g.gate.leg_indices(Role.OUT))
        if ins != outs:
            diags.append(f"gate {gi} ({g.gate.name}): {ins} inputs vs {outs} outputs")
            continue
        if g.gate.is_matrix_style:
            dev = check_unitary(g.gate)
            if dev > 1e-10:
                diags.append(f"gate {gi} ({g.gate.name}): not unitary "
                             f"(deviation {dev:.2e})")
    return diags


def gate_factor(g: GateInstance, history: Mapping[str, int]) -> complex:
    """Listed tensor entry selected by the wire values this gate reads.

    The gate's normalization exponent is bookkept separately; structural zeros
    reject the history outright.
    """
    idx = tuple(int(history[w]) ^ int(n) for w, n in zip(g.wires, g.negs))
    return complex(g.gate.entries[idx])


@dataclass(frozen=True)
class Amplitude:
    """Sum of listed history products plus the circuit's normalization
    exponent.  ``resolved()`` applies the single 2^(-K/2) scaling."""
    value: complex
    norm_exponent: int

    def resolved(self) -> complex:
        k = self.norm_exponent
        s = math.ldexp(1.0, -(k // 2))
        if k % 2:
            s *= math.sqrt(0.5)
        return self.value * s


@dataclass(frozen=True)
class BoundaryAssignment:
    """Bits supplied at boundary ends: wire name -> bit, per end."""
    in_bits: Mapping[str, int] = field(default_factory=dict)
    out_bits: Mapping[str, int] = field(default_factory=dict)


def resolve_boundary(c: Circuit, b: BoundaryAssignment,
                     require_all: bool = True) -> dict[str, int] | None:
    """Combine pinned and supplied bits into one value per external wire.

    Returns None when some wire receives two different values — every history
    is then rejected and the amplitude is exactly zero.  Raises UnboundWire if
    ``require_all`` and a boundary end has no value from either source.
    """
    for name in b.in_bits:
        if not c.has_wire(name):
            raise UnboundWire(f"no wire named {name}")
        if not c.ends[name].in_boundary:
            raise ValidationError(f"wire {name} has no boundary input end")
    for name in b.out_bits:
        if not c.has_wire(name):
            raise UnboundWire(f"no wire named {name}")
        if not c.ends[name].out_boundary:
            raise ValidationError(f"wire {name} has no boundary output end")
    values: dict[str, int] = {}
    conflict = False
    missing: list[str] = []
    for w in c.wires:
        e = c.ends[w.name]
        if e.internal:
            continue
        got: list[int] = []
        if e.in_boundary:
            if w.name in b.in_bits:
                got.append(int(b.in_bits[w.name]))
            if e.in_value is not None:
                got.append(e.in_value)
            if w.name not in b.in_bits and e.in_value is None:
                missing.append(f"{w.name}:in")
        if e.out_boundary:
            if w.name in b.out_bits:
                got.append(int(b.out_bits[w.name]))
            if e.out_value is not None:
                got.append(e.out_value)
            if w.name not in b.out_bits and e.out_value is None:
                missing.append(f"{w.name}:out")
        if got:
            if any(v != got[0] for v in got):
                conflict = True
            values[w.name] = got[0]
    if require_all and missing:
        raise UnboundWire("unbound external wire ends: " + ", ".join(missing))
    return None if conflict else values


# ---------------------------------------------------------------------------
# sequential descriptions

@dataclass(frozen=True)
class SeqLine:
    name: str
    in_value: int | None = None
    out_value: int | None = None


@dataclass(frozen=True)
class SeqOp:
    gate: GateDef
    qubits: tuple[str, ...]


@dataclass(frozen=True)
class SeqDescription:
    lines: tuple[SeqLine, ...]
    ops: tuple[SeqOp, ...]


def lower_sequential(desc: SeqDescription) -> Circuit:
    """Cut each qubit line into wire segments at the gates that act on it.

    Segment k of line q is named ``q<k>``; control and symmetric legs attach
    to the current segment without cutting it.
    """
    names = [ln.name for ln in desc.lines]
    if len(set(names)) != len(names):
        raise ValidationError("duplicate qubit line")
    current: dict[str, str] = {}
    counts: dict[str, int] = {}
    wires: list[Wire] = []
    order: list[str] = []   # wire creation order, grouped per line at the end

    def seg(line: str) -> str:
        return f"{line}{counts[line]}"

    for ln in desc.lines:
        counts[ln.name] = 0
        current[ln.name] = seg(ln.name)
    segments: dict[str, list[str]] = {ln.name: [current[ln.name]] for ln in desc.lines}

    gates: list[GateInstance] = []
    for op in desc.ops:
        for q in op.qubits:
            if q not in current:
                raise ValidationError(f"gate {op.gate.name} names unknown line {q}")
        slots = op.gate.qubit_slots()
        if len(slots) != len(op.qubits):
            raise ValidationError(
                f"gate {op.gate.name} takes {len(slots)} qubits, got {len(op.qubits)}")
        binding: list[str | None] = [None] * op.gate.n_legs
        for slot, q in zip(slots, op.qubits):
            if slot[0] in ("ctrl", "sym"):
                binding[slot[1]] = current[q]
            else:
                _, in_leg, out_leg = slot
                binding[in_leg] = current[q]
                counts[q] += 1
                nxt = seg(q)
                binding[out_leg] = nxt
                current[q] = nxt
                segments[q].append(nxt)
        gates.append(GateInstance(op.gate, tuple(binding)))

    seen: set[str] = set()
    for ln in desc.lines:
        first, last = segments[ln.name][0], segments[ln.name][-1]
        for s in segments[ln.name]:
            if s in seen:
                raise ValidationError(f"wire name collision: {s}")
            seen.add(s)
            wires.append(Wire(
                s,
                in_bound=(s == first), in_value=ln.in_value if s == first else None,
                out_bound=(s == last), out_value=ln.out_value if s == last else None))
    # a line both starts and ends at the boundary even if gates cut it in
    # between; single-segment lines carry both flags on one wire
    return Circuit(wires, gates, mode="seq")
