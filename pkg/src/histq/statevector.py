"""Dense state-vector evaluation for circuits that admit a gate schedule.

A circuit is *sequential* when every gate either moves qubits forward
(matrix-style legs: each input leg is the wire's consumer, each output leg its
producer, controls tap live wires) or is a pure diagonal factor (a symmetric
gate all of whose legs are taps, with unit-modulus entries), and the
producer/consumer graph is acyclic.  Everything else — feedback loops, shared
reads, symmetric gates that claim wire ends — raises NonSequential.

Evaluation applies gates to a (2,)*n amplitude tensor, one axis per live
qubit, and reads the requested output component at the end.  Listed entries
are used throughout; the accumulated normalization exponent is applied once.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import product

import numpy as np

from .circuit import BoundaryAssignment, Circuit, resolve_boundary
from .errors import NonSequential
from .gates import GateDef, Role


@dataclass(frozen=True)
class SeqStep:
    gate_index: int
    kind: str                # "unitary" | "diag"
    positions: tuple[int, ...]
    table: np.ndarray        # 2^m x 2^m matrix, or (2,)*u diagonal tensor


@dataclass(frozen=True)
class SeqPlan:
    n_qubits: int
    order: tuple[int, ...]           # gate indices in schedule order
    steps: tuple[SeqStep, ...]
    out_axes: dict[str, int]         # boundary-out wire -> tensor axis


def _blocked_matrix(d: GateDef) -> np.ndarray:
    """Matrix over (controls..., paired targets...) with controls preserved."""
    ctrl = d.leg_indices(Role.CTRL)
    outs = d.leg_indices(Role.OUT)
    ins = d.leg_indices(Role.IN)
    nc, t = len(ctrl), len(outs)
    ten = np.transpose(d.entries, ctrl + outs + ins).reshape(2 ** nc, 2 ** t, 2 ** t)
    m = np.zeros((2 ** (nc + t), 2 ** (nc + t)), dtype=np.complex128)
    step = 2 ** t
    for cb in range(2 ** nc):
        m[cb * step:(cb + 1) * step, cb * step:(cb + 1) * step] = ten[cb]
    return m


def _diag_tensor(d: GateDef, positions: tuple[int, ...]) -> tuple[tuple[int, ...], np.ndarray]:
    """Reduce a tap gate's entry tensor over repeated positions."""
    uniq: list[int] = []
    slot = []
    for p in positions:
        if p not in uniq:
            uniq.append(p)
        slot.append(uniq.index(p))
    if len(uniq) == len(positions):
        return tuple(uniq), d.entries
    red = np.empty((2,) * len(uniq), dtype=np.complex128)
    for bits in product((0, 1), repeat=len(uniq)):
        red[bits] = d.entries[tuple(bits[s] for s in slot)]
    return tuple(uniq), red


def _flip_matrix(m: np.ndarray, d: GateDef, negs: tuple[bool, ...]) -> np.ndarray:
    """Complemented reads flip bits of the blocked-matrix index.

    A control read through ``~`` flips its bit on both sides; a complemented
    input flips the column bit, a complemented output the row bit.
    """
    ctrl = d.leg_indices(Role.CTRL)
    ins = d.leg_indices(Role.IN)
    outs = d.leg_indices(Role.OUT)
    nc, t = len(ctrl), len(ins)
    rmask = cmask = 0
    for j, li in enumerate(ctrl):
        if negs[li]:
            rmask ^= 1 << (nc + t - 1 - j)
            cmask ^= 1 << (nc + t - 1 - j)
    for j, li in enumerate(ins):
        if negs[li]:
            cmask ^= 1 << (t - 1 - j)
    for j, li in enumerate(outs):
        if negs[li]:
            rmask ^= 1 << (t - 1 - j)
    n = m.shape[0]
    return m[np.ix_(np.arange(n) ^ rmask, np.arange(n) ^ cmask)]


def sequential_order(c: Circuit) -> SeqPlan:
    """Schedule the circuit's gates, or raise NonSequential."""
    ends = c.ends
    n_gates = len(c.gates)
    succ: list[set[int]] = [set() for _ in range(n_gates)]
    indeg = [0] * n_gates

    def edge(a: int, b: int):
        if a != b and b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1

    for name, e in ends.items():
        p = e.producer[0] if e.producer else None
        s = e.consumer[0] if e.consumer else None
        for t, _ in e.taps:
            if p is not None:
                edge(p, t)
            if s is not None:
                edge(t, s)
        if p is not None and s is not None:
            edge(p, s)

    kinds: list[str] = []
    for gi, g in enumerate(c.gates):
        d = g.gate
        if d.is_matrix_style:
            for li, (w, role) in enumerate(zip(g.wires, d.legs)):
                if role is Role.IN and ends[w].consumer != (gi, li):
                    raise NonSequential(f"gate {gi} ({d.name}) does not carry wire {w} forward")
                if role is Role.OUT and ends[w].producer != (gi, li):
                    raise NonSequential(f"gate {gi} ({d.name}) does not carry wire {w} forward")
            kinds.append("unitary")
        elif d.is_symmetric:
            if not all((gi, li) in ends[w].taps for li, w in enumerate(g.wires)):
                raise NonSequential(
                    f"gate {gi} ({d.name}) binds symmetric legs to wire ends; "
                    "no schedule treats it as an operator")
            if not np.all(np.isclose(np.abs(d.entries), 1.0)):
                raise NonSequential(f"gate {gi} ({d.name}) taps wires but is not a pure phase")
            kinds.append("diag")
        else:
            raise NonSequential(f"gate {gi} ({d.name}) mixes symmetric and directed legs")

    ready = [gi for gi in range(n_gates) if indeg[gi] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        gi = heapq.heappop(ready)
        order.append(gi)
        for nx in succ[gi]:
            indeg[nx] -= 1
            if indeg[nx] == 0:
                heapq.heappush(ready, nx)
    if len(order) != n_gates:
        raise NonSequential("feedback loop: the gates cannot be ordered")

    live = {w.name: i for i, w in enumerate(c.input_wires)}
    steps: list[SeqStep] = []
    for gi in order:
        g = c.gates[gi]
        d = g.gate
        if kinds[gi] == "unitary":
            pos = [live[g.wires[li]] for li in d.leg_indices(Role.CTRL)]
            for kind, *legs in d.qubit_slots():
                if kind == "pair":
                    in_leg, out_leg = legs
                    p = live.pop(g.wires[in_leg])
                    live[g.wires[out_leg]] = p
                    pos.append(p)
            if len(set(pos)) != len(pos):
                raise NonSequential(f"gate {gi} ({d.name}) binds one qubit to two roles")
            table = _blocked_matrix(d)
            if any(g.negs):
                table = _flip_matrix(table, d, g.negs)
            steps.append(SeqStep(gi, "unitary", tuple(pos), table))
        else:
            pos = tuple(live[w] for w in g.wires)
            if any(g.negs):
                ten = d.entries
                for li, neg in enumerate(g.negs):
                    if neg:
                        ten = np.flip(ten, axis=li)
                upos, red = _diag_tensor(
                    GateDef(d.name, d.legs, ten, d.norm_exponent, d.param), pos)
            else:
                upos, red = _diag_tensor(d, pos)
            steps.append(SeqStep(gi, "diag", upos, red))

    out_axes = {w.name: live[w.name] for w in c.output_wires}
    return SeqPlan(len(c.input_wires), tuple(order), tuple(steps), out_axes)


def apply_unitary(psi: np.ndarray, m: np.ndarray, positions: tuple[int, ...]) -> np.ndarray:
    k = len(positions)
    moved = np.moveaxis(psi, positions, range(k))
    shape = moved.shape
    out = (m @ moved.reshape(2 ** k, -1)).reshape(shape)
    return np.moveaxis(out, range(k), positions)


def apply_diag(psi: np.ndarray, diag: np.ndarray, positions: tuple[int, ...]) -> np.ndarray:
    k = len(positions)
    moved = np.moveaxis(psi, positions, range(k))
    moved = moved * diag.reshape(diag.shape + (1,) * (moved.ndim - k))
    return np.moveaxis(moved, range(k), positions)


def amplitude_canonical(c: Circuit, boundary: BoundaryAssignment) -> complex:
    """<out|circuit|in> by dense simulation, normalization applied at the end."""
    assignment = resolve_boundary(c, boundary)
    if assignment is None:
        return 0j
    plan = sequential_order(c)
    n = plan.n_qubits
    psi = np.zeros((2,) * n, dtype=np.complex128)
    psi[tuple(assignment[w.name] for w in c.input_wires)] = 1.0
    for step in plan.steps:
        if step.kind == "unitary":
            psi = apply_unitary(psi, step.table, step.positions)
        else:
            psi = apply_diag(psi, step.table, step.positions)
    idx = [0] * n
    for name, axis in plan.out_axes.items():
        idx[axis] = assignment[name]
    amp = complex(psi[tuple(idx)])
    return amp * 2.0 ** (-c.total_norm_exponent / 2.0)
