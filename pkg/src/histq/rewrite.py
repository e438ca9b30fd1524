"""Netlist rewrites that preserve every boundary amplitude.

The passes work on the histories picture directly: a rewrite is sound when it
keeps the product-over-gates identical for every assignment of the free
boundary ends.  Three mechanisms cover everything here:

* relabeling a gate with an entry-for-entry identical tensor (canonicalize);
* dropping a phase-family gate whose factor is 1 in every surviving history
  (a leg reads a constant 0), moving its normalization exponent onto the
  circuit so the total is unchanged;
* replacing a parity gate that has a constant leg by a wire merge, tracked in
  a union-find with a complement bit.

Constants are wire values that hold in every history with a nonzero product:
boundary pins, and values forced through gates whose compatible entries all
agree.  Free boundary ends are never constant — their bits belong to the
query.  Because a merge keeps the parity gate's constraint alive and a wire
is only judged constant for a gate drop without that gate's own help, the
constraint that justified a rewrite always survives it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, GateInstance, Wire, classify_wires
from .circuit import BoundaryAssignment
from .engine import transition_amplitude
from .errors import InterfaceMismatch
from .gates import BUILTIN, GateDef, Role, phase_gate

_XOR = BUILTIN["XOR3"]
_CANON_H = phase_gate(math.pi, 2, norm_exponent=1)
_DIAG_THETA = {"Z": math.pi, "S": math.pi / 2, "T": math.pi / 4,
               "CZ": math.pi, "CCZ": math.pi}


@dataclass
class PassReport:
    name: str
    changed: bool = False
    details: dict[str, object] = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"pass={self.name} changed={int(self.changed)}"]
        for k, v in self.details.items():
            out.append(f"{k}={v}")
        return out


def _is_builtin(d: GateDef, name: str) -> bool:
    return d.name == name and d.structural_key() == BUILTIN[name].structural_key()


def interface(c: Circuit) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """The free boundary ends, in declaration order: (inputs, outputs)."""
    ins = tuple(w.name for w in c.input_wires if w.in_value is None)
    outs = tuple(w.name for w in c.output_wires if w.out_value is None)
    return ins, outs


# ---------------------------------------------------------------------------
# canonicalize

def _canonicalize_core(c: Circuit, fuse: bool):
    alias: dict[str, str] = {}

    def find(n: str) -> str:
        while n in alias:
            n = alias[n]
        return n

    state = {w.name: w for w in c.wires}
    out_gates: list[GateInstance] = []
    changed = False
    fused = 0
    for g in c.gates:
        d = g.gate
        if _is_builtin(d, "CNOT"):
            out_gates.append(GateInstance(_XOR, g.wires, g.negs))
            changed = True
        elif _is_builtin(d, "H"):
            out_gates.append(GateInstance(_CANON_H, g.wires, g.negs))
            changed = True
        elif d.name in _DIAG_THETA and _is_builtin(d, d.name):
            nc = d.n_legs - 2
            ti, to = find(g.wires[nc]), find(g.wires[nc + 1])
            ni, no = g.negs[nc], g.negs[nc + 1]
            corner = complex(d.entries[(1,) * d.n_legs])
            ph = phase_gate(_DIAG_THETA[d.name], nc + 1, value=corner)
            if ni != no:
                out_gates.append(g)          # complemented pair: no plain fusion
                continue
            if ti == to:
                out_gates.append(GateInstance(ph, g.wires[:nc] + (ti,), g.negs[:nc] + (ni,)))
                changed = True
                continue
            wa, wb = state[ti], state[to]
            if not fuse or wa.out_bound or wb.in_bound:
                out_gates.append(g)          # keep the matrix form unfused
                continue
            alias[to] = ti
            state[ti] = Wire(ti, wa.in_bound, wa.in_value, wb.out_bound, wb.out_value)
            del state[to]
            out_gates.append(GateInstance(ph, g.wires[:nc] + (ti,), g.negs[:nc] + (ni,)))
            changed = True
            fused += 1
        else:
            out_gates.append(g)
    if not changed:
        return c, find, fused
    gates = tuple(GateInstance(g.gate, tuple(find(w) for w in g.wires), g.negs)
                  for g in out_gates)
    wires = tuple(state[w.name] for w in c.wires if w.name in state)
    return c.replace(wires=wires, gates=gates), find, fused


def canonicalize(c: Circuit) -> Circuit:
    """Rewrite gates into the three canonical families.

    CNOT becomes the symmetric parity gate over the same three wires (the
    tensors are identical entry for entry).  H becomes a two-leg PHASE(pi)
    carrying its normalization exponent.  The diagonal family (Z, S, T, CZ,
    CCZ) becomes PHASE(theta) with the target's in and out wires fused, the
    input-side name surviving.  Anything else is left alone.

    A fusion may relocate a boundary end onto the surviving name; that must
    keep every free end in its position.  When (only in hand-built netlists
    with interleaved declarations) it would not, the diagonal gates are left
    in matrix form instead.
    """
    out, find, fused = _canonicalize_core(c, fuse=True)
    if fused:
        ins0, outs0 = interface(c)
        expected = (tuple(find(n) for n in ins0), tuple(find(n) for n in outs0))
        if interface(out) != expected:
            out, _, _ = _canonicalize_core(c, fuse=False)
    return out


# ---------------------------------------------------------------------------
# constants

def compute_constants(c: Circuit, skip: frozenset[int] = frozenset()) -> dict[str, int] | None:
    """Wire values that hold in every nonzero history; None if none survives.

    Starts from boundary pins and closes under gate forcing: when every
    nonzero entry of a gate compatible with the values known so far agrees on
    one leg's bit, that leg's wire is pinned down too.  Gates listed in
    ``skip`` contribute nothing — callers use that to prove a value does not
    depend on a gate they are about to remove.
    """
    known: dict[str, int] = {}
    for w in c.wires:
        if w.in_value is not None and w.out_value is not None and w.in_value != w.out_value:
            return None
        v = w.in_value if w.in_value is not None else w.out_value
        if v is not None:
            known[w.name] = v
    rows_cache: dict[int, np.ndarray] = {}
    changed = True
    while changed:
        changed = False
        for gi, g in enumerate(c.gates):
            if gi in skip or g.gate.n_legs == 0:
                continue
            rows = rows_cache.get(gi)
            if rows is None:
                rows = np.argwhere(g.gate.entries != 0)
                rows_cache[gi] = rows
            mask = np.ones(len(rows), dtype=bool)
            for li, (wire, neg) in enumerate(zip(g.wires, g.negs)):
                if wire in known:
                    mask &= rows[:, li] == (known[wire] ^ int(neg))
            sub = rows[mask]
            if len(sub) == 0:
                return None
            for li, (wire, neg) in enumerate(zip(g.wires, g.negs)):
                if wire in known:
                    continue
                col = sub[:, li]
                if np.all(col == col[0]):
                    known[wire] = int(col[0]) ^ int(neg)
                    changed = True
    return known


def _is_phase_family(d: GateDef) -> bool:
    if not d.is_symmetric:
        return False
    flat = d.entries.reshape(-1)
    return bool(np.all(flat[:-1] == 1.0) and np.isclose(abs(flat[-1]), 1.0, atol=1e-12))


def _cleanup_orphans(before: Circuit, wires: tuple[Wire, ...],
                     gates: tuple[GateInstance, ...]) -> tuple[tuple[Wire, ...], list[str]]:
    """Drop wires left with no attachments and nothing the query can bind.

    A wire stays if any gate still touches it, if it had a free boundary end
    going into the pass (those are interface), or if contradictory pins make
    it the reason every amplitude is zero.
    """
    ends = before.ends
    attached = {w for g in gates for w in g.wires}
    keep: list[Wire] = []
    dropped: list[str] = []
    for w in wires:
        e = ends.get(w.name)
        free_in = e is not None and e.in_boundary and w.in_value is None
        free_out = e is not None and e.out_boundary and w.out_value is None
        contradictory = (w.in_value is not None and w.out_value is not None
                         and w.in_value != w.out_value)
        if w.name in attached or free_in or free_out or contradictory or e is None:
            keep.append(w)
        else:
            dropped.append(w.name)
    return tuple(keep), dropped


# ---------------------------------------------------------------------------
# drop_dead_controlled_gates

def _drop_dead_step(c: Circuit) -> tuple[Circuit, str, list[str]] | None:
    """One interface-preserving drop or trim, or None when none applies."""
    known = compute_constants(c)
    if known is None:
        return None
    want = interface(c)
    for gi, g in enumerate(c.gates):
        d = g.gate
        if not _is_phase_family(d) or d.n_legs == 0:
            continue
        reads = [known[w] ^ int(n) if w in known else None
                 for w, n in zip(g.wires, g.negs)]
        if any(r == 0 for r in reads):
            gates = c.gates[:gi] + c.gates[gi + 1:]
            action = "drop"
        elif any(r == 1 for r in reads):
            keep = [li for li, r in enumerate(reads) if r is None]
            corner = complex(d.entries.reshape(-1)[-1])
            nd = phase_gate(d.param if d.param is not None else 0.0,
                            len(keep), d.norm_exponent, value=corner)
            trimmed_gate = GateInstance(nd, tuple(g.wires[li] for li in keep),
                                        tuple(g.negs[li] for li in keep))
            gates = c.gates[:gi] + (trimmed_gate,) + c.gates[gi + 1:]
            action = "trim"
        else:
            continue
        wires, orphans = _cleanup_orphans(c, c.wires, gates)
        shift = c.norm_shift + (d.norm_exponent if action == "drop" else 0)
        nc = c.replace(wires=wires, gates=gates, norm_shift=shift)
        if interface(nc) != want:
            continue      # the gate was holding a wire end closed; leave it
        return nc, action, orphans
    return None


def drop_dead_controlled_gates(c: Circuit) -> tuple[Circuit, PassReport]:
    """Remove phase-family gates made inert by constants.

    A leg reading a constant 0 pins the factor at 1 for every surviving
    history: the whole gate goes, its normalization exponent moving onto the
    circuit.  A leg reading a constant 1 is simply not needed: the gate keeps
    firing on the remaining legs.  Phase tensors have no zero entries, so
    they never force a constant — removing one cannot invalidate another.
    Steps that would open a new boundary end are skipped.
    """
    report = PassReport("drop-dead")
    dropped = trimmed = 0
    orphans: list[str] = []
    while (step := _drop_dead_step(c)) is not None:
        c, action, gone = step
        dropped += action == "drop"
        trimmed += action == "trim"
        orphans += gone
    if dropped or trimmed:
        report.changed = True
        report.details.update(dropped_gates=dropped, trimmed_legs=trimmed)
        if orphans:
            report.details["removed_wires"] = ",".join(orphans)
    return c, report


# ---------------------------------------------------------------------------
# short_xor_constant

class WireMerge:
    """Union-find over wires where each link carries a complement bit."""

    def __init__(self, c: Circuit):
        _, external = classify_wires(c)
        self._ext = set(external)
        self._order = {w.name: i for i, w in enumerate(c.wires)}
        self._parent: dict[str, tuple[str, int]] = {}

    def find(self, name: str) -> tuple[str, int]:
        link = self._parent.get(name)
        if link is None:
            return name, 0
        root, p = self.find(link[0])
        self._parent[name] = (root, link[1] ^ p)
        return root, link[1] ^ p

    def union(self, a: str, b: str, parity: int) -> bool:
        """Record value(a) = value(b) ^ parity; False if that is contradictory."""
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return (pa ^ pb) == parity
        # the surviving name: an external wire always wins, then declaration order
        if (rb in self._ext, -self._order[rb]) > (ra in self._ext, -self._order[ra]):
            ra, rb = rb, ra
            pa, pb = pb, pa
        self._parent[rb] = (ra, pa ^ pb ^ parity)
        return True

    def resolve(self, name: str, neg: bool) -> tuple[str, bool]:
        root, p = self.find(name)
        return root, bool(int(neg) ^ p)


def _short_xor_step(c: Circuit) -> tuple[Circuit, str, list[str]] | None:
    """One interface-preserving parity-gate short, or None."""
    _, external = classify_wires(c)
    ext = set(external)
    want = interface(c)
    for gi, g in enumerate(c.gates):
        if g.gate.structural_key() != _XOR.structural_key():
            continue
        known = compute_constants(c, skip=frozenset([gi]))
        if known is None:
            continue
        reads = [known[w] ^ int(n) if w in known else None
                 for w, n in zip(g.wires, g.negs)]
        for li in range(3):
            v = reads[li]
            if v is None:
                continue
            (u, nu), (t, nt) = [(g.wires[j], g.negs[j]) for j in range(3) if j != li]
            if u in ext and t in ext and u != t:
                continue        # two distinct query ends cannot be one wire
            parity = int(nu) ^ int(nt) ^ v
            uf = WireMerge(c)
            if u == t:
                if parity == 1:
                    continue    # forces w != w: nothing survives anyway
            elif not uf.union(u, t, parity):
                continue
            gates = []
            for gj, og in enumerate(c.gates):
                if gj == gi:
                    continue
                pairs = [uf.resolve(w, n) for w, n in zip(og.wires, og.negs)]
                gates.append(GateInstance(og.gate, tuple(p[0] for p in pairs),
                                          tuple(p[1] for p in pairs)))
            wires = tuple(w for w in c.wires if uf.find(w.name)[0] == w.name)
            wires, orphans = _cleanup_orphans(c, wires, tuple(gates))
            nc = c.replace(wires=wires, gates=tuple(gates))
            if interface(nc) != want:
                continue
            if u != t:
                root = uf.find(u)[0]
                detail = f"{t if root == u else u}->{root}~{parity}"
            else:
                detail = f"{g.wires[li]}={v}"
            return nc, detail, orphans
    return None


def short_xor_constant(c: Circuit) -> tuple[Circuit, PassReport]:
    """Replace parity gates that have a constant leg by wire merges.

    If a leg of the three-wire parity gate reads a constant v — provable
    without the gate's own help — the gate reduces to "the other two reads
    are equal" (v=0) or "complementary" (v=1).  That is a wire identification
    with a complement bit, which the merge records exactly, so the gate can
    go.  Merging two free boundary wires would collapse distinct query ends,
    and a short may not open a new boundary end; such candidates are skipped.
    When one wire of the merged pair is external it keeps its name.
    """
    report = PassReport("short-xor")
    merges: list[str] = []
    orphans: list[str] = []
    while (step := _short_xor_step(c)) is not None:
        c, detail, gone = step
        merges.append(detail)
        orphans += gone
    if merges:
        report.changed = True
        report.details["merged"] = ";".join(merges)
        if orphans:
            report.details["removed_wires"] = ",".join(orphans)
    return c, report


# ---------------------------------------------------------------------------
# fixpoint driver

def propagate_constants(c: Circuit) -> tuple[Circuit, PassReport]:
    """Alternate the constant-driven passes until nothing changes."""
    report = PassReport("propagate")
    iterations = dropped = trimmed = merges = 0
    while True:
        iterations += 1
        c1, r1 = drop_dead_controlled_gates(c)
        c2, r2 = short_xor_constant(c1)
        dropped += int(r1.details.get("dropped_gates", 0))
        trimmed += int(r1.details.get("trimmed_legs", 0))
        merges += len(r2.details.get("merged", "").split(";")) if r2.changed else 0
        if not (r1.changed or r2.changed):
            break
        c = c2
    report.changed = (dropped + trimmed + merges) > 0
    report.details.update(iterations=iterations, dropped_gates=dropped,
                          trimmed_legs=trimmed, merged_wires=merges)
    return c, report


def _canonicalize_pass(c: Circuit) -> tuple[Circuit, PassReport]:
    out = canonicalize(c)
    r = PassReport("canonicalize", changed=out is not c)
    if r.changed:
        r.details["gates"] = len(out.gates)
        r.details["wires"] = len(out.wires)
    return out, r


PASSES = {
    "canonicalize": _canonicalize_pass,
    "drop-dead": drop_dead_controlled_gates,
    "short-xor": short_xor_constant,
    "propagate": propagate_constants,
}

DEFAULT_PASSES = ("canonicalize", "propagate")


def apply_passes(c: Circuit, names: list[str]) -> tuple[Circuit, list[PassReport]]:
    reports = []
    for name in names:
        if name not in PASSES:
            raise ValueError(f"unknown pass {name!r} (have: {', '.join(sorted(PASSES))})")
        c, r = PASSES[name](c)
        reports.append(r)
    return c, reports


# ---------------------------------------------------------------------------
# equivalence

def equivalent(a: Circuit, b: Circuit, *, tol: float = 1e-10,
               samples: int = 64, rng: random.Random | None = None) -> tuple[bool, float]:
    """Compare boundary amplitudes of two circuits end by end.

    Free ends correspond positionally, the way query bit strings bind them —
    a rewrite may rename a boundary wire but never move or drop an end, so
    position i of one circuit's free inputs is queried together with
    position i of the other's.  Exhaustive over all assignments when there
    are at most eight free bits, sampled otherwise.  Returns (within
    tolerance, largest deviation seen).  Raises InterfaceMismatch when the
    end counts differ — there is nothing meaningful to compare then.
    """
    ins_a, outs_a = interface(a)
    ins_b, outs_b = interface(b)
    if (len(ins_a), len(outs_a)) != (len(ins_b), len(outs_b)):
        raise InterfaceMismatch(
            f"free ends differ: {(ins_a, outs_a)} vs {(ins_b, outs_b)}")
    nbits = len(ins_a) + len(outs_a)
    if nbits <= 8:
        cases = range(1 << nbits)
    else:
        r = rng or random.Random(0)
        cases = [r.getrandbits(nbits) for _ in range(samples)]
    worst = 0.0
    for bits in cases:
        def query(ins, outs):
            return BoundaryAssignment(
                {w: (bits >> (nbits - 1 - i)) & 1 for i, w in enumerate(ins)},
                {w: (bits >> (nbits - 1 - len(ins) - j)) & 1
                 for j, w in enumerate(outs)})
        va = transition_amplitude(a, query(ins_a, outs_a))
        vb = transition_amplitude(b, query(ins_b, outs_b))
        worst = max(worst, abs(va - vb))
    return worst <= tol, worst
