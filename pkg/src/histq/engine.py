"""Transition amplitudes by direct summation over wire assignments.

Every internal wire is given a classical bit; one joint assignment is a
history.  The amplitude is the sum over all 2^w histories of the product of
gate entries selected by each history, times 2^(-K/2) for the circuit's total
normalization exponent K.  Nothing here requires, or checks, that the circuit
has a gate schedule — feedback netlists evaluate the same way.

Histories are processed in fixed-size chunks as vectorized index arithmetic:
for each gate, the packed entry-table index is a constant (external bits and
complemented reads) XORed with shifted bits of the history counter.  Lanes
whose running product hits an exact zero are dropped from later gates and
scattered back before the chunk is reduced, so pruning never changes the
result, only the work.  Chunks are reduced in ascending order whether or not
a thread pool is used; repeated runs with the same options are reproducible.
"""

from __future__ import annotations

import os
import tracemalloc
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from itertools import product as _bitproduct

import numpy as np

from .circuit import (Amplitude, BoundaryAssignment, Circuit, classify_wires,
                      resolve_boundary)
from .errors import MaxWiresExceeded
from .gates import GateClass, classify_gate

DEFAULT_MAX_WIRES = 40
DEFAULT_CHUNK = 1 << 16
_CLASS_RANK = {GateClass.CLASSICAL: 0, GateClass.PHASE: 1, GateClass.GENERAL: 2}


def resolve_max_wires(max_wires: int | None) -> int:
    if max_wires is not None:
        return max_wires
    env = os.environ.get("HISTQ_MAX_WIRES")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"HISTQ_MAX_WIRES={env!r} is not an integer") from None
    return DEFAULT_MAX_WIRES


@dataclass
class _GateSpec:
    table: np.ndarray                    # flat entry table, complex128
    const_base: int                      # external + complement bits, pre-packed
    ext_legs: tuple[tuple[str, int], ...]  # (wire, place) still to fill per query
    var_legs: tuple[tuple[int, int], ...]  # (history shift, place)


@dataclass
class _Prepared:
    circuit: Circuit
    internal: tuple[str, ...]
    specs: list[_GateSpec]
    norm_exponent: int


@dataclass
class EvalResult:
    amplitude: Amplitude
    internal_wires: tuple[str, ...]
    histories: int
    accepted: int

    @property
    def value(self) -> complex:
        return self.amplitude.resolved()


def prepare(c: Circuit, max_wires: int | None = None) -> _Prepared:
    internal, _ = classify_wires(c)
    limit = resolve_max_wires(max_wires)
    if len(internal) > limit:
        raise MaxWiresExceeded(
            f"{len(internal)} internal wires exceed the limit of {limit} "
            f"(2^{len(internal)} histories); raise --max-wires/HISTQ_MAX_WIRES to override")
    order = sorted(internal)
    w = len(order)
    pos = {name: i for i, name in enumerate(order)}  # position 0 is the high bit
    specs = []
    ranked = sorted(enumerate(c.gates),
                    key=lambda t: (_CLASS_RANK[classify_gate(t[1].gate)], t[0]))
    for _, g in ranked:
        n = g.gate.n_legs
        const = 0
        ext = []
        var = []
        for li, (wire, neg) in enumerate(zip(g.wires, g.negs)):
            place = n - 1 - li
            if neg:
                const ^= 1 << place
            if wire in pos:
                var.append((w - 1 - pos[wire], place))
            else:
                ext.append((wire, place))
        specs.append(_GateSpec(g.gate.entries.reshape(-1), const, tuple(ext), tuple(var)))
    return _Prepared(c, tuple(order), specs, c.total_norm_exponent)


def _chunk_sum(specs: list[_GateSpec], consts: list[int],
               start: int, stop: int) -> tuple[complex, int]:
    m = stop - start
    h = np.arange(start, stop, dtype=np.int64)
    products = np.zeros(m, dtype=np.complex128)
    lanes = np.arange(m)
    vals = np.ones(len(lanes), dtype=np.complex128)
    for spec, const in zip(specs, consts):
        idx = np.full(len(lanes), const, dtype=np.int64)
        for shift, place in spec.var_legs:
            idx ^= ((h >> shift) & 1) << place
        f = spec.table[idx]
        vals = vals * f
        nz = np.nonzero(f)[0]
        if len(nz) < len(lanes):
            lanes = lanes[nz]
            vals = vals[nz]
            h = h[nz]
            if len(lanes) == 0:
                break
    products[lanes] = vals
    return complex(np.sum(products)), int(np.count_nonzero(vals))


def evaluate(c: Circuit, boundary: BoundaryAssignment | None = None, *,
             max_wires: int | None = None, chunk_size: int | None = None,
             threads: int | None = None) -> EvalResult:
    """Sum all histories for one fully bound boundary query."""
    prep = prepare(c, max_wires)
    assignment = resolve_boundary(c, boundary or BoundaryAssignment())
    w = len(prep.internal)
    total = 1 << w
    if assignment is None:
        return EvalResult(Amplitude(0j, prep.norm_exponent), prep.internal, total, 0)
    consts = []
    for spec in prep.specs:
        const = spec.const_base
        for wire, place in spec.ext_legs:
            const ^= assignment[wire] << place
        consts.append(const)
    chunk = chunk_size or DEFAULT_CHUNK
    if chunk < 1:
        raise ValueError("chunk size must be positive")
    ranges = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
    if threads and threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: _chunk_sum(prep.specs, consts, *r), ranges))
    else:
        parts = [_chunk_sum(prep.specs, consts, a, b) for a, b in ranges]
    value = 0j
    accepted = 0
    for v, acc in parts:
        value += v
        accepted += acc
    return EvalResult(Amplitude(value, prep.norm_exponent), prep.internal, total, accepted)


def transition_amplitude(c: Circuit, boundary: BoundaryAssignment | None = None,
                         **opts) -> complex:
    return evaluate(c, boundary, **opts).value


def transition_probability(c: Circuit, boundary: BoundaryAssignment | None = None,
                           **opts) -> float:
    return abs(evaluate(c, boundary, **opts).value) ** 2


def accepted_history_count(c: Circuit, boundary: BoundaryAssignment | None = None,
                           **opts) -> int:
    return evaluate(c, boundary, **opts).accepted


@dataclass
class Distribution:
    probs: dict[str, float]
    total: float = field(init=False)

    def __post_init__(self):
        self.total = float(sum(self.probs.values()))

    def unit_total(self, tol: float = 1e-9) -> bool:
        return abs(self.total - 1.0) <= tol


def free_output_ends(c: Circuit, boundary: BoundaryAssignment | None = None) -> list[str]:
    """Boundary-out ends not pinned in the file or bound by the query."""
    bound = boundary.out_bits if boundary else {}
    return [w.name for w in c.output_wires
            if w.out_value is None and w.name not in bound]


def output_distribution(c: Circuit, boundary: BoundaryAssignment | None = None, *,
                        amplitude=None, **opts) -> Distribution:
    """Probability of each assignment of the free output ends.

    The inputs (and any pinned or queried outputs) come from ``boundary``;
    the remaining output ends are enumerated in declaration order, first
    end leftmost.  ``amplitude`` defaults to the history sum; pass a
    different callable to use another evaluation strategy.
    """
    free = free_output_ends(c, boundary)
    base_in = dict(boundary.in_bits) if boundary else {}
    base_out = dict(boundary.out_bits) if boundary else {}
    if amplitude is None:
        amp_fn = lambda b: evaluate(c, b, **opts).value
    else:
        amp_fn = lambda b: amplitude(c, b)
    probs: dict[str, float] = {}
    for bits in _bitproduct((0, 1), repeat=len(free)):
        out = dict(base_out)
        out.update(zip(free, bits))
        a = amp_fn(BoundaryAssignment(base_in, out))
        probs["".join(map(str, bits))] = abs(a) ** 2
    return Distribution(probs)


@contextmanager
def memory_probe():
    """Track peak allocation across the with-block: ``probe.peak`` in bytes."""

    class _Probe:
        peak = 0

    p = _Probe()
    tracemalloc.start()
    try:
        yield p
    finally:
        _, p.peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
