"""Shared generators: random sequential circuits and boundary queries."""

from histq import (BUILTIN, BoundaryAssignment, SeqDescription, SeqLine,
                   SeqOp, lower_sequential, phase_gate)

POOL1 = ["H", "X", "Y", "Z", "S", "T"]
POOL2 = ["CNOT", "CZ", "SWAP"]
POOL3 = ["TOFFOLI", "CCZ"]
THETAS = [3.14159 / 3, 0.7, -1.2]


def random_ops(rng, names, g_max=8, phase_taps=True):
    n = len(names)
    ops = []
    for _ in range(rng.randint(1, g_max)):
        r = rng.random()
        if r < 0.45 or n == 1:
            ops.append(SeqOp(BUILTIN[rng.choice(POOL1)], (rng.choice(names),)))
        elif r < 0.8 or n == 2:
            ops.append(SeqOp(BUILTIN[rng.choice(POOL2)],
                             tuple(rng.sample(names, 2))))
        elif r < 0.9 or not phase_taps:
            ops.append(SeqOp(BUILTIN[rng.choice(POOL3)],
                             tuple(rng.sample(names, 3))))
        else:
            k = rng.randint(1, min(3, n))
            ops.append(SeqOp(phase_gate(rng.choice(THETAS), k),
                             tuple(rng.sample(names, k))))
    return tuple(ops)


def random_circuit(rng, n_max=4, g_max=8, pinned=True):
    """A lowered sequential circuit on up to n_max lines.

    With ``pinned`` some line ends carry fixed bits, the rest stay free —
    the mix a boundary query has to cope with.
    """
    n = rng.randint(1, n_max)
    names = [f"q{i}" for i in range(n)]
    ops = random_ops(rng, names, g_max)
    if pinned:
        lines = tuple(SeqLine(nm,
                              rng.choice([None, 0, 1]),
                              rng.choice([None, None, None, 0, 1]))
                      for nm in names)
    else:
        lines = tuple(SeqLine(nm) for nm in names)
    return lower_sequential(SeqDescription(lines, ops))


def random_query(rng, c):
    """Random bits for every boundary end the circuit leaves free."""
    ins = {w.name: rng.getrandbits(1)
           for w in c.input_wires if w.in_value is None}
    outs = {w.name: rng.getrandbits(1)
            for w in c.output_wires if w.out_value is None}
    return BoundaryAssignment(ins, outs)
