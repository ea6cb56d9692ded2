"""Compiled order-finding circuits for N=21, a=4.

The work register holds the three reachable levels of ``4^x mod 21`` as
``log4`` of the level: ``|1> -> |00>``, ``|4> -> |01>``, ``|16> -> |10>``.
``|11>`` is never populated. Because level ``|1>`` is ``|00>``, the circuit
starts from all zeros with no X on the work register.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd
from typing import Iterable

import numpy as np

from .qsim import SHOR_LAYOUT, Circuit, Gate, marginal, probabilities, run_circuit

C0, C1, C2, Q0, Q1 = range(5)
CONTROL = (C0, C1, C2)
WORK = (Q0, Q1)

WORK_ENCODING = {1: 0b00, 4: 0b01, 16: 0b10}


class Variant(enum.Enum):
    FULL_TOFFOLI = "full"
    MARGOLUS = "margolus"

    @classmethod
    def parse(cls, value: "Variant | str") -> "Variant":
        if isinstance(value, cls):
            return value
        for v in cls:
            if value.lower() in (v.value, v.name.lower()):
                return v
        raise ValueError(f"unknown circuit variant {value!r}")


@dataclass(frozen=True)
class ShorInstance:
    N: int = 21
    a: int = 4
    n_bits: int = 3
    expected_order: int = 3

    def __post_init__(self):
        if not 1 < self.a < self.N:
            raise ValueError("need 1 < a < N")
        if gcd(self.a, self.N) != 1:
            raise ValueError(f"a={self.a} shares a factor with N={self.N}")
        if self.N % 2 == 0 or all(self.N % p for p in range(3, int(self.N**0.5) + 1, 2)):
            raise ValueError(f"N={self.N} must be odd and composite")


def _blank() -> Circuit:
    return Circuit(SHOR_LAYOUT.total)


def build_u1() -> Circuit:
    """Controlled-U^1 on c2: only ``|1> -> |4>`` is reachable, a single CX."""
    return _blank().cx(C2, Q1)


def build_u2(relphase: bool = False) -> Circuit:
    """Controlled-U^2 on c1: ``|1> -> |16>``, ``|4> -> |1>``.

    A CX onto q1 followed by a Fredkin(c1; q0, q1) written as
    CX(q1->q0) . Toffoli(c1, q0 -> q1) . CX(q1->q0), marked ``fredkin``.
    """
    c = _blank().cx(C1, Q1).mark("fredkin").cx(Q1, Q0)
    (c.margolus if relphase else c.toffoli)(C1, Q0, Q1)
    return c.cx(Q1, Q0)


def build_u4(relphase: Iterable[bool] | bool = False) -> Circuit:
    """Controlled-U^4 on c0: the full 3-cycle ``|1> -> |4> -> |16> -> |1>``.

    X(q1) . Toffoli(c0, q1 -> q0) . X(q1), then Fredkin(c0; q0, q1) lowered
    as CX(q1->q0) . Toffoli(c0, q0 -> q1) . CX(q1->q0). The ``mid`` mark
    sits between the two halves.
    """
    first, second = (relphase, relphase) if isinstance(relphase, bool) else tuple(relphase)
    c = _blank().x(Q1)
    (c.margolus if first else c.toffoli)(C0, Q1, Q0)
    c.x(Q1).mark("mid").cx(Q1, Q0)
    (c.margolus if second else c.toffoli)(C0, Q0, Q1)
    return c.cx(Q1, Q0)


def qft(n_bits: int, qubits: Iterable[int] | None = None, n_qubits: int | None = None) -> Circuit:
    """Textbook QFT with the final swap network; qubits[0] is the MSB."""
    qubits = list(range(n_bits)) if qubits is None else list(qubits)
    c = Circuit(n_bits if n_qubits is None else n_qubits)
    for j in range(n_bits):
        c.h(qubits[j])
        for k in range(j + 1, n_bits):
            c.cphase(2 * np.pi / 2 ** (k - j + 1), qubits[k], qubits[j])
    for j in range(n_bits // 2):
        c.swap(qubits[j], qubits[n_bits - 1 - j])
    return c


def inverse_qft(n_bits: int, qubits: Iterable[int] | None = None, n_qubits: int | None = None) -> Circuit:
    return qft(n_bits, qubits, n_qubits).inverse()


def qft_matrix(n_bits: int, inverse: bool = False) -> np.ndarray:
    dim = 1 << n_bits
    sign = -1 if inverse else 1
    jk = np.outer(np.arange(dim), np.arange(dim))
    return np.exp(sign * 2j * np.pi * jk / dim) / np.sqrt(dim)


TOFFOLI_SLOTS = 3


def build_compiled_circuit(variant: Variant | str = Variant.MARGOLUS, replace: Iterable[int] | None = None) -> Circuit:
    """The full 5-qubit order-finding circuit.

    ``replace`` picks which of the three Toffoli slots (0 in U^2, 1 and 2 in
    U^4) become Margolus gates; by default the variant decides for all.
    Marks ``psi0`` .. ``psi3`` and ``pre_qft`` are recorded on the result.
    """
    variant = Variant.parse(variant)
    if replace is None:
        slots = [variant is Variant.MARGOLUS] * TOFFOLI_SLOTS
    else:
        chosen = set(replace)
        if not chosen <= set(range(TOFFOLI_SLOTS)):
            raise ValueError(f"Toffoli slots are 0..{TOFFOLI_SLOTS - 1}, got {sorted(chosen)}")
        slots = [i in chosen for i in range(TOFFOLI_SLOTS)]

    c = _blank()
    for q in CONTROL:
        c.h(q)
    c.mark("psi0")
    c.extend(build_u1())
    c.extend(build_u2(slots[0]))
    c.marks["psi1"] = c.marks.pop("fredkin")
    c.mark("psi2")
    c.extend(build_u4((slots[1], slots[2])))
    c.marks["psi3"] = c.marks.pop("mid")
    c.mark("pre_qft")
    c.extend(inverse_qft(3, CONTROL, SHOR_LAYOUT.total))
    return c


def modexp_level(x: int, instance: ShorInstance = ShorInstance()) -> int:
    return pow(instance.a, x, instance.N)


def ideal_pre_qft_state(instance: ShorInstance = ShorInstance()) -> np.ndarray:
    """``(1/sqrt 8) sum_x |x>|log4(4^x mod 21)>`` built from modular arithmetic."""
    _check_supported(instance)
    psi = np.zeros(1 << SHOR_LAYOUT.total, dtype=complex)
    for x in range(8):
        psi[SHOR_LAYOUT.index(x, WORK_ENCODING[modexp_level(x, instance)])] = 1
    return psi / np.sqrt(8)


def pre_qft_state(variant: Variant | str = Variant.MARGOLUS) -> np.ndarray:
    circuit = build_compiled_circuit(variant)
    return run_circuit(circuit, stop=circuit.marks["pre_qft"])


def _check_supported(instance: ShorInstance) -> None:
    if (instance.N, instance.a, instance.n_bits) != (21, 4, 3):
        raise ValueError(f"only the compiled N=21, a=4, 3-bit instance is supported, got {instance}")


def run_order_finding(instance: ShorInstance = ShorInstance(), variant: Variant | str = Variant.MARGOLUS):
    """Simulate the compiled circuit; return the final state and the 3-bit control distribution."""
    _check_supported(instance)
    final = run_circuit(build_compiled_circuit(variant))
    return final, marginal(probabilities(final), CONTROL)


def ideal_control_distribution(variant: Variant | str = Variant.MARGOLUS) -> np.ndarray:
    return run_order_finding(ShorInstance(), variant)[1]


def lower_circuit(circuit: Circuit) -> Circuit:
    """Rewrite into {H, X, Ry, Rz, S, T, Tdag, CX}.

    Toffoli uses the standard 6-CX network, Margolus the 3-CX Ry network,
    Fredkin is CX . Toffoli . CX, CPhase uses two CX and Rz, SWAP three CX.
    CPhase is reproduced up to a global phase, everything else exactly.
    """
    out = Circuit(circuit.n_qubits)
    for gate, qubits in circuit.ops:
        _lower_into(out, gate, qubits)
    return out


def _lower_into(out: Circuit, gate: Gate, qubits: tuple[int, ...]) -> None:
    k = gate.kind
    if k == "Toffoli":
        a, b, t = qubits
        out.h(t).cx(b, t).tdg(t).cx(a, t).t(t).cx(b, t).tdg(t).cx(a, t)
        out.t(b).t(t).h(t).cx(a, b).t(a).tdg(b).cx(a, b)
    elif k == "Margolus":
        a, b, t = qubits
        q = np.pi / 4
        out.ry(q, t).cx(b, t).ry(q, t).cx(a, t).ry(-q, t).cx(b, t).ry(-q, t)
    elif k == "Fredkin":
        c, a, b = qubits
        out.cx(b, a)
        _lower_into(out, Gate("Toffoli"), (c, a, b))
        out.cx(b, a)
    elif k == "CPhase":
        (theta,) = gate.params
        c, t = qubits
        out.rz(theta / 2, c).rz(theta / 2, t).cx(c, t).rz(-theta / 2, t).cx(c, t)
    elif k == "SWAP":
        a, b = qubits
        out.cx(a, b).cx(b, a).cx(a, b)
    else:
        out.append(gate, *qubits)
