"""Check that swapping Toffoli gates for Margolus gates leaves the circuit unchanged.

A Margolus gate differs from a Toffoli only on the local pattern ``|101>``
(first control set, second control clear, target set). If no amplitude ever
sits on that pattern when the gate fires, the substitution is exact. This is
checked by plain simulation of the 32-dimensional state, not symbolically.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .circuits import Variant, build_compiled_circuit
from .qsim import SHOR_LAYOUT, Circuit, apply_gate, n_qubits_of, run_circuit, zero_state

SUPPORT_THRESHOLD = 1e-9
PATTERN_TOL = 1e-9
DEVIATION_TOL = 1e-10

CHECKPOINTS = ("psi0", "psi1", "psi2", "psi3")

# Unnormalized kets of the four checkpoints as (c0 c1 c2 q0 q1) bitstrings.
# psi1 factorizes as |+>_c0 times four branches; listing both c0 values
# gives the same state.
_CHECKPOINT_KETS = {
    "psi0": [format(x, "03b") + "00" for x in range(8)],
    "psi1": [c0 + rest for c0 in "01" for rest in ("0000", "0101", "1001", "1100")],
    "psi2": ["00000", "00101", "01010", "01100", "10000", "10101", "11010", "11100"],
    "psi3": ["00000", "00101", "01010", "01100", "10010", "10101", "11000", "11110"],
}


def expected_checkpoint(label: str) -> np.ndarray:
    kets = _CHECKPOINT_KETS[label]
    psi = np.zeros(1 << SHOR_LAYOUT.total, dtype=complex)
    for ket in kets:
        psi[int(ket, 2)] = 1
    return psi / np.sqrt(len(kets))


@dataclass
class CheckpointReport:
    label: str
    state: np.ndarray
    support: frozenset[int]

    def kets(self) -> list[str]:
        n = n_qubits_of(self.state.size)
        return [format(i, f"0{n}b") for i in sorted(self.support)]


def support_of(state: np.ndarray, threshold: float = SUPPORT_THRESHOLD) -> frozenset[int]:
    return frozenset(int(i) for i in np.flatnonzero(np.abs(state) > threshold))


def checkpoint_states(variant: Variant | str = Variant.MARGOLUS) -> list[CheckpointReport]:
    circuit = build_compiled_circuit(variant)
    reports = []
    for label in CHECKPOINTS:
        state = run_circuit(circuit, stop=circuit.marks[label])
        reports.append(CheckpointReport(label, state, support_of(state)))
    return reports


def states_equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = DEVIATION_TOL) -> tuple[bool, float]:
    """Compare two states after removing the relative phase at b's largest amplitude."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    anchor = int(np.argmax(np.abs(b)))
    if abs(a[anchor]) == 0 or abs(b[anchor]) == 0:
        deviation = float(np.abs(a - b).max())
    else:
        phase = a[anchor] / abs(a[anchor]) * abs(b[anchor]) / b[anchor]
        deviation = float(np.abs(a - phase * b).max())
    return deviation < tol, deviation


def pattern_probability(state: np.ndarray, qubits: tuple[int, int, int], pattern: str = "101") -> float:
    """Total probability on basis states whose bits at ``qubits`` read ``pattern``."""
    n = n_qubits_of(state.size)
    t = np.abs(state.reshape((2,) * n)) ** 2
    index = [slice(None)] * n
    for q, bit in zip(qubits, pattern):
        index[q] = int(bit)
    return float(t[tuple(index)].sum())


@dataclass
class GateCheck:
    position: int
    qubits: tuple[int, int, int]
    pattern_probability: float


@dataclass
class SubstitutionCertificate:
    gates: list[GateCheck] = field(default_factory=list)
    final_deviation: float = 0.0

    @property
    def safe(self) -> bool:
        return all(g.pattern_probability < PATTERN_TOL for g in self.gates) and self.final_deviation < DEVIATION_TOL

    @property
    def verdict(self) -> str:
        return "safe" if self.safe else "unsafe"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "final_deviation": self.final_deviation,
            "gates": [dict(asdict(g), qubits=list(g.qubits)) for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def table(self) -> str:
        rows = [f"{'pos':>4}  {'qubits':<10}  {'P(|101>)':>12}"]
        for g in self.gates:
            rows.append(f"{g.position:>4}  {str(g.qubits):<10}  {g.pattern_probability:>12.3e}")
        rows.append(f"final deviation {self.final_deviation:.3e}  verdict {self.verdict}")
        return "\n".join(rows)


class AlignmentError(ValueError):
    pass


def _check_aligned(full: Circuit, relphase: Circuit) -> None:
    if full.n_qubits != relphase.n_qubits or len(full.ops) != len(relphase.ops):
        raise AlignmentError("circuits differ in width or length")
    for pos, ((g1, q1), (g2, q2)) in enumerate(zip(full.ops, relphase.ops)):
        if q1 != q2:
            raise AlignmentError(f"op {pos}: qubits {q1} vs {q2}")
        if g1 != g2 and {g1.kind, g2.kind} != {"Toffoli", "Margolus"}:
            raise AlignmentError(f"op {pos}: {g1.kind} vs {g2.kind}")


def verify_substitution(full: Circuit, relphase: Circuit, initial: np.ndarray | None = None) -> SubstitutionCertificate:
    """Simulate ``relphase``, recording the ``|101>`` weight seen by each Margolus gate.

    The final states of both circuits are then compared up to global phase.
    """
    _check_aligned(full, relphase)
    state = zero_state(relphase.n_qubits) if initial is None else np.asarray(initial, dtype=complex)
    cert = SubstitutionCertificate()
    for pos, (gate, qubits) in enumerate(relphase.ops):
        if gate.kind == "Margolus":
            cert.gates.append(GateCheck(pos, qubits, pattern_probability(state, qubits)))
        state = apply_gate(state, gate, qubits)
    _, cert.final_deviation = states_equal_up_to_global_phase(state, run_circuit(full, initial))
    return cert


def verify_compiled(replace=None) -> SubstitutionCertificate:
    return verify_substitution(
        build_compiled_circuit(Variant.FULL_TOFFOLI),
        build_compiled_circuit(Variant.MARGOLUS, replace=replace),
    )


def injected_counterexample() -> tuple[Circuit, Circuit]:
    """A pair where the Margolus gate sees ``|101>`` in superposition, so the phase matters."""
    full = Circuit(SHOR_LAYOUT.total).h(0).x(4).toffoli(0, 3, 4)
    rel = Circuit(SHOR_LAYOUT.total).h(0).x(4).margolus(0, 3, 4)
    return full, rel
