"""Dense statevector and density-matrix simulation for few-qubit circuits.

Qubit 0 is the most significant bit of a basis index. For the 5-qubit
register used throughout this package the global order is
``(c0, c1, c2, q0, q1)``, so basis index ``c0*16 + c1*8 + c2*4 + q0*2 + q1``.
States are plain complex numpy arrays; density matrices are square arrays.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-10
UNITARY_TOL = 1e-12
PSD_TOL = 1e-8


@dataclass(frozen=True)
class RegisterLayout:
    n_control: int = 3
    n_work: int = 2

    @property
    def total(self) -> int:
        return self.n_control + self.n_work

    @property
    def control(self) -> tuple[int, ...]:
        return tuple(range(self.n_control))

    @property
    def work(self) -> tuple[int, ...]:
        return tuple(range(self.n_control, self.total))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f"c{i}" for i in range(self.n_control)) + tuple(
            f"q{i}" for i in range(self.n_work)
        )

    def index(self, control: int, work: int) -> int:
        """Basis index for a control integer and a work integer.

        The control integer reads ``c0`` as its most significant bit, matching
        ``x = c2 + 2*c1 + 4*c0``.
        """
        return (control << self.n_work) | work


SHOR_LAYOUT = RegisterLayout()


class GateError(ValueError):
    pass


_SQ2 = np.sqrt(0.5)

_FIXED = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "S": np.diag([1, 1j]).astype(complex),
    "Sdag": np.diag([1, -1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "Tdag": np.diag([1, np.exp(-1j * np.pi / 4)]),
}

ARITY = {
    "H": 1, "X": 1, "Ry": 1, "Rz": 1, "S": 1, "Sdag": 1, "T": 1, "Tdag": 1,
    "CX": 2, "CPhase": 2, "SWAP": 2,
    "Toffoli": 3, "Margolus": 3, "Fredkin": 3,
}
PARAMETRIC = {"Ry", "Rz", "CPhase"}
_DAGGER = {"S": "Sdag", "Sdag": "S", "T": "Tdag", "Tdag": "T"}


def _permutation_matrix(dim: int, mapping) -> np.ndarray:
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        u[mapping(i), i] = 1
    return u


def _toffoli() -> np.ndarray:
    return _permutation_matrix(8, lambda i: i ^ 1 if i >> 1 == 3 else i)


def _fredkin() -> np.ndarray:
    # control is the most significant of the three local qubits
    def swap_low(i):
        if i < 4:
            return i
        return 4 | ((i & 1) << 1) | ((i >> 1) & 1)

    return _permutation_matrix(8, swap_low)


@dataclass(frozen=True)
class Gate:
    """A gate kind plus its angle parameters (radians).

    Multi-qubit gates list controls first and the target last. ``Margolus``
    is the Toffoli gate with the extra phase ``|101> -> -|101>`` in the local
    order ``(control_a, control_b, target)``.
    """

    kind: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ARITY:
            raise GateError(f"unknown gate kind {self.kind!r}")
        expected = 1 if self.kind in PARAMETRIC else 0
        if len(self.params) != expected:
            raise GateError(f"{self.kind} takes {expected} parameter(s), got {len(self.params)}")

    @property
    def arity(self) -> int:
        return ARITY[self.kind]

    def matrix(self) -> np.ndarray:
        k = self.kind
        if k in _FIXED:
            return _FIXED[k].copy()
        if k == "Ry":
            (t,) = self.params
            c, s = np.cos(t / 2), np.sin(t / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if k == "Rz":
            (t,) = self.params
            return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
        if k == "CX":
            return _permutation_matrix(4, lambda i: i ^ 1 if i >> 1 else i)
        if k == "CPhase":
            (t,) = self.params
            return np.diag([1, 1, 1, np.exp(1j * t)])
        if k == "SWAP":
            return _permutation_matrix(4, lambda i: ((i & 1) << 1) | (i >> 1))
        if k == "Toffoli":
            return _toffoli()
        if k == "Margolus":
            u = _toffoli()
            u[5, 5] = -1
            return u
        if k == "Fredkin":
            return _fredkin()
        raise GateError(k)  # pragma: no cover

    def inverse(self) -> "Gate":
        if self.kind in PARAMETRIC:
            return Gate(self.kind, (-self.params[0],))
        return Gate(_DAGGER[self.kind]) if self.kind in _DAGGER else self


@dataclass
class Circuit:
    """Ordered gate applications on ``n_qubits`` qubits.

    ``marks`` maps a label to the number of ops applied before that point,
    which is how checkpoints inside a circuit are addressed.
    """

    n_qubits: int = SHOR_LAYOUT.total
    ops: list[tuple[Gate, tuple[int, ...]]] = field(default_factory=list)
    marks: dict[str, int] = field(default_factory=dict)

    def append(self, gate: Gate, *qubits: int) -> "Circuit":
        qubits = tuple(int(q) for q in qubits)
        _check_targets(gate, qubits, self.n_qubits)
        self.ops.append((gate, qubits))
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise GateError("cannot join circuits of different widths")
        offset = len(self.ops)
        for gate, qubits in other.ops:
            self.append(gate, *qubits)
        for label, pos in other.marks.items():
            self.marks[label] = offset + pos
        return self

    def mark(self, label: str) -> "Circuit":
        self.marks[label] = len(self.ops)
        return self

    def h(self, q): return self.append(Gate("H"), q)
    def x(self, q): return self.append(Gate("X"), q)
    def ry(self, theta, q): return self.append(Gate("Ry", (theta,)), q)
    def rz(self, theta, q): return self.append(Gate("Rz", (theta,)), q)
    def s(self, q): return self.append(Gate("S"), q)
    def t(self, q): return self.append(Gate("T"), q)
    def sdg(self, q): return self.append(Gate("Sdag"), q)
    def tdg(self, q): return self.append(Gate("Tdag"), q)
    def cx(self, c, t): return self.append(Gate("CX"), c, t)
    def cphase(self, theta, c, t): return self.append(Gate("CPhase", (theta,)), c, t)
    def swap(self, a, b): return self.append(Gate("SWAP"), a, b)
    def toffoli(self, a, b, t): return self.append(Gate("Toffoli"), a, b, t)
    def margolus(self, a, b, t): return self.append(Gate("Margolus"), a, b, t)
    def fredkin(self, c, a, b): return self.append(Gate("Fredkin"), c, a, b)

    def inverse(self) -> "Circuit":
        inv = Circuit(self.n_qubits)
        for gate, qubits in reversed(self.ops):
            inv.append(gate.inverse(), *qubits)
        return inv

    def count(self, kind: str) -> int:
        return sum(1 for gate, _ in self.ops if gate.kind == kind)

    def __len__(self) -> int:
        return len(self.ops)

    def to_json(self) -> str:
        return json.dumps(circuit_to_records(self))


def circuit_to_records(circuit: Circuit) -> list[dict]:
    records = []
    for gate, qubits in circuit.ops:
        rec = {"gate": gate.kind, "qubits": list(qubits)}
        if gate.params:
            rec["params"] = list(gate.params)
        records.append(rec)
    return records


def circuit_from_records(records: Sequence[dict], n_qubits: int = SHOR_LAYOUT.total) -> Circuit:
    circuit = Circuit(n_qubits)
    for rec in records:
        circuit.append(Gate(rec["gate"], tuple(rec.get("params", ()))), *rec["qubits"])
    return circuit


def _check_targets(gate: Gate, targets: Sequence[int], n_qubits: int) -> None:
    if len(targets) != gate.arity:
        raise GateError(f"{gate.kind} acts on {gate.arity} qubit(s), got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise GateError(f"duplicate qubit in {tuple(targets)}")
    for q in targets:
        if not 0 <= q < n_qubits:
            raise GateError(f"qubit index {q} out of range for {n_qubits} qubits")


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def basis_state(index: int | str, n_qubits: int = SHOR_LAYOUT.total) -> np.ndarray:
    if isinstance(index, str):
        n_qubits = len(index)
        index = int(index, 2)
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[index] = 1
    return psi


def zero_state(n_qubits: int = SHOR_LAYOUT.total) -> np.ndarray:
    return basis_state(0, n_qubits)


def _apply_local(tensor: np.ndarray, u: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    u = u.reshape((2,) * (2 * k))
    moved = np.tensordot(u, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(moved, list(range(k)), list(axes))


def apply_gate(state: np.ndarray, gate: Gate, targets: Sequence[int]) -> np.ndarray:
    """Return ``U|state>`` with the gate embedded on ``targets``."""
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state.size)
    _check_targets(gate, targets, n)
    out = _apply_local(state.reshape((2,) * n), gate.matrix(), targets)
    return out.reshape(-1)


def apply_gate_density(rho: np.ndarray, gate: Gate, targets: Sequence[int]) -> np.ndarray:
    """Return ``U rho U^dagger`` with the gate embedded on ``targets``."""
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits_of(rho.shape[0])
    _check_targets(gate, targets, n)
    u = gate.matrix()
    t = rho.reshape((2,) * (2 * n))
    t = _apply_local(t, u, targets)
    t = _apply_local(t, u.conj(), [n + q for q in targets])
    return t.reshape(rho.shape)


def run_circuit(circuit: Circuit, initial: np.ndarray | None = None, stop: int | None = None) -> np.ndarray:
    """Apply ``circuit.ops[:stop]`` in order to ``initial`` (default all zeros)."""
    state = zero_state(circuit.n_qubits) if initial is None else np.asarray(initial, dtype=complex)
    if state.size != 1 << circuit.n_qubits:
        raise GateError(f"state of dimension {state.size} does not fit {circuit.n_qubits} qubits")
    for gate, qubits in circuit.ops[:stop]:
        state = apply_gate(state, gate, qubits)
    return state


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    dim = 1 << circuit.n_qubits
    cols = [run_circuit(circuit, basis_state(i, circuit.n_qubits)) for i in range(dim)]
    return np.stack(cols, axis=1)


def embed(gate: Gate, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Full ``2^n x 2^n`` matrix of a gate placed on ``targets``."""
    return circuit_unitary(Circuit(n_qubits).append(gate, *targets))


def probabilities(state: np.ndarray) -> np.ndarray:
    p = np.abs(np.asarray(state)) ** 2
    total = p.sum()
    if abs(total - 1) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm^2 = {total})")
    return p


def marginal(dist: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Sum a distribution over the qubits not in ``keep``.

    The output is indexed by the kept qubits in the order given.
    """
    dist = np.asarray(dist, dtype=float)
    n = n_qubits_of(dist.size)
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValueError(f"invalid qubit selection {keep}")
    drop = tuple(q for q in range(n) if q not in keep)
    t = dist.reshape((2,) * n).sum(axis=drop)
    remaining = sorted(keep)
    t = np.transpose(t, [remaining.index(q) for q in keep])
    return t.reshape(-1)


def density_matrix(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits_of(rho.shape[0])
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValueError(f"invalid qubit selection {keep}")
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    perm = keep + drop + [n + q for q in keep] + [n + q for q in drop]
    t = t.transpose(perm)
    dk, dd = 1 << len(keep), 1 << len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def validate_density_matrix(rho: np.ndarray) -> None:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > NORM_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > NORM_TOL:
        raise ValueError(f"density matrix trace is {np.trace(rho).real}, not 1")
    if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise ValueError("density matrix is not positive semidefinite")


def psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``tr sqrt(sqrt(rho) sigma sqrt(rho))`` (not squared)."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    root = psd_sqrt(rho)
    inner = root @ sigma @ root
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(min(1.0, np.sqrt(np.clip(w, 0, None)).sum()))


def kolmogorov_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Half the L1 distance between two distributions on the same outcomes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"outcome spaces differ: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


# Measurement-basis rotations: applying these maps the eigenbasis of the
# named Pauli onto the computational basis (+1 eigenvector -> |0>).
_BASIS_CHANGE = {
    "X": _FIXED["H"],
    "Y": _FIXED["H"] @ np.diag([1, -1j]),
    "Z": np.eye(2, dtype=complex),
    "I": np.eye(2, dtype=complex),
}


def basis_rotation(setting: str) -> np.ndarray:
    u = np.ones((1, 1), dtype=complex)
    for letter in setting:
        u = np.kron(u, _BASIS_CHANGE[letter])
    return u


def setting_probabilities(state_or_rho: np.ndarray, setting: str) -> np.ndarray:
    """Born probabilities of measuring each qubit in the basis named by ``setting``.

    ``setting`` has one letter per qubit from ``XYZ`` (``I`` is read as ``Z``).
    """
    a = np.asarray(state_or_rho, dtype=complex)
    u = basis_rotation(setting)
    if a.ndim == 1:
        p = np.abs(u @ a) ** 2
    else:
        p = np.real(np.diag(u @ a @ u.conj().T))
    return np.clip(p, 0, None)


def to_json(a: np.ndarray) -> str:
    a = np.asarray(a, dtype=complex)
    return json.dumps({"dim": int(a.shape[0]), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()})


def from_json(text: str) -> np.ndarray:
    obj = json.loads(text)
    a = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    dim = int(obj["dim"])
    if a.size == dim:
        return a
    if a.size == dim * dim:
        return a.reshape(dim, dim)
    raise ValueError(f"{a.size} entries do not match dim {dim}")


def bitstrings(n: int) -> list[str]:
    return [format(i, f"0{n}b") for i in range(1 << n)]


def iter_ops(circuit: Circuit, kinds: Iterable[str]):
    kinds = set(kinds)
    for pos, (gate, qubits) in enumerate(circuit.ops):
        if gate.kind in kinds:
            yield pos, gate, qubits
