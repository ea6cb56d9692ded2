"""Projector witness for the pre-QFT state, evaluated from Pauli expectations.

Pauli strings are plain ``str`` over ``IXYZ`` with one letter per qubit in
register order (c0 c1 c2 q0 q1). Coefficients follow
``|Psi><Psi| = sum_s p_s sigma_s`` with ``p_s = <Psi|sigma_s|Psi> / 2^n``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .qsim import SHOR_LAYOUT, n_qubits_of, setting_probabilities

COEFF_CUTOFF = 1e-12
CERTIFY_MARGIN = 1e-9

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]).astype(complex),
}


@dataclass(frozen=True)
class PauliTerm:
    string: str
    coefficient: float


def check_pauli(s: str, n: int | None = None) -> str:
    if set(s) - set("IXYZ") or (n is not None and len(s) != n):
        raise ValueError(f"not a Pauli string on {n or len(s)} qubits: {s!r}")
    return s


def pauli_matrix(s: str) -> np.ndarray:
    return reduce(np.kron, (PAULI[c] for c in check_pauli(s)))


def pauli_expectations(state: np.ndarray) -> dict[str, float]:
    """``<psi|sigma|psi>`` for all ``4^n`` strings (a state or density matrix)."""
    a = np.asarray(state, dtype=complex)
    n = n_qubits_of(a.shape[0])
    out = {}
    for letters in itertools.product("IXYZ", repeat=n):
        s = "".join(letters)
        m = pauli_matrix(s)
        val = np.vdot(a, m @ a) if a.ndim == 1 else np.trace(m @ a)
        out[s] = float(val.real)
    return out


def pauli_decompose(state: np.ndarray, cutoff: float = COEFF_CUTOFF) -> list[PauliTerm]:
    n = n_qubits_of(np.asarray(state).shape[0])
    scale = 2.0**n
    return [
        PauliTerm(s, e / scale)
        for s, e in pauli_expectations(state).items()
        if abs(e / scale) >= cutoff
    ]


def reconstruct_operator(terms: Iterable[PauliTerm]) -> np.ndarray:
    return sum(t.coefficient * pauli_matrix(t.string) for t in terms)


def _identity(n: int) -> str:
    return "I" * n


def derivable_from(setting: str) -> set[str]:
    """Strings whose expectation follows from the counts of ``setting`` by marginalizing.

    Every way of blanking a subset of the non-identity letters, minus the
    setting itself and the all-identity string.
    """
    check_pauli(setting)
    active = [i for i, c in enumerate(setting) if c != "I"]
    out = set()
    for k in range(1, len(active) + 1):
        for blank in itertools.combinations(active, k):
            s = list(setting)
            for i in blank:
                s[i] = "I"
            out.add("".join(s))
    out.discard(_identity(len(setting)))
    return out


def is_derivable(target: str, setting: str) -> bool:
    if len(target) != len(setting):
        return False
    return all(t == "I" or t == s for t, s in zip(target, setting))


def minimal_settings(terms: Iterable[str]) -> set[str]:
    """Strings that must be measured directly: ``S_d`` minus everything derivable within it.

    A string with no identity letters can only be read from a setting equal
    to itself, so when the result contains only such strings no smaller set
    of settings covers ``S_d``.
    """
    sd = {check_pauli(t) for t in terms}
    sd = {t for t in sd if set(t) != {"I"}}
    su = set().union(*(derivable_from(t) for t in sd)) if sd else set()
    return sd - su


def covers(settings: Iterable[str], terms: Iterable[str]) -> bool:
    settings = list(settings)
    return all(any(is_derivable(t, s) for s in settings) for t in terms if set(t) != {"I"})


def reversed_label(s: str) -> str:
    """Same string written with qubit 0 rightmost (little-endian label order)."""
    return s[::-1]


def expectation_from_counts(counts, target: str, setting: str) -> float:
    """Expectation of ``target`` from outcomes measured in ``setting``'s bases.

    ``counts`` is a CountsVector, a bitstring mapping, or an array in
    ascending bitstring order (counts or probabilities). Each outcome enters
    with sign ``(-1)^(parity of its bits at target's non-I positions)``.
    """
    if not is_derivable(target, setting):
        raise ValueError(f"{target} cannot be derived from a {setting} measurement")
    arr = _as_array(counts)
    n = n_qubits_of(arr.size)
    mask = sum(1 << (n - 1 - i) for i, c in enumerate(target) if c != "I")
    signs = np.array([1 - 2 * (bin(i & mask).count("1") & 1) for i in range(arr.size)])
    return float(signs @ arr / arr.sum())


def _as_array(counts) -> np.ndarray:
    if hasattr(counts, "to_array"):
        return counts.to_array().astype(float)
    if isinstance(counts, Mapping):
        n = len(next(iter(counts)))
        arr = np.zeros(1 << n)
        for bits, c in counts.items():
            arr[int(bits, 2)] = c
        return arr
    return np.asarray(counts, dtype=float)


def expectations_from_settings(data: Mapping[str, np.ndarray], terms: Iterable[str]) -> dict[str, float]:
    """Harvest each term's expectation from the first measured setting it derives from."""
    out = {}
    for t in terms:
        if set(t) == {"I"}:
            out[t] = 1.0
            continue
        for setting in sorted(data):
            if is_derivable(t, setting):
                out[t] = expectation_from_counts(data[setting], t, setting)
                break
        else:
            raise KeyError(f"no measured setting yields {t}")
    return out


def measure_settings(state_or_rho: np.ndarray, settings: Iterable[str]) -> dict[str, np.ndarray]:
    """Exact outcome probabilities for each setting."""
    return {s: setting_probabilities(state_or_rho, s) for s in settings}


def overlap_from_expectations(expectations: Mapping[str, float], terms: Sequence[PauliTerm]) -> float:
    """``tr(|Psi><Psi| rho) = sum_s p_s <sigma_s>_rho``."""
    total = 0.0
    for t in terms:
        if set(t.string) == {"I"}:
            e = expectations.get(t.string, 1.0)
        else:
            try:
                e = expectations[t.string]
            except KeyError:
                raise KeyError(f"missing expectation for {t.string}") from None
        total += t.coefficient * e
    return float(total)


@dataclass(frozen=True)
class WitnessSpec:
    alpha: float
    target_state: np.ndarray

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")


def witness_value(spec: WitnessSpec | float, overlap: float) -> float:
    """``tr(W rho) = alpha - overlap``; negative values flag entanglement."""
    alpha = spec.alpha if isinstance(spec, WitnessSpec) else float(spec)
    return alpha - overlap


@dataclass(frozen=True)
class Bipartition:
    side_a: frozenset[int]
    n_qubits: int = SHOR_LAYOUT.total

    def __post_init__(self):
        a = frozenset(self.side_a)
        if not a or len(a) >= self.n_qubits or not a <= set(range(self.n_qubits)):
            raise ValueError(f"{sorted(a)} is not a proper nonempty subset of {self.n_qubits} qubits")
        object.__setattr__(self, "side_a", a)

    @property
    def side_b(self) -> frozenset[int]:
        return frozenset(range(self.n_qubits)) - self.side_a

    def canonical(self) -> "Bipartition":
        """The representative whose first side is the smaller one (ties: holds qubit 0)."""
        a, b = self.side_a, self.side_b
        if len(b) < len(a) or (len(a) == len(b) and 0 in b):
            a = b
        return Bipartition(a, self.n_qubits)

    def __eq__(self, other):
        if not isinstance(other, Bipartition):
            return NotImplemented
        return self.n_qubits == other.n_qubits and {self.side_a, self.side_b} == {other.side_a, other.side_b}

    def __hash__(self):
        return hash((self.n_qubits, frozenset({self.side_a, self.side_b})))

    def label(self, names: Sequence[str] = SHOR_LAYOUT.names) -> str:
        c = self.canonical()
        fmt = lambda side: "(" + "".join(names[i] for i in sorted(side)) + ")"  # noqa: E731
        return fmt(c.side_a) + fmt(c.side_b)

    @classmethod
    def parse(cls, text: str, names: Sequence[str] = SHOR_LAYOUT.names) -> "Bipartition":
        """Parse labels such as ``(q0q1)(c0c1c2)``; the sides must partition the qubits."""
        groups = [g for g in text.replace(")", " ").replace("(", " ").split() if g]
        if len(groups) != 2:
            raise ValueError(f"expected two groups in {text!r}")
        sides = []
        for g in groups:
            found = [names.index(g[i:i + 2]) for i in range(0, len(g), 2)]
            sides.append(set(found))
        if sides[0] & sides[1] or sides[0] | sides[1] != set(range(len(names))):
            raise ValueError(f"{text!r} does not split the qubits into two disjoint sides")
        return cls(frozenset(sides[0]), len(names))


def all_bipartitions(n: int = SHOR_LAYOUT.total) -> list[Bipartition]:
    seen = []
    for k in range(1, n // 2 + 1):
        for a in itertools.combinations(range(n), k):
            b = Bipartition(frozenset(a), n)
            if b not in seen:
                seen.append(b)
    return seen


def max_product_overlap(state: np.ndarray, bipartition: Bipartition) -> float:
    """Largest squared Schmidt coefficient across the cut."""
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state.size)
    a, b = sorted(bipartition.side_a), sorted(bipartition.side_b)
    mat = state.reshape((2,) * n).transpose(a + b).reshape(1 << len(a), -1)
    return float(np.linalg.svd(mat, compute_uv=False)[0] ** 2)


def bipartition_table(state: np.ndarray) -> dict[Bipartition, float]:
    n = n_qubits_of(np.asarray(state).size)
    return {b: max_product_overlap(state, b) for b in all_bipartitions(n)}


def witness_alpha(state: np.ndarray) -> float:
    return max(bipartition_table(state).values())


def certify_bipartite_entanglement(overlap: float, state: np.ndarray, uncertainty: float = 0.0,
                                   margin: float = CERTIFY_MARGIN) -> list[dict]:
    """Per-bipartition verdict: entangled across the cut iff overlap - uncertainty > beta + margin.

    ``uncertainty`` is the error bar on the measured overlap; a cut is only
    certified when the whole interval clears its beta.
    """
    if not 0 <= overlap <= 1:
        raise ValueError("overlap must be in [0, 1]")
    if uncertainty < 0:
        raise ValueError("uncertainty must be non-negative")
    rows = []
    for b, beta in bipartition_table(state).items():
        rows.append({"bipartition": b, "label": b.label(), "beta": beta, "entangled": overlap - uncertainty > beta + margin})
    return rows


def _random_qubit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def _sweep_product(tensor, factors, rng, tol, max_sweeps) -> float:
    n = tensor.ndim
    letters = "abcdefghijklmnopqrstuvwxyz"[:n]
    value = -1.0
    for _ in range(max_sweeps):
        for i in range(n):
            others = [j for j in range(n) if j != i]
            expr = letters + "," + ",".join(letters[j] for j in others) + "->" + letters[i]
            cond = np.einsum(expr, tensor, *(factors[j].conj() for j in others))
            norm = np.linalg.norm(cond)
            if norm == 0:
                factors[i] = _random_qubit(rng)
                continue
            factors[i] = cond / norm
        new = float(norm**2)
        if abs(new - value) < tol:
            return new
        value = new
    return value


def greedy_product_search(state: np.ndarray, restarts: int = 50, seed: int | None = 0,
                          tol: float = 1e-10, max_sweeps: int = 10_000) -> tuple[float, list[np.ndarray]]:
    """Best ``|<phi_1 ... phi_n|psi>|^2`` over fully product states, by alternating updates.

    Each restart draws random single-qubit factors, then repeatedly replaces
    one factor by the normalized vector it is contracted against (the exact
    optimum with the others fixed) until the overlap changes by less than
    ``tol``.
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state.size)
    tensor = state.reshape((2,) * n)
    rng = np.random.default_rng(seed)
    best, best_factors = -1.0, None
    for _ in range(restarts):
        factors = [_random_qubit(rng) for _ in range(n)]
        value = _sweep_product(tensor, factors, rng, tol, max_sweeps)
        if value > best:
            best, best_factors = value, factors
    return best, best_factors


def product_state(factors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, factors)
