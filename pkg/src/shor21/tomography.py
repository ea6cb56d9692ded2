"""Pauli-basis state tomography of the control register."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .circuits import CONTROL, Variant, build_compiled_circuit
from .noise import CountsVector, project_to_simplex
from .qsim import density_matrix, fidelity, n_qubits_of, partial_trace, run_circuit, setting_probabilities
from .witness import expectation_from_counts, is_derivable, pauli_matrix


def tomography_settings(n: int) -> list[str]:
    if n < 1:
        raise ValueError("need at least one qubit")
    return ["".join(p) for p in itertools.product("XYZ", repeat=n)]


@dataclass
class TomographyDataset:
    """Outcome frequencies per measurement setting.

    ``data`` maps a setting such as ``"XYZ"`` to counts in ascending
    bitstring order. With ``shots=None`` the entries are exact probabilities.
    """

    n_qubits: int
    data: dict[str, np.ndarray] = field(default_factory=dict)
    shots: int | None = None

    def check_complete(self) -> None:
        missing = set(tomography_settings(self.n_qubits)) - set(self.data)
        if missing:
            raise ValueError(f"dataset is missing settings {sorted(missing)}")
        if self.shots is not None:
            totals = {int(np.sum(v)) for v in self.data.values()}
            if totals != {self.shots}:
                raise ValueError(f"settings have unequal shot totals {sorted(totals)}")

    def save(self, directory: str | Path) -> None:
        if self.shots is None:
            raise ValueError("only sampled datasets are written as counts files")
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for setting, counts in self.data.items():
            CountsVector.from_array(counts).to_csv(directory / f"{setting}.csv")

    @classmethod
    def load(cls, directory: str | Path) -> "TomographyDataset":
        directory = Path(directory)
        data = {p.stem: CountsVector.from_csv(p) for p in sorted(directory.glob("*.csv"))}
        if not data:
            raise ValueError(f"no setting files in {directory}")
        n = len(next(iter(data)))
        arrays = {}
        for k, v in data.items():
            arrays[k] = v.to_array()
        shots = {int(a.sum()) for a in arrays.values()}
        if len(shots) != 1:
            raise ValueError(f"settings have unequal shot totals {sorted(shots)}")
        ds = cls(n, arrays, shots.pop())
        ds.check_complete()
        return ds


def simulate_tomography(rho: np.ndarray, shots: int | None, seed=None) -> TomographyDataset:
    """Per-setting Born probabilities, multinomially sampled unless ``shots`` is None."""
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits_of(rho.shape[0])
    rng = np.random.default_rng(seed)
    data = {}
    for setting in tomography_settings(n):
        p = setting_probabilities(rho, setting)
        p = p / p.sum()
        data[setting] = p if shots is None else rng.multinomial(shots, p)
    return TomographyDataset(n, data, shots)


def harvested_expectations(dataset: TomographyDataset) -> dict[str, float]:
    """Every Pauli expectation, averaged over all settings it can be read from."""
    dataset.check_complete()
    out = {}
    for letters in itertools.product("IXYZ", repeat=dataset.n_qubits):
        s = "".join(letters)
        if set(s) == {"I"}:
            out[s] = 1.0
            continue
        vals = [expectation_from_counts(c, s, setting) for setting, c in dataset.data.items() if is_derivable(s, setting)]
        out[s] = float(np.mean(vals))
    return out


def project_to_density_matrix(mat: np.ndarray) -> np.ndarray:
    """Nearest unit-trace PSD matrix in Frobenius norm.

    The Hermitian part is diagonalized and its spectrum projected onto the
    probability simplex, which clips negative eigenvalues and shifts the rest
    to restore unit trace.
    """
    h = (mat + mat.conj().T) / 2
    w, v = np.linalg.eigh(h)
    w = project_to_simplex(w)
    return (v * w) @ v.conj().T


def reconstruct(dataset: TomographyDataset) -> np.ndarray:
    expectations = harvested_expectations(dataset)
    dim = 1 << dataset.n_qubits
    linear = sum(e * pauli_matrix(s) for s, e in expectations.items()) / dim
    return project_to_density_matrix(linear)


def ideal_control_state(variant: Variant | str = Variant.MARGOLUS) -> np.ndarray:
    """Reduced state of (c0, c1, c2) after the inverse QFT, from exact simulation."""
    final = run_circuit(build_compiled_circuit(variant))
    return partial_trace(density_matrix(final), CONTROL)


def score_against_ideal(rho_hat: np.ndarray, ideal: np.ndarray | None = None) -> dict:
    ideal = ideal_control_state() if ideal is None else ideal
    rho_hat = np.asarray(rho_hat, dtype=complex)
    if rho_hat.shape != ideal.shape:
        raise ValueError(f"expected a {ideal.shape} matrix, got {rho_hat.shape}")
    return {
        "fidelity": fidelity(ideal, rho_hat),
        "real": rho_hat.real.round(6).tolist(),
        "imag": rho_hat.imag.round(6).tolist(),
        "ideal_real": ideal.real.round(6).tolist(),
        "ideal_imag": ideal.imag.round(6).tolist(),
        "ideal_max_abs_imag": float(np.abs(ideal.imag).max()),
    }


class StateTomography(BaseEstimator):
    """Estimator wrapper: ``fit`` on a dataset, ``score`` against a reference state."""

    def __init__(self, n_qubits: int = 3):
        self.n_qubits = n_qubits

    def fit(self, X: TomographyDataset, y=None):
        if X.n_qubits != self.n_qubits:
            raise ValueError(f"dataset has {X.n_qubits} qubits, estimator expects {self.n_qubits}")
        self.density_matrix_ = reconstruct(X)
        return self

    def score(self, X=None, y=None) -> float:
        """Fidelity with ``y`` (default: the ideal control-register state)."""
        reference = ideal_control_state() if y is None else np.asarray(y)
        return fidelity(reference, self.density_matrix_)
