"""Shot sampling, synthetic readout and CX noise, and calibration-matrix mitigation."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .circuits import CONTROL, build_compiled_circuit, lower_circuit
from .qsim import Circuit, apply_gate_density, bitstrings, density_matrix, marginal, n_qubits_of, zero_state

COND_LIMIT = 1e12


@dataclass(frozen=True)
class CountsVector:
    """Outcome counts keyed by bitstring; missing strings count as zero."""

    counts: Mapping[str, int]
    n_bits: int

    def __post_init__(self):
        for bits, c in self.counts.items():
            if len(bits) != self.n_bits or set(bits) - {"0", "1"}:
                raise ValueError(f"bad outcome {bits!r} for {self.n_bits} bits")
            if c < 0:
                raise ValueError(f"negative count for {bits}")

    @property
    def shots(self) -> int:
        return int(sum(self.counts.values()))

    def to_array(self) -> np.ndarray:
        """Counts in ascending bitstring order."""
        arr = np.zeros(1 << self.n_bits, dtype=np.int64)
        for bits, c in self.counts.items():
            arr[int(bits, 2)] = c
        return arr

    def probabilities(self) -> np.ndarray:
        return self.to_array() / self.shots

    @classmethod
    def from_array(cls, arr: Sequence[int]) -> "CountsVector":
        arr = np.asarray(arr)
        n = n_qubits_of(arr.size)
        return cls({b: int(c) for b, c in zip(bitstrings(n), arr) if c}, n)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["bitstring", "count"])
            for bits in bitstrings(self.n_bits):
                w.writerow([bits, int(self.counts.get(bits, 0))])

    @classmethod
    def from_csv(cls, path: str | Path) -> "CountsVector":
        with open(path, newline="") as fh:
            rows = [r for r in csv.DictReader(fh)]
        if not rows:
            raise ValueError(f"{path}: no counts")
        n = len(rows[0]["bitstring"])
        return cls({r["bitstring"]: int(r["count"]) for r in rows if int(r["count"])}, n)


@dataclass(frozen=True)
class ReadoutNoiseModel:
    """Independent per-qubit flips: ``p01`` reads 1 given 0, ``p10`` reads 0 given 1."""

    rates: tuple[tuple[float, float], ...]

    def __post_init__(self):
        for p01, p10 in self.rates:
            if not (0 <= p01 <= 1 and 0 <= p10 <= 1):
                raise ValueError(f"readout error rates must be in [0, 1], got {(p01, p10)}")

    @classmethod
    def symmetric(cls, p: float, n: int) -> "ReadoutNoiseModel":
        return cls(tuple((p, p) for _ in range(n)))

    @property
    def n_qubits(self) -> int:
        return len(self.rates)

    def qubit_matrix(self, i: int) -> np.ndarray:
        p01, p10 = self.rates[i]
        return np.array([[1 - p01, p10], [p01, 1 - p10]])

    def matrix(self) -> np.ndarray:
        m = np.ones((1, 1))
        for i in range(self.n_qubits):
            m = np.kron(m, self.qubit_matrix(i))
        return m


@dataclass(frozen=True)
class NoiseConfig:
    readout: ReadoutNoiseModel | None = None
    cx_depolarizing: float = 0.0

    @classmethod
    def from_dict(cls, obj: Mapping) -> "NoiseConfig":
        readout = obj.get("readout")
        model = None
        if readout:
            model = ReadoutNoiseModel(tuple((float(r["p01"]), float(r["p10"])) for r in readout))
        rate = float(obj.get("cx_depolarizing", 0.0))
        if not 0 <= rate <= 1:
            raise ValueError(f"cx_depolarizing must be in [0, 1], got {rate}")
        return cls(model, rate)

    @classmethod
    def load(cls, path: str | Path) -> "NoiseConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        readout = [{"p01": a, "p10": b} for a, b in self.readout.rates] if self.readout else []
        return {"readout": readout, "cx_depolarizing": self.cx_depolarizing}


# magnitude of the reported CX error rates on the two devices
DEFAULT_CX_DEPOLARIZING = 7e-3


def sample_counts(dist: np.ndarray, shots: int, seed: int | np.random.Generator | None = None) -> CountsVector:
    dist = np.asarray(dist, dtype=float)
    if shots <= 0:
        raise ValueError("shots must be positive")
    if abs(dist.sum() - 1) > 1e-8 or (dist < -1e-12).any():
        raise ValueError("dist is not a probability vector")
    rng = np.random.default_rng(seed)
    p = np.clip(dist, 0, None)
    return CountsVector.from_array(rng.multinomial(shots, p / p.sum()))


def apply_readout_noise(dist: np.ndarray, model: ReadoutNoiseModel) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    if dist.size != 1 << model.n_qubits:
        raise ValueError(f"distribution over {n_qubits_of(dist.size)} qubits, model has {model.n_qubits}")
    return model.matrix() @ dist


def calibration_counts(model: ReadoutNoiseModel, shots: int, seed=None) -> np.ndarray:
    """Sampled counts for each basis-state preparation, one column per preparation."""
    rng = np.random.default_rng(seed)
    m = model.matrix()
    cols = [rng.multinomial(shots, m[:, j] / m[:, j].sum()) for j in range(m.shape[1])]
    return np.stack(cols, axis=1)


def build_calibration_matrix(source: ReadoutNoiseModel | np.ndarray) -> np.ndarray:
    """Column j is the noisy outcome distribution when basis state j is prepared.

    ``source`` is either a noise model (tensor-product matrix) or a
    ``2^k x 2^k`` array of measured counts from the basis preparations
    (full matrix, columns normalized).
    """
    if isinstance(source, ReadoutNoiseModel):
        return source.matrix()
    counts = np.asarray(source, dtype=float)
    if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
        raise ValueError("calibration data must be a square matrix of counts")
    n_qubits_of(counts.shape[0])
    totals = counts.sum(axis=0)
    if (totals <= 0).any():
        raise ValueError("every preparation needs at least one shot")
    return counts / totals


class IllConditionedCalibration(np.linalg.LinAlgError):
    def __init__(self, cond: float):
        super().__init__(f"calibration matrix is singular or ill-conditioned (condition number {cond:.3e})")
        self.cond = cond


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.clip(v - theta, 0, None)


def _simplex_least_squares(m: np.ndarray, b: np.ndarray, tol: float = 1e-14, max_iter: int = 100_000) -> np.ndarray:
    """argmin ||m x - b||_2 over the probability simplex, by accelerated projected gradient."""
    x = np.linalg.solve(m, b)
    if (x >= -1e-12).all():
        return project_to_simplex(x)
    lip = np.linalg.norm(m, 2) ** 2
    x = project_to_simplex(x)
    y, t = x.copy(), 1.0
    for _ in range(max_iter):
        x_new = project_to_simplex(y - m.T @ (m @ y - b) / lip)
        t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
        y = x_new + (t - 1) / t_new * (x_new - x)
        if np.abs(x_new - x).max() < tol:
            return x_new
        x, t = x_new, t_new
    return x


def mitigate(noisy: CountsVector | np.ndarray, m: np.ndarray) -> np.ndarray:
    """Mitigated counts: ``shots * argmin_x ||M x shots - C_noisy||`` over probability vectors x."""
    c = noisy.to_array() if isinstance(noisy, CountsVector) else np.asarray(noisy, dtype=float)
    m = np.asarray(m, dtype=float)
    if m.shape != (c.size, c.size):
        raise ValueError(f"calibration matrix {m.shape} does not match {c.size} outcomes")
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedCalibration(cond)
    shots = c.sum()
    return shots * _simplex_least_squares(m, c / shots)


class ReadoutMitigator(TransformerMixin, BaseEstimator):
    """Calibration-matrix readout mitigation as a fit/transform estimator.

    ``fit`` takes either a ``ReadoutNoiseModel`` or the square matrix of
    basis-preparation counts; ``transform`` maps rows of noisy counts to
    mitigated counts.
    """

    def __init__(self, tensored: bool = False):
        self.tensored = tensored

    def fit(self, X, y=None):
        if isinstance(X, ReadoutNoiseModel):
            self.calibration_matrix_ = build_calibration_matrix(X)
        elif self.tensored:
            raise ValueError("tensored calibration needs a ReadoutNoiseModel")
        else:
            self.calibration_matrix_ = build_calibration_matrix(np.asarray(X))
        self.n_outcomes_ = self.calibration_matrix_.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "calibration_matrix_")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([mitigate(row, self.calibration_matrix_) for row in X])


# Two-qubit Paulis for the depolarizing twirl.
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]).astype(complex),
}


def depolarize_pair(rho: np.ndarray, qubits: tuple[int, int], rate: float) -> np.ndarray:
    """Two-qubit depolarizing channel ``(1-p) rho + p (I/4 x tr_pair rho)``."""
    if rate == 0:
        return rho
    n = n_qubits_of(rho.shape[0])
    twirled = np.zeros_like(rho)
    for a in "IXYZ":
        for b in "IXYZ":
            u = np.ones((1, 1))
            for q in range(n):
                u = np.kron(u, _PAULI[a] if q == qubits[0] else _PAULI[b] if q == qubits[1] else _PAULI["I"])
            twirled += u @ rho @ u.conj().T
    return (1 - rate) * rho + rate * twirled / 16


def run_noisy_density(circuit: Circuit, cx_depolarizing: float, initial: np.ndarray | None = None) -> np.ndarray:
    """Density-matrix run with a depolarizing channel after every CX.

    Lower the circuit first if multi-qubit gates should also pick up CX noise.
    """
    rho = density_matrix(zero_state(circuit.n_qubits) if initial is None else initial)
    for gate, qubits in circuit.ops:
        rho = apply_gate_density(rho, gate, qubits)
        if gate.kind == "CX":
            rho = depolarize_pair(rho, qubits, cx_depolarizing)
    return rho


def noisy_control_distribution(config: NoiseConfig, variant="margolus") -> np.ndarray:
    """Control-register distribution under CX depolarizing plus readout noise."""
    circuit = lower_circuit(build_compiled_circuit(variant))
    rho = run_noisy_density(circuit, config.cx_depolarizing)
    dist = marginal(np.clip(np.real(np.diag(rho)), 0, None), CONTROL)
    dist = dist / dist.sum()
    if config.readout is not None:
        dist = apply_readout_noise(dist, config.readout)
    return dist

