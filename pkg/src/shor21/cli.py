"""``shor21`` command line: batch runs of the compiled N=21 pipeline.

Randomness: every subcommand derives independent generators from the single
``--seed`` via ``numpy.random.SeedSequence(seed).spawn``; child 0 drives
circuit shots, child 1 calibration shots, child 2 anything else (greedy
restarts, tomography settings). Same seed and arguments give byte-identical
output files.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import circuits, noise, numtheory, relphase, tomography, witness
from .qsim import (
    bitstrings,
    density_matrix,
    kolmogorov_distance,
    partial_trace,
    run_circuit,
    setting_probabilities,
    to_json,
)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
HIST_WIDTH = 60
DEFAULT_READOUT = 0.03


class UsageError(Exception):
    pass


def seeds(seed: int, n: int = 3) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def ascii_histogram(labels, values, width: int = HIST_WIDTH) -> str:
    values = np.asarray(values, dtype=float)
    top = values.max() if values.size and values.max() > 0 else 1.0
    lines = []
    for label, v in zip(labels, values):
        bar = "#" * int(round(width * v / top))
        lines.append(f"{label} {v:8.4f} |{bar}")
    return "\n".join(lines)


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_noise(args) -> noise.NoiseConfig | None:
    if not args.noise:
        return None
    try:
        cfg = noise.NoiseConfig.load(args.noise)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad noise config {args.noise}: {exc}") from exc
    if cfg.readout is not None and cfg.readout.n_qubits not in (3, 5):
        raise UsageError("readout noise must list 3 (control) or 5 (all) qubits")
    return cfg


def _control_readout(cfg: noise.NoiseConfig | None) -> noise.ReadoutNoiseModel | None:
    if cfg is None or cfg.readout is None:
        return None
    rates = cfg.readout.rates
    return noise.ReadoutNoiseModel(rates[:3])


def _control_distribution(args, cfg) -> np.ndarray:
    if cfg is None:
        return circuits.ideal_control_distribution(args.variant)
    return noise.noisy_control_distribution(noise.NoiseConfig(_control_readout(cfg), cfg.cx_depolarizing), args.variant)


def _dist_dict(dist) -> dict:
    return {b: float(p) for b, p in zip(bitstrings(3), dist)}


def cmd_simulate(args) -> int:
    cfg = _load_noise(args)
    dist = _control_distribution(args, cfg)
    report = {"variant": args.variant, "noise": cfg.to_dict() if cfg else None, "exact": args.exact,
              "distribution": _dist_dict(dist)}
    labels = bitstrings(3)
    if args.exact:
        shown = dist
        rows = [(b, float(p)) for b, p in zip(labels, dist)]
        header = "bitstring,probability"
    else:
        counts = noise.sample_counts(dist, args.shots, seeds(args.seed)[0]).to_array()
        report.update(shots=args.shots, seed=args.seed, counts=dict(zip(labels, map(int, counts))))
        shown = counts / counts.sum()
        rows = list(zip(labels, map(int, counts)))
        header = "bitstring,count"
    if args.out:
        if args.format == "csv":
            write_atomic(args.out, header + "\n" + "".join(f"{b},{v}\n" for b, v in rows))
        else:
            write_atomic(args.out, _dumps(report))
    print(ascii_histogram(labels, shown))
    return EXIT_OK


def cmd_factor(args) -> int:
    cfg = _load_noise(args)
    if args.counts:
        try:
            cv = noise.CountsVector.from_csv(args.counts)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"bad counts file {args.counts}: {exc}") from exc
        if cv.n_bits != 3:
            raise UsageError("counts must be over 3-bit control outcomes")
        counts = cv.counts
    elif args.exact:
        raise UsageError("factor needs sampled counts; drop --exact or pass --counts")
    else:
        dist = _control_distribution(args, cfg)
        counts = noise.sample_counts(dist, args.shots, seeds(args.seed)[0]).counts
    report = numtheory.shor_pipeline(counts)
    if args.out:
        write_atomic(args.out, _dumps(report))
    print(f"{'outcome':>7} {'count':>7} {'order':>5} factors")
    for bits, row in report["outcomes"].items():
        order = "-" if row["order"] is None else row["order"]
        print(f"{bits:>7} {row['count']:>7} {order:>5} {row['factors'] or '-'}")
    print(f"success fraction {report['success_fraction']:.4f}")
    if report["factors"] is None:
        print("no outcome yielded a nontrivial factor")
        return EXIT_DOMAIN
    p, q = report["factors"]
    print(f"{report['N']} = {p} x {q}")
    return EXIT_OK


def cmd_verify_relphase(args) -> int:
    if args.inject_101:
        full, rel = relphase.injected_counterexample()
    else:
        full = circuits.build_compiled_circuit(circuits.Variant.FULL_TOFFOLI)
        rel = circuits.build_compiled_circuit(circuits.Variant.MARGOLUS)
    cert = relphase.verify_substitution(full, rel)
    if args.out:
        write_atomic(args.out, cert.to_json() + "\n")
    print(cert.table())
    return EXIT_OK if cert.safe else EXIT_DOMAIN


def _pre_qft_rho(args, cfg) -> np.ndarray:
    circuit = circuits.build_compiled_circuit(args.variant)
    if cfg is None or cfg.cx_depolarizing == 0:
        return density_matrix(run_circuit(circuit, stop=circuit.marks["pre_qft"]))
    pre = circuits.Circuit(circuit.n_qubits)
    for gate, qubits in circuit.ops[: circuit.marks["pre_qft"]]:
        pre.append(gate, *qubits)
    return noise.run_noisy_density(circuits.lower_circuit(pre), cfg.cx_depolarizing)


def cmd_witness(args) -> int:
    cfg = _load_noise(args)
    if args.target_overlap is not None and not 0 <= args.target_overlap <= 1:
        raise UsageError("--target-overlap must be in [0, 1]")
    if args.overlap_uncertainty < 0:
        raise UsageError("--overlap-uncertainty must be non-negative")
    psi = circuits.ideal_pre_qft_state()
    terms = witness.pauli_decompose(psi)
    settings = sorted(witness.minimal_settings(t.string for t in terms))

    if args.target_overlap is not None:
        # white noise mixed in until tr(P rho) hits the target
        lam = (args.target_overlap - 1 / 32) / (1 - 1 / 32)
        rho = lam * density_matrix(psi) + (1 - lam) * np.eye(32) / 32
    else:
        rho = _pre_qft_rho(args, cfg)

    readout = cfg.readout if cfg is not None and cfg.readout is not None and cfg.readout.n_qubits == 5 else None
    rng = seeds(args.seed)[0]
    data = {}
    for s, p in witness.measure_settings(rho, settings).items():
        if readout is not None:
            p = noise.apply_readout_noise(p, readout)
        data[s] = p if args.exact else noise.sample_counts(p / p.sum(), args.shots, rng).to_array()
    expectations = witness.expectations_from_settings(data, [t.string for t in terms])
    overlap = witness.overlap_from_expectations(expectations, terms)
    table = witness.bipartition_table(psi)
    alpha = max(table.values())
    clipped = min(max(overlap, 0.0), 1.0)
    verdicts = witness.certify_bipartite_entanglement(clipped, psi, args.overlap_uncertainty)
    report = {
        "alpha": alpha,
        "overlap": overlap,
        "witness": witness.witness_value(alpha, overlap),
        "overlap_uncertainty": args.overlap_uncertainty,
        "n_terms": len(terms),
        "bipartitions": [{"label": v["label"], "beta": v["beta"], "entangled": v["entangled"]} for v in verdicts],
        "settings": sorted(witness.reversed_label(s) for s in settings),
        "settings_label_order": "q1 q0 c2 c1 c0",
        "exact": args.exact,
        "shots": None if args.exact else args.shots,
        "seed": args.seed,
    }
    if args.out:
        write_atomic(args.out, _dumps(report))
    print(f"alpha {alpha:.4f}  overlap {overlap:.4f}  tr(W rho) {report['witness']:+.4f}")
    print(f"{len(terms)} Pauli terms from {len(settings)} settings")
    for v in verdicts:
        print(f"{v['label']:<16} beta {v['beta']:.4f}  {'entangled' if v['entangled'] else '-'}")
    return EXIT_OK


def cmd_tomography(args) -> int:
    cfg = _load_noise(args)
    ideal = tomography.ideal_control_state(args.variant)
    if args.data:
        try:
            dataset = tomography.TomographyDataset.load(args.data)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"bad tomography data {args.data}: {exc}") from exc
    else:
        rho = ideal
        if cfg is not None and cfg.cx_depolarizing:
            circuit = circuits.lower_circuit(circuits.build_compiled_circuit(args.variant))
            rho = partial_trace(noise.run_noisy_density(circuit, cfg.cx_depolarizing), circuits.CONTROL)
        readout = _control_readout(cfg)
        rng = seeds(args.seed)[2]
        data = {}
        for setting in tomography.tomography_settings(3):
            p = setting_probabilities(rho, setting)
            if readout is not None:
                p = noise.apply_readout_noise(p, readout)
            p = p / p.sum()
            data[setting] = p if args.exact else rng.multinomial(args.shots, p)
        dataset = tomography.TomographyDataset(3, data, None if args.exact else args.shots)
        if args.save_data and not args.exact:
            dataset.save(args.save_data)
    rho_hat = tomography.reconstruct(dataset)
    report = tomography.score_against_ideal(rho_hat, ideal)
    report.update(shots=dataset.shots, seed=args.seed, exact=dataset.shots is None)
    if args.out:
        write_atomic(args.out, _dumps(report))
        write_atomic(Path(args.out).with_suffix(".matrix.json"), to_json(rho_hat) + "\n")
    print(f"fidelity {report['fidelity']:.6f}")
    names = [f"{i:03b}" for i in range(8)]
    for part in ("real", "imag"):
        print(f"{part}:")
        print("      " + " ".join(f"{n:>7}" for n in names))
        for n, row in zip(names, report[part]):
            print(f"{n}  " + " ".join(f"{v:7.3f}" for v in row))
    return EXIT_OK


def cmd_mitigate_demo(args) -> int:
    cfg = _load_noise(args)
    readout = _control_readout(cfg) or noise.ReadoutNoiseModel.symmetric(DEFAULT_READOUT, 3)
    shot_rng, cal_rng, _ = seeds(args.seed)
    ideal = circuits.ideal_control_distribution(args.variant)
    noisy_dist = noise.apply_readout_noise(ideal, readout)
    noisy = noise.sample_counts(noisy_dist, args.shots, shot_rng)
    cal = noise.build_calibration_matrix(noise.calibration_counts(readout, args.shots, cal_rng))
    mitigated = noise.mitigate(noisy, cal)
    p_noisy = noisy.probabilities()
    p_mit = mitigated / mitigated.sum()
    report = {
        "shots": args.shots,
        "seed": args.seed,
        "readout": [{"p01": a, "p10": b} for a, b in readout.rates],
        "ideal": _dist_dict(ideal),
        "noisy": _dist_dict(p_noisy),
        "mitigated": _dist_dict(p_mit),
        "distance_noisy": kolmogorov_distance(ideal, p_noisy),
        "distance_mitigated": kolmogorov_distance(ideal, p_mit),
    }
    if args.out:
        write_atomic(args.out, _dumps(report))
    labels = bitstrings(3)
    for name, dist in (("ideal", ideal), ("noisy", p_noisy), ("mitigated", p_mit)):
        print(name)
        print(ascii_histogram(labels, dist))
    print(f"D(ideal, noisy) {report['distance_noisy']:.4f}  D(ideal, mitigated) {report['distance_mitigated']:.4f}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "factor": cmd_factor,
    "verify-relphase": cmd_verify_relphase,
    "witness": cmd_witness,
    "tomography": cmd_tomography,
    "mitigate-demo": cmd_mitigate_demo,
}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shor21", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--shots", type=_positive, default=8192)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--variant", choices=["full", "margolus"], default="margolus")
        p.add_argument("--noise", metavar="PATH")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--exact", action="store_true", help="use exact probabilities instead of sampling")
        if name == "factor":
            p.add_argument("--counts", metavar="CSV", help="bitstring,count file to factor from")
        if name == "verify-relphase":
            p.add_argument("--inject-101", action="store_true", help="check a circuit that does hit |101>")
        if name == "witness":
            p.add_argument("--target-overlap", type=float, help="mix white noise into the ideal state to this overlap")
            p.add_argument("--overlap-uncertainty", type=float, default=0.0,
                           help="error bar subtracted from the overlap before comparing with each beta")
        if name == "tomography":
            p.add_argument("--data", metavar="DIR", help="read per-setting CSV files instead of simulating")
            p.add_argument("--save-data", metavar="DIR", help="write the simulated per-setting CSV files")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.format == "csv" and args.command != "simulate":
        print("shor21: --format csv is only available for simulate", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"shor21: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
