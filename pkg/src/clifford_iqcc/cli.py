"""Command-line surface: run, map, fci, stats, interior-sweep.

Option precedence is CLI flag > CLIFFORD_IQCC_* environment variable >
config file (key=value lines mirroring RunConfig fields) > built-in
default. Traces are JSON lines (a meta object first, then one iteration
record per line); the CSV mirrors what the convergence plots need.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import oracle
from .chem import (
    build_second_quantized,
    hartree_fock_occupation,
    load_qubit_hamiltonian,
    parse_fcidump,
    save_qubit_hamiltonian,
)
from .engine import (
    IterationRecord,
    RunConfig,
    compile_final_circuit,
    run as engine_run,
)
from .interior import sweep_interior
from .mappings import MappingKind, map_operator, reference_circuit
from .pauli import QubitOperator, max_term_count
from .stabilizer import CliffordCircuit

ENV_PREFIX = "CLIFFORD_IQCC_"

CONFIG_FIELDS = {
    "mapping": str,
    "epsilon_conv": float,
    "max_iterations": int,
    "selection_mode": str,
    "prune_eps": float,
    "max_candidate_rank": int,
    "compression": bool,
    "multi_generator": bool,
    "multi_k": int,
}

# CLI flag name -> RunConfig field
FLAG_FIELDS = {
    "mapping": "mapping",
    "eps": "epsilon_conv",
    "max_iter": "max_iterations",
    "select": "selection_mode",
    "prune_eps": "prune_eps",
    "max_rank": "max_candidate_rank",
    "compress": "compression",
    "multi_gen": "multi_k",
}


class CliError(Exception):
    pass


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise CliError(f"expected a boolean, got {text!r}")


def _read_config_file(path: Path) -> dict:
    values = {}
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("["):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{line_no}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip().strip('"')
        if key not in CONFIG_FIELDS:
            raise CliError(f"{path}:{line_no}: unknown option {key!r}")
        values[key] = value
    return values


def _coerce(field: str, value):
    if isinstance(value, str):
        kind = CONFIG_FIELDS[field]
        if kind is bool:
            return _parse_bool(value)
        return kind(value)
    return value


def build_run_config(args) -> RunConfig:
    """Merge CLI flags, environment overrides, and a config file."""
    values = {}
    if args.config:
        values.update(_read_config_file(Path(args.config)))
    for field in CONFIG_FIELDS:
        env = os.environ.get(ENV_PREFIX + field.upper())
        if env is not None:
            values[field] = env
    for flag, field in FLAG_FIELDS.items():
        given = getattr(args, flag, None)
        if given is not None:
            values[field] = given
    if "multi_k" in values:
        values["multi_k"] = _coerce("multi_k", values["multi_k"])
        if values["multi_k"] > 1:
            values.setdefault("multi_generator", True)
    kwargs = {}
    for field, value in values.items():
        value = _coerce(field, value)
        if field == "mapping":
            value = MappingKind(str(value).lower())
        kwargs[field] = value
    return RunConfig(**kwargs)


def _detect_kind(path: Path, explicit: Optional[str]) -> str:
    if explicit:
        return explicit
    suffix = path.suffix.lower()
    if suffix == ".fcidump":
        return "fcidump"
    if suffix == ".qubitop":
        return "qubitop"
    raise CliError(
        f"cannot infer input kind from {path.name!r}; pass --kind")


def _parse_occupation(text: str) -> List[int]:
    if not set(text) <= {"0", "1"}:
        raise CliError("--ref-occ expects a bit string like 1100")
    return [int(ch) for ch in text]


def _diagonal_reference_bits(H: QubitOperator) -> List[int]:
    """Computational-basis state minimizing the diagonal part of H."""
    if H.n_qubits > 20:
        return [0] * H.n_qubits
    best_bits = 0
    best_val = None
    diag = [(z, coeff.real) for (x, z), coeff in H._terms.items() if x == 0]
    for bits in range(2 ** H.n_qubits):
        val = 0.0
        for z, coeff in diag:
            val += -coeff if (z & bits).bit_count() % 2 else coeff
        if best_val is None or val < best_val - 1e-15:
            best_val = val
            best_bits = bits
    return [(best_bits >> q) & 1 for q in range(H.n_qubits)]


def load_problem(args):
    """Returns (H0, reference circuit) for either input kind."""
    path = Path(args.input)
    if not path.exists():
        raise CliError(f"input file {path} not found")
    kind = _detect_kind(path, getattr(args, "kind", None))
    mapping = MappingKind((getattr(args, "mapping", None) or "jw").lower())
    ref_occ = getattr(args, "ref_occ", None)
    if kind == "fcidump":
        integrals = parse_fcidump(path.read_text())
        H = map_operator(build_second_quantized(integrals),
                         integrals.n_spin_orbitals, mapping)
        occ = (_parse_occupation(ref_occ) if ref_occ
               else hartree_fock_occupation(integrals))
        if len(occ) != integrals.n_spin_orbitals:
            raise CliError("--ref-occ length does not match spin orbitals")
        ref = reference_circuit(occ, mapping)
    else:
        H = load_qubit_hamiltonian(path.read_text())
        bits = (_parse_occupation(ref_occ) if ref_occ
                else _diagonal_reference_bits(H))
        if len(bits) != H.n_qubits:
            raise CliError("--ref-occ length does not match qubit count")
        ref = CliffordCircuit(H.n_qubits)
        for q, bit in enumerate(bits):
            if bit:
                ref.add("X", q)
    return H, ref


def _write_trace(path: Path, records: Sequence[IterationRecord],
                 meta: dict):
    with open(path, "w") as out:
        out.write(json.dumps({"type": "meta", **meta}) + "\n")
        for rec in records:
            out.write(rec.to_json() + "\n")


def _read_trace(path: Path):
    meta = {}
    records = []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        if raw.get("type") == "meta":
            meta = raw
        else:
            records.append(IterationRecord.from_json(line))
    return meta, records


def _write_csv(path: Path, records: Sequence[IterationRecord],
               fci: Optional[float]):
    lines = ["iter,energy,error_vs_fci,n_terms,dis_size,phi,pauli"]
    for rec in records:
        err = "" if fci is None else repr(rec.energy - fci)
        lines.append(f"{rec.m},{rec.energy!r},{err},{rec.n_terms},"
                     f"{rec.dis_size},{rec.phi!r},{rec.chosen.to_compact() or 'I'}")
    path.write_text("\n".join(lines) + "\n")


def cmd_run(args) -> int:
    H, ref = load_problem(args)
    cfg = build_run_config(args)
    records = engine_run(H, ref, cfg)
    converged = getattr(records, "converged", True)

    fci = args.fci_ref
    if fci is None and H.n_qubits <= oracle.DEFAULT_QUBIT_CAP:
        fci = oracle.ground_energy(H)
    meta = {
        "input": str(args.input),
        "mapping": cfg.mapping.value,
        "selection_mode": cfg.selection_mode,
        "n_qubits": H.n_qubits,
        "fci_reference": fci,
        "converged": converged,
    }
    if args.trace:
        _write_trace(Path(args.trace), records, meta)
    if args.csv:
        _write_csv(Path(args.csv), records, fci)
    if args.dump_circuit:
        final = compile_final_circuit(list(records), ref)
        Path(args.dump_circuit).write_text(final.dump())

    last = records[-1].energy if records else None
    print(f"iterations: {len(records)}")
    if last is not None:
        print(f"final energy: {last!r}")
        if fci is not None:
            print(f"error vs reference: {last - fci:.3e}")
    elif fci is not None:
        print(f"reference energy: {fci!r}")
    print("converged" if converged else "stopped at max iterations")
    return 0 if converged else 2


def cmd_map(args) -> int:
    path = Path(args.input)
    integrals = parse_fcidump(path.read_text())
    mapping = MappingKind((args.mapping or "jw").lower())
    H = map_operator(build_second_quantized(integrals),
                     integrals.n_spin_orbitals, mapping)
    Path(args.output).write_text(save_qubit_hamiltonian(H))
    print(f"{H.n_qubits} qubits, {len(H)} terms -> {args.output}")
    return 0


def cmd_fci(args) -> int:
    H, _ = load_problem(args)
    energy = oracle.ground_energy(H)
    print(repr(energy))
    return 0


def _detect_plateau(terms: List[int]):
    """First iteration where growth drops below 1% over 3 steps, plus the
    leveled value (the largest count seen from that point on)."""
    for i in range(3, len(terms)):
        base = max(terms[i - 3], 1)
        if abs(terms[i] - terms[i - 3]) / base < 0.01:
            return i + 1, max(terms[i:])
    return None


def cmd_stats(args) -> int:
    meta, records = _read_trace(Path(args.trace))
    fci = meta.get("fci_reference")
    print(f"{'iter':>5} {'energy':>20} {'error':>12} {'n_terms':>8} "
          f"{'dis':>6} {'pauli':>16}")
    for rec in records:
        err = f"{rec.energy - fci:.3e}" if fci is not None else "-"
        print(f"{rec.m:>5} {rec.energy:>20.12f} {err:>12} {rec.n_terms:>8} "
              f"{rec.dis_size:>6} {rec.chosen.to_compact() or 'I':>16}")
    if not records:
        return 0
    n_qubits = meta.get("n_qubits", records[0].chosen.n_qubits)
    ceiling = max_term_count(n_qubits)
    peak = max(r.n_terms for r in records)
    print(f"term ceiling: {ceiling} (peak {peak}"
          f"{', exceeded!' if peak > ceiling else ''})")
    print(f"largest chosen generator rank: "
          f"{max(r.chosen.weight() for r in records)}")
    plateau = _detect_plateau([r.n_terms for r in records])
    if plateau:
        print(f"terms level off near {plateau[1]} (iteration {plateau[0]})")
    else:
        print("no term plateau detected")
    return 0


def cmd_interior_sweep(args) -> int:
    H, ref = load_problem(args)
    _, records = _read_trace(Path(args.trace))
    if not records:
        raise CliError("trace holds no iteration records")
    updated, energies = sweep_interior(records, H, ref, passes=args.passes)
    start = records[-1].energy
    print(f"starting energy: {start!r}")
    for step, energy in enumerate(energies, start=1):
        print(f"sweep step {step}: {energy!r}")
    if args.out:
        meta = {"input": str(args.input), "swept": True,
                "n_qubits": H.n_qubits}
        _write_trace(Path(args.out), updated, meta)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clifford-iqcc",
        description="Clifford-circuit iterative qubit coupled cluster")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem_flags(p):
        p.add_argument("input")
        p.add_argument("--kind", choices=["fcidump", "qubitop"])
        p.add_argument("--mapping", choices=["jw", "bk", "jkmn"])
        p.add_argument("--ref-occ", dest="ref_occ",
                       help="reference occupation bit string")

    p_run = sub.add_parser("run", help="optimize a Hamiltonian")
    add_problem_flags(p_run)
    p_run.add_argument("--select", choices=["rotosolve", "gradient"])
    p_run.add_argument("--eps", type=float,
                       help="convergence threshold on the energy improvement")
    p_run.add_argument("--max-iter", dest="max_iter", type=int)
    p_run.add_argument("--prune-eps", dest="prune_eps", type=float)
    p_run.add_argument("--max-rank", dest="max_rank", type=int)
    p_run.add_argument("--compress", action="store_const", const=True,
                       default=None)
    p_run.add_argument("--multi-gen", dest="multi_gen", type=int,
                       help="fold up to K mutually commuting generators per step")
    p_run.add_argument("--config", help="key=value config file")
    p_run.add_argument("--fci-ref", dest="fci_ref", type=float)
    p_run.add_argument("--trace", help="write JSONL trace here")
    p_run.add_argument("--csv", help="write CSV trace here")
    p_run.add_argument("--dump-circuit", dest="dump_circuit",
                       help="write the compiled final circuit here")
    p_run.set_defaults(func=cmd_run)

    p_map = sub.add_parser("map", help="FCIDUMP to qubit-operator file")
    p_map.add_argument("input")
    p_map.add_argument("-o", "--output", required=True)
    p_map.add_argument("--mapping", choices=["jw", "bk", "jkmn"])
    p_map.set_defaults(func=cmd_map)

    p_fci = sub.add_parser("fci", help="exact ground energy of an input")
    add_problem_flags(p_fci)
    p_fci.set_defaults(func=cmd_fci)

    p_stats = sub.add_parser("stats", help="summarize a run trace")
    p_stats.add_argument("trace")
    p_stats.set_defaults(func=cmd_stats)

    p_sweep = sub.add_parser("interior-sweep",
                             help="re-optimize interior angles from a trace")
    add_problem_flags(p_sweep)
    p_sweep.add_argument("--trace", required=True)
    p_sweep.add_argument("--passes", type=int, default=1)
    p_sweep.add_argument("--out", help="write the updated trace here")
    p_sweep.set_defaults(func=cmd_interior_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
