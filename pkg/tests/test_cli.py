"""End-to-end CLI checks on the bundled fixtures."""

import json

import pytest

from clifford_iqcc.cli import main

H3 = "h3_sto3g.fcidump"


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_run_h3_writes_traces(tmp_path, fixtures_dir, capsys):
    trace = tmp_path / "h3.jsonl"
    csv = tmp_path / "h3.csv"
    circ = tmp_path / "h3.circuit"
    code = run_cli("run", fixtures_dir / H3, "--mapping", "jw",
                   "--eps", "1e-9", "--max-iter", "25",
                   "--trace", trace, "--csv", csv, "--dump-circuit", circ)
    out = capsys.readouterr().out
    assert code in (0, 2)
    assert "final energy" in out

    lines = csv.read_text().splitlines()
    assert lines[0] == "iter,energy,error_vs_fci,n_terms,dis_size,phi,pauli"
    n_records = sum(1 for line in trace.read_text().splitlines()
                    if '"type": "meta"' not in line and line.strip())
    assert len(lines) - 1 == n_records

    meta = json.loads(trace.read_text().splitlines()[0])
    assert meta["type"] == "meta"
    err = float(lines[-1].split(",")[2])
    assert abs(err) <= 1e-8

    dump = circ.read_text().splitlines()
    assert dump[0].startswith("X ")
    assert any(line.startswith("ROT ") for line in dump)


def test_run_determinism_byte_identical(tmp_path, fixtures_dir):
    outs = []
    for tag in ("a", "b"):
        csv = tmp_path / f"h3_{tag}.csv"
        run_cli("run", fixtures_dir / H3, "--max-iter", "6",
                "--eps", "1e-12", "--csv", csv)
        outs.append(csv.read_bytes())
    assert outs[0] == outs[1]


def test_run_exit_codes(tmp_path, fixtures_dir):
    # generous threshold converges immediately -> 0
    assert run_cli("run", fixtures_dir / H3, "--eps", "10.0",
                   "--max-iter", "5") == 0
    # tiny threshold with one iteration stops at the cap -> 2
    assert run_cli("run", fixtures_dir / H3, "--eps", "1e-15",
                   "--max-iter", "1") == 2
    # bad input -> 1
    assert run_cli("run", "missing_file.fcidump") == 1


def test_map_command(tmp_path, fixtures_dir, capsys):
    out = tmp_path / "h3.qubitop"
    assert run_cli("map", fixtures_dir / H3, "-o", out,
                   "--mapping", "jw") == 0
    assert "6 qubits" in capsys.readouterr().out
    text = out.read_text()
    assert text.splitlines()[0].startswith("(")
    # deterministic output
    out2 = tmp_path / "h3_again.qubitop"
    run_cli("map", fixtures_dir / H3, "-o", out2, "--mapping", "jw")
    assert out.read_text() == out2.read_text()


def test_map_then_fci_matches_sidecar(tmp_path, fixtures_dir, capsys):
    meta = json.loads((fixtures_dir / "h3_sto3g.meta.json").read_text())
    assert run_cli("fci", fixtures_dir / H3, "--mapping", "jkmn") == 0
    got = float(capsys.readouterr().out.strip())
    assert got == pytest.approx(meta["fci_energy"], abs=1e-8)


def test_stats_command(tmp_path, fixtures_dir, capsys):
    trace = tmp_path / "h3.jsonl"
    run_cli("run", fixtures_dir / H3, "--max-iter", "25", "--eps", "1e-12",
            "--trace", trace)
    capsys.readouterr()
    assert run_cli("stats", trace) == 0
    out = capsys.readouterr().out
    assert "term ceiling: 2079" in out
    assert "level off near" in out


def test_stats_h4_plateau(tmp_path, fixtures_dir, capsys):
    trace = tmp_path / "h4.jsonl"
    run_cli("run", fixtures_dir / "h4_trapezoid_sto3g.fcidump",
            "--max-iter", "60", "--eps", "1e-13", "--trace", trace)
    capsys.readouterr()
    assert run_cli("stats", trace) == 0
    out = capsys.readouterr().out
    assert "term ceiling: 32895" in out
    assert "level off near 4216" in out


def test_stats_empty_trace(tmp_path, capsys):
    trace = tmp_path / "empty.jsonl"
    trace.write_text('{"type": "meta", "n_qubits": 4}\n')
    assert run_cli("stats", trace) == 0


def test_config_file_and_env_override(tmp_path, fixtures_dir, monkeypatch,
                                      capsys):
    config = tmp_path / "run.cfg"
    config.write_text("max_iterations = 2\nselection_mode = gradient\n")
    trace = tmp_path / "t.jsonl"
    run_cli("run", fixtures_dir / H3, "--config", config, "--eps", "1e-12",
            "--trace", trace)
    records = [json.loads(l) for l in trace.read_text().splitlines()[1:]]
    assert len(records) == 2
    assert records[0]["selection_mode"] == "gradient"

    monkeypatch.setenv("CLIFFORD_IQCC_MAX_ITERATIONS", "3")
    run_cli("run", fixtures_dir / H3, "--config", config, "--eps", "1e-12",
            "--trace", trace)
    records = [json.loads(l) for l in trace.read_text().splitlines()[1:]]
    assert len(records) == 3  # env overrides the config file
    monkeypatch.setenv("CLIFFORD_IQCC_MAX_ITERATIONS", "bogus")
    assert run_cli("run", fixtures_dir / H3) == 1


def test_qubitop_input_with_reference_search(tmp_path, fixtures_dir, capsys):
    code = run_cli("run", fixtures_dir / "hf_631gs_frag4.qubitop",
                   "--max-iter", "2", "--eps", "1e-12")
    assert code == 2
    out = capsys.readouterr().out
    assert "iterations: 2" in out


def test_interior_sweep_command(tmp_path, fixtures_dir, capsys):
    trace = tmp_path / "h3.jsonl"
    run_cli("run", fixtures_dir / H3, "--max-iter", "3", "--eps", "1e-12",
            "--trace", trace)
    capsys.readouterr()
    out_trace = tmp_path / "swept.jsonl"
    assert run_cli("interior-sweep", fixtures_dir / H3, "--trace", trace,
                   "--passes", "1", "--out", out_trace) == 0
    out = capsys.readouterr().out
    assert "sweep step" in out
    energies = [float(line.split(": ")[1]) for line in out.splitlines()
                if line.startswith("sweep step")]
    start = float([line for line in out.splitlines()
                   if line.startswith("starting energy")][0].split(": ")[1])
    seq = [start] + energies
    assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))
    assert out_trace.exists()
