"""Engine semantics: pool counting, DIS, Rotosolve, folding, and full runs."""

import itertools
import json
import math

import numpy as np
import pytest

from clifford_iqcc import oracle
from clifford_iqcc.chem import (
    build_second_quantized,
    hartree_fock_occupation,
    parse_fcidump,
)
from clifford_iqcc.engine import (
    IterationRecord,
    RunConfig,
    add_commuting_generators,
    build_dis,
    compile_final_circuit,
    compress_support,
    evaluate_candidate,
    evaluate_entries,
    fold,
    pool_size,
    reference_bits,
    rotosolve_solve,
    run,
    select_generator,
)
from clifford_iqcc.mappings import MappingKind, map_jw, reference_circuit
from clifford_iqcc.pauli import PauliWord, QubitOperator, max_term_count
from clifford_iqcc.stabilizer import CliffordCircuit, prepare



HALF_PI = math.pi / 2


@pytest.fixture(scope="module")
def h3_problem(fixtures_dir):
    m = parse_fcidump((fixtures_dir / "h3_sto3g.fcidump").read_text())
    H = map_jw(build_second_quantized(m), m.n_spin_orbitals)
    ref = reference_circuit(hartree_fock_occupation(m), MappingKind.JW)
    meta = json.loads((fixtures_dir / "h3_sto3g.meta.json").read_text())
    return H, ref, meta


def brute_force_pool(n, n0):
    count = 0
    for letters in itertools.product("IXY", repeat=n):
        ny = letters.count("Y")
        nx = letters.count("X")
        if ny % 2 == 1 and nx >= n0:
            count += 1
    return count


def test_pool_size_tiny_cases():
    assert pool_size(1, MappingKind.JKMN) == 1
    assert pool_size(2, MappingKind.JW) == 2


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("kind", [MappingKind.JW, MappingKind.JKMN])
def test_pool_size_matches_enumeration(n, kind):
    assert pool_size(n, kind) == brute_force_pool(n, kind.min_candidate_rank)


def test_rotosolve_solved_examples():
    phi, energy = rotosolve_solve(0.0, -1.0, 1.0)
    assert phi == pytest.approx(HALF_PI)
    assert energy == pytest.approx(-1.0)
    phi, energy = rotosolve_solve(1.0, 0.0, 0.0)
    assert phi == pytest.approx(-math.pi)
    assert energy == pytest.approx(-1.0)
    phi, energy = rotosolve_solve(0.3, 0.3, 0.3)
    assert phi == 0.0 and energy == 0.3


def test_rotosolve_phi_range():
    rng = np.random.default_rng(4)
    for _ in range(200):
        e0, ep, em = rng.standard_normal(3)
        base = min(e0, ep, em)
        phi, energy = rotosolve_solve(e0, ep, em)
        assert -math.pi <= phi < math.pi
        assert energy <= base + 1e-12


def test_build_dis_z_only_is_empty():
    H = QubitOperator.from_pairs(2, [(PauliWord.from_string("ZZ"), 1.0),
                                     (PauliWord.from_string("ZI"), 0.5)])
    entries = build_dis(H, CliffordCircuit(2), MappingKind.JW, RunConfig())
    assert entries == []


def test_build_dis_candidates_for_xx_term():
    H = QubitOperator.from_pairs(3, [
        (PauliWord.from_string("XXZ"), 0.2),
        (PauliWord.from_string("ZII"), -1.0),
    ])
    circ = CliffordCircuit(3)
    circ.add("X", 0)
    entries = build_dis(H, circ, MappingKind.JW, RunConfig())
    assert len(entries) == 1
    entry = entries[0]
    assert entry.flip_set == (0, 1)
    got = {w.to_compact() for w in entry.candidates}
    assert got == {"Y0X1", "X0Y1"}
    assert entry.representative.to_compact() == "Y0X1"


def test_build_dis_respects_max_rank():
    H = QubitOperator.from_pairs(4, [
        (PauliWord.from_string("XXXX"), 0.2),
        (PauliWord.from_string("XXII"), 0.2),
        (PauliWord.from_string("ZIII"), -1.0),
    ])
    circ = CliffordCircuit(4)
    circ.add("X", 0)
    cfg = RunConfig(max_candidate_rank=2)
    entries = build_dis(H, circ, MappingKind.JW, cfg)
    assert all(len(e.flip_set) <= 2 for e in entries)


def test_evaluate_candidate_single_qubit_rotation():
    H = QubitOperator.from_pairs(1, [(PauliWord.from_string("Z"), 1.0)])
    ref = CliffordCircuit(1)
    phi, energy, gradient = evaluate_candidate(
        PauliWord.from_string("Y"), H, ref, 1.0)
    # E(phi) = cos(phi): minimum -1 at phi = -pi (normalized into [-pi, pi))
    assert energy == pytest.approx(-1.0, abs=1e-12)
    assert abs(phi) == pytest.approx(math.pi)
    assert gradient == pytest.approx(0.0, abs=1e-12)


def test_evaluate_candidate_commuting_generator_is_inert():
    H = QubitOperator.from_pairs(2, [(PauliWord.from_string("ZZ"), 0.8)])
    ref = CliffordCircuit(2)
    E0 = 0.8
    phi, energy, gradient = evaluate_candidate(
        PauliWord.from_string("XX"), H, ref, E0)
    assert gradient == 0.0
    assert energy == pytest.approx(E0)


def test_h3_top_gradient_matches_finite_difference(h3_problem):
    H, ref, _ = h3_problem
    state = prepare(ref)
    from clifford_iqcc.stabilizer import expectation_operator

    E0 = expectation_operator(state, H)
    entries = build_dis(H, state, MappingKind.JW, RunConfig(), E0=E0)
    assert entries
    top = max(entries, key=lambda e: abs(e.gradient))
    delta = 1e-4
    scan = oracle.energy_scan(ref, top.representative, H, [delta, -delta])
    fd = (scan[0] - scan[1]) / (2 * delta)
    assert top.gradient == pytest.approx(fd, abs=1e-7)


def test_gradient_matches_finite_difference_for_twenty_candidates(h3_problem):
    H, ref, _ = h3_problem
    state = prepare(ref)
    from clifford_iqcc.stabilizer import expectation_operator

    E0 = expectation_operator(state, H)
    cfg = RunConfig()
    entries = build_dis(H, state, MappingKind.JW, cfg, E0=E0)
    evaluate_entries(entries, H, state, E0, cfg)
    pool = [c for e in entries for c in e.evaluated]
    rng = np.random.default_rng(55)
    picks = rng.choice(len(pool), size=min(20, len(pool)), replace=False)
    delta = 1e-4
    for idx in picks:
        cand = pool[idx]
        lo, hi = oracle.energy_scan(ref, cand.word, H, [-delta, delta])
        fd = (hi - lo) / (2 * delta)
        assert cand.gradient == pytest.approx(fd, abs=1e-6)


def test_h3_candidate_energies_match_statevector_scan(h3_problem):
    H, ref, _ = h3_problem
    state = prepare(ref)
    from clifford_iqcc.stabilizer import expectation_operator

    E0 = expectation_operator(state, H)
    cfg = RunConfig()
    entries = build_dis(H, state, MappingKind.JW, cfg, E0=E0)
    evaluate_entries(entries, H, state, E0, cfg)
    grid = np.linspace(-math.pi, math.pi, 1000, endpoint=False)
    for entry in entries:
        for cand in entry.evaluated:
            scan = np.asarray(oracle.energy_scan(ref, cand.word, H, grid))
            k = int(np.argmin(scan))
            assert cand.energy <= scan[k] + 1e-9
            spacing = grid[1] - grid[0]
            assert min(abs(cand.phi - grid[k]),
                       2 * math.pi - abs(cand.phi - grid[k])) <= spacing
            probe = oracle.energy_scan(ref, cand.word, H, [cand.phi])[0]
            assert probe == pytest.approx(cand.energy, abs=1e-9)


def test_select_generator_modes():
    a = PauliWord.from_string("YX")
    b = PauliWord.from_string("XY")
    from clifford_iqcc.engine import DISEntry, EvaluatedCandidate

    entries = [DISEntry((0, 1), [a], a, 0.4,
                        [EvaluatedCandidate(a, 0.1, -1.0, 0.4)]),
               DISEntry((0, 2), [b], b, -0.9,
                        [EvaluatedCandidate(b, 0.2, -0.5, -0.9)])]
    sel = select_generator(entries, "rotosolve")
    assert sel.word == a and sel.energy == -1.0
    sel = select_generator(entries, "gradient")
    assert sel.word == b
    assert select_generator([], "rotosolve") is None


def test_select_generator_tie_breaks_lexicographically():
    from clifford_iqcc.engine import DISEntry, EvaluatedCandidate

    a = PauliWord.from_string("XY")  # lexicographically before YX
    b = PauliWord.from_string("YX")
    entries = [DISEntry((0, 1), [b, a], b, 0.4, [
        EvaluatedCandidate(b, 0.1, -1.0, 0.4),
        EvaluatedCandidate(a, 0.3, -1.0, 0.2),
    ])]
    sel = select_generator(entries, "rotosolve")
    assert sel.word == a


def test_fold_identity_angle_is_noop(h3_problem):
    H, _, _ = h3_problem
    assert fold(H, PauliWord.from_terms(6, {0: "Y", 1: "X"}), 0.0) is H


def test_fold_single_qubit_conjugation():
    H = QubitOperator.from_pairs(1, [(PauliWord.from_string("Z"), 1.0)])
    out = fold(H, PauliWord.from_string("Y"), HALF_PI)
    assert out.coefficient(PauliWord.from_string("X")) == pytest.approx(-1.0)
    assert len(out) == 1


def test_fold_preserves_spectrum(h3_problem):
    H, ref, _ = h3_problem
    state = prepare(ref)
    from clifford_iqcc.stabilizer import expectation_operator

    E0 = expectation_operator(state, H)
    cfg = RunConfig()
    entries = build_dis(H, state, MappingKind.JW, cfg, E0=E0)
    cand = entries[0].evaluated[0]
    folded = fold(H, cand.word, cand.phi)
    want = oracle.ground_energy(H)
    got = oracle.ground_energy(folded)
    assert got == pytest.approx(want, abs=1e-10)
    assert folded.max_abs_imag() <= 1e-12


def test_compress_support_examples():
    # Z on an off-support qubit becomes its eigenvalue
    H = QubitOperator.from_pairs(6, [(PauliWord.from_terms(6, {5: "Z"}), 1.0)])
    out = compress_support(H, (0, 1), [0, 0, 0, 0, 0, 0])
    assert out.coefficient(PauliWord.identity(6)) == pytest.approx(1.0)
    out = compress_support(H, (0, 1), [0, 0, 0, 0, 0, 1])
    assert out.coefficient(PauliWord.identity(6)) == pytest.approx(-1.0)
    # off-support X content drops the term
    H2 = QubitOperator.from_pairs(6, [
        (PauliWord.from_terms(6, {5: "X", 0: "X"}), 1.0)])
    assert len(compress_support(H2, (0, 1), [0] * 6)) == 0


def test_compressed_rotosolve_matches_full(h3_problem):
    H, ref, _ = h3_problem
    state = prepare(ref)
    from clifford_iqcc.stabilizer import expectation_operator

    E0 = expectation_operator(state, H)
    bits = reference_bits(state)
    assert bits == [1, 1, 1, 0, 0, 0]
    entries = build_dis(H, state, MappingKind.JW, RunConfig(), E0=E0)
    for entry in entries[:4]:
        word = entry.representative
        h_small = compress_support(H, entry.flip_set, bits)
        full = evaluate_candidate(word, H, state, E0)
        small = evaluate_candidate(word, h_small, state, E0)
        assert small[1] == pytest.approx(full[1], abs=1e-12)
        assert small[0] == pytest.approx(full[0], abs=1e-12)


def test_reference_bits_rejects_superpositions():
    circ = CliffordCircuit(2)
    circ.add("H", 0)
    assert reference_bits(prepare(circ)) is None


def test_run_converged_at_start():
    H = QubitOperator.from_pairs(2, [(PauliWord.from_string("ZI"), 1.0),
                                     (PauliWord.from_string("IZ"), 0.5)])
    records = run(H, CliffordCircuit(2), RunConfig())
    assert records == []


def test_run_h3_monotone_and_deterministic(h3_problem):
    H, ref, meta = h3_problem
    cfg = RunConfig(epsilon_conv=1e-12, max_iterations=8)
    records = run(H, ref, cfg)
    assert records
    energies = [r.energy for r in records]
    assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(energies, energies[1:]))
    assert all(-math.pi <= r.phi < math.pi for r in records)
    assert all(r.n_terms <= max_term_count(6) for r in records)
    again = run(H, ref, cfg)
    assert [(r.chosen, r.phi, r.energy) for r in again] == \
        [(r.chosen, r.phi, r.energy) for r in records]


def test_run_multi_generator_not_worse(h3_problem):
    H, ref, _ = h3_problem
    base = run(H, ref, RunConfig(epsilon_conv=1e-12, max_iterations=4))
    multi = run(H, ref, RunConfig(epsilon_conv=1e-12, max_iterations=4,
                                  multi_generator=True, multi_k=2))
    assert multi[-1].energy <= base[-1].energy + 1e-12


def test_run_multi_generator_h4_comparative(fixtures_dir):
    m = parse_fcidump(
        (fixtures_dir / "h4_trapezoid_sto3g.fcidump").read_text())
    H = map_jw(build_second_quantized(m), m.n_spin_orbitals)
    ref = reference_circuit(hartree_fock_occupation(m), MappingKind.JW)
    base = run(H, ref, RunConfig(epsilon_conv=1e-12, max_iterations=6))
    multi = run(H, ref, RunConfig(epsilon_conv=1e-12, max_iterations=6,
                                  multi_generator=True, multi_k=2))
    assert multi[-1].energy <= base[-1].energy + 1e-12


def test_add_commuting_generators_filters_anticommuting(h3_problem):
    H, ref, _ = h3_problem
    state = prepare(ref)
    from clifford_iqcc.stabilizer import expectation_operator

    E0 = expectation_operator(state, H)
    cfg = RunConfig()
    entries = build_dis(H, state, MappingKind.JW, cfg, E0=E0)
    evaluate_entries(entries, H, state, E0, cfg)
    batch = add_commuting_generators(entries, 3, H, state, E0, cfg)
    assert 1 <= len(batch) <= 3
    for i, a in enumerate(batch):
        for b in batch[i + 1:]:
            assert a.word.commutes(b.word)
    single = select_generator(entries, "rotosolve")
    assert batch[0].word == single.word
    assert batch[-1].energy <= single.energy + 1e-12


def test_compile_final_circuit_roundtrip(h3_problem):
    H, ref, meta = h3_problem
    records = run(H, ref, RunConfig(epsilon_conv=1e-12, max_iterations=6))
    final = compile_final_circuit(records, ref)
    assert len(final.rotations) == len(records)
    assert final.rotations[0][0] == records[-1].chosen
    got = oracle.ansatz_energy(final, H)
    assert got == pytest.approx(records[-1].energy, abs=1e-10)
    # zero records: bare reference energy
    empty = compile_final_circuit([], ref)
    from clifford_iqcc.stabilizer import expectation_operator

    assert oracle.ansatz_energy(empty, H) == pytest.approx(
        expectation_operator(prepare(ref), H), abs=1e-12)


def test_iteration_record_json_roundtrip():
    rec = IterationRecord(3, PauliWord.from_terms(6, {0: "Y", 4: "X"}),
                          -0.25, -1.5, 120, 44, "rotosolve")
    back = IterationRecord.from_json(rec.to_json())
    assert back == rec


def test_fast_evaluator_matches_circuit_route(h3_problem):
    """The closed-form reference evaluator must reproduce the Clifford
    circuit route value-for-value, including after a folding step."""
    from clifford_iqcc.engine import FastReferenceEvaluator, fold
    from clifford_iqcc.stabilizer import expectation_operator

    H, ref, _ = h3_problem
    state = prepare(ref)
    for step in range(2):
        E0 = expectation_operator(state, H)
        fast = FastReferenceEvaluator(H, 0b000111, E0)
        cfg = RunConfig()
        entries = build_dis(H, state, MappingKind.JW, cfg, E0=E0, fast=None)
        best = None
        for entry in entries:
            for word in entry.candidates:
                slow = evaluate_candidate(word, H, state, E0)
                quick = fast.evaluate(word)
                assert quick[1] == pytest.approx(slow[1], abs=1e-12)
                assert quick[0] == pytest.approx(slow[0], abs=1e-9)
                assert quick[2] == pytest.approx(slow[2], abs=1e-12)
                if best is None or quick[1] < best[0]:
                    best = (quick[1], word, quick[0])
        H = fold(H, best[1], best[2])


def test_group_members_share_minimum_energy(h3_problem):
    """On a basis-state reference all candidates of one flip group reach
    the same Rotosolve minimum; only the angle's sign distinguishes them."""
    from clifford_iqcc.engine import FastReferenceEvaluator
    from clifford_iqcc.stabilizer import expectation_operator

    H, ref, _ = h3_problem
    state = prepare(ref)
    E0 = expectation_operator(state, H)
    fast = FastReferenceEvaluator(H, 0b000111, E0)
    entries = build_dis(H, state, MappingKind.JW, RunConfig(), E0=E0)
    for entry in entries[:5]:
        energies = {round(fast.evaluate(w)[1], 14) for w in entry.candidates}
        assert len(energies) == 1


def test_fold_random_landscape_is_sinusoid():
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = 4
        op = QubitOperator(n)
        for _ in range(10):
            x = int(rng.integers(0, 16))
            z = int(rng.integers(0, 16))
            c = rng.standard_normal()
            if (x & z).bit_count() % 2:
                c = c * 1j
            op._add_word(PauliWord(n, x, z), complex(c))
        op = op + op.hermitian_conjugate()
        while True:
            word = PauliWord(n, int(rng.integers(1, 16)), 0)
            word = PauliWord(n, word.x_mask,
                             int(rng.integers(0, 16)) & word.x_mask)
            if (word.x_mask & word.z_mask).bit_count() % 2 == 1:
                break
        prep = CliffordCircuit(n)
        for q in range(n):
            if rng.integers(0, 2):
                prep.add("X", q)
        grid = np.linspace(-math.pi, math.pi, 100)
        vals = np.asarray(oracle.energy_scan(prep, word, op, grid))
        base = oracle.energy_scan(prep, word, op, [0.0, HALF_PI, -HALF_PI])
        e0, ep, em = base
        a_sin = 2 * e0 - ep - em
        a_cos = ep - em
        amp = 0.5 * math.hypot(a_sin, a_cos)
        offset = 0.5 * (ep + em)
        if amp > 0:
            b = math.atan2(a_sin, a_cos)
            model = amp * np.sin(grid + b) + offset
        else:
            model = np.full_like(grid, offset)
        assert np.abs(vals - model).max() < 1e-10
