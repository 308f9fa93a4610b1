"""Interior-angle re-optimization against statevector ground truth."""

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
    compile_final_circuit,
    evaluate_candidate,
    run,
)
from clifford_iqcc.interior import (
    HadamardTestJob,
    build_tail,
    hadamard_test,
    interior_energy,
    interior_energy_at,
    reoptimize_interior,
    sweep_interior,
)
from clifford_iqcc.mappings import MappingKind, map_jw, reference_circuit
from clifford_iqcc.pauli import PauliWord

from dense_oracle import operator_matrix

HALF_PI = math.pi / 2


def record(word, phi, m=1):
    return IterationRecord(m, word, phi, 0.0, 0, 0, "rotosolve")


@pytest.fixture(scope="module")
def h3_run(fixtures_dir):
    m = parse_fcidump((fixtures_dir / "h3_sto3g.fcidump").read_text())
    H = map_jw(build_second_quantized(m), m.n_spin_orbitals)
    ref = reference_circuit(hartree_fock_occupation(m), MappingKind.JW)
    records = run(H, ref, RunConfig(epsilon_conv=1e-12, max_iterations=3))
    assert len(records) == 3
    return H, ref, records


def test_build_tail_single_record():
    word = PauliWord.from_string("XY")
    tail = build_tail([record(word, 0.8)])
    assert tail.coefficient(PauliWord.identity(2)) == pytest.approx(
        math.cos(0.4))
    assert tail.coefficient(word) == pytest.approx(-1j * math.sin(0.4))


def test_build_tail_unitary_and_order_independent_when_commuting():
    a = PauliWord.from_string("XYI")
    b = PauliWord.from_string("YXI")
    assert a.commutes(b)
    fwd = build_tail([record(a, 0.3), record(b, -0.9)])
    rev = build_tail([record(b, -0.9), record(a, 0.3)])
    mf, mr = operator_matrix(fwd), operator_matrix(rev)
    assert np.abs(mf - mr).max() < 1e-12
    assert np.abs(mf @ mf.conj().T - np.eye(8)).max() < 1e-10


def test_build_tail_term_count_bound():
    rng = np.random.default_rng(8)
    words = [PauliWord(4, int(rng.integers(1, 16)), int(rng.integers(0, 16)))
             for _ in range(4)]
    records = [record(w, float(rng.uniform(-1, 1)), m=i + 1)
               for i, w in enumerate(words)]
    tail = build_tail(records)
    assert len(tail) <= 2 ** 4
    mat = operator_matrix(tail)
    assert np.abs(mat @ mat.conj().T - np.eye(16)).max() < 1e-10


def test_hadamard_test_identity_job():
    from clifford_iqcc.stabilizer import CliffordCircuit

    prep = CliffordCircuit(2)
    ident = PauliWord.identity(2)
    job = HadamardTestJob((1.0, ident), (1.0, ident), (1.0, ident), 0.0)
    val = hadamard_test(prep, job, (PauliWord.from_string("XY"), 0.0))
    assert val == pytest.approx(1.0)


def test_hadamard_test_phase_kickback():
    from clifford_iqcc.stabilizer import CliffordCircuit

    ident = PauliWord.identity(2)
    z0 = PauliWord.from_terms(2, {0: "Z"})
    gen = (PauliWord.from_string("XY"), 0.0)
    # |00>: Z0 eigenvalue +1
    prep = CliffordCircuit(2)
    job = HadamardTestJob((1.0, ident), (1.0, ident), (1.0, z0), 0.0)
    assert hadamard_test(prep, job, gen) == pytest.approx(1.0)
    # |10>: Z0 eigenvalue -1
    prep = CliffordCircuit(2)
    prep.add("X", 0)
    assert hadamard_test(prep, job, gen) == pytest.approx(-1.0)


def test_hadamard_test_rejects_non_clifford_angle():
    ident = PauliWord.identity(2)
    with pytest.raises(ValueError):
        HadamardTestJob((1.0, ident), (1.0, ident), (1.0, ident), 0.4)


def test_hadamard_test_matches_statevector_random():
    from clifford_iqcc.stabilizer import CliffordCircuit

    rng = np.random.default_rng(19)
    checked = 0
    for _ in range(100):
        n = int(rng.integers(2, 6))
        prep = CliffordCircuit(n)
        for q in range(n):
            if rng.integers(0, 2):
                prep.add("X", q)
            if rng.integers(0, 2):
                prep.add("H", q)
        if n > 1:
            prep.add("CNOT", 0, int(rng.integers(1, n)))

        def rand_word():
            return PauliWord(n, int(rng.integers(0, 2 ** n)),
                             int(rng.integers(0, 2 ** n)))

        p_q, p_qp, p_j = rand_word(), rand_word(), rand_word()
        while True:
            gen_word = rand_word().canonical()
            if not gen_word.is_identity():
                break
        phi = [0.0, HALF_PI, -HALF_PI][int(rng.integers(0, 3))]
        job = HadamardTestJob((1.0, p_q), (1.0, p_qp), (1.0, p_j), phi)
        got = hadamard_test(prep, job, (gen_word, phi))

        psi = oracle.apply_circuit(prep, oracle.zero_state(n))
        right = oracle.apply_word(p_q, psi)
        right = oracle.apply_pauli_rotation(gen_word, phi, right)
        right = oracle.apply_word(p_j, right)
        left = oracle.apply_word(p_qp, psi)
        left = oracle.apply_pauli_rotation(gen_word, phi, left)
        want = np.vdot(left, right)
        assert abs(got - want) < 1e-12
        checked += 1
    assert checked == 100


def test_interior_energy_reduces_to_pipeline_at_last_step(h3_run):
    H, ref, records = h3_run
    m = len(records)
    for phi in (0.0, HALF_PI, -HALF_PI):
        got = interior_energy(m, records, H, ref, phi)
        # fold the head and evaluate the single rotation directly
        head = H
        for rec in records[:m - 1]:
            from clifford_iqcc.engine import fold

            head = fold(head, rec.chosen, rec.phi)
        final = compile_final_circuit(
            [IterationRecord(1, records[m - 1].chosen, phi, 0.0, 0, 0, "r")],
            ref)
        want = oracle.ansatz_energy(final, head)
        assert got == pytest.approx(want, abs=1e-9)


def test_interior_energy_single_iteration_matches_candidate_eval(h3_run):
    H, ref, records = h3_run
    one = [records[0]]
    from clifford_iqcc.stabilizer import expectation_operator, prepare

    E0 = expectation_operator(prepare(ref), H)
    word = one[0].chosen
    _, _, _ = evaluate_candidate(word, H, ref, E0)
    import clifford_iqcc.stabilizer as stab

    base = prepare(ref)
    plus = base.copy()
    plus.run(stab.compile_exponential(word, HALF_PI))
    e_plus = expectation_operator(plus, H)
    minus = base.copy()
    minus.run(stab.compile_exponential(word, -HALF_PI))
    e_minus = expectation_operator(minus, H)
    assert interior_energy(1, one, H, ref, 0.0) == pytest.approx(E0, abs=1e-9)
    assert interior_energy(1, one, H, ref, HALF_PI) == pytest.approx(
        e_plus, abs=1e-9)
    assert interior_energy(1, one, H, ref, -HALF_PI) == pytest.approx(
        e_minus, abs=1e-9)


def test_interior_energy_matches_statevector_sweep(h3_run):
    H, ref, records = h3_run
    m = 2
    for phi in (0.0, HALF_PI, -HALF_PI):
        trial = list(records)
        trial[m - 1] = IterationRecord(m, records[m - 1].chosen, phi,
                                       0.0, 0, 0, "rotosolve")
        final = compile_final_circuit(trial, ref)
        want = oracle.ansatz_energy(final, H)
        got = interior_energy(m, records, H, ref, phi)
        assert got == pytest.approx(want, abs=1e-9)


def test_reoptimize_interior_never_increases(h3_run):
    H, ref, records = h3_run
    final = compile_final_circuit(records, ref)
    current = oracle.ansatz_energy(final, H)
    updated, energy = reoptimize_interior(2, records, H, ref)
    assert energy <= current + 1e-12
    # already-optimal final angle stays put
    updated2, energy2 = reoptimize_interior(len(records), records, H, ref)
    assert updated2[-1].phi == pytest.approx(records[-1].phi, abs=1e-10)


def test_sweep_monotone_and_not_worse_than_single_pass(h3_run):
    H, ref, records = h3_run
    start = oracle.ansatz_energy(compile_final_circuit(records, ref), H)
    updated, energies = sweep_interior(records, H, ref, passes=2)
    seq = [start] + energies
    assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))
    assert energies[-1] <= start + 1e-12
    check = oracle.ansatz_energy(compile_final_circuit(updated, ref), H)
    assert check == pytest.approx(energies[-1], abs=1e-9)


def test_job_budget_guard(h3_run):
    H, ref, records = h3_run
    with pytest.raises(ValueError):
        interior_energy(1, records, H, ref, 0.0, job_budget=1)
