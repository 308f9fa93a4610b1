"""FCIDUMP ingestion and second-quantized assembly checks."""

import numpy as np
import pytest

from clifford_iqcc import oracle
from clifford_iqcc.chem import (
    FcidumpParseError,
    MolecularIntegrals,
    build_second_quantized,
    hartree_fock_occupation,
    load_qubit_hamiltonian,
    parse_fcidump,
    save_qubit_hamiltonian,
)
from clifford_iqcc.mappings import MappingKind, map_jw, map_operator
from clifford_iqcc.pauli import PauliWord, QubitOperator, commutator

HEADER = " &FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"


def test_parse_header_and_core():
    m = parse_fcidump(HEADER + " 0.5 0 0 0 0\n")
    assert m.n_spatial_orbitals == 2
    assert m.n_electrons == 2
    assert m.ms2 == 0
    assert m.core_energy == 0.5


def test_parse_two_body_symmetry_images():
    m = parse_fcidump(HEADER + " 0.25 1 2 1 2\n")
    g = m.two_body
    for idx in ((0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)):
        assert g[idx] == 0.25
    assert g[0, 0, 0, 0] == 0.0


def test_parse_one_body_symmetric():
    m = parse_fcidump(HEADER + " -0.8 1 2 0 0\n")
    assert m.one_body[0, 1] == -0.8
    assert m.one_body[1, 0] == -0.8


def test_parse_errors_carry_line_numbers():
    with pytest.raises(FcidumpParseError) as err:
        parse_fcidump(HEADER + " 1.0 1 9 0 0\n")
    assert "line 5" in str(err.value)
    with pytest.raises(FcidumpParseError):
        parse_fcidump(HEADER + " abc 1 1 0 0\n")
    with pytest.raises(FcidumpParseError):
        parse_fcidump(" &FCI NELEC=2,MS2=0,\n &END\n")


def test_h3_fixture_shape(fixtures_dir):
    m = parse_fcidump((fixtures_dir / "h3_sto3g.fcidump").read_text())
    assert m.n_spatial_orbitals == 3
    assert m.n_electrons == 3
    assert m.ms2 == 1
    assert m.n_alpha == 2 and m.n_beta == 1
    assert hartree_fock_occupation(m) == [1, 1, 1, 0, 0, 0]


def test_constant_integrals_map_to_constant():
    m = MolecularIntegrals(1, 0, 0, 0.75, np.zeros((1, 1)),
                           np.zeros((1, 1, 1, 1)))
    f = build_second_quantized(m)
    assert f.terms == {(): 0.75}


def test_single_level_spectrum():
    eps = 0.37
    m = MolecularIntegrals(1, 2, 0, 0.0, np.array([[eps]]),
                           np.zeros((1, 1, 1, 1)))
    H = map_jw(build_second_quantized(m), 2)
    mat_eigs = sorted(np.linalg.eigvalsh(_dense(H)))
    assert np.allclose(mat_eigs, [0.0, eps, eps, 2 * eps], atol=1e-12)


def _dense(op):
    from dense_oracle import operator_matrix
    return operator_matrix(op)


def test_build_is_hermitian(fixtures_dir):
    m = parse_fcidump((fixtures_dir / "h2_sto3g.fcidump").read_text())
    f = build_second_quantized(m)
    conj = f.hermitian_conjugate()
    assert set(conj.terms) == set(f.terms)
    H = map_jw(f, m.n_spin_orbitals)
    assert H.max_abs_imag() <= 1e-12


@pytest.mark.parametrize("stem", ["h2_sto3g", "h3_sto3g"])
def test_fixture_fci_energy_matches_oracle(fixtures_dir, stem):
    import json

    m = parse_fcidump((fixtures_dir / f"{stem}.fcidump").read_text())
    meta = json.loads((fixtures_dir / f"{stem}.meta.json").read_text())
    H = map_jw(build_second_quantized(m), m.n_spin_orbitals)
    assert oracle.ground_energy(H) == pytest.approx(meta["fci_energy"],
                                                    abs=1e-8)


@pytest.mark.parametrize("stem", ["h2_sto3g", "h3_sto3g",
                                  "h4_trapezoid_sto3g"])
def test_symmetry_commutators(fixtures_dir, stem):
    m = parse_fcidump((fixtures_dir / f"{stem}.fcidump").read_text())
    n_so = m.n_spin_orbitals
    for kind in MappingKind:
        H = map_operator(build_second_quantized(m), n_so, kind)
        from clifford_iqcc.chem import FermionOperator

        number = FermionOperator()
        sz = FermionOperator()
        for p in range(n_so):
            number.add(((p, True), (p, False)), 1.0)
            sz.add(((p, True), (p, False)), 0.5 if p % 2 == 0 else -0.5)
        for sym_op in (number, sz):
            S = map_operator(sym_op, n_so, kind)
            comm = QubitOperator(n_so)
            for word, coeff in S:
                comm = comm + commutator(H, word).scaled(coeff)
            assert max((abs(c) for _, c in comm), default=0.0) < 1e-9


def test_qubit_hamiltonian_round_trip():
    rng = np.random.default_rng(2)
    op = QubitOperator(6)
    for _ in range(15):
        op._add_word(PauliWord(6, int(rng.integers(0, 64)),
                               int(rng.integers(0, 64))),
                     complex(rng.standard_normal(), rng.standard_normal()))
    op._drop_zeros()
    back = load_qubit_hamiltonian(save_qubit_hamiltonian(op), n_qubits=6)
    assert back._terms == op._terms


def test_fragment_fixture_loads_with_12_qubits(fixtures_dir):
    H = load_qubit_hamiltonian(
        (fixtures_dir / "hf_631gs_frag4.qubitop").read_text())
    assert H.n_qubits == 12
    assert H.max_abs_imag() <= 1e-12
    assert len(H) > 100
