"""Dense-matrix helpers shared by the test modules."""

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_MATS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def word_matrix(word):
    """Dense matrix of a PauliWord via explicit Kronecker products.

    Qubit 0 is the least significant bit of the basis index, so it sits
    rightmost in the kron chain.
    """
    mat = np.array([[1.0 + 0j]])
    for q in range(word.n_qubits):
        mat = np.kron(PAULI_MATS[word.letter(q)], mat)
    return word.phase * mat


def operator_matrix(op):
    dim = 2 ** op.n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for word, coeff in op:
        mat += coeff * word_matrix(word)
    return mat
