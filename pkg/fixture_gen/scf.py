"""Restricted (closed and high-spin open shell) Hartree-Fock in a tiny AO basis."""

from __future__ import annotations

import numpy as np


def _orthogonalizer(s: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(s)
    if vals.min() < 1e-10:
        raise RuntimeError("overlap matrix nearly singular")
    return vecs @ np.diag(vals ** -0.5) @ vecs.T


def _coulomb_exchange(eri, density):
    j = np.einsum("pqrs,rs->pq", eri, density, optimize=True)
    k = np.einsum("prqs,rs->pq", eri, density, optimize=True)
    return j, k


def rhf(hcore, s, eri, e_nuc, n_electrons, max_cycles=200, tol=1e-11):
    """Closed-shell SCF; returns (energy, mo_coeffs, mo_energies)."""
    if n_electrons % 2:
        raise ValueError("rhf needs an even electron count")
    nocc = n_electrons // 2
    x = _orthogonalizer(s)
    fock = hcore
    energy = 0.0
    density = np.zeros_like(hcore)
    for cycle in range(max_cycles):
        fp = x.T @ fock @ x
        mo_e, cp = np.linalg.eigh(fp)
        coeffs = x @ cp
        occ = coeffs[:, :nocc]
        density_new = 2.0 * occ @ occ.T
        j, k = _coulomb_exchange(eri, density_new)
        fock = hcore + j - 0.5 * k
        energy_new = 0.5 * np.sum(density_new * (hcore + fock)) + e_nuc
        if abs(energy_new - energy) < tol and np.abs(density_new - density).max() < 1e-8:
            return energy_new, coeffs, mo_e
        energy, density = energy_new, density_new
    raise RuntimeError("RHF failed to converge")


def rohf(hcore, s, eri, e_nuc, n_alpha, n_beta, max_cycles=500, tol=1e-11):
    """High-spin ROHF via the Roothaan effective Fock matrix.

    Returns (energy, mo_coeffs, mo_energies); alpha and beta share one
    spatial orbital set, with the lowest n_beta doubly occupied and the
    next (n_alpha - n_beta) singly occupied by alpha electrons.
    """
    if n_alpha < n_beta:
        raise ValueError("expects n_alpha >= n_beta")
    n = hcore.shape[0]
    x = _orthogonalizer(s)
    coeffs = None
    energy = 0.0
    fock_eff = hcore
    for cycle in range(max_cycles):
        fp = x.T @ fock_eff @ x
        _, cp = np.linalg.eigh(fp)
        coeffs = x @ cp
        da = coeffs[:, :n_alpha] @ coeffs[:, :n_alpha].T
        db = coeffs[:, :n_beta] @ coeffs[:, :n_beta].T
        jt, _ = _coulomb_exchange(eri, da + db)
        _, ka = _coulomb_exchange(eri, da)
        _, kb = _coulomb_exchange(eri, db)
        fa = hcore + jt - ka
        fb = hcore + jt - kb
        energy_new = 0.5 * (np.sum((da + db) * hcore)
                            + np.sum(da * fa) + np.sum(db * fb)) + e_nuc

        # Roothaan coupling blocks in the current MO basis
        fa_mo = coeffs.T @ fa @ coeffs
        fb_mo = coeffs.T @ fb @ coeffs
        fc = 0.5 * (fa_mo + fb_mo)
        eff = fc.copy()
        closed = slice(0, n_beta)
        open_ = slice(n_beta, n_alpha)
        virt = slice(n_alpha, n)
        eff[closed, open_] = fb_mo[closed, open_]
        eff[open_, closed] = fb_mo[open_, closed]
        eff[open_, virt] = fa_mo[open_, virt]
        eff[virt, open_] = fa_mo[virt, open_]
        # back to AO for the next orthogonalized diagonalization
        sc = s @ coeffs
        fock_eff = sc @ eff @ sc.T

        if abs(energy_new - energy) < tol and cycle > 2:
            mo_e = np.diag(coeffs.T @ (0.5 * (fa + fb)) @ coeffs).copy()
            return energy_new, coeffs, mo_e
        energy = energy_new
    raise RuntimeError("ROHF failed to converge")


def mo_transform(hcore, eri, coeffs):
    """AO -> MO for the one-body matrix and chemists' (pq|rs) tensor."""
    h_mo = coeffs.T @ hcore @ coeffs
    eri_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri,
                       coeffs, coeffs, coeffs, coeffs, optimize=True)
    return h_mo, eri_mo
