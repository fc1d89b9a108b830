"""Generate the FCIDUMP fixtures under data/fcidump with PySCF (STO-6G, RHF orbitals)."""
import os
import numpy as np
from pyscf import gto, scf, mcscf, fci, ao2mo
from pyscf.tools import fcidump

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "fcidump")


def chain(n, r):
    return [("H", (0.0, 0.0, i * r)) for i in range(n)]


def ring(n, r):
    rad = r / (2 * np.sin(np.pi / n))
    return [("H", (rad * np.cos(2 * np.pi * i / n), rad * np.sin(2 * np.pi * i / n), 0.0)) for i in range(n)]


def cube(r):
    return [("H", (x * r, y * r, z * r)) for x in (0, 1) for y in (0, 1) for z in (0, 1)]


def dump(name, atoms, ncas=None, nelecas=None):
    mol = gto.M(atom=atoms, basis="sto-6g", unit="Angstrom", symmetry=False, verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    path = os.path.join(OUT, name + ".FCIDUMP")
    if ncas is None:
        fcidump.from_scf(mf, path, tol=1e-14)
        e_fci = fci.FCI(mf).kernel()[0]
    else:
        cas = mcscf.CASCI(mf, ncas, nelecas)
        h1, ecore = cas.get_h1eff()
        eri = ao2mo.restore(8, cas.get_h2eff(), ncas)
        fcidump.from_integrals(path, h1, eri, ncas, nelecas, nuc=ecore, ms=0, tol=1e-14)
        e_fci = cas.kernel()[0]
    print(f"{name}: E_HF = {mf.e_tot:.12f}  E_FCI = {e_fci:.12f}")


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    dump("h2_0.7414", [("H", (0, 0, 0)), ("H", (0, 0, 0.7414))])
    dump("h4_linear_1.5", chain(4, 1.5))
    dump("h6_linear_1.5", chain(6, 1.5))
    dump("n2_1.0977_6e6o", [("N", (0, 0, 0)), ("N", (0, 0, 1.0977))], 6, 6)
    dump("n2_1.8_6e6o", [("N", (0, 0, 0)), ("N", (0, 0, 1.8))], 6, 6)
    dump("h8_linear_1.5", chain(8, 1.5))
    dump("h8_ring_1.5", ring(8, 1.5))
    dump("h8_cubic_1.5", cube(1.5))
