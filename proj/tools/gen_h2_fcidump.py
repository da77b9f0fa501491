"""Regenerate tests/data/h2_sto3g.fcidump and its reference energies with PySCF."""
import sys

from pyscf import gto, scf, fci, tools


def main(out_path):
    mol = gto.M(atom="H 0 0 0; H 0 0 0.7414", basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-14
    e_hf = mf.kernel()
    e_fci, _ = fci.FCI(mf).kernel()
    tools.fcidump.from_scf(mf, out_path, tol=1e-16, float_format=" %.17e")
    print(f"E_HF  = {e_hf:.12f}")
    print(f"E_FCI = {e_fci:.12f}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "h2_sto3g.fcidump")
