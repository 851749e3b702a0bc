"""Walk through the idempotent qutrit map that keeps the upper 2x2 block and
copies x11 into the bottom corner.

It is its own peripheral projection, its attractor is not closed under
matrix multiplication, and its Choi-Effros decoherence-free algebra carries a
one-dimensional kernel ideal that breaks the C*-identity.
"""
import numpy as np

from qdfa import asalg, builtin, classify
from qdfa.matcore import operator_norm


def show(name, space):
    print(f"{name} (dim {space.dim}):")
    with np.printoptions(precision=3, suppress=True):
        pattern = (np.abs(space.basis).sum(axis=0) > 1e-9).astype(int)
        print(pattern)


def main():
    report = classify(builtin("block_projection"))
    pd = report.peripheral
    print(f"class: {report.asymptotic_class}, faithful: {report.faithful}")
    for key in ("attr", "dfa", "ce_dfa", "kernel_ideal"):
        show(key, report.spaces[key])

    X, Y = asalg.peripheral_automorphy_witness(pd)
    print("attractor pair whose product leaves the attractor:")
    print(np.real(X), np.real(Y), np.real(X @ Y), sep="\n")

    Z = np.diag([1.0, 1.0, 5.0])
    print(f"||Z^dagger * Z|| = {operator_norm(asalg.choi_effros(pd, Z.conj().T, Z)):.6f}")
    print(f"||Z||^2         = {operator_norm(Z) ** 2:.6f}")


if __name__ == "__main__":
    main()
