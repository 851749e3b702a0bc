"""Markovian relaxation exp(P - 1) towards the diagonal projection
P(X) = diag(x11, x22, x11).

Its attractor equals its decoherence-free algebra, yet the channel is not
faithful: the stationary state has no weight on the third level.
"""
import numpy as np

from qdfa import builtin, classify
from qdfa.channel import power


def main():
    ch = builtin("relaxation")
    report = classify(ch)
    eig = np.sort_complex(report.eigenvalues)
    print("spectrum:", np.round(eig.real, 6))
    print("dims:", report.dims)
    print(f"faithful: {report.faithful}, automorphic: {report.peripherally_automorphic}")
    with np.printoptions(precision=4, suppress=True):
        print("stationary state:\n", report.stationary_state.real)

    X = np.arange(1.0, 10.0).reshape(3, 3)
    target = report.peripheral.apply(X)
    for n in (1, 5, 20, 40):
        gap = np.linalg.norm(power(ch, n)(X) - target, 2)
        print(f"n={n:>2}  ||Phi^n(X) - P_P(X)|| = {gap:.3e}")


if __name__ == "__main__":
    main()
