"""Transposition is positive and unital but fails the operator Schwarz
inequality; a seeded random search finds a witness and the witness is
re-verified by hand."""
import numpy as np

from qdfa import builtin
from qdfa.posit import falsify_schwarz


def main(seed=0):
    rep = falsify_schwarz(builtin("transpose", 2), trials=500, seed=seed)
    print(f"status: {rep.status}, Choi min eigenvalue: {rep.choi_min_eigenvalue:.3f}")
    v = rep.schwarz_violation
    X = v.X
    D = (X.conj().T @ X).T - X.conj() @ X.T
    print(f"trial {v.trial} ({v.kind}): min eigenvalue {v.min_eig:.6f}")
    print(f"recomputed:                {np.linalg.eigvalsh(D)[0]:.6f}")

    E21 = np.array([[0, 0], [1, 0]], dtype=complex)
    D = (E21.conj().T @ E21).T - E21.conj() @ E21.T
    print("E21 defect eigenvalues:", np.linalg.eigvalsh(D))


if __name__ == "__main__":
    main()
