"""Qubit channels from the random corpus: all peripherally automorphic, and the
non-faithful ones collapse onto a single stationary state."""
from collections import Counter

import numpy as np

from qdfa import classify
from qdfa.suite import build_corpus


def main(n=60, seed=0):
    corpus = build_corpus(n, (2,), seed, include_builtins=False)
    classes = Counter()
    for entry in corpus:
        r = classify(entry.channel)
        classes[r.asymptotic_class] += 1
        if not r.faithful:
            rho = r.stationary_state
            X = np.array([[0.3, 1j], [-1j, 2.0]])
            gap = np.linalg.norm(r.peripheral.apply(X) - np.trace(rho @ X) * np.eye(2), 2)
            print(f"{entry.label:<40} dim Attr={r.dims['attr']}  |P_P(X) - tr(rho X)| = {gap:.1e}")
    print(dict(classes))


if __name__ == "__main__":
    main()
