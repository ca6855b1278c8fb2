"""Spectra of magnetic cycles with mu = degree, for the acceptance suite.

C_n has unit weights and one edge (n-1, 0) carrying xi_k^j. With mu = d = 2
the normalized Laplacian is I - A/2 for the circulant-like Hermitian
adjacency A, whose eigenvalues are 2 cos((phi + 2 pi m)/n), phi = 2 pi j/k.
Each closed form is cross-checked against a dense numpy solve.

Run: python3 cycle_spectra.py > cycle_spectra.json
"""
import json
import math

import numpy as np

cases = []
for n in range(3, 9):
    for k in (2, 3, 4, 6):
        for j in range(k):
            phi = 2 * math.pi * j / k
            closed = sorted(1 - math.cos((phi + 2 * math.pi * m) / n) for m in range(n))
            a = np.zeros((n, n), dtype=complex)
            for i in range(n - 1):
                a[i, i + 1] = a[i + 1, i] = 1
            s = np.exp(1j * phi)
            a[n - 1, 0] = s
            a[0, n - 1] = np.conj(s)
            dense = np.linalg.eigvalsh(np.eye(n) - a / 2)
            assert np.allclose(sorted(dense), closed, atol=1e-12), (n, k, j)
            cases.append({"n": n, "k": k, "j": j, "eigenvalues": closed})

print(json.dumps({"cases": cases}, indent=1))
