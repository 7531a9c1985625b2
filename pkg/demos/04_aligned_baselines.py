# coding: utf-8

# # Aligned baselines and eigenvalue bounds
#
# When two operators live on the same points, matrix distances are
# available.  The eigenvalue-only distance is sandwiched between bounds
# that need only the two spectra.

# In[1]:

import numpy as np

from lesdist import ai_exact, euclid_exact, le_exact, le_lower_bound, le_upper_bound, loghs_distance

rng = np.random.default_rng(0)


def random_spd(n):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (q * np.exp(rng.uniform(np.log(1e-4), 0, n))) @ q.T


A, B = random_spd(30), random_spd(30)

# In[2]:

la, lb = np.linalg.eigvalsh(A)[::-1], np.linalg.eigvalsh(B)[::-1]
print("lower", le_lower_bound(la, lb))
print("exact", le_exact(A, B))
print("upper", le_upper_bound(la, lb))

# In[3]:

print("affine-invariant", ai_exact(A, B))
print("Frobenius       ", euclid_exact(A, B))
g = 1e-3
print("logHS", loghs_distance(A, B, g, g), "vs", le_exact(A + g * np.eye(30), B + g * np.eye(30)))
