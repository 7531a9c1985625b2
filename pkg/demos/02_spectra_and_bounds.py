# coding: utf-8

# # Leading eigenvalues from a randomized sketch
#
# Compare the sketched spectrum with the exact one and with the expected
# error bounds computed from the exact tail.

# In[1]:

import numpy as np

from lesdist import (ToriConfig, approx_eigenvalues, build_operator, error_bounds, full_spectrum,
                     generate_torus2, kernel_scale_from_points)

cloud = generate_torus2(ToriConfig(n_points=500, seed=5))
op = build_operator(cloud, kernel_scale_from_points(cloud), mode="dense")
lam = full_spectrum(op)
K, M, gamma = 50, 100, 1e-8

# In[2]:

errs, log_errs = [], []
for seed in range(20):
    est = approx_eigenvalues(op, K, M, seed=seed).values
    errs.append(np.abs(lam[:K] - est).sum())
    log_errs.append(np.abs(np.log(lam[:K] + gamma) - np.log(est + gamma)).sum())

bound = error_bounds(lam, K, M, gamma, estimate=est)
print(f"eigenvalue error {np.mean(errs):.2e}  bound {bound.eig_bound:.2e}")
print(f"log error        {np.mean(log_errs):.2e}  bound {bound.log_eig_bound:.2e}")
print("ratio check passed:", bound.validity)

# In[3]:

# a wider sketch tightens both bound and error
for M in (60, 100, 200):
    est = approx_eigenvalues(op, K, M, seed=0).values
    print(M, np.abs(lam[:K] - est).sum(), error_bounds(lam, K, M).eig_bound)
