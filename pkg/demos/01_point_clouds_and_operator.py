# coding: utf-8

# # Point clouds and the diffusion operator
#
# Sample a 2-D torus, build its symmetric diffusion operator, and check the
# basic facts: the top eigenvalue is 1 and dense/implicit storage agree.

# In[1]:

import numpy as np

from lesdist import ToriConfig, build_operator, generate_torus2, kernel_scale_from_points, operator_matmul

cloud = generate_torus2(ToriConfig(n_points=800, seed=0))
print(cloud.n, cloud.d)

# In[2]:

# kernel scale: twice the median squared pairwise distance
sigma2 = kernel_scale_from_points(cloud)
print("sigma^2 =", sigma2)

# In[3]:

dense = build_operator(cloud, sigma2, mode="dense")
W = dense.matrix
print("symmetric:", np.allclose(W, W.T))
print("top eigenvalues:", np.linalg.eigvalsh(W)[::-1][:5])

# In[4]:

# the implicit operator never stores W; products are streamed in row blocks
implicit = build_operator(cloud, sigma2, mode="implicit", batch_rows=100)
V = np.random.default_rng(1).standard_normal((cloud.n, 5))
print("max |dense - implicit|:", np.abs(W @ V - operator_matmul(implicit, V)).max())

# In[5]:

# the row-stochastic form shares the spectrum
P = dense.to_row_stochastic()
print("row sums:", P.sum(axis=1)[:4])
