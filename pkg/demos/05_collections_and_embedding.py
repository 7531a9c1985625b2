# coding: utf-8

# # Comparing a collection of datasets
#
# Compute one descriptor per dataset, the full distance matrix, and a
# diffusion-map embedding of the collection.

# In[1]:

import numpy as np

from lesdist import (RunConfig, ToriConfig, compute_descriptor, diffusion_embed, generate_torus2,
                     pairwise_distance_matrix, rank_correlation)

cfg = RunConfig(k=100)
grid = np.linspace(1.0, 0.2, 8)
descs = [compute_descriptor(generate_torus2(ToriConfig(c=c, n_points=500, seed=i), name=f"c{c:.2f}"), cfg)
         for i, c in enumerate(grid)]

# In[2]:

D = pairwise_distance_matrix(descs)
print(D.to_csv())

# In[3]:

emb = diffusion_embed(D, m=2)
print(emb.to_csv())
# the first coordinate should order the tori by their minor radius
print("correlation with c:", abs(rank_correlation(emb.coords[:, 0], grid)))
