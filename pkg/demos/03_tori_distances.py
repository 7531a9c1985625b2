# coding: utf-8

# # Distances between unaligned tori
#
# Descriptors need no correspondence between points, nor even equal sizes
# or ambient dimensions.  As the minor radius of a 2-D torus shrinks it
# moves away from the full 2-D torus and towards a circle-like 3-D torus.

# In[1]:

from lesdist import RunConfig, ToriConfig, generate_torus2, generate_torus3, les_distances

cfg = RunConfig(k=150)

# In[2]:

for c in (1.0, 0.6, 0.2):
    clouds = [
        generate_torus2(ToriConfig(n_points=800, seed=1), name="T2"),
        generate_torus2(ToriConfig(c=c, n_points=600, seed=2), name="T2Sc"),
        generate_torus3(ToriConfig(c=c, n_points=900, seed=3), name="T3Sc"),
    ]
    D = les_distances(clouds, cfg)
    print(f"c={c}: d(T2,T2Sc)={D.values[0, 1]:.2f}  d(T2,T3Sc)={D.values[0, 2]:.2f}")

# In[3]:

# the whole sweep with several trials is packaged as a report
from lesdist.bench import tori_benchmark

report = tori_benchmark(RunConfig(k=100), c_grid=(1.0, 0.5), n_points=400, trials=2)
print(report["results"]["les"]["T2|T3Sc"])
