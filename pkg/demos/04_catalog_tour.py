"""
Catalog tour
============

Each named family is rebuilt from a generator row and compared with its
closed form.  Entries with two routes are rebuilt both ways.
"""
import numpy as np

from distgen import catalog
from distgen.baseline import make_beta, make_gamma, make_uniform01
from distgen.generator import build

U = make_uniform01()

for name in catalog.list_entries():
    entry = catalog.get_entry(name)
    worst = max(catalog.reduction_residual(entry, p, U, 101, r)
                for p in entry.presets for r in entry.routes)
    print(f"{name:30s} routes {', '.join(entry.routes):28s} worst residual {worst:.1e}")

# %% one generator row covers products of several baselines
G = [U, make_gamma(2.0, 1.0)]
spec = catalog.generalized_spec(make_beta(2.0, 3.0), G, 0.0, [1, 1], [1, 1], [0.5, 2.0])
H = build(spec)
xs = np.linspace(0.0, 6.0, 7)
print(np.round(H.eval_cdf(xs), 6))
