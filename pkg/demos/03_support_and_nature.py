"""
Support and nature
==================

Where does H increase, and is it discrete or continuous?
"""
import numpy as np

from distgen import dsl
from distgen.analysis import (
    classify_nature,
    numeric_support_scan,
    support_exact_if_T4,
    support_upper_bound,
)
from distgen.baseline import make_beta, make_discrete_step, make_uniform, make_uniform01
from distgen.generator import build, direct_spec

g1, g2 = dsl.var(1), dsl.var(2)
U = make_uniform01()

# %% two baselines with disjoint supports, mixed half and half
mix = direct_spec(U, [make_uniform(0, 1), make_uniform(2, 3)],
                  mu=dsl.mul(dsl.const(0.5), dsl.add(g1, g2)), ell=dsl.ZERO)
print("upper bound :", support_upper_bound(mix).render())
print("certified   :", support_exact_if_T4(mix).render())
print("grid scan   :", numeric_support_scan(build(mix)).render())
print(classify_nature(mix).render())

# %% a discrete baseline makes H discrete whatever F is
D = make_discrete_step([(0.0, 0.2), (1.0, 0.5), (2.5, 0.3)])
disc = direct_spec(make_beta(2, 2), [D], mu=g1, ell=dsl.ZERO)
H = build(disc)
print(classify_nature(disc).render())
print("values on a fine grid:", np.unique(H.eval_cdf(np.linspace(-1, 4, 10_000))))

# %% so does a discrete F once both scalings are 1
F = make_discrete_step([(0.25, 0.5), (0.75, 0.5)])
t7 = direct_spec(F, [U], mu=g1, ell=dsl.NEG_INF, m=dsl.NEG_INF, nu=dsl.NEG_INF,
                 U=dsl.ONE, V=dsl.ONE)
print(classify_nature(t7).render())
print("atoms:", numeric_support_scan(build(t7)).atoms)
