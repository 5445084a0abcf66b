"""
Writing a generator by hand
===========================

Limits are monotone expressions in g1, ..., gm.  The validator checks the
sufficient conditions before anything is evaluated.
"""
import numpy as np

from distgen import dsl, specfile
from distgen.baseline import make_beta, make_uniform01
from distgen.errors import ValidationFailed
from distgen.generator import build, direct_spec, validate

U = make_uniform01()
F = make_beta(2.0, 2.0)

# %% a mistake first: mu stops at 0.9, short of F's upper support end
mu = dsl.parse("0.9*g1^2", 1)
bad = direct_spec(F, [U], mu=mu, ell=dsl.ZERO)
report = validate(bad)
print(report.render())
print("failed:", report.failed_conditions())
try:
    build(bad)
except ValidationFailed as exc:
    print("build refused:", exc)

# %% reaching the top of F's support fixes it
good = direct_spec(F, [U], mu=dsl.parse("g1^2", 1), ell=dsl.ZERO, label="beta(2,2) of G^2")
H = build(good)
print(H.eval_cdf(np.array([0.25, 0.5, 0.75])))

# %% directions are inferred, not assumed
for text in ("1 - (1 - g1^2)^3", "-ln(1 - g1)", "2*g1 - g1^2"):
    e = dsl.parse(text, 1)
    print(f"{text:18s} -> {[d.name for d in dsl.infer_direction(e, 1)]}")

# %% specs are JSON documents; the CLI reads the same format
text = specfile.dumps(good)
print(text)
assert specfile.dumps(specfile.loads(text)) == text
