#!/usr/bin/env python3
# A trivial synthetic 2-bundle U x DM.  Differential forms on it carry a
# contraction j_Z and a Lie derivative l_Z for every Z in the derived Lie
# algebra; they obey the Cartan relations, and the basic forms are exactly
# the pullbacks from the base.
import numpy as np

from dercross import make_fixture
from dercross import bundle as bd

rng = np.random.default_rng(5)
B = bd.BundleModel(make_fixture("CONJ(SO3)"), base_dim=2)
print("fiber generators:", B.fiber_names)

# %% A form: (x1 + a_01) w1 wedge dx2
f = bd.FormField.make(B, lambda x, a, ell: x[0] + a[0, 1], ("w1", "dx2"))
V = B.sample_point(rng)
print("f  =", f.evaluate(V))
print("df =", bd.d_form(f).evaluate(V))

# %% Cartan relations over a handful of samples
worst = {}
for i in range(20):
    Z, W = B.sample_Z(rng), B.sample_Z(rng, ("g", "e")[i % 2])
    g = bd.sample_fields(B, rng)[i % 3]
    for k, v in bd.cartan_residuals(Z, W, g, B.sample_point(rng)).items():
        worst[k] = max(worst.get(k, 0.0), v)
print({k: f"{v:.1e}" for k, v in worst.items()})

# %% Flip the sign of the contraction and the mixed relations break
flipped = bd.BundleModel(B.module, flip_contraction=True)
res = bd.cartan_residuals(flipped.sample_Z(rng), flipped.sample_Z(rng),
                          bd.sample_fields(flipped, rng)[2], flipped.sample_point(rng))
print("flipped:", {k: f"{v:.1e}" for k, v in res.items()})

# %% Basic or not
Zs = [B.sample_Z(rng, k) for k in ("g", "e", "mixed")]
pts = [B.sample_point(rng) for _ in range(3)]
for label, fields in (("pullback", bd.pullback_fields(B, rng)),
                      ("witness", bd.witness_fields(B, rng))):
    print(label, [f"{bd.basic_residual(h, Zs, pts):.2g}" for h in fields])
