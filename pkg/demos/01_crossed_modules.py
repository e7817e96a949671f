#!/usr/bin/env python3
# Crossed modules of matrix groups: build the fixtures, check the axioms,
# differentiate, and watch a finite-difference identity converge.
from dercross import (check_algebra_axioms, check_group_axioms, differentiate_module,
                      identity_suite, make_fixture, variational_suite)
from dercross.crossed_module import corrupt_mu

# %% The three fixtures
for name in ("CONJ(SO3)", "LIN(3)", "COVER"):
    M = make_fixture(name)
    print(f"{M.name:10s} E in {M.E.name}, G in {M.G.name}")
    print("  group axioms:", {k: f"{v:.1e}" for k, v in check_group_axioms(M, 50, 1).items()})

# %% A spoiled action fails the Peiffer identity right away
bad = corrupt_mu(make_fixture("CONJ(SO3)"), 1.01)
print("corrupted peiffer residual:", check_group_axioms(bad, 20, 1)["peiffer"])

# %% Differentiating by central differences vs the closed forms
M = make_fixture("COVER")
for method in ("fd", "exact"):
    alg, _ = differentiate_module(M, 1e-5, method)
    rep = check_algebra_axioms(alg, 50, 1)
    print(f"{method:5s} algebra axioms, worst {max(rep.values()):.2e}")

# %% Identities among the differentiated maps
rep = identity_suite(M, 50, 1)
for k, v in rep.items():
    print(f"  {k:9s} {v:.2e}")

# %% Truncation error: one decade of step buys two decades of accuracy
for step in (1e-3, 1e-4, 1e-5):
    rep = variational_suite(make_fixture("CONJ(SO3)"), 20, 1, step=step, curve_jerk=1e4)
    print(f"step {step:.0e}: d_mu residual {rep['d_mu']:.2e}")
