"""Derived Lie groups, derived Lie algebras and synthetic 2-bundles of crossed modules."""
from .crossed_module import (AlgebraCrossedModule, CrossedModuleMorphism, DifferentiatedMaps,
                             GroupCrossedModule, check_algebra_axioms, check_group_axioms,
                             check_morphism, covering_morphism, differentiate_module,
                             differentiate_morphism, identity_suite, inclusion_morphism,
                             inclusion_submodule, make_fixture, variational_suite)
from .derived import (DerivedAlgebraElement, DerivedCurve, DerivedGroupElement, DerivedModule,
                      GradedDerivedElement, coboundary_dt, cross_mode, d_adjoint, dbracket,
                      derivation_transport, derived_morphism, dinv, dmul, dtau_transport,
                      graded_bracket, mc_form)
from .errors import (ConfigParseError, ConfigurationError, DercrossError, DomainError,
                     MembershipError, PreconditionError, ShapeError)
from .graded import GeneratorSpec, GradedAlgebra, GradedMatrix, GradedScalar
from .harness import CheckResult, SuiteConfig, emit_report, parse_config, run_suite
from .matrix_lie import fd_differential, mexp, mlog

__version__ = "0.1.0"
