"""Twisted cohomology, twist classification and differential refinements
computed with exact rational and integral linear algebra."""

from .algebra import AlgebraElement, GradedAlgebra, preset
from .cochains import Cochain, CohomologyClass, TensorCochains, class_of, cochains, cup
from .complexes import CochainComplex, ComplexMap, cohomology, cone, homotopy_pullback
from .differential import (DifferentialDatum, a_map, diff_group, diff_nk, mv_differential, product,
                           verify_sequences)
from .groups import FgAbelianGroup, Hom
from .modules import MixedModule
from .picard import classify, h1_with_units, pic0_point
from .simplicial import LocalSystem, SimplicialComplex, build_space, circle, point, sphere, torus
from .sphere_mv import TwistDescriptor, ring_preset, sphere_twisted
from .sseq import pages, recover_twist, unit_differential
from .twist import (TwistingElement, are_gauge_equivalent, gauge_apply, mc_extend, mv_exactness, nu_invariant,
                    suspension_class, twisted_complex)

__version__ = "0.1.0"
