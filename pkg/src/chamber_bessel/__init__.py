"""Generalized Bessel functions of root systems A, B and D.

Jack polynomials, multivariate hypergeometric series, radial Dunkl
densities, Weyl chamber heat kernels and a simulator for the radial Dunkl
process.
"""
from .bessel import BesselSpec, bessel_A, bessel_B, bessel_D, generalized_bessel
from .errors import (CalibrationError, ChamberBesselError, ChamberError, DegenerateCoordinatesError,
                     DomainError, EigenvalueCollisionError, NormalizationError, PochhammerPoleError,
                     SimulationAborted, SingularDriftError, WeylGroupTooLarge)
from .hyperseries import DEFAULT_POLICY, TruncationPolicy, hyp0f0, hyp0f1, mv_series, uni_0F1
from .jack import jack_eval, jack_expansion
from .kernels import (DensityQuery, QuadratureSpec, density, grabiner_A, grabiner_B, grabiner_D,
                      grabiner_generic, heat_kernel_N, integrate_chamber, normalization_c)
from .partitions import Partition, gen_pochhammer
from .rootsys import Kind, Multiplicity, RootSystem, build_root_system, in_chamber, omega_k
from .simulate import SdeConfig, moment_report, simulate

__version__ = "0.1.0"

__all__ = [
    "BesselSpec", "bessel_A", "bessel_B", "bessel_D", "generalized_bessel",
    "CalibrationError", "ChamberBesselError", "ChamberError", "DegenerateCoordinatesError", "DomainError",
    "EigenvalueCollisionError", "NormalizationError", "PochhammerPoleError", "SimulationAborted",
    "SingularDriftError", "WeylGroupTooLarge",
    "DEFAULT_POLICY", "TruncationPolicy", "hyp0f0", "hyp0f1", "mv_series", "uni_0F1",
    "jack_eval", "jack_expansion",
    "DensityQuery", "QuadratureSpec", "density", "grabiner_A", "grabiner_B", "grabiner_D", "grabiner_generic",
    "heat_kernel_N", "integrate_chamber", "normalization_c",
    "Partition", "gen_pochhammer",
    "Kind", "Multiplicity", "RootSystem", "build_root_system", "in_chamber", "omega_k",
    "SdeConfig", "moment_report", "simulate",
]
