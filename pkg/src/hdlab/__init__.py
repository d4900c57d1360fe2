"""Density hypercubes, double dilation and their verification.

Dense-tensor semantics for two levels of the CPM construction over finite
abelian group algebras, with randomized check batteries for the structural
results of the theory.
"""

from .config import RunConfig
from .cpm import CPMap, choi_and_check, partial_trace
from .dilation import DDRealization, DMRealization, dd_denote, dm_denote, invertibility_probe
from .groupalg import ClassicalStructure, FiniteAbelianGroup, PhaseFunction, spider
from .hypercube import (
    DHEffect, DHMap, DHRealization, dec_map, dh_denote, dh_discard, embed_quantum,
    extract_quantum, hypdec_completion, hypdec_map, phase_gadget, quantum_action,
)
from .tensor import approx_eq, contract
from .verify import VerificationReport, run_proposition

__version__ = "0.1.0"

__all__ = [
    "CPMap", "ClassicalStructure", "DDRealization", "DHEffect", "DHMap",
    "DHRealization", "DMRealization", "FiniteAbelianGroup", "PhaseFunction",
    "RunConfig", "VerificationReport", "approx_eq", "choi_and_check", "contract",
    "dd_denote", "dec_map", "dh_denote", "dh_discard", "dm_denote", "embed_quantum",
    "extract_quantum", "hypdec_completion", "hypdec_map", "invertibility_probe",
    "partial_trace", "phase_gadget", "quantum_action", "run_proposition", "spider",
]
