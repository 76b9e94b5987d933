"""Arithmetic-circuit validator for multiple sequence alignments."""

from zkmsa.field import MODULUS, FieldElement
from zkmsa.msa_circuit import Alphabet, CircuitParams, MsaInstance, VisibilityMask, build_main, encode_instance
from zkmsa.r1cs import ConstraintSystem, ConstraintSystemBuilder, Witness, check_satisfied, stats, synthesize_witness

__all__ = [
    "MODULUS",
    "FieldElement",
    "Alphabet",
    "CircuitParams",
    "MsaInstance",
    "VisibilityMask",
    "build_main",
    "encode_instance",
    "ConstraintSystem",
    "ConstraintSystemBuilder",
    "Witness",
    "check_satisfied",
    "stats",
    "synthesize_witness",
]

__version__ = "0.1.0"
