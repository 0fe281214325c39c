"""Fermion groupoids over Delone patterns: CAR sign algebra, Fock sectors and finite-range Hamiltonians."""

from ._native import BACKEND
from .car_symbolic import CARElement
from .fock import SectorBasis, SectorOperator
from .groupoid import GroupoidElement
from .hamiltonian import BiEquivariantCoefficient, LatticeHamiltonian, assemble_sector
from .pattern import Pattern, generate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BiEquivariantCoefficient",
    "CARElement",
    "GroupoidElement",
    "LatticeHamiltonian",
    "Pattern",
    "SectorBasis",
    "SectorOperator",
    "assemble_sector",
    "generate",
]
