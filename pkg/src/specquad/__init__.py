"""specquad: numerical operator algebra for Lorentzian spectral geometry.

Builds the truncated spectral quadruple of 1+1 de Sitter space, verifies
its defining operator identities at matrix level, reconstructs geometric
data from commutator expansions, and handles finite spectral triples with a
Connes-distance solver.  The ``specquad`` CLI runs the verification suite
and writes machine-readable reports.
"""

from .operators import (
    AntilinearOperator,
    BasisDescriptor,
    InteriorProjector,
    TruncatedOperator,
    anticommutator,
    antilinear_conjugate,
    bch_terms,
    commutator,
    interior_residual,
    op_norm,
)
from .quadruple import AxiomCheck, AxiomReport, SpectralQuadruple, verify_quadruple
from .desitter import DeSitterParams, assemble_quadruple

__version__ = "0.1.0"

__all__ = [
    "AntilinearOperator",
    "BasisDescriptor",
    "InteriorProjector",
    "TruncatedOperator",
    "anticommutator",
    "antilinear_conjugate",
    "bch_terms",
    "commutator",
    "interior_residual",
    "op_norm",
    "AxiomCheck",
    "AxiomReport",
    "SpectralQuadruple",
    "verify_quadruple",
    "DeSitterParams",
    "assemble_quadruple",
    "__version__",
]
