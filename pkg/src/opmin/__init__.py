"""Exact computation of minimal models for algebras over operads."""
from .algebra import (AlgebraMorphism, TabularAlgebra, check_connected, extend_morphism,
                      is_quasi_iso, restrict, validate_algebra)
from .builtins import builtin, lie_to_ass, shared_builtin
from .complexes import ChainComplex, Convention, GradedSpace, cohomology
from .engine import (EngineOptions, MinimalModel, minimal_model, minimal_model_chain,
                     minimal_model_cochain, model_from_free_homology)
from .free import FreeAlgebra, FreeElement, Generator
from .homotopy import (PathAlgebra, compare_models, lift_through_surjection, mapping_path,
                       section_of_quasi_iso, verify_homotopy)
from .linalg import RatMatrix, SubspaceBasis, kernel, rref
from .operad import OperadTable, tameness_index, validate

__version__ = "0.1.0"
