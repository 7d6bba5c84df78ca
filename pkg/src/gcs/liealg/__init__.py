"""Exact Lie-algebraic layer: root systems, Chevalley bases, representations."""

from .chevalley import ChevalleyAlgebra, algebra_json, build_chevalley
from .element import AlgebraElement, AlgebraMismatchError, LieFrame, bracket, killing
from .reps import (
    Representation,
    UnsupportedRepresentationError,
    adjoint_rep,
    build_rep,
    defining_rep,
    representation,
)
from .roots import RootSystem, RootSystemError, build_root_system

__all__ = [
    "AlgebraElement",
    "AlgebraMismatchError",
    "ChevalleyAlgebra",
    "LieFrame",
    "Representation",
    "RootSystem",
    "RootSystemError",
    "UnsupportedRepresentationError",
    "adjoint_rep",
    "algebra_json",
    "bracket",
    "build_chevalley",
    "build_rep",
    "build_root_system",
    "defining_rep",
    "killing",
    "representation",
]
