"""Multipoint Schur algorithm, Wall rational functions and orthogonal rational
functions on the unit circle, with convergence diagnostics."""

from .errors import MpsOrfError, ResolutionRefused, ScenarioError, ValidationError
from .measure import CircleGrid, CircleMeasure
from .schur import SchurParams, schur_function_from_spec, schur_parameters
from .sequences import alpha_sequence_from_spec

__version__ = "0.1.0"
