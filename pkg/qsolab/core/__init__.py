from .exceptions import *
from .simplex import (
    CONSTRUCT_TOL,
    IDENTITY_TOL,
    Density,
    SignedVector,
    as_generator,
    gimel,
    l1_distance,
    maximize_over_simplex,
    meet,
    sample_density,
    simplex_grid,
)
from .qso import Qso, apply, apply_signed, check_monotone, diag, find_invariant, iterate, validate
from .chain import ChainWindow, StochasticMatrix, homogeneous_window, transition_matrix, window
