from .defaults import default_argument_parser, default_setup
from .census import (
    CensusConfig,
    CensusRow,
    census_header,
    census_row,
    perturbation_sweep,
    run_census,
)
