# zoo is imported first: evaluation.mixing needs it while coarsen pulls in evaluation
from .zoo import (
    make_block_example,
    make_markov_averaging,
    make_q_diamond,
    make_q_flat,
    make_q_sharp,
    perturb,
    sample_qso,
    sample_stochastic_matrix,
)
from .coarsen import Partition, coarsen, coarsen_lipschitz_check
