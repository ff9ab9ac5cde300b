from qsolab.config import LazyCall as L
from qsolab.engine.census import CensusConfig

census = L(CensusConfig)(
    dim=5,
    samples=1000,
    alpha=1.0,
    horizon=20,
    starts=4,
    seed=0,
    epsilon_list=[0.01, 0.05, 0.1, 0.3],
    out_path="./output/census/census.csv",
    threads=None,
    record_timing=False,  # a timed CSV is not byte-reproducible
    svg=False,
)
