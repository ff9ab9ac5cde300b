from ..common.census import census

census.dim = 3
census.alpha = 0.5
census.samples = 2000
census.out_path = "./output/census_d3_alpha05/census.csv"
