from ..common.census import census

census.out_path = "./output/census_d5_alpha1/census.csv"
census.svg = True
