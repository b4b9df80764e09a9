"""L-ensembles, k-DPP sampling, deterministic greedy selection and brute-force oracles."""

from dpp.ensemble import LEnsemble, SubsetSample, marginal_kernel, subset_prob
from dpp.enumeration import (
    SubsetDistribution,
    highest_prob_subset_bruteforce,
    kdpp_distribution_bruteforce,
)
from dpp.greedy import det_kdpp, det_kdpp_trace
from dpp.sampling import elementary_symmetric_polynomials, sample_kdpp, select_eigen_indices

__all__ = [
    "LEnsemble",
    "SubsetDistribution",
    "SubsetSample",
    "det_kdpp",
    "det_kdpp_trace",
    "elementary_symmetric_polynomials",
    "highest_prob_subset_bruteforce",
    "kdpp_distribution_bruteforce",
    "marginal_kernel",
    "sample_kdpp",
    "select_eigen_indices",
    "subset_prob",
]
