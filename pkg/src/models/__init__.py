# Generators, transfer matrices and conjugating bijections
from src.models.configuration import ConfigBijection, Configuration
from src.models.generator import RateMatrix, set_theoretical_markov, twisted_ssep_matrix

__all__ = ["ConfigBijection", "Configuration", "RateMatrix", "set_theoretical_markov", "twisted_ssep_matrix"]
