"""Perfect-information semi-Markov game solver"""

__version__ = "0.1.0"
