import numpy as np


class Neumaier:
    """Elementwise compensated accumulator for scalars or arrays."""

    def __init__(self, shape=()):
        self.total = np.zeros(shape)
        self.comp = np.zeros(shape)

    def add(self, term):
        term = np.asarray(term, dtype=float)
        t = self.total + term
        big = np.abs(self.total) >= np.abs(term)
        self.comp = self.comp + np.where(big, (self.total - t) + term, (term - t) + self.total)
        self.total = t

    @property
    def value(self):
        v = self.total + self.comp
        return float(v) if np.ndim(v) == 0 else v
