import numpy as np


def max_entry(m):
    return float(np.max(np.abs(np.asarray(m))))
