# lmrate/shared/types.py
"""Общие псевдонимы типов"""

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]
