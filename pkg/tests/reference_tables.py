"""Pinned membership tables for the 17-point two-cluster set.

Row order follows the fixture's point order (twelve left-group points,
then the five cross points). Columns are (left cluster, right cluster).
Snapshots: the shared initialization, each algorithm's first iteration,
the classic run's eighth iteration and the sparse run's fifth (final)
iteration.
"""

import numpy as np

INIT = np.array([
    [0.9292, 0.0708],
    [0.8963, 0.1037],
    [0.9475, 0.0525],
    [0.9854, 0.0146],
    [0.9728, 0.0272],
    [0.8201, 0.1799],
    [0.9475, 0.0525],
    [0.9854, 0.0146],
    [0.9728, 0.0272],
    [0.8201, 0.1799],
    [0.9292, 0.0708],
    [0.8963, 0.1037],
    [0.0748, 0.9252],
    [0.1441, 0.8559],
    [6.1e-05, 0.9999],
    [0.0522, 0.9478],
    [0.0748, 0.9252],
])

PCM_ITER1 = np.array([
    [0.3701, 0.0018],
    [0.3526, 0.0127],
    [0.3884, 2.5e-04],
    [0.8348, 0.0027],
    [0.7954, 0.0188],
    [0.3360, 0.0897],
    [0.3884, 2.5e-04],
    [0.8348, 0.0027],
    [0.7954, 0.0188],
    [0.3360, 0.0897],
    [0.3701, 0.0018],
    [0.3526, 0.0127],
    [1.2e-05, 0.6415],
    [0.0058, 0.6566],
    [3.0e-05, 0.9997],
    [2.5e-08, 0.6267],
    [1.2e-05, 0.6415],
])

SPCM_ITER1 = np.array([
    [0.0, 0.0],
    [0.0, 0.0],
    [0.0, 0.0],
    [0.4625, 0.0],
    [0.4316, 0.0],
    [0.0, 0.0],
    [0.0, 0.0],
    [0.4625, 0.0],
    [0.4316, 0.0],
    [0.0, 0.0],
    [0.0, 0.0],
    [0.0, 0.0],
    [0.0, 0.4850],
    [0.0, 0.4983],
    [0.0, 0.8046],
    [0.0, 0.4720],
    [0.0, 0.4850],
])

PCM_ITER8 = np.array([
    [0.3606, 0.0118],
    [0.3630, 0.0570],
    [0.3583, 0.0024],
    [0.8134, 0.0174],
    [0.8186, 0.0846],
    [0.3653, 0.2766],
    [0.3583, 0.0024],
    [0.8134, 0.0174],
    [0.8186, 0.0846],
    [0.3653, 0.2766],
    [0.3606, 0.0118],
    [0.3630, 0.0570],
    [1.6e-05, 0.5276],
    [0.0070, 0.9512],
    [4.0e-05, 0.8222],
    [3.6e-08, 0.2926],
    [1.6e-05, 0.5276],
])

SPCM_ITER5 = np.array([
    [0.0, 0.0],
    [0.0, 0.0],
    [0.0, 0.0],
    [0.4478, 0.0],
    [0.4476, 0.0],
    [0.0, 0.0],
    [0.0, 0.0],
    [0.4478, 0.0],
    [0.4476, 0.0],
    [0.0, 0.0],
    [0.0, 0.0],
    [0.0, 0.0],
    [0.0, 0.4852],
    [0.0, 0.4854],
    [0.0, 0.8049],
    [0.0, 0.4849],
    [0.0, 0.4852],
])

GAMMA_INIT = np.array([0.6147, 1.2678])
