"""The sliding Haar update against a full matrix transform of every window.

Integer arithmetic throughout, so the comparison is exact.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ptlms.wavelet import SlidingHaarState, build_dwt_matrix

L = 16
x = np.random.default_rng(0).integers(-2**15, 2**15, 5000)
T = build_dwt_matrix("haar_unnormalized", L, 3).T.astype(np.int64)
windows = sliding_window_view(np.concatenate([np.zeros(L - 1, np.int64), x]), L)[:, ::-1]

state = SlidingHaarState(L, dtype=np.int64)
streamed = np.array([state.push(v).copy() for v in x])
print("mismatches:", np.count_nonzero(streamed != windows @ T.T))
