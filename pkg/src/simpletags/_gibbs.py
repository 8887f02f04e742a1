"""Compiled inner loop of the collapsed Gibbs sampler.

The sweep kernel mutates the assignment vector and count matrices in place.
Uniform variates are drawn by the caller (one per token, per sweep) so the
random stream stays owned by a single seeded generator on the Python side
and the kernel itself is bit-deterministic.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def run_sweep(tokens, doc_index, z, n_dk, n_kw, n_k, alpha, beta, uniforms):
    """One full Gibbs sweep: resample the topic of every token in order.

    For token i in document d with word w, the current assignment is removed
    from the counts and a new topic is drawn with unnormalized weight

        (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + V * beta)

    by inverse transform on the cumulative weights, using uniforms[i].
    """
    n_topics = n_kw.shape[0]
    vbeta = n_kw.shape[1] * beta
    cum = np.empty(n_topics, dtype=np.float64)
    for i in range(tokens.shape[0]):
        w = tokens[i]
        d = doc_index[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for t in range(n_topics):
            total += (n_dk[d, t] + alpha) * (n_kw[t, w] + beta) / (n_k[t] + vbeta)
            cum[t] = total
        u = uniforms[i] * total
        k = 0
        while cum[k] < u:
            k += 1
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1
