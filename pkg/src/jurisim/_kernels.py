"""Hot numeric kernels: Gibbs sweeps, biased random walks, SGNS updates.

Each kernel is written once as plain Python over numpy arrays. When numba is
importable and ``JURISIM_NO_NUMBA`` is unset, the functions are compiled with
``@njit`` at import time; otherwise the very same code runs uncompiled.
Randomness comes from an inline splitmix64 generator operating on
``np.uint64`` values, whose integer arithmetic wraps identically in both
modes, so every sampling decision (topic labels, walk steps, negative draws)
is bit-identical across modes; trained vectors agree to a few ulps, the
compiled code being free to fuse float multiply-adds
(``tests/test_kernels.py`` checks the parity across modes in a subprocess,
``benchmarks/bench_kernels.py`` measures the speed gap).

All uint64 overflow here is intentional; callers of the pure path go through
:func:`run_kernel`, which silences numpy's scalar-overflow warnings.
"""

from __future__ import annotations

import os
from contextlib import nullcontext

import numpy as np


def _numba_requested() -> bool:
    if os.environ.get("JURISIM_NO_NUMBA", "").strip() not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_requested()

if NUMBA_ENABLED:
    from numba import njit as _njit

    def _jit(func):
        return _njit(cache=True)(func)

else:
    def _jit(func):
        return func


def run_kernel(func, *args):
    """Call a kernel; in pure-Python mode suppress intended uint64 wraparound warnings."""
    ctx = nullcontext() if NUMBA_ENABLED else np.errstate(over="ignore")
    with ctx:
        return func(*args)


# ---------------------------------------------------------------------------
# splitmix64 PRNG
#
# State is a bare uint64 advanced by the golden-gamma constant; output is the
# usual 3-round finalizer. Streams for (seed, a, b) are derived by re-mixing,
# which keeps walk generation schedule-independent: walk (node, index) sees
# the same randomness no matter how walks are ordered or batched.
# ---------------------------------------------------------------------------

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@_jit
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@_jit
def _rng_next(state):
    """Advance the stream; return (state, uniform double in [0, 1))."""
    state = state + _GAMMA
    z = _mix64(state)
    return state, np.float64(z >> np.uint64(11)) * _INV_2_53


@_jit
def _stream(seed, a, b):
    """Derive an independent splitmix64 state from (seed, a, b)."""
    s = _mix64(seed + _GAMMA)
    s = _mix64(s ^ (np.uint64(a) * _MIX1))
    s = _mix64(s ^ (np.uint64(b) * _MIX2))
    return s


def seed_to_u64(seed: int) -> np.uint64:
    return np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)


def new_state(seed: int) -> np.ndarray:
    """RNG state holder for kernels that are re-entered from Python.

    State must cross the Python/kernel boundary inside a uint64 array:
    returning the scalar would round-trip it through a Python int and
    re-enter the compiled function under a different (int64) signature,
    silently corrupting the stream.
    """
    return np.array([seed_to_u64(seed)], dtype=np.uint64)


# ---------------------------------------------------------------------------
# Alias tables (Vose construction) for O(1) categorical sampling.
#
# Tables for many distributions are stored flattened: block b covers
# offsets[b]:offsets[b+1] of the accept/alias arrays.
# ---------------------------------------------------------------------------

@_jit
def build_alias_blocks(probs, offsets, accept, alias):
    """Fill accept/alias for each probability block; blocks must sum to 1."""
    nblocks = offsets.shape[0] - 1
    for b in range(nblocks):
        lo = offsets[b]
        n = offsets[b + 1] - lo
        if n == 0:
            continue
        scaled = np.empty(n, dtype=np.float64)
        small = np.empty(n, dtype=np.int64)
        large = np.empty(n, dtype=np.int64)
        ns = 0
        nl = 0
        for i in range(n):
            scaled[i] = probs[lo + i] * n
            if scaled[i] < 1.0:
                small[ns] = i
                ns += 1
            else:
                large[nl] = i
                nl += 1
        while ns > 0 and nl > 0:
            ns -= 1
            nl -= 1
            s = small[ns]
            g = large[nl]
            accept[lo + s] = scaled[s]
            alias[lo + s] = g
            scaled[g] = scaled[g] - (1.0 - scaled[s])
            if scaled[g] < 1.0:
                small[ns] = g
                ns += 1
            else:
                large[nl] = g
                nl += 1
        while nl > 0:
            nl -= 1
            accept[lo + large[nl]] = 1.0
            alias[lo + large[nl]] = large[nl]
        while ns > 0:
            ns -= 1
            accept[lo + small[ns]] = 1.0
            alias[lo + small[ns]] = small[ns]


@_jit
def _alias_draw(accept, alias, offset, n, state):
    """Draw an index in [0, n) from the alias block starting at offset."""
    state, u1 = _rng_next(state)
    state, u2 = _rng_next(state)
    i = int(u1 * n)
    if i >= n:
        i = n - 1
    if u2 <= accept[offset + i]:
        return state, i
    return state, int(alias[offset + i])


@_jit
def alias_sample_many(accept, alias, offset, n, count, seed):
    """count draws from one alias block, as indices in [0, n)."""
    out = np.empty(count, dtype=np.int64)
    state = _stream(seed, np.int64(offset), np.int64(n))
    for t in range(count):
        state, j = _alias_draw(accept, alias, offset, n, state)
        out[t] = j
    return out


# ---------------------------------------------------------------------------
# Collapsed Gibbs sweep for LDA.
#
# Token t of the flattened corpus lives in document docs[t] with word id
# words[t] and current topic z[t]. Count matrices are updated in place and
# must stay consistent with z after every sweep.
# ---------------------------------------------------------------------------

@_jit
def gibbs_init(docs, words, z, n_dk, n_kw, n_k, n_topics, state_arr):
    state = state_arr[0]
    for t in range(z.shape[0]):
        state, u = _rng_next(state)
        k = int(u * n_topics)
        if k >= n_topics:
            k = n_topics - 1
        z[t] = k
        n_dk[docs[t], k] += 1
        n_kw[k, words[t]] += 1
        n_k[k] += 1
    state_arr[0] = state


@_jit
def gibbs_sweep(docs, words, z, n_dk, n_kw, n_k, alpha, beta, state_arr):
    """One full sweep: resample every token's topic from its full conditional.

    The conditional is (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta) with
    the resampled token excluded from all counts.
    """
    n_topics = n_kw.shape[0]
    v_beta = n_kw.shape[1] * beta
    cum = np.empty(n_topics, dtype=np.float64)
    state = state_arr[0]
    for t in range(z.shape[0]):
        d = docs[t]
        w = words[t]
        k_old = z[t]
        n_dk[d, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_k[k_old] -= 1
        total = 0.0
        for k in range(n_topics):
            total += (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + v_beta)
            cum[k] = total
        state, u = _rng_next(state)
        target = u * total
        k_new = 0
        while cum[k_new] < target and k_new < n_topics - 1:
            k_new += 1
        z[t] = k_new
        n_dk[d, k_new] += 1
        n_kw[k_new, w] += 1
        n_k[k_new] += 1
    state_arr[0] = state


# ---------------------------------------------------------------------------
# Second-order (biased) transition probabilities and walk generation.
#
# The graph is CSR: neighbors of node v are indices[indptr[v]:indptr[v+1]],
# sorted ascending, with parallel edge weights. A directed edge (u -> v) is
# identified with its CSR position e, so the second-order table for e is the
# block sec_offsets[e]:sec_offsets[e+1], one entry per neighbor of v.
# ---------------------------------------------------------------------------

@_jit
def _binary_contains(indices, lo, hi, x):
    while lo < hi:
        mid = (lo + hi) // 2
        if indices[mid] == x:
            return True
        if indices[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return False


@_jit
def second_order_probs(indptr, indices, weights, p, q, sec_offsets, sec_probs):
    """Fill normalized transition probabilities for every directed edge.

    For edge (u -> v) and candidate x in neighbors(v), the unnormalized
    weight is w(v,x)/p if x == u, w(v,x) if x neighbors u, else w(v,x)/q.
    """
    n_nodes = indptr.shape[0] - 1
    for u in range(n_nodes):
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            lo = indptr[v]
            hi = indptr[v + 1]
            out = sec_offsets[e]
            total = 0.0
            for j in range(hi - lo):
                x = indices[lo + j]
                w = weights[lo + j]
                if x == u:
                    f = w / p
                elif _binary_contains(indices, indptr[u], indptr[u + 1], x):
                    f = w
                else:
                    f = w / q
                sec_probs[out + j] = f
                total += f
            for j in range(hi - lo):
                sec_probs[out + j] /= total


@_jit
def walk_all(indptr, indices,
             first_accept, first_alias,
             sec_offsets, sec_accept, sec_alias,
             walks_per_node, walk_length, seed,
             walks, lengths):
    """Generate walks_per_node walks from every node, in node order.

    walks is (n_nodes * walks_per_node, walk_length) filled with -1 beyond
    each walk's length. Isolated start nodes yield length-1 walks; any other
    walk has full length (an undirected edge can always be re-traversed).
    """
    n_nodes = indptr.shape[0] - 1
    row = 0
    for node in range(n_nodes):
        for wi in range(walks_per_node):
            state = _stream(seed, np.int64(node), np.int64(wi))
            walks[row, 0] = node
            deg = indptr[node + 1] - indptr[node]
            if deg == 0 or walk_length == 1:
                lengths[row] = 1
                row += 1
                continue
            state, off = _alias_draw(first_accept, first_alias, indptr[node], deg, state)
            e = indptr[node] + off
            cur = indices[e]
            walks[row, 1] = cur
            pos = 2
            while pos < walk_length:
                deg_c = indptr[cur + 1] - indptr[cur]
                state, off = _alias_draw(sec_accept, sec_alias, sec_offsets[e], deg_c, state)
                e = indptr[cur] + off
                cur = indices[e]
                walks[row, pos] = cur
                pos += 1
            lengths[row] = walk_length
            row += 1


# ---------------------------------------------------------------------------
# Skip-gram with negative sampling.
#
# One positive update per (center, context-in-window) pair plus k negatives
# drawn from the alias table over the unigram^(3/4) node distribution. The
# learning rate decays linearly from lr0 to lr0/100 over all updates. Updates
# are strictly sequential, so results are reproducible bit for bit.
# ---------------------------------------------------------------------------

@_jit
def _softplus(x):
    # log(1 + exp(x)) without overflow
    if x > 0.0:
        return x + np.log1p(np.exp(-x))
    return np.log1p(np.exp(x))


@_jit
def count_pairs(lengths, window):
    total = 0
    for r in range(lengths.shape[0]):
        n = lengths[r]
        for i in range(n):
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window
            if hi > n - 1:
                hi = n - 1
            total += hi - lo
    return total


@_jit
def sgns_train(walks, lengths, in_vecs, out_vecs,
               window, k_neg, neg_accept, neg_alias,
               epochs, lr0, seed, losses):
    """Train in place; losses[e] receives the mean pair loss of epoch e."""
    n_nodes = in_vecs.shape[0]
    pairs_per_epoch = count_pairs(lengths, window)
    if pairs_per_epoch == 0:
        # nothing to train on (all walks are isolated singletons)
        for epoch in range(epochs):
            losses[epoch] = 0.0
        return
    total_updates = pairs_per_epoch * epochs
    lr_end = lr0 / 100.0
    state = _stream(seed, np.int64(7919), np.int64(104729))
    t = 0
    for epoch in range(epochs):
        loss_sum = 0.0
        for r in range(walks.shape[0]):
            n = lengths[r]
            for i in range(n):
                center = walks[r, i]
                lo = i - window
                if lo < 0:
                    lo = 0
                hi = i + window
                if hi > n - 1:
                    hi = n - 1
                for j in range(lo, hi + 1):
                    if j == i:
                        continue
                    ctx = walks[r, j]
                    if total_updates > 1:
                        lr = lr0 + (lr_end - lr0) * (t / (total_updates - 1))
                    else:
                        lr = lr0
                    t += 1
                    u = in_vecs[center]
                    grad_u = np.zeros(in_vecs.shape[1], dtype=np.float64)
                    # positive pair
                    x = np.dot(u, out_vecs[ctx])
                    s = 1.0 / (1.0 + np.exp(-x))
                    loss_sum += _softplus(-x)
                    g = s - 1.0
                    grad_u += g * out_vecs[ctx]
                    out_vecs[ctx] -= (lr * g) * u
                    # negatives
                    for _ in range(k_neg):
                        state, neg = _alias_draw(neg_accept, neg_alias, 0, n_nodes, state)
                        if neg == ctx:
                            continue
                        xn = np.dot(u, out_vecs[neg])
                        sn = 1.0 / (1.0 + np.exp(-xn))
                        loss_sum += _softplus(xn)
                        grad_u += sn * out_vecs[neg]
                        out_vecs[neg] -= (lr * sn) * u
                    in_vecs[center] -= lr * grad_u
        losses[epoch] = loss_sum / pairs_per_epoch
