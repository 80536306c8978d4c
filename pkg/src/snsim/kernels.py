"""Hot inner loops with a numba fast path and a pure-numpy fallback.

The simulator evaluates every (viewer, article) pair once per step --
roughly 40M pair decisions at baseline scale -- so exposure sampling
and like evaluation are the kernels worth compiling.  Randomness here is
counter-based: a splitmix64 hash of (seed, purpose, article, viewer)
yields the uniform draw for that pair.  Draws therefore never depend on
how many draws some other scenario consumed, which is what makes
common-random-number comparisons across thresholds exact.

Both implementations produce bit-identical results.  Set SNSIM_NO_NUMBA=1
before import to force the numpy path (see benchmarks/bench_kernels.py for
the speed comparison).
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "IMPLEMENTATION",
    "SALT_VIEW",
    "SALT_COIN",
    "SALT_FANOUT",
    "pair_uniform_grid",
    "pair_uniform_flat",
    "organic_masks",
]

SALT_VIEW = 1
SALT_COIN = 2
SALT_FANOUT = 3

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_INV_2_53 = 2.0 ** -53


def _mix_np(x: np.ndarray) -> np.ndarray:
    x = x + _GOLDEN
    x = (x ^ (x >> _U64(30))) * _MIX1
    x = (x ^ (x >> _U64(27))) * _MIX2
    return x ^ (x >> _U64(31))


def _base_key(seed: int, salt: int) -> np.uint64:
    with np.errstate(over="ignore"):
        return _mix_np(_U64(seed) ^ _mix_np(_U64(salt)))


def _pair_uniform_grid_np(seed, salt, row_keys, col_keys):
    """Uniform[0,1) draws for every (row, col) key pair, shape (R, C)."""
    with np.errstate(over="ignore"):
        base = _base_key(seed, salt)
        hr = _mix_np(base ^ np.asarray(row_keys, dtype=np.uint64))
        h = _mix_np(hr[:, None] ^ np.asarray(col_keys, dtype=np.uint64)[None, :])
        return (h >> _U64(11)).astype(np.float64) * _INV_2_53


def _pair_uniform_flat_np(seed, salt, keys_a, keys_b):
    """Elementwise uniforms for paired key arrays, shape (N,)."""
    with np.errstate(over="ignore"):
        base = _base_key(seed, salt)
        ha = _mix_np(base ^ np.asarray(keys_a, dtype=np.uint64))
        h = _mix_np(ha ^ np.asarray(keys_b, dtype=np.uint64))
        return (h >> _U64(11)).astype(np.float64) * _INV_2_53


def _organic_masks_np(seed, article_ids, evaluations, cat_interests,
                      l_threshold, view_probability):
    """Exposure and like masks for one step, shape (n_posts, n_minor).

    ``cat_interests[a, j]`` is viewer j's interest in article a's category.
    A pair is viewed iff its keyed uniform falls below ``view_probability``
    and liked iff additionally evaluation * interest >= ``l_threshold``.
    """
    n_minor = cat_interests.shape[1]
    u = _pair_uniform_grid_np(seed, SALT_VIEW, article_ids, np.arange(n_minor))
    viewed = u < view_probability
    liked = viewed & (evaluations[:, None].astype(np.float64) * cat_interests
                      >= l_threshold)
    return viewed, liked


_want_numba = os.environ.get("SNSIM_NO_NUMBA", "") not in ("1", "true", "yes")
_numba_ready = False

if _want_numba:
    try:
        import numba
        from numba import njit

        _NB_GOLDEN = numba.uint64(0x9E3779B97F4A7C15)
        _NB_MIX1 = numba.uint64(0xBF58476D1CE4E5B9)
        _NB_MIX2 = numba.uint64(0x94D049BB133111EB)

        @njit(cache=True)
        def _mix_nb(x):
            x = x + _NB_GOLDEN
            x = (x ^ (x >> numba.uint64(30))) * _NB_MIX1
            x = (x ^ (x >> numba.uint64(27))) * _NB_MIX2
            return x ^ (x >> numba.uint64(31))

        @njit(cache=True)
        def _pair_uniform_grid_nb(seed, salt, row_keys, col_keys):
            base = _mix_nb(numba.uint64(seed) ^ _mix_nb(numba.uint64(salt)))
            out = np.empty((row_keys.size, col_keys.size), dtype=np.float64)
            for i in range(row_keys.size):
                hr = _mix_nb(base ^ numba.uint64(row_keys[i]))
                for j in range(col_keys.size):
                    h = _mix_nb(hr ^ numba.uint64(col_keys[j]))
                    out[i, j] = (h >> numba.uint64(11)) * _INV_2_53
            return out

        @njit(cache=True)
        def _pair_uniform_flat_nb(seed, salt, keys_a, keys_b):
            base = _mix_nb(numba.uint64(seed) ^ _mix_nb(numba.uint64(salt)))
            out = np.empty(keys_a.size, dtype=np.float64)
            for i in range(keys_a.size):
                h = _mix_nb(_mix_nb(base ^ numba.uint64(keys_a[i]))
                            ^ numba.uint64(keys_b[i]))
                out[i] = (h >> numba.uint64(11)) * _INV_2_53
            return out

        @njit(cache=True)
        def _organic_masks_nb(seed, article_ids, evaluations, cat_interests,
                              l_threshold, view_probability):
            n_posts, n_minor = cat_interests.shape
            viewed = np.empty((n_posts, n_minor), dtype=np.bool_)
            liked = np.empty((n_posts, n_minor), dtype=np.bool_)
            base = _mix_nb(numba.uint64(seed) ^ _mix_nb(numba.uint64(SALT_VIEW)))
            for a in range(n_posts):
                ha = _mix_nb(base ^ numba.uint64(article_ids[a]))
                e = float(evaluations[a])
                for j in range(n_minor):
                    h = _mix_nb(ha ^ numba.uint64(j))
                    v = (h >> numba.uint64(11)) * _INV_2_53 < view_probability
                    viewed[a, j] = v
                    liked[a, j] = v and (e * cat_interests[a, j] >= l_threshold)
            return viewed, liked

        _numba_ready = True
    except ImportError:
        _numba_ready = False


def _grid_wrapper(fn):
    def wrapped(seed, salt, row_keys, col_keys):
        return fn(seed, salt,
                  np.ascontiguousarray(row_keys, dtype=np.int64),
                  np.ascontiguousarray(col_keys, dtype=np.int64))
    return wrapped


def _flat_wrapper(fn):
    def wrapped(seed, salt, keys_a, keys_b):
        return fn(seed, salt,
                  np.ascontiguousarray(keys_a, dtype=np.int64),
                  np.ascontiguousarray(keys_b, dtype=np.int64))
    return wrapped


if _numba_ready:
    IMPLEMENTATION = "numba"
    pair_uniform_grid = _grid_wrapper(_pair_uniform_grid_nb)
    pair_uniform_flat = _flat_wrapper(_pair_uniform_flat_nb)
    _organic_impl = _organic_masks_nb
else:
    IMPLEMENTATION = "numpy"
    pair_uniform_grid = _pair_uniform_grid_np
    pair_uniform_flat = _pair_uniform_flat_np
    _organic_impl = _organic_masks_np


def organic_masks(seed, article_ids, evaluations, cat_interests,
                  l_threshold, view_probability):
    return _organic_impl(
        seed,
        np.ascontiguousarray(article_ids, dtype=np.int64),
        np.ascontiguousarray(evaluations, dtype=np.int64),
        np.ascontiguousarray(cat_interests, dtype=np.float64),
        float(l_threshold),
        float(view_probability),
    )
