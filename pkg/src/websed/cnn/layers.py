"""Forward/backward primitives for the CNN, all on [B, H, W, C] tensors.

Convolutions are valid (no padding). Pooling windows may overlap, so the
backward pass scatter-adds into the input gradient.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv2d_forward(x, w, b, stride=(1, 1)):
    kh, kw, cin, f = w.shape
    sh, sw = stride
    windows = sliding_window_view(x, (kh, kw), axis=(1, 2))[:, ::sh, ::sw]
    # windows: [B, Ho, Wo, C, kh, kw] -> columns ordered (kh, kw, C)
    batch, ho, wo = windows.shape[:3]
    cols = windows.transpose(0, 1, 2, 4, 5, 3).reshape(batch * ho * wo, kh * kw * cin)
    y = (cols @ w.reshape(-1, f) + b).reshape(batch, ho, wo, f)
    cache = (x.shape, w, cols, stride)
    return y, cache


def conv2d_backward(dy, cache):
    x_shape, w, cols, (sh, sw) = cache
    kh, kw, cin, f = w.shape
    batch, ho, wo = dy.shape[:3]
    dy_flat = dy.reshape(batch * ho * wo, f)
    dw = (cols.T @ dy_flat).reshape(w.shape)
    db = dy_flat.sum(axis=0)
    dcols = (dy_flat @ w.reshape(-1, f).T).reshape(batch, ho, wo, kh, kw, cin)
    dx = np.zeros(x_shape, dtype=dy.dtype)
    for i in range(kh):
        for j in range(kw):
            dx[:, i:i + sh * ho:sh, j:j + sw * wo:sw, :] += dcols[:, :, :, i, j, :]
    return dx, dw, db


def maxpool_forward(x, shape, stride):
    ph, pw = shape
    sh, sw = stride
    windows = sliding_window_view(x, (ph, pw), axis=(1, 2))[:, ::sh, ::sw]
    batch, ho, wo, c = windows.shape[:4]
    flat = windows.reshape(batch, ho, wo, c, ph * pw)
    arg = flat.argmax(axis=-1)
    y = np.take_along_axis(flat, arg[..., None], axis=-1)[..., 0]
    cache = (x.shape, arg, shape, stride)
    return y, cache


def maxpool_backward(dy, cache):
    x_shape, arg, (ph, pw), (sh, sw) = cache
    batch, ho, wo, c = arg.shape
    rows = (np.arange(ho) * sh)[None, :, None, None] + arg // pw
    cols = (np.arange(wo) * sw)[None, None, :, None] + arg % pw
    b_idx = np.arange(batch)[:, None, None, None]
    c_idx = np.arange(c)[None, None, None, :]
    dx = np.zeros(x_shape, dtype=dy.dtype)
    np.add.at(dx, (b_idx, rows, cols, c_idx), dy)
    return dx


def relu_forward(x):
    mask = x > 0
    return x * mask, mask


def relu_backward(dy, mask):
    return dy * mask


def dense_forward(x, w, b):
    return x @ w + b, x


def dense_backward(dy, x, w):
    return dy @ w.T, x.T @ dy, dy.sum(axis=0)


def dropout_forward(x, p, rng):
    """Inverted dropout: kept units scaled by 1/(1-p) so inference needs nothing."""
    mask = (rng.random(x.shape) >= p) / (1.0 - p)
    mask = mask.astype(x.dtype)
    return x * mask, mask


def dropout_backward(dy, mask):
    return dy * mask


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits, one_hot):
    """Mean cross-entropy over the batch; gradient wrt logits included."""
    z = logits - logits.max(axis=1, keepdims=True)
    log_probs = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    batch = logits.shape[0]
    loss = -(one_hot * log_probs).sum() / batch
    probs = np.exp(log_probs)
    dlogits = (probs - one_hot) / batch
    return loss, probs, dlogits
