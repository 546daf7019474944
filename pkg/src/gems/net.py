"""Minimal feedforward network with analytic reverse-mode gradients.

Parameters live in one flat float64 vector (layer weights row-major, then
biases, per layer). Hidden layers use tanh, the output layer is linear.
Serialization is a little-endian float64 blob behind a JSON shape header.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"GEMSNET1"


@dataclass(frozen=True)
class NetShape:
    n_in: int
    hidden: tuple[int, ...]
    n_out: int

    def __post_init__(self):
        if self.n_in < 1 or self.n_out < 1 or any(h < 1 for h in self.hidden):
            raise ValueError("all widths must be >= 1")

    def layer_dims(self):
        widths = [self.n_in, *self.hidden, self.n_out]
        return list(zip(widths[:-1], widths[1:]))

    @property
    def n_params(self) -> int:
        return sum((i + 1) * o for i, o in self.layer_dims())


def _views(shape: NetShape, params: np.ndarray):
    """Per-layer (W, b) views into the flat vector."""
    out = []
    pos = 0
    for n_in, n_out in shape.layer_dims():
        w = params[pos : pos + n_in * n_out].reshape(n_out, n_in)
        pos += n_in * n_out
        b = params[pos : pos + n_out]
        pos += n_out
        out.append((w, b))
    return out


def init_params(shape: NetShape, rng: np.random.Generator) -> np.ndarray:
    """Weights uniform in +-1/sqrt(fan_in), biases zero."""
    params = np.zeros(shape.n_params)
    for w, _ in _views(shape, params):
        bound = 1.0 / np.sqrt(w.shape[1])
        w[:] = rng.uniform(-bound, bound, size=w.shape)
    return params


def forward(shape: NetShape, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (shape.n_in,):
        raise ValueError(f"input has shape {x.shape}, expected ({shape.n_in},)")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    layers = _views(shape, params)
    a = x
    for i, (w, b) in enumerate(layers):
        z = w @ a + b
        a = np.tanh(z) if i < len(layers) - 1 else z
    return a


def vjp(shape: NetShape, params: np.ndarray, x: np.ndarray, upstream: np.ndarray):
    """Gradients of upstream . forward(params, x) w.r.t. params and x."""
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != (shape.n_out,):
        raise ValueError(f"upstream has shape {upstream.shape}, expected ({shape.n_out},)")
    layers = _views(shape, params)
    acts = [np.asarray(x, dtype=np.float64)]
    for i, (w, b) in enumerate(layers):
        z = w @ acts[-1] + b
        acts.append(np.tanh(z) if i < len(layers) - 1 else z)

    grad = np.zeros_like(params)
    gviews = _views(shape, grad)
    g = upstream
    for i in range(len(layers) - 1, -1, -1):
        if i < len(layers) - 1:
            g = g * (1.0 - acts[i + 1] ** 2)
        gw, gb = gviews[i]
        gw += np.outer(g, acts[i])
        gb += g
        g = layers[i][0].T @ g
    return grad, g


def jacobian_frobenius_sq(shape: NetShape, params: np.ndarray, x: np.ndarray) -> float:
    """Squared Frobenius norm of d out / d in, one vjp per output coordinate."""
    total = 0.0
    for o in range(shape.n_out):
        e = np.zeros(shape.n_out)
        e[o] = 1.0
        _, gx = vjp(shape, params, x, e)
        total += float(gx @ gx)
    return total


def jacobian_penalty_grad_sketch(
    shape: NetShape,
    params: np.ndarray,
    x: np.ndarray,
    rng: np.random.Generator,
    n_coords: int = 8,
    h: float = 1e-5,
) -> np.ndarray:
    """Sparse central-FD estimate of d ||J||_F^2 / d params over a coordinate sketch."""
    grad = np.zeros_like(params)
    coords = rng.choice(params.size, size=min(n_coords, params.size), replace=False)
    for c in coords:
        bumped = params.copy()
        bumped[c] += h
        hi = jacobian_frobenius_sq(shape, bumped, x)
        bumped[c] = params[c] - h
        lo = jacobian_frobenius_sq(shape, bumped, x)
        grad[c] = (hi - lo) / (2.0 * h)
    return grad


# -- checkpoint-ready serialization -----------------------------------------


def to_bytes(shape: NetShape, params: np.ndarray) -> bytes:
    header = json.dumps(
        {"n_in": shape.n_in, "hidden": list(shape.hidden), "n_out": shape.n_out, "count": int(params.size)}
    ).encode()
    blob = np.asarray(params, dtype="<f8").tobytes()
    return MAGIC + struct.pack("<I", len(header)) + header + blob


def from_bytes(data: bytes) -> tuple[NetShape, np.ndarray]:
    if data[: len(MAGIC)] != MAGIC:
        raise ValueError("bad magic in serialized parameters")
    (hlen,) = struct.unpack("<I", data[len(MAGIC) : len(MAGIC) + 4])
    start = len(MAGIC) + 4
    header = json.loads(data[start : start + hlen].decode())
    shape = NetShape(header["n_in"], tuple(header["hidden"]), header["n_out"])
    params = np.frombuffer(data[start + hlen :], dtype="<f8", count=header["count"]).astype(np.float64)
    if params.size != shape.n_params:
        raise ValueError("parameter count does not match shape")
    return shape, params
