from __future__ import annotations

from contextvars import ContextVar
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class ShapeError(ValueError):
    pass


class NonFiniteError(ArithmeticError):
    pass


class Tensor:
    """
    Dense float64 tensor. Operations on tensors are recorded on the active `Tape` (if any) whenever at
    least one input requires grad or was itself produced on that tape
    """

    def __init__(self, values, requires_grad: bool = False, name: str = None):
        self.values = np.array(values, dtype=np.float64)
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return self.values.size

    def item(self) -> float:
        return float(self.values.item())

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self):
        name = f", name={self.name}" if self.name is not None else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{name})"


@dataclass
class _Node:
    output: Tensor
    inputs: tuple[Tensor, ...]
    vjp: Callable[[np.ndarray], Sequence[np.ndarray | None]]
    op: str


_ACTIVE_TAPE: ContextVar[Tape | None] = ContextVar("active_tape", default=None)


class Tape:
    """
    Append-only record of the primitives executed while the tape is active, thus already in topological
    order. Used as a context manager:

        with Tape() as tape:
            loss = model(...)
        grads = tape.backward(loss, params)

    Outside an active tape nothing is recorded (evaluation mode)
    """

    def __init__(self):
        self.nodes: list[_Node] = []
        self._produced: set[int] = set()
        self._token = None

    def __enter__(self) -> Tape:
        self._token = _ACTIVE_TAPE.set(self)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        _ACTIVE_TAPE.reset(self._token)
        self._token = None

    def tracks(self, tensor: Tensor) -> bool:
        return tensor.requires_grad or id(tensor) in self._produced

    def record(self, output: Tensor, inputs: tuple[Tensor, ...], vjp: Callable, op: str):
        self.nodes.append(_Node(output, inputs, vjp, op))
        self._produced.add(id(output))

    def backward(self, loss: Tensor, params: Sequence[Tensor]) -> list[np.ndarray]:
        """
        Gradients of the scalar `loss` w.r.t. each of `params`, in the same order. Parameters which did
        not take part in the computation get a zero gradient
        """

        if loss.size != 1:
            raise ShapeError(f"backward needs a scalar loss, got a tensor of shape {loss.shape}")

        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.values)}

        for node in reversed(self.nodes):
            output_grad = grads.get(id(node.output))
            if output_grad is None:
                continue

            input_grads = node.vjp(output_grad)
            for tensor, grad in zip(node.inputs, input_grads):
                if grad is None or not self.tracks(tensor):
                    continue

                previous = grads.get(id(tensor))
                grads[id(tensor)] = grad if previous is None else previous + grad

        return [grads.get(id(param), np.zeros_like(param.values)).reshape(param.shape).copy() for param in params]


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _result(values: np.ndarray, inputs: tuple[Tensor, ...], vjp: Callable, op: str) -> Tensor:

    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"{op} produced non finite values")

    out = Tensor(values)

    tape = _ACTIVE_TAPE.get()
    if tape is not None and any(tape.tracks(tensor) for tensor in inputs):
        tape.record(out, inputs, vjp, op)

    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)

    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad


def _broadcast_shape(a: Tensor, b: Tensor, op: str) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} are not broadcastable") from None


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a, b, "add")

    def vjp(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _result(a.values + b.values, (a, b), vjp, "add")


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a, b, "sub")

    def vjp(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _result(a.values - b.values, (a, b), vjp, "sub")


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a, b, "mul")

    def vjp(g):
        return _unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)

    return _result(a.values * b.values, (a, b), vjp, "mul")


def matmul(a, b) -> Tensor:
    """
    `a` of shape (..., k) times `b` of shape (k, n) or (k,)
    """

    a, b = _as_tensor(a), _as_tensor(b)

    if a.ndim < 1 or b.ndim not in (1, 2) or a.shape[-1] != b.shape[0]:
        raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} are not aligned")

    k = b.shape[0]

    def vjp(g):
        a_flat = a.values.reshape(-1, k)

        if b.ndim == 2:
            grad_a = g @ b.values.T
            grad_b = a_flat.T @ g.reshape(-1, b.shape[1])
        else:
            grad_a = g[..., None] * b.values
            grad_b = a_flat.T @ g.reshape(-1)

        return grad_a.reshape(a.shape), grad_b

    return _result(a.values @ b.values, (a, b), vjp, "matmul")


def tanh(x) -> Tensor:
    x = _as_tensor(x)
    y = np.tanh(x.values)

    def vjp(g):
        return (g * (1 - y ** 2),)

    return _result(y, (x,), vjp, "tanh")


def sigmoid(x) -> Tensor:
    x = _as_tensor(x)

    # exp of a non-positive number only, never overflows
    z = np.exp(-np.abs(x.values))
    y = np.where(x.values >= 0, 1 / (1 + z), z / (1 + z))

    def vjp(g):
        return (g * y * (1 - y),)

    return _result(y, (x,), vjp, "sigmoid")


def relu(x) -> Tensor:
    x = _as_tensor(x)
    positive = x.values > 0

    def vjp(g):
        return (g * positive,)

    return _result(np.where(positive, x.values, 0.0), (x,), vjp, "relu")


def softmax(x, mask: np.ndarray = None) -> Tensor:
    """
    Softmax over the last axis. Entries where `mask` is 0 get exactly 0 weight, a row with no valid
    entry is all zeros
    """

    x = _as_tensor(x)

    if mask is None:
        valid = np.ones(x.shape, dtype=bool)
    else:
        try:
            valid = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
        except ValueError:
            raise ShapeError(f"softmax: mask of shape {np.shape(mask)} doesn't match input {x.shape}") from None

    masked = np.where(valid, x.values, -np.inf)
    row_max = masked.max(axis=-1, keepdims=True)
    row_max = np.where(np.isfinite(row_max), row_max, 0.0)

    exps = np.exp(np.where(valid, x.values - row_max, -np.inf))
    totals = exps.sum(axis=-1, keepdims=True)
    y = np.divide(exps, totals, out=np.zeros_like(exps), where=totals > 0)

    def vjp(g):
        return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

    return _result(y, (x,), vjp, "softmax")


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    tensors = [_as_tensor(tensor) for tensor in tensors]

    try:
        values = np.concatenate([tensor.values for tensor in tensors], axis=axis)
    except ValueError:
        raise ShapeError(f"concat: shapes {[tensor.shape for tensor in tensors]} can't be concatenated "
                         f"along axis {axis}") from None

    split_points = np.cumsum([tensor.shape[axis] for tensor in tensors])[:-1]

    def vjp(g):
        return np.split(g, split_points, axis=axis)

    return _result(values, tuple(tensors), vjp, "concat")


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [_as_tensor(tensor) for tensor in tensors]

    try:
        values = np.stack([tensor.values for tensor in tensors], axis=axis)
    except ValueError:
        raise ShapeError(f"stack: shapes {[tensor.shape for tensor in tensors]} differ") from None

    def vjp(g):
        return [np.take(g, idx, axis=axis) for idx in range(len(tensors))]

    return _result(values, tuple(tensors), vjp, "stack")


def take(x, index: int, axis: int = 0) -> Tensor:
    x = _as_tensor(x)

    if not -x.shape[axis] <= index < x.shape[axis]:
        raise ShapeError(f"take: index {index} out of range for axis {axis} of shape {x.shape}")

    def vjp(g):
        grad = np.zeros_like(x.values)
        selector = [slice(None)] * x.ndim
        selector[axis] = index
        grad[tuple(selector)] = g
        return (grad,)

    return _result(np.take(x.values, index, axis=axis), (x,), vjp, "take")


def reshape(x, shape: tuple[int, ...]) -> Tensor:
    x = _as_tensor(x)

    try:
        values = x.values.reshape(shape)
    except ValueError:
        raise ShapeError(f"reshape: can't reshape {x.shape} into {shape}") from None

    def vjp(g):
        return (g.reshape(x.shape),)

    return _result(values, (x,), vjp, "reshape")


def sum(x, axis: int | None = None, keepdims: bool = False) -> Tensor:
    x = _as_tensor(x)

    def vjp(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.array(np.broadcast_to(g, x.shape)),)

    return _result(x.values.sum(axis=axis, keepdims=keepdims), (x,), vjp, "sum")


def mean(x, axis: int | None = None, keepdims: bool = False) -> Tensor:
    x = _as_tensor(x)
    count = x.size if axis is None else x.shape[axis]

    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def dropout(x, rate: float, train: bool, rng: np.random.Generator = None) -> Tensor:
    """
    Inverted dropout: at train time retained units are scaled by 1 / (1 - rate), at eval time (or with
    rate 0) the input is returned unchanged
    """

    x = _as_tensor(x)

    if not 0 <= rate < 1:
        raise ValueError(f"Dropout rate should be in [0, 1), got {rate}")

    if not train or rate == 0:
        return x

    if rng is None:
        raise ValueError("Train time dropout needs a random generator")

    scale = (rng.random(x.shape) >= rate) / (1 - rate)

    def vjp(g):
        return (g * scale,)

    return _result(x.values * scale, (x,), vjp, "dropout")


def embedding_lookup(table, indices: np.ndarray) -> Tensor:
    table = _as_tensor(table)
    indices = np.asarray(indices, dtype=np.int64)

    if table.ndim != 2:
        raise ShapeError(f"embedding_lookup: table should be 2-dimensional, got shape {table.shape}")
    if indices.size > 0 and (indices.min() < 0 or indices.max() >= table.shape[0]):
        raise ShapeError(f"embedding_lookup: indices out of range for table of shape {table.shape}")

    def vjp(g):
        grad = np.zeros_like(table.values)
        np.add.at(grad, indices.reshape(-1), g.reshape(-1, table.shape[1]))
        return (grad,)

    return _result(table.values[indices], (table,), vjp, "embedding_lookup")


def max_pool1d(x, mask: np.ndarray, pool_size: int) -> tuple[Tensor, np.ndarray]:
    """
    Non-overlapping max pooling over axis 1 of `x` (batch, positions, features) considering only valid
    positions of `mask` (batch, positions). Returns the pooled tensor and its mask: a window is valid if
    it contains at least one valid position, invalid windows are zeros
    """

    x = _as_tensor(x)
    mask = np.asarray(mask, dtype=bool)

    if x.ndim != 3 or mask.shape != x.shape[:2]:
        raise ShapeError(f"max_pool1d: input {x.shape} and mask {mask.shape} are not compatible")
    if pool_size < 1:
        raise ValueError(f"pool_size should be >= 1, got {pool_size}")

    batch, positions, features = x.shape
    n_windows = -(-positions // pool_size)
    padding = n_windows * pool_size - positions

    padded = np.pad(x.values, ((0, 0), (0, padding), (0, 0)))
    padded_mask = np.pad(mask, ((0, 0), (0, padding)))

    windows = padded.reshape(batch, n_windows, pool_size, features)
    window_mask = padded_mask.reshape(batch, n_windows, pool_size)

    candidates = np.where(window_mask[..., None], windows, -np.inf)
    argmax = candidates.argmax(axis=2)[:, :, None, :]

    out_mask = window_mask.any(axis=2)
    pooled = np.where(out_mask[..., None], np.take_along_axis(windows, argmax, axis=2)[:, :, 0, :], 0.0)

    def vjp(g):
        grad_windows = np.zeros_like(windows)
        np.put_along_axis(grad_windows, argmax, (g * out_mask[..., None])[:, :, None, :], axis=2)
        grad = grad_windows.reshape(batch, n_windows * pool_size, features)[:, :positions, :]
        return (grad,)

    return _result(pooled, (x,), vjp, "max_pool1d"), out_mask


EPS_BCE = 1e-12


def binary_cross_entropy(y_hat, y: np.ndarray) -> Tensor:
    """
    Batch mean of -[y log y_hat + (1 - y) log(1 - y_hat)], with y_hat clamped to [1e-12, 1 - 1e-12]
    """

    y_hat = _as_tensor(y_hat)
    y = np.asarray(y, dtype=np.float64)

    if y.shape != y_hat.shape:
        raise ShapeError(f"binary_cross_entropy: predictions {y_hat.shape} and labels {y.shape} differ")

    clamped = np.clip(y_hat.values, EPS_BCE, 1 - EPS_BCE)
    inside = (y_hat.values >= EPS_BCE) & (y_hat.values <= 1 - EPS_BCE)
    n = max(y.size, 1)

    losses = -(y * np.log(clamped) + (1 - y) * np.log(1 - clamped))

    def vjp(g):
        return (g * inside * (-y / clamped + (1 - y) / (1 - clamped)) / n,)

    return _result(np.array(losses.sum() / n), (y_hat,), vjp, "binary_cross_entropy")
