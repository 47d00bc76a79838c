"""Dense float64 tensors with reverse-mode differentiation.

Every op returns a new Tensor that remembers its parents and a gradient
function mapping the output gradient to one gradient per parent. A Tensor is
therefore also the computation node of the graph it belongs to.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from typing import TYPE_CHECKING

import numpy as np

from app.errors import ContractError, DimensionError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    Array = NDArray[np.float64]
    GradFn = Callable[[Array], Sequence[Array | None]]


class Tensor:
    """A float64 array plus the bookkeeping needed for backprop."""

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        parents: tuple[Tensor, ...] = (),
        op: str = "const",
        grad_fn: GradFn | None = None,
        name: str | None = None,
    ) -> None:
        """Initialize a tensor.

        Args:
            data: Values; copied into a float64 array.
            requires_grad: Whether gradients should flow into this tensor.
            parents: Input nodes this tensor was computed from.
            op: Operation identifier, for diagnostics.
            grad_fn: Maps the output gradient to one gradient per parent.
            name: Optional parameter name.
        """
        self.data: Array = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.parents = parents
        self.op = op
        self.name = name
        self.grad: Array | None = None
        self._grad_fn = grad_fn

    @classmethod
    def parameter(cls, data: ArrayLike, name: str | None = None) -> Tensor:
        """Create a trainable leaf tensor."""
        return cls(data, requires_grad=True, op="param", name=name)

    @property
    def value(self) -> Array:
        """The node's value (alias of ``data``)."""
        return self.data

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def is_leaf(self) -> bool:
        return not self.parents

    def item(self) -> float:
        """Return the value of a single-element tensor as a float."""
        if self.data.size != 1:
            raise ContractError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> Array:
        """Return a copy of the underlying array."""
        return self.data.copy()

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, op={self.op!r}{label})"

    # arithmetic

    def __add__(self, other: Tensor | float) -> Tensor:
        return add(self, other)

    def __radd__(self, other: float) -> Tensor:
        return add(other, self)

    def __sub__(self, other: Tensor | float) -> Tensor:
        return sub(self, other)

    def __rsub__(self, other: float) -> Tensor:
        return sub(other, self)

    def __mul__(self, other: Tensor | float) -> Tensor:
        return mul(self, other)

    def __rmul__(self, other: float) -> Tensor:
        return mul(other, self)

    def __neg__(self) -> Tensor:
        return mul(self, -1.0)

    def __matmul__(self, other: Tensor) -> Tensor:
        return matmul(self, other)

    def sum(self, axis: int | tuple[int, ...] | None = None) -> Tensor:
        return tensor_sum(self, axis)

    def mean(self) -> Tensor:
        return tensor_mean(self)

    def reshape(self, *shape: int) -> Tensor:
        return reshape(self, shape)

    def transpose(self, *axes: int) -> Tensor:
        return transpose(self, axes or None)


def as_tensor(value: Tensor | ArrayLike) -> Tensor:
    """Wrap a constant in a Tensor; tensors pass through."""
    return value if isinstance(value, Tensor) else Tensor(value)


def make_node(data: Array, parents: Sequence[Tensor], op: str, grad_fn: GradFn) -> Tensor:
    """Create the output node of an op.

    The gradient function is only kept when some parent needs gradients.
    """
    needs_grad = any(p.requires_grad for p in parents)
    return Tensor(
        data,
        requires_grad=needs_grad,
        parents=tuple(parents),
        op=op,
        grad_fn=grad_fn if needs_grad else None,
    )


def unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a: Tensor | float, b: Tensor | float) -> Tensor:
    ta, tb = as_tensor(a), as_tensor(b)

    def grad_fn(g: Array) -> tuple[Array, Array]:
        return unbroadcast(g, ta.shape), unbroadcast(g, tb.shape)

    return make_node(ta.data + tb.data, (ta, tb), "add", grad_fn)


def sub(a: Tensor | float, b: Tensor | float) -> Tensor:
    ta, tb = as_tensor(a), as_tensor(b)

    def grad_fn(g: Array) -> tuple[Array, Array]:
        return unbroadcast(g, ta.shape), unbroadcast(-g, tb.shape)

    return make_node(ta.data - tb.data, (ta, tb), "sub", grad_fn)


def mul(a: Tensor | float, b: Tensor | float) -> Tensor:
    ta, tb = as_tensor(a), as_tensor(b)

    def grad_fn(g: Array) -> tuple[Array, Array]:
        return unbroadcast(g * tb.data, ta.shape), unbroadcast(g * ta.data, tb.shape)

    return make_node(ta.data * tb.data, (ta, tb), "mul", grad_fn)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of two 2-D tensors."""
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul needs 2-D operands, got {a.shape} and {b.shape}", "rank")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"matmul inner sizes differ: {a.shape[1]} vs {b.shape[0]}", "inner"
        )

    def grad_fn(g: Array) -> tuple[Array, Array]:
        return g @ b.data.T, a.data.T @ g

    return make_node(a.data @ b.data, (a, b), "matmul", grad_fn)


def tensor_sum(a: Tensor, axis: int | tuple[int, ...] | None = None) -> Tensor:
    def grad_fn(g: Array) -> tuple[Array]:
        if axis is None:
            return (np.broadcast_to(g, a.shape).copy(),)
        return (np.broadcast_to(np.expand_dims(g, axis), a.shape).copy(),)

    return make_node(np.asarray(a.data.sum(axis=axis)), (a,), "sum", grad_fn)


def tensor_mean(a: Tensor) -> Tensor:
    n = a.data.size

    def grad_fn(g: Array) -> tuple[Array]:
        return (np.full(a.shape, float(g) / n),)

    return make_node(np.asarray(a.data.mean()), (a,), "mean", grad_fn)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    def grad_fn(g: Array) -> tuple[Array]:
        return (g.reshape(a.shape),)

    return make_node(a.data.reshape(tuple(shape)), (a,), "reshape", grad_fn)


def transpose(a: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    perm = tuple(axes) if axes is not None else tuple(reversed(range(a.ndim)))
    inverse = tuple(np.argsort(perm))

    def grad_fn(g: Array) -> tuple[Array]:
        return (g.transpose(inverse),)

    return make_node(a.data.transpose(perm), (a,), "transpose", grad_fn)


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)

    def grad_fn(g: Array) -> tuple[Array]:
        return (g * out,)

    return make_node(out, (a,), "exp", grad_fn)


def log(a: Tensor) -> Tensor:
    def grad_fn(g: Array) -> tuple[Array]:
        return (g / a.data,)

    return make_node(np.log(a.data), (a,), "log", grad_fn)


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)

    def grad_fn(g: Array) -> tuple[Array]:
        return (g * (1.0 - out * out),)

    return make_node(out, (a,), "tanh", grad_fn)


def topological_order(root: Tensor) -> list[Tensor]:
    """Return the nodes reachable from ``root``, parents before children."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backprop(loss: Tensor, params: Iterable[Tensor] | None = None) -> dict[Tensor, Array]:
    """Run reverse-mode differentiation from a scalar loss.

    Args:
        loss: Scalar output node.
        params: Parameters to report; defaults to every trainable leaf in the graph.
            Parameters the loss does not depend on get a zero gradient.

    Returns:
        Mapping from parameter tensor to d(loss)/d(parameter).

    Raises:
        ContractError: If the loss is not a scalar.
    """
    if loss.data.size != 1:
        raise ContractError(f"backprop needs a scalar loss, got shape {loss.shape}")

    order = topological_order(loss)
    for node in order:
        node.grad = None
    loss.grad = np.ones_like(loss.data)

    for node in reversed(order):
        if node._grad_fn is None or node.grad is None:
            continue
        parent_grads = node._grad_fn(node.grad)
        for parent, grad in zip(node.parents, parent_grads, strict=True):
            if grad is None or not parent.requires_grad:
                continue
            parent.grad = grad.copy() if parent.grad is None else parent.grad + grad

    # keep leaf and loss gradients, release the rest
    for node in order:
        if node is not loss and not node.is_leaf:
            node.grad = None

    if params is None:
        params = [n for n in order if n.is_leaf and n.requires_grad]

    result: dict[Tensor, Array] = {}
    for p in params:
        if p.grad is None:
            p.grad = np.zeros_like(p.data)
        result[p] = p.grad
    return result


def numeric_gradient(
    fn: Callable[[], Tensor],
    param: Tensor,
    h: float = 1e-5,
    indices: Sequence[tuple[int, ...]] | None = None,
) -> dict[tuple[int, ...], float]:
    """Central finite differences of a scalar function w.r.t. selected entries.

    Args:
        fn: Rebuilds the scalar output from the current parameter values.
        param: Tensor whose entries are perturbed in place.
        h: Step size.
        indices: Entries to perturb; all entries when omitted.

    Returns:
        Mapping from entry index to the estimated partial derivative.
    """
    selected = indices if indices is not None else list(np.ndindex(*param.shape))
    estimates: dict[tuple[int, ...], float] = {}
    for idx in selected:
        original = float(param.data[idx])
        param.data[idx] = original + h
        plus = fn().item()
        param.data[idx] = original - h
        minus = fn().item()
        param.data[idx] = original
        estimates[tuple(idx)] = (plus - minus) / (2.0 * h)
    return estimates


def relative_error(analytic: float, numeric: float, floor: float = 1e-6) -> float:
    """Symmetric relative error with an absolute floor for near-zero gradients."""
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def gradient_check(fn: Callable[[], Tensor], inputs: Sequence[Tensor], h: float = 1e-5) -> float:
    """Worst relative error between backprop and central differences.

    Every entry of every input is perturbed, so keep the inputs small.
    """
    analytic = backprop(fn(), inputs)
    grads = {id(p): analytic[p].copy() for p in inputs}
    worst = 0.0
    for p in inputs:
        for idx, estimate in numeric_gradient(fn, p, h).items():
            worst = max(worst, relative_error(float(grads[id(p)][idx]), estimate))
    return worst


__all__ = [
    "Tensor",
    "add",
    "as_tensor",
    "backprop",
    "exp",
    "gradient_check",
    "log",
    "make_node",
    "matmul",
    "mul",
    "numeric_gradient",
    "relative_error",
    "reshape",
    "sub",
    "tanh",
    "tensor_mean",
    "tensor_sum",
    "topological_order",
    "transpose",
    "unbroadcast",
]
