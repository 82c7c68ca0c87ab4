"""Minimal dense reverse-mode autodiff on 2-D float64 numpy arrays.

A Tape records primitive applications in execution order; backward() replays
the adjoints in reverse.  Ops executed with no active tape run in inference
mode and record nothing.  All tensors are (rows, cols) matrices; scalars are
1x1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

NEG_INF = -1e30  # additive mask value; finite so NaN checks stay meaningful


class NumericFault(FloatingPointError):
    """A primitive produced NaN/Inf, or a gradient went non-finite."""


class ContractError(ValueError):
    """Shape or argument contract violated."""


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "name")

    def __init__(self, data, requires_grad=False, name=""):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ContractError(f"tensors are 2-D, got shape {arr.shape}")
        self.data = arr
        self.requires_grad = requires_grad
        self.grad = np.zeros_like(arr) if requires_grad else None
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    def item(self):
        if self.data.size != 1:
            raise ContractError(f"item() on non-scalar shape {self.data.shape}")
        return float(self.data[0, 0])

    def zero_grad(self):
        if self.grad is not None:
            self.grad[...] = 0.0

    def __repr__(self):
        return f"Tensor{self.data.shape}{' grad' if self.requires_grad else ''}"


@dataclass
class TapeNode:
    output: Tensor
    parents: tuple
    backward_fn: object  # callable(out_grad) -> tuple of parent grads (or None)


class Tape:
    """Ordered record of primitive applications for one forward/backward pass."""

    _active = None

    def __init__(self):
        self.nodes: list[TapeNode] = []
        self._produced: set[int] = set()
        self._prev = None

    def __enter__(self):
        self._prev = Tape._active
        Tape._active = self
        return self

    def __exit__(self, *exc):
        Tape._active = self._prev
        return False

    @classmethod
    def active(cls):
        return cls._active


def _record(out, parents, backward_fn):
    if not np.all(np.isfinite(out.data)):
        raise NumericFault("non-finite value produced in forward pass")
    tape = Tape.active()
    if tape is not None and any(p.requires_grad or id(p) in tape._produced
                                for p in parents):
        tape.nodes.append(TapeNode(out, tuple(parents), backward_fn))
        tape._produced.add(id(out))
    return out


def backward(output: Tensor):
    """Populate .grad of every requires_grad leaf reachable from output.

    Repeated calls without zero_grad accumulate.  Output must be scalar.
    """
    if output.data.size != 1:
        raise ContractError("backward() needs a scalar output")
    tape = Tape.active()
    if tape is None:
        raise ContractError("backward() outside an active Tape")
    grads: dict[int, np.ndarray] = {id(output): np.ones((1, 1))}
    seen = False
    for node in reversed(tape.nodes):
        if node.output is output:
            seen = True
        g = grads.pop(id(node.output), None)
        if g is None:
            continue
        parent_grads = node.backward_fn(g)
        for p, pg in zip(node.parents, parent_grads):
            if pg is None:
                continue
            if not np.all(np.isfinite(pg)):
                raise NumericFault(f"non-finite gradient for {p.name or 'tensor'}")
            if p.requires_grad:
                p.grad += pg
            acc = grads.get(id(p))
            grads[id(p)] = pg if acc is None else acc + pg
    if not seen:
        raise ContractError("output tensor not found on the active tape")


# ---------------------------------------------------------------------------
# primitives


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape[1] != b.shape[0]:
        raise ContractError(f"matmul {a.shape} @ {b.shape}")
    out = Tensor(a.data @ b.data)
    ad, bd = a.data, b.data
    return _record(out, (a, b), lambda g: (g @ bd.T, ad.T @ g))


def transpose(a: Tensor) -> Tensor:
    out = Tensor(a.data.T)
    return _record(out, (a,), lambda g: (g.T,))


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise add; a 1-row operand broadcasts over the other's rows."""
    out = Tensor(a.data + b.data)

    def bwd(g):
        ga = g.sum(axis=0, keepdims=True) if a.shape[0] == 1 and g.shape[0] > 1 else g
        gb = g.sum(axis=0, keepdims=True) if b.shape[0] == 1 and g.shape[0] > 1 else g
        return ga, gb

    return _record(out, (a, b), bwd)


def scalar_mul(a: Tensor, c: float) -> Tensor:
    out = Tensor(a.data * c)
    return _record(out, (a,), lambda g: (g * c,))


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ContractError(f"elementwise mul {a.shape} vs {b.shape}")
    out = Tensor(a.data * b.data)
    ad, bd = a.data, b.data
    return _record(out, (a, b), lambda g: (g * bd, g * ad))


def minimum(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise min; subgradient routes to the smaller operand, ties to a."""
    if a.shape != b.shape:
        raise ContractError(f"elementwise min {a.shape} vs {b.shape}")
    take_a = a.data <= b.data
    out = Tensor(np.where(take_a, a.data, b.data))
    return _record(out, (a, b), lambda g: (g * take_a, g * ~take_a))


def concat_cols(tensors) -> Tensor:
    tensors = list(tensors)
    out = Tensor(np.concatenate([t.data for t in tensors], axis=1))
    widths = [t.shape[1] for t in tensors]

    def bwd(g):
        pieces, at = [], 0
        for w in widths:
            pieces.append(g[:, at:at + w])
            at += w
        return tuple(pieces)

    return _record(out, tuple(tensors), bwd)


def concat_rows(tensors) -> Tensor:
    tensors = list(tensors)
    out = Tensor(np.concatenate([t.data for t in tensors], axis=0))
    heights = [t.shape[0] for t in tensors]

    def bwd(g):
        pieces, at = [], 0
        for h in heights:
            pieces.append(g[at:at + h, :])
            at += h
        return tuple(pieces)

    return _record(out, tuple(tensors), bwd)


def slice_cols(a: Tensor, start: int, end: int) -> Tensor:
    out = Tensor(a.data[:, start:end])
    shape = a.shape

    def bwd(g):
        full = np.zeros(shape)
        full[:, start:end] = g
        return (full,)

    return _record(out, (a,), bwd)


def softmax_rows(a: Tensor) -> Tensor:
    shifted = a.data - a.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=1, keepdims=True)
    out = Tensor(s)

    def bwd(g):
        dot = (g * s).sum(axis=1, keepdims=True)
        return (s * (g - dot),)

    return _record(out, (a,), bwd)


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.data)
    out = Tensor(t)
    return _record(out, (a,), lambda g: (g * (1.0 - t * t),))


def sigmoid(a: Tensor) -> Tensor:
    s = np.where(a.data >= 0, 1.0 / (1.0 + np.exp(-np.clip(a.data, -500, 500))),
                 np.exp(np.clip(a.data, -500, 500)) / (1.0 + np.exp(np.clip(a.data, -500, 500))))
    out = Tensor(s)
    return _record(out, (a,), lambda g: (g * s * (1.0 - s),))


def relu(a: Tensor) -> Tensor:
    pos = a.data > 0
    out = Tensor(a.data * pos)
    return _record(out, (a,), lambda g: (g * pos,))


def exp(a: Tensor) -> Tensor:
    e = np.exp(a.data)
    out = Tensor(e)
    return _record(out, (a,), lambda g: (g * e,))


def log(a: Tensor) -> Tensor:
    if np.any(a.data <= 0):
        raise NumericFault("log of non-positive entry")
    out = Tensor(np.log(a.data))
    ad = a.data
    return _record(out, (a,), lambda g: (g / ad,))


def powc(a: Tensor, p: float) -> Tensor:
    out = Tensor(np.power(a.data, p))
    ad = a.data
    return _record(out, (a,), lambda g: (g * p * np.power(ad, p - 1.0),))


def mean_rows(a: Tensor) -> Tensor:
    """Column-wise mean: (n, d) -> (1, d)."""
    n = a.shape[0]
    out = Tensor(a.data.mean(axis=0, keepdims=True))
    return _record(out, (a,), lambda g: (np.repeat(g, n, axis=0) / n,))


def total_sum(a: Tensor) -> Tensor:
    out = Tensor([[a.data.sum()]])
    shape = a.shape
    return _record(out, (a,), lambda g: (np.full(shape, g[0, 0]),))


def masked_fill(a: Tensor, mask: np.ndarray) -> Tensor:
    """Additive large-negative fill where mask is True (pre-softmax masking)."""
    if mask.shape != a.shape:
        raise ContractError("mask shape mismatch")
    out = Tensor(np.where(mask, NEG_INF, a.data))
    keep = ~mask
    return _record(out, (a,), lambda g: (g * keep,))


def cross_entropy_with_logits(logits: Tensor, label: int) -> Tensor:
    if not 0 <= label < logits.shape[1] or logits.shape[0] != 1:
        raise ContractError("label out of range or logits not a row")
    z = logits.data[0]
    m = z.max()
    lse = m + math.log(np.exp(z - m).sum())
    out = Tensor([[lse - z[label]]])
    p = np.exp(z - lse)

    def bwd(g):
        grad = p.copy()
        grad[label] -= 1.0
        return (g[0, 0] * grad.reshape(1, -1),)

    return _record(out, (logits,), bwd)


def straight_through_hard(soft: Tensor) -> Tensor:
    """One-hot argmax forward, identity gradient backward (1-row input)."""
    if soft.shape[0] != 1:
        raise ContractError("straight-through expects a row vector")
    hard = np.zeros_like(soft.data)
    hard[0, int(np.argmax(soft.data[0]))] = 1.0
    out = Tensor(hard)
    return _record(out, (soft,), lambda g: (g,))


def gumbel_softmax_soft(logits: Tensor, tau: float, rng=None) -> Tensor:
    """Soft Gumbel-Softmax sample: softmax((logits + g) / tau).

    rng=None means noise-free (g = 0).  Noise g = -log(-log(u)) with u
    clamped to [1e-12, 1 - 1e-12] for numeric safety.
    """
    if tau <= 0:
        raise ContractError("tau must be positive")
    if logits.shape[0] != 1:
        raise ContractError("logits must be a row vector")
    if rng is None:
        noise = np.zeros(logits.shape)
    else:
        u = np.clip(rng.random(logits.shape), 1e-12, 1.0 - 1e-12)
        noise = -np.log(-np.log(u))
    noisy = add(logits, Tensor(noise))
    return softmax_rows(scalar_mul(noisy, 1.0 / tau))


def gumbel_softmax_hard(logits: Tensor, tau: float, rng=None) -> Tensor:
    """Hard Gumbel-Softmax sample over a row of logits.

    Forward value is exactly one-hot; backward follows the soft sample
    (straight-through).  rng=None means noise-free: plain argmax of logits.
    """
    return straight_through_hard(gumbel_softmax_soft(logits, tau, rng))


# ---------------------------------------------------------------------------
# parameters, GRU, Adam, gradient check


def parameter(rng, rows, cols, name="", scale=None):
    """Uniform(-s, s) init with s = 1/sqrt(fan_in) unless given."""
    s = scale if scale is not None else 1.0 / math.sqrt(max(rows, 1))
    return Tensor(rng.uniform(-s, s, size=(rows, cols)), requires_grad=True, name=name)


def zeros_param(rows, cols, name=""):
    return Tensor(np.zeros((rows, cols)), requires_grad=True, name=name)


def make_gru_params(rng, input_dim, state_dim, prefix):
    p = {}
    for gate in ("z", "r", "h"):
        p[f"{prefix}.W{gate}"] = parameter(rng, input_dim + state_dim, state_dim,
                                           name=f"{prefix}.W{gate}")
        p[f"{prefix}.b{gate}"] = zeros_param(1, state_dim, name=f"{prefix}.b{gate}")
    return p


def gru_cell(x: Tensor, h: Tensor, params: dict, prefix: str) -> Tensor:
    """z = sig(Wz[x,h]+bz); r = sig(Wr[x,h]+br); htil = tanh(Wh[x, r*h]+bh);
    h' = (1-z)*h + z*htil."""
    if x.shape[0] != 1 or h.shape[0] != 1:
        raise ContractError("gru_cell operates on row vectors")
    xh = concat_cols([x, h])
    if xh.shape[1] != params[f"{prefix}.Wz"].shape[0]:
        raise ContractError("gru_cell weight width mismatch")
    z = sigmoid(add(matmul(xh, params[f"{prefix}.Wz"]), params[f"{prefix}.bz"]))
    r = sigmoid(add(matmul(xh, params[f"{prefix}.Wr"]), params[f"{prefix}.br"]))
    xrh = concat_cols([x, mul(r, h)])
    htil = tanh(add(matmul(xrh, params[f"{prefix}.Wh"]), params[f"{prefix}.bh"]))
    one_minus_z = add(scalar_mul(z, -1.0), Tensor(np.ones(z.shape)))
    return add(mul(one_minus_z, h), mul(z, htil))


@dataclass
class AdamState:
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(params: dict, state: AdamState):
    """One Adam update over a name->Tensor dict, consuming .grad in place."""
    state.step += 1
    t = state.step
    for name, p in params.items():
        g = p.grad
        if g is None:
            continue
        if not np.all(np.isfinite(g)):
            raise NumericFault(f"NaN/Inf gradient on parameter {name}")
        if name not in state.m:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        state.m[name] = state.beta1 * state.m[name] + (1 - state.beta1) * g
        state.v[name] = state.beta2 * state.v[name] + (1 - state.beta2) * g * g
        mhat = state.m[name] / (1 - state.beta1 ** t)
        vhat = state.v[name] / (1 - state.beta2 ** t)
        p.data -= state.lr * mhat / (np.sqrt(vhat) + state.eps)


def clip_gradients(params: dict, max_norm: float):
    total = math.sqrt(sum(float((p.grad ** 2).sum()) for p in params.values()
                          if p.grad is not None))
    if total > max_norm and total > 0:
        scale = max_norm / total
        for p in params.values():
            if p.grad is not None:
                p.grad *= scale


@dataclass
class GradCheckEntry:
    name: str
    max_rel_err: float
    ok: bool


@dataclass
class GradCheckReport:
    entries: list
    tolerance: float

    @property
    def ok(self):
        return all(e.ok for e in self.entries)

    @property
    def max_rel_err(self):
        return max((e.max_rel_err for e in self.entries), default=0.0)


def grad_check(loss_fn, params: dict, epsilon: float = 1e-5,
               tolerance: float = 1e-4, max_entries_per_param: int = None,
               rng=None) -> GradCheckReport:
    """Central finite differences vs analytic grads for every parameter entry.

    loss_fn takes no arguments, runs a forward pass with the current parameter
    values, and returns the scalar loss as a float (it is called both inside
    and outside a Tape, so it must build its own graph from `params`).
    """
    for p in params.values():
        p.zero_grad()
    with Tape():
        loss = loss_fn()
        backward(loss)
    analytic = {k: p.grad.copy() for k, p in params.items()}

    entries = []
    for name, p in params.items():
        idxs = list(np.ndindex(p.data.shape))
        if max_entries_per_param is not None and len(idxs) > max_entries_per_param:
            picker = rng if rng is not None else np.random.default_rng(0)
            chosen = picker.choice(len(idxs), size=max_entries_per_param, replace=False)
            idxs = [idxs[i] for i in chosen]
        worst = 0.0
        for idx in idxs:
            orig = p.data[idx]
            p.data[idx] = orig + epsilon
            f_plus = loss_fn().item()
            p.data[idx] = orig - epsilon
            f_minus = loss_fn().item()
            p.data[idx] = orig
            fd = (f_plus - f_minus) / (2 * epsilon)
            an = analytic[name][idx]
            # the floor keeps FD round-off noise (~1e-11) from dominating the
            # ratio when the true gradient is itself near zero
            denom = max(abs(fd), abs(an), 1e-5)
            worst = max(worst, abs(fd - an) / denom)
        entries.append(GradCheckEntry(name, worst, worst < tolerance))
    return GradCheckReport(entries, tolerance)


# ---------------------------------------------------------------------------
# checkpoint io


def save_params(params: dict, path):
    manifest = {name: {"shape": list(p.data.shape),
                       "values": p.data.ravel().tolist()}
                for name, p in params.items()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh)


def load_params(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    params = {}
    for name, entry in manifest.items():
        arr = np.asarray(entry["values"], dtype=np.float64).reshape(entry["shape"])
        params[name] = Tensor(arr, requires_grad=True, name=name)
    return params
