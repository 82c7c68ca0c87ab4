"""Built-in gradient verification: finite-difference checks of every
primitive's adjoint and of the full pipeline loss on a toy document."""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor, grad_check
from .graphs import ConceptGraph, ConceptNode
from .model import build_params, forward_document
from .translator import RbfPenalty

TOY_FEATURE_DIM = 6
TOY_HIDDEN = 8


def toy_graph(num_nodes: int = 4) -> ConceptGraph:
    nodes = [ConceptNode(f"concept {i}", [3 * i]) for i in range(num_nodes)]
    g = ConceptGraph(nodes=nodes)
    for i in range(num_nodes - 1):
        g.add_edge(i, i + 1, 1.0 + i)
    if num_nodes > 2:
        g.add_edge(0, num_nodes - 1, 2.0)
    return g.validate()


def toy_features(num_nodes: int = 4, dim: int = TOY_FEATURE_DIM,
                 seed: int = 7) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.normal(scale=0.5, size=(num_nodes, dim))


def pipeline_grad_check(variant: str = "neigh", allow_eos: bool = False,
                        epsilon: float = 1e-5, tolerance: float = 1e-4,
                        max_entries_per_param: int = 6):
    """FD-check the full encode -> translate -> predict -> combined loss on a
    4-candidate toy document, with noise-free straight-through selection."""
    graph = toy_graph()
    features = toy_features()
    rng = np.random.default_rng(11)
    params = build_params(rng, TOY_FEATURE_DIM, TOY_HIDDEN, num_classes=3,
                          max_size=4, variant=variant)

    def loss_fn():
        # soft selection keeps the loss smooth so central differences are
        # meaningful; the straight-through contract has its own dual-path test
        loss, _, _, _ = forward_document(
            graph, features, 1, params, variant="var" if allow_eos else variant,
            max_size=4, tau=1.0, mode="train", rng=None, lambda1=0.7,
            lambda2=0.3, rbf=RbfPenalty(), straight_through=False)
        return loss

    return grad_check(loss_fn, params, epsilon=epsilon, tolerance=tolerance,
                      max_entries_per_param=max_entries_per_param,
                      rng=np.random.default_rng(3))


def primitive_grad_checks(epsilon: float = 1e-5, tolerance: float = 1e-4,
                          seed: int = 0):
    """FD-check every primitive's adjoint on randomized shapes."""
    rng = np.random.default_rng(seed)
    reports = {}

    def check(name, builder, *shapes, positive=False):
        params = {}
        for k, shape in enumerate(shapes):
            data = rng.uniform(0.2, 1.5, size=shape) if positive \
                else rng.normal(size=shape)
            params[f"x{k}"] = Tensor(data, requires_grad=True, name=f"x{k}")
        reports[name] = grad_check(lambda: builder(*params.values()), params,
                                   epsilon=epsilon, tolerance=tolerance)

    def scalarize(t):
        return ad.total_sum(ad.mul(t, Tensor(np.arange(1.0, t.data.size + 1)
                                             .reshape(t.shape))))

    n, m, k = 5, 4, 3
    check("matmul", lambda a, b: scalarize(ad.matmul(a, b)), (n, m), (m, k))
    check("transpose", lambda a: scalarize(ad.transpose(a)), (n, m))
    check("add", lambda a, b: scalarize(ad.add(a, b)), (n, m), (n, m))
    check("add_broadcast", lambda a, b: scalarize(ad.add(a, b)), (n, m), (1, m))
    check("scalar_mul", lambda a: scalarize(ad.scalar_mul(a, -1.7)), (n, m))
    check("mul", lambda a, b: scalarize(ad.mul(a, b)), (n, m), (n, m))
    check("minimum", lambda a, b: scalarize(ad.minimum(a, b)), (n, m), (n, m))
    check("concat_cols", lambda a, b: scalarize(ad.concat_cols([a, b])),
          (n, m), (n, k))
    check("concat_rows", lambda a, b: scalarize(ad.concat_rows([a, b])),
          (n, m), (k, m))
    check("slice_cols", lambda a: scalarize(ad.slice_cols(a, 1, 3)), (n, m))
    check("softmax_rows", lambda a: scalarize(ad.softmax_rows(a)), (n, m))
    check("tanh", lambda a: scalarize(ad.tanh(a)), (n, m))
    check("sigmoid", lambda a: scalarize(ad.sigmoid(a)), (n, m))
    check("relu", lambda a: scalarize(ad.relu(ad.add(a, Tensor(
        np.full((n, m), 0.05))))), (n, m))
    check("exp", lambda a: scalarize(ad.exp(a)), (n, m))
    check("log", lambda a: scalarize(ad.log(a)), (n, m), positive=True)
    check("powc", lambda a: scalarize(ad.powc(a, -0.5)), (n, m), positive=True)
    check("mean_rows", lambda a: scalarize(ad.mean_rows(a)), (n, m))
    check("total_sum", lambda a: ad.total_sum(a), (n, m))
    check("masked_fill", lambda a: scalarize(ad.softmax_rows(
        ad.masked_fill(a, np.tile([True, False, False, False], (n, 1))))),
        (n, m))
    check("cross_entropy", lambda a: ad.cross_entropy_with_logits(a, 2), (1, m))
    check("gru_cell", lambda *ps: _gru_scalar(ps), *_gru_shapes())
    return reports


def _gru_shapes():
    i, d = 3, 4
    shapes = [(1, i), (1, d)]
    for _ in ("z", "r", "h"):
        shapes.extend([(i + d, d), (1, d)])
    return shapes


def _gru_scalar(tensors):
    x, h = tensors[0], tensors[1]
    names = []
    params = {}
    for gi, gate in enumerate(("z", "r", "h")):
        params[f"g.W{gate}"] = tensors[2 + 2 * gi]
        params[f"g.b{gate}"] = tensors[3 + 2 * gi]
        names.append(gate)
    out = ad.gru_cell(x, h, params, "g")
    return ad.total_sum(ad.mul(out, Tensor(np.arange(1.0, out.data.size + 1)
                                           .reshape(out.shape))))
