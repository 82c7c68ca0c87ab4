"""Graph translator: pointer-attention node selection over the pseudo node
sequence (EOS at slot 0) with straight-through Gumbel sampling, plus per-step
adjacency vectors from the neigh (MLP) or path (edge-GRU) generator, and the
coverage / length-penalty losses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import ContractError, Tensor
from .encoder import EncodedGraph
from .errors import DataError
from .graphs import ConceptGraph


@dataclass
class RbfPenalty:
    sigma: float = 4.0
    t_prime: float = 0.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ContractError("sigma must be positive")

    def __call__(self, t: float) -> float:
        return math.exp(-((t - self.t_prime) ** 2) / (2.0 * self.sigma ** 2))


@dataclass
class TranslateConfig:
    max_size: int = 10
    tau: float = 1.0
    mode: str = "eval"            # train | eval
    variant: str = "neigh"        # neigh | path
    allow_eos: bool = True
    rng: object = None            # np.random.Generator for Gumbel noise
    rbf: RbfPenalty = field(default_factory=RbfPenalty)
    # soft selection keeps the forward pass smooth for finite-difference
    # verification; training uses the hard straight-through sample
    straight_through: bool = True


@dataclass
class TranslatedGraph:
    node_indices: list             # indices into the source graph's node list
    thetas: list                   # thetas[t]: np array of length t
    selected_embeddings: Tensor    # (k, hidden), gradient-carrying
    soft_adjacency: Tensor         # (k, k) symmetric, zero diagonal
    eos_step: int = -1             # step at which EOS fired, -1 if never
    forced_selection: bool = False

    @property
    def size(self):
        return len(self.node_indices)


def make_translator_params(rng, hidden: int, max_size: int,
                           variant: str = "neigh") -> dict:
    params = {}
    params.update(ad.make_gru_params(rng, hidden + max_size - 1, hidden, "dec"))
    params["ptr.W1"] = ad.parameter(rng, hidden, hidden, name="ptr.W1")
    params["ptr.W2"] = ad.parameter(rng, hidden, hidden, name="ptr.W2")
    params["ptr.v"] = ad.parameter(rng, hidden, 1, name="ptr.v")
    params["eos"] = ad.parameter(rng, 1, hidden, name="eos")
    if variant == "neigh":
        params["out.Wa"] = ad.parameter(rng, hidden, hidden, name="out.Wa")
        params["out.ba"] = ad.zeros_param(1, hidden, name="out.ba")
        params["out.Wb"] = ad.parameter(rng, hidden, max_size - 1, name="out.Wb")
        params["out.bb"] = ad.zeros_param(1, max_size - 1, name="out.bb")
    elif variant == "path":
        params.update(ad.make_gru_params(rng, 1, hidden, "edge"))
        params["out.Whead"] = ad.parameter(rng, hidden, 1, name="out.Whead")
        params["out.bhead"] = ad.zeros_param(1, 1, name="out.bhead")
    else:
        raise ContractError(f"unknown variant {variant!r}")
    return params


def order_pseudo_sequence(graph: ConceptGraph) -> list:
    """Candidate order: ascending first mention position, stable by node
    index.  EOS occupies slot 0 of the augmented sequence, so slot k here maps
    to augmented slot k + 1."""
    if not graph.nodes:
        raise DataError("cannot order an empty graph")
    return sorted(range(len(graph.nodes)),
                  key=lambda i: (graph.nodes[i].first_position, i))


def _pointer_logits(q_aug: Tensor, h: Tensor, params: dict,
                    mask: np.ndarray, w1q: Tensor = None) -> Tensor:
    if w1q is None:
        w1q = ad.matmul(q_aug, params["ptr.W1"])
    scores = ad.matmul(ad.tanh(ad.add(w1q, ad.matmul(h, params["ptr.W2"]))),
                       params["ptr.v"])
    return ad.masked_fill(ad.transpose(scores), mask.reshape(1, -1))


def pointer_step(q_aug: Tensor, h: Tensor, params: dict,
                 mask: np.ndarray) -> Tensor:
    """Attention over candidates: softmax of v^T tanh(W1 Q_i + W2 h) with
    masked slots driven to zero probability.  Returns a (1, m+1) row."""
    return ad.softmax_rows(_pointer_logits(q_aug, h, params, mask))


def coverage_loss(attention_history: list) -> Tensor:
    """Sum over steps of sum_i min(p_t_i, c_t_i) with c_0 = 0."""
    if not attention_history:
        raise ContractError("empty attention history")
    width = attention_history[0].shape[1]
    c = Tensor(np.zeros((1, width)))
    total = Tensor([[0.0]])
    for p in attention_history:
        total = ad.add(total, ad.total_sum(ad.minimum(p, c)))
        c = ad.add(c, p)
    return total


def adjacency_neigh(h: Tensor, t: int, params: dict) -> Tensor:
    """Two-layer MLP emitting sigmoid link strengths; first t entries used."""
    if t < 1:
        raise ContractError("adjacency vectors start at step 1")
    hid = ad.tanh(ad.add(ad.matmul(h, params["out.Wa"]), params["out.ba"]))
    full = ad.sigmoid(ad.add(ad.matmul(hid, params["out.Wb"]), params["out.bb"]))
    if t > full.shape[1]:
        raise ContractError(f"step {t} exceeds max links {full.shape[1]}")
    return ad.slice_cols(full, 0, t)


def adjacency_path(h: Tensor, t: int, params: dict) -> Tensor:
    """Edge GRU initialized from the decoder state, rolled t steps with a
    sigmoid head, feeding each output back in as the next input."""
    if t < 1:
        raise ContractError("adjacency vectors start at step 1")
    state = h
    prev = Tensor([[0.0]])
    outs = []
    for _ in range(t):
        state = ad.gru_cell(prev, state, params, "edge")
        prev = ad.sigmoid(ad.add(ad.matmul(state, params["out.Whead"]),
                                 params["out.bhead"]))
        outs.append(prev)
    return outs[0] if len(outs) == 1 else ad.concat_cols(outs)


def length_penalty(eos_probs: list, rbf: RbfPenalty) -> Tensor:
    """Sum over steps of Phi(t) * P(EOS at t); eos_probs[t] is a 1x1 tensor."""
    total = Tensor([[0.0]])
    for t, p in enumerate(eos_probs):
        total = ad.add(total, ad.scalar_mul(p, rbf(t)))
    return total


def _pad_row(row: Tensor, width: int) -> Tensor:
    gap = width - row.shape[1]
    if gap == 0:
        return row
    return ad.concat_cols([row, Tensor(np.zeros((1, gap)))])


def _assemble_soft_adjacency(thetas: list, k: int) -> Tensor:
    s = Tensor(np.zeros((k, k)))
    for t, theta in enumerate(thetas):
        if theta is None or theta.shape[1] == 0:
            continue
        e = np.zeros((k, 1))
        e[t, 0] = 1.0
        block = ad.matmul(Tensor(e), _pad_row(theta, k))
        s = ad.add(s, ad.add(block, ad.transpose(block)))
    return s


def translate(enc: EncodedGraph, graph: ConceptGraph, params: dict,
              cfg: TranslateConfig):
    """Run the full translation loop.

    Returns (TranslatedGraph, L_cov tensor, L_len tensor).  In train mode node
    selection goes through hard Gumbel-Softmax so gradients reach the pointer
    and encoder; eval mode is noise-free argmax.
    """
    if cfg.max_size < 1:
        raise ContractError("max_size must be >= 1")
    if cfg.mode not in ("train", "eval"):
        raise ContractError(f"unknown mode {cfg.mode!r}")
    order = order_pseudo_sequence(graph)
    m = len(order)
    hidden = enc.node_embeddings.shape[1]

    perm = np.zeros((m, len(graph.nodes)))
    for slot, node_idx in enumerate(order):
        perm[slot, node_idx] = 1.0
    q_sorted = ad.matmul(Tensor(perm), enc.node_embeddings)
    q_aug = ad.concat_rows([params["eos"], q_sorted])
    w1q = ad.matmul(q_aug, params["ptr.W1"])

    h = enc.graph_embedding
    prev_q = Tensor(np.zeros((1, hidden)))
    prev_theta = Tensor(np.zeros((1, cfg.max_size - 1))) \
        if cfg.max_size > 1 else None
    mask = np.zeros(m + 1, dtype=bool)
    if not cfg.allow_eos:
        mask[0] = True

    attention_history = []
    eos_probs = []
    selected_slots = []
    q_rows = []
    thetas = []
    eos_step = -1
    forced = False

    for t in range(cfg.max_size):
        x = prev_q if prev_theta is None else ad.concat_cols([prev_q, prev_theta])
        h = ad.gru_cell(x, h, params, "dec")
        masked_u = _pointer_logits(q_aug, h, params, mask, w1q)
        p = ad.softmax_rows(masked_u)
        attention_history.append(p)
        if cfg.allow_eos:
            eos_probs.append(ad.slice_cols(p, 0, 1))

        if cfg.mode == "train":
            if cfg.straight_through:
                onehot = ad.gumbel_softmax_hard(masked_u, cfg.tau, cfg.rng)
            else:
                onehot = ad.gumbel_softmax_soft(masked_u, cfg.tau, cfg.rng)
        else:
            onehot = ad.straight_through_hard(p)
        idx = int(np.argmax(onehot.data[0]))

        if idx == 0:
            if t == 0 and cfg.mode == "eval":
                # an empty concept map is useless; force the best candidate
                forced = True
                idx = 1 + int(np.argmax(p.data[0, 1:]))
                hard = np.zeros((1, m + 1))
                hard[0, idx] = 1.0
                onehot = Tensor(hard)
            else:
                eos_step = t
                break

        k = len(selected_slots)
        if k >= 1:
            if cfg.variant == "neigh":
                theta = adjacency_neigh(h, k, params)
            else:
                theta = adjacency_path(h, k, params)
        else:
            theta = None

        q_t = ad.matmul(onehot, q_aug)
        selected_slots.append(idx - 1)
        thetas.append(theta)
        q_rows.append(q_t)
        mask[idx] = True
        prev_q = q_t
        if prev_theta is not None:
            prev_theta = _pad_row(theta, cfg.max_size - 1) if theta is not None \
                else Tensor(np.zeros((1, cfg.max_size - 1)))
        if len(selected_slots) == m:
            break

    k = len(selected_slots)
    if k == 0:
        tg = TranslatedGraph([], [], None, None, eos_step, forced)
    else:
        selected_q = q_rows[0] if k == 1 else ad.concat_rows(q_rows)
        soft_adj = _assemble_soft_adjacency(thetas, k)
        node_indices = [order[s] for s in selected_slots]
        theta_values = [np.zeros(0) if th is None else th.data[0].copy()
                        for th in thetas]
        tg = TranslatedGraph(node_indices, theta_values, selected_q, soft_adj,
                             eos_step, forced)

    l_cov = coverage_loss(attention_history)
    l_len = length_penalty(eos_probs, cfg.rbf) if eos_probs else Tensor([[0.0]])
    return tg, l_cov, l_len


def assemble_graph(tg: TranslatedGraph, source: ConceptGraph,
                   threshold: float = 0.5) -> ConceptGraph:
    """Materialize a concept graph: selected nodes, edges where theta exceeds
    the threshold (strict), weighted by the theta value."""
    if not 0 < threshold < 1:
        raise ContractError("threshold must lie in (0, 1)")
    out = ConceptGraph(nodes=[source.nodes[i] for i in tg.node_indices])
    for t, theta in enumerate(tg.thetas):
        for j, w in enumerate(theta):
            if w > threshold:
                out.add_edge(t, j, float(w))
    return out.validate()
