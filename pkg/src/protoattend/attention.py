"""PReLU-wrapped query/key self-attention with hard top-k token selection.

Tokens are the 11-feature proto-object descriptors. A shared per-feature
PReLU is applied to the input once, two affine maps embed the result into
query and key spaces, and each embedding gets its own per-neuron PReLU.
No value matrix: the row-softmaxed score matrix is collapsed into one
importance score per token (total attention the token receives) and the k
highest-scoring tokens are selected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .segmentation import FEATURE_COUNT


@dataclass(frozen=True)
class AttentionParams:
    input_slopes: np.ndarray  # (11,) shared by the Q and K paths
    wq: np.ndarray  # (11, d_q)
    bq: np.ndarray  # (d_q,)
    q_slopes: np.ndarray  # (d_q,)
    wk: np.ndarray  # (11, d_q)
    bk: np.ndarray  # (d_q,)
    k_slopes: np.ndarray  # (d_q,)

    @property
    def d_q(self) -> int:
        return self.wq.shape[1]

    @property
    def slope_count(self) -> int:
        return len(self.input_slopes) + len(self.q_slopes) + len(self.k_slopes)

    @property
    def param_count(self) -> int:
        return (
            self.input_slopes.size
            + self.wq.size + self.bq.size + self.q_slopes.size
            + self.wk.size + self.bk.size + self.k_slopes.size
        )

    @classmethod
    def zeros(cls, d_q: int = 2, d_in: int = FEATURE_COUNT) -> "AttentionParams":
        return cls(
            input_slopes=np.zeros(d_in),
            wq=np.zeros((d_in, d_q)),
            bq=np.zeros(d_q),
            q_slopes=np.zeros(d_q),
            wk=np.zeros((d_in, d_q)),
            bk=np.zeros(d_q),
            k_slopes=np.zeros(d_q),
        )


def prelu(x: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Per-neuron parametric ReLU: max(a * x, x).

    Slope 0 gives ReLU, slope 1 the identity; negative slopes make the
    function nonmonotonic, which lets the layer single out midrange values.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != len(slopes):
        raise ValueError(f"slope count {len(slopes)} does not match input width {x.shape[-1]}")
    return np.maximum(slopes * x, x)


def embed(tokens: np.ndarray, params: AttentionParams) -> tuple[np.ndarray, np.ndarray]:
    """Map (N, 11) tokens to (N, d_q) query and key matrices."""
    u = prelu(tokens, params.input_slopes)
    q = prelu(u @ params.wq + params.bq, params.q_slopes)
    k = prelu(u @ params.wk + params.bk, params.k_slopes)
    return q, k


def attention_scores(q: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Row-softmaxed scaled dot-product scores, shape (N, N).

    Each row sums to 1; softmax subtracts the row max for stability.
    """
    d_q = q.shape[1]
    logits = (q @ k.T) / math.sqrt(d_q)
    logits -= logits.max(axis=1, keepdims=True)
    np.exp(logits, out=logits)
    logits /= logits.sum(axis=1, keepdims=True)
    return logits


def importance(scores: np.ndarray) -> np.ndarray:
    """Total attention received per token: column sums of the score matrix.

    The per-row sums of a row-stochastic matrix are identically 1, so the
    informative reduction is over rows for each column; the result sums to N.
    """
    return scores.sum(axis=0)


def select_top_k(imp: np.ndarray, k: int) -> list[int]:
    """Indices of the k largest scores, descending, ties broken by lower index.

    Returns all indices when there are fewer than k tokens, and an empty list
    for an empty importance vector.
    """
    n = len(imp)
    if n == 0:
        return []
    order = np.argsort(-np.asarray(imp, dtype=np.float64), kind="stable")
    return order[: min(k, n)].tolist()


def attend(tokens: np.ndarray, params: AttentionParams, k: int) -> list[int]:
    """Full attention pass: embed, score, aggregate importance, select top-k."""
    if len(tokens) == 0:
        return []
    q, key = embed(tokens, params)
    return select_top_k(importance(attention_scores(q, key)), k)
