"""LSTM controller: selected proto-object centroids in, environment action out."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GATE_ORDER = ("i", "f", "g", "o")


@dataclass(frozen=True)
class LstmParams:
    """Gate-stacked LSTM weights, gate order (i, f, g, o).

    Every gate has an input-side and a recurrent-side bias; the duplication
    is deliberate and part of the frozen parameter layout.
    """

    w_x: np.ndarray  # (4, n_in, n_h)
    w_h: np.ndarray  # (4, n_h, n_h)
    b_x: np.ndarray  # (4, n_h)
    b_h: np.ndarray  # (4, n_h)

    @property
    def n_in(self) -> int:
        return self.w_x.shape[1]

    @property
    def n_h(self) -> int:
        return self.w_x.shape[2]

    @classmethod
    def zeros(cls, n_in: int, n_h: int) -> "LstmParams":
        return cls(
            w_x=np.zeros((4, n_in, n_h)),
            w_h=np.zeros((4, n_h, n_h)),
            b_x=np.zeros((4, n_h)),
            b_h=np.zeros((4, n_h)),
        )


@dataclass
class LstmState:
    hidden: np.ndarray  # (n_h,)
    cell: np.ndarray  # (n_h,)

    @classmethod
    def zeros(cls, n_h: int) -> "LstmState":
        return cls(hidden=np.zeros(n_h), cell=np.zeros(n_h))


@dataclass(frozen=True)
class HeadParams:
    weights: np.ndarray  # (n_h, n_out)
    biases: np.ndarray  # (n_out,)

    @classmethod
    def zeros(cls, n_h: int, n_out: int) -> "HeadParams":
        return cls(weights=np.zeros((n_h, n_out)), biases=np.zeros(n_out))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # Stable in both tails.
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def transfer_f(obj) -> tuple[float, float]:
    """Normalized center of mass of a proto-object (features 3 and 4).

    Accepts a ProtoObject or a bare 11-feature vector.
    """
    features = getattr(obj, "features", obj)
    return float(features[3]), float(features[4])


def assemble_input(selected: list[int], objects, k: int) -> np.ndarray:
    """Concatenate centroids of selected objects, zero-padded to 2*k values.

    Fewer selections than k (including an empty scene) leave the trailing
    slots at (0, 0).
    """
    out = np.zeros(2 * k)
    for slot, idx in enumerate(selected[:k]):
        x, y = transfer_f(objects[idx])
        out[2 * slot] = x
        out[2 * slot + 1] = y
    return out


def lstm_step(
    state: LstmState, x: np.ndarray, params: LstmParams
) -> tuple[LstmState, np.ndarray]:
    """One standard LSTM cell update; returns (new state, hidden output)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.n_in,):
        raise ValueError(f"input length {x.shape} does not match n_in={params.n_in}")
    h = state.hidden
    pre = x @ params.w_x + params.b_x + h @ params.w_h + params.b_h  # (4, n_h)
    i = _sigmoid(pre[0])
    f = _sigmoid(pre[1])
    g = np.tanh(pre[2])
    o = _sigmoid(pre[3])
    cell = f * state.cell + i * g
    hidden = o * np.tanh(cell)
    return LstmState(hidden=hidden, cell=cell), hidden


def act_continuous(hidden: np.ndarray, params: HeadParams) -> np.ndarray:
    """Driving action triple: steer in [-1, 1], gas and brake in [0, 1]."""
    y = hidden @ params.weights + params.biases
    return np.array([np.tanh(y[0]), _sigmoid(y[1]), _sigmoid(y[2])])


def act_discrete(hidden: np.ndarray, params: HeadParams) -> int:
    """Discrete action index: argmax of the affine head, ties to lowest index."""
    y = hidden @ params.weights + params.biases
    return int(np.argmax(y))
