"""Hard/soft label algebra and the cross-entropy losses used by every training stage.

Multiple-choice labels are probability vectors over answer options; span labels
are (start, end) pairs of distributions over token positions.  A soft label is
the convex blend

    s_k = lam * h_k + (1 - lam) * p_k

of the one-hot gold vector ``h`` and a model-predicted distribution ``p``.

Loss conventions (normative):

* multiple-choice, hard or soft:  -sum_k t_k * log p_k  (no scaling factor)
* span, hard:  -log p_start[a_start] - log p_end[a_end]
* span, soft:  (1/2) * (CE(s_start, p_start) + CE(s_end, p_end))

The 1/2 factor on the span soft loss is intentional and asymmetric with the
multiple-choice form.  Soft losses are plain soft-target cross-entropies; they
differ from the KL divergence to the target only by the constant target
entropy, so gradients are identical (``kl_divergence`` is provided for
reporting).
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

# Probabilities are floored before entering a log so float32 softmax underflow
# cannot produce infinities.
PROB_FLOOR = 1e-12

# Tolerance on "sums to one" checks for label/probability vectors.
NORMALIZATION_TOL = 1e-6


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-d vector")
    return v


def _check_distribution(v: np.ndarray, name: str) -> np.ndarray:
    if np.any(v < 0) or not np.isfinite(v).all():
        raise ValidationError(f"{name} has negative or non-finite entries")
    if abs(float(v.sum()) - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(f"{name} does not sum to 1 (got {float(v.sum())!r})")
    return v


def one_hot(index: int, length: int) -> np.ndarray:
    """One-hot float64 vector of the given length."""
    if not 0 <= index < length:
        raise ValidationError(f"one-hot index {index} out of range for length {length}")
    h = np.zeros(length, dtype=np.float64)
    h[index] = 1.0
    return h


def check_one_hot(h, name: str = "hard label") -> np.ndarray:
    """Validate that ``h`` is exactly one-hot and return it as float64."""
    v = _as_vector(h, name)
    if np.count_nonzero(v == 1.0) != 1 or np.count_nonzero(v) != 1:
        raise ValidationError(f"{name} must have exactly one entry equal to 1 and the rest 0")
    return v


def safe_log(p: np.ndarray) -> np.ndarray:
    """log with the probability floor applied."""
    return np.log(np.maximum(p, PROB_FLOOR))


def blend_mc(h, p, lam: float) -> np.ndarray:
    """Blend a one-hot option label with a predicted option distribution.

    Returns ``lam * h + (1 - lam) * p`` exactly; ``lam=1`` yields ``h`` and
    ``lam=0`` yields ``p`` bit-for-bit.
    """
    hv = check_one_hot(h)
    pv = _check_distribution(_as_vector(p, "prediction"), "prediction")
    if hv.shape != pv.shape:
        raise ValidationError(
            f"label/prediction length mismatch: {hv.size} vs {pv.size}"
        )
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"lambda must be in [0, 1], got {lam!r}")
    return lam * hv + (1.0 - lam) * pv


def blend_span(h_start, h_end, p_start, p_end, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Blend span labels; the start and end sides are blended independently."""
    return blend_mc(h_start, p_start, lam), blend_mc(h_end, p_end, lam)


def cross_entropy(target, p) -> float:
    """-sum_k t_k log p_k with 64-bit accumulation and floored logs."""
    t = _as_vector(target, "target")
    pv = _as_vector(p, "prediction")
    if t.shape != pv.shape:
        raise ValidationError(f"target/prediction length mismatch: {t.size} vs {pv.size}")
    return float(-(t * safe_log(pv)).sum())


def loss_hard_mc(h, p) -> float:
    """Multiple-choice hard-label loss: -log p at the gold option."""
    return cross_entropy(check_one_hot(h), p)


def loss_soft_mc(s, p) -> float:
    """Multiple-choice soft-label loss: soft-target cross-entropy."""
    return cross_entropy(_check_distribution(_as_vector(s, "soft label"), "soft label"), p)


def loss_hard_span(a_start: int, a_end: int, p_start, p_end) -> float:
    """Span hard-label loss: -log p_start[a_start] - log p_end[a_end]."""
    ps = _as_vector(p_start, "start distribution")
    pe = _as_vector(p_end, "end distribution")
    if ps.shape != pe.shape:
        raise ValidationError("start/end distribution length mismatch")
    if not (0 <= a_start < ps.size and 0 <= a_end < pe.size):
        raise ValidationError(
            f"answer positions ({a_start}, {a_end}) out of range for length {ps.size}"
        )
    return float(-safe_log(ps[a_start]) - safe_log(pe[a_end]))


def loss_soft_span(s_start, s_end, p_start, p_end) -> float:
    """Span soft-label loss: mean of the start and end cross-entropies."""
    return 0.5 * (cross_entropy(s_start, p_start) + cross_entropy(s_end, p_end))


def entropy(s) -> float:
    """Shannon entropy in nats; zero entries contribute zero."""
    v = _as_vector(s, "distribution")
    mask = v > 0
    return float(-(v[mask] * np.log(v[mask])).sum())


def kl_divergence(s, p) -> float:
    """KL(s || p) = CE(s, p) - H(s); optional reporting companion to the soft losses."""
    return cross_entropy(s, p) - entropy(s)
