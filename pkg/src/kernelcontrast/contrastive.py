"""Contrastive losses on finite spaces and their checkable optima.

Everything here is exact: corpora are counted, pair processes are small
probability tables, and each loss is the full expectation rather than a
sampled estimate. That turns the classical claims about contrastive
learning into assertions a test can make at tight tolerance:

* skip-gram with negative sampling factorizes the shifted PMI matrix,
* the trained InfoNCE softmax equals the positive-pair kernel's
  conditional,
* the spectral contrastive loss is a low-rank factorization of the
  normalized pair matrix in disguise,
* NCE recovers the log count ratio.

The independent oracles those checks compare against (PMI from counts,
row-normalized K_plus, Eckart-Young factors, conductance by brute force)
live here too, next to the losses they certify.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .encoders import (
    EmbeddingTable,
    OptimizerConfig,
    minimize,
    sigmoid,
    softmax,
    softplus,
)
from .kernels import FiniteSpace, SymMatrix, symmetrize
from .rng import Stream

__all__ = [
    "CorpusStats",
    "corpus_stats",
    "shifted_pmi_matrix",
    "margin_pair_loss",
    "triplet_loss",
    "nce_loss",
    "nce_loss_grad",
    "train_nce",
    "sgns_expected_loss",
    "sgns_loss_grad",
    "train_sgns",
    "PairProcess",
    "pair_process",
    "infonce_loss",
    "expected_simclr_loss",
    "simclr_loss_mc",
    "simclr_loss_grad",
    "EnumerationBudgetError",
    "train_infonce",
    "bilinear_scores",
    "cosine_scores",
    "row_normalized",
    "infonce_tv_gap",
    "spectral_loss",
    "spectral_loss_grad",
    "train_spectral",
    "dirichlet_conductance",
    "sparsest_partition",
    "ProbeTask",
    "linear_probe_error",
]

ENUMERATION_BUDGET = 2_000_000


# ---------------------------------------------------------------------------
# corpora and skip-gram


@dataclass
class CorpusStats:
    """Window co-occurrence counts for a tokenized corpus.

    ``space.p`` is the token frequency (count / corpus length). The
    positive-pair distribution has its own marginal, ``pair_marginal``
    (row sums of counts over N); the two differ when windows truncate at
    the corpus boundary. PMI and the expected skip-gram loss both use
    ``pair_marginal`` so that the factorization identity is exact on any
    finite corpus, truncation included.
    """

    space: FiniteSpace
    counts: np.ndarray
    window: int
    n_pairs: int
    n_tokens: int
    pair_marginal: np.ndarray

    def __post_init__(self):
        n = self.space.n
        if self.counts.shape != (n, n):
            raise ValueError(
                f"counts shape {self.counts.shape} does not match vocabulary {n}"
            )
        if int(self.counts.sum()) != self.n_pairs:
            raise ValueError("n_pairs must equal the total count mass")


def corpus_stats(tokens, window: int) -> CorpusStats:
    """Count ordered (target, context) pairs within a symmetric window.

    Every position t contributes the pairs (x_t, x_{t+j}) for j from -m
    to m excluding 0, truncated at the sequence boundaries. Vocabulary
    order is sorted token order.
    """
    tokens = [str(t) for t in tokens]
    if not tokens:
        raise ValueError("corpus is empty")
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    vocab = sorted(set(tokens))
    index = {tok: i for i, tok in enumerate(vocab)}
    ids = [index[t] for t in tokens]
    n = len(vocab)
    counts = np.zeros((n, n))
    t_total = len(ids)
    for t, x in enumerate(ids):
        lo = max(0, t - window)
        hi = min(t_total, t + window + 1)
        for j in range(lo, hi):
            if j != t:
                counts[x, ids[j]] += 1.0
    n_pairs = int(counts.sum())
    unigram = np.bincount(ids, minlength=n).astype(float) / t_total
    row = counts.sum(axis=1)
    pair_marginal = row / n_pairs if n_pairs else row
    return CorpusStats(
        space=FiniteSpace(items=vocab, p=unigram),
        counts=counts,
        window=window,
        n_pairs=n_pairs,
        n_tokens=t_total,
        pair_marginal=pair_marginal,
    )


def shifted_pmi_matrix(stats: CorpusStats, k: float) -> np.ndarray:
    """log(p(x,z) / (p(x) p(z))) - log k from corpus counts.

    Entries whose pair count is zero are undefined and returned as nan;
    callers that need full support should check ``np.isnan`` or use a
    corpus in which every pair co-occurs.
    """
    if not k > 0.0:
        raise ValueError(f"k must be positive, got {k!r}")
    if stats.n_pairs == 0:
        raise ValueError("corpus has no pairs; PMI is undefined everywhere")
    defined = stats.counts > 0
    out = np.full(stats.counts.shape, np.nan)
    joint = stats.counts / stats.n_pairs
    marg = stats.pair_marginal
    ij = np.nonzero(defined)
    out[ij] = (
        np.log(joint[ij]) - np.log(marg[ij[0]]) - np.log(marg[ij[1]]) - np.log(k)
    )
    return out


def margin_pair_loss(dist: float, y: int, margin: float) -> float:
    """y d^2 + (1-y) max(0, margin - d)^2 for one pair at distance d."""
    if margin < 0.0:
        raise ValueError(f"margin must be nonnegative, got {margin!r}")
    if y not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {y!r}")
    d = float(dist)
    return y * d * d + (1 - y) * max(0.0, margin - d) ** 2


def triplet_loss(anchor, positive, negative, alpha: float) -> float:
    """Hinge on squared distances: max(|a-p|^2 - |a-n|^2 + alpha, 0)."""
    if alpha < 0.0:
        raise ValueError(f"alpha must be nonnegative, got {alpha!r}")
    a = np.asarray(anchor, dtype=float)
    gap_pos = a - np.asarray(positive, dtype=float)
    gap_neg = a - np.asarray(negative, dtype=float)
    return float(max(np.dot(gap_pos, gap_pos) - np.dot(gap_neg, gap_neg) + alpha, 0.0))


def nce_loss(scores, labels, k: float) -> float:
    """Mean binary cross-entropy through the k-shifted sigmoid.

    Scores are per-sample; labels mark observed (1) versus noise (0)
    samples. With k equal to the noise-to-data count ratio, the minimizer
    satisfies s*(x) = log(p1(x) / p0(x)), the log ratio of the two
    empirical distributions; with k = 1 (plain sigmoid) the same ratio
    appears shifted by -log(noise/data ratio).
    """
    loss, _ = nce_loss_grad(scores, labels, k)
    return loss


def nce_loss_grad(scores, labels, k: float):
    """nce_loss value together with its gradient in the scores."""
    if not k > 0.0:
        raise ValueError(f"k must be positive, got {k!r}")
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=float)
    if s.shape != y.shape or s.ndim != 1 or s.shape[0] == 0:
        raise ValueError("scores and labels must be equal-length nonempty vectors")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("labels must be 0 or 1")
    u = s - np.log(k)
    per_sample = y * softplus(-u) + (1.0 - y) * softplus(u)
    m = s.shape[0]
    grad = (sigmoid(u) - y) / m
    return float(per_sample.mean()), grad


def train_nce(
    pos_counts,
    neg_counts,
    k: float,
    activation: str = "k_sigmoid",
    config: OptimizerConfig | None = None,
):
    """Fit one score per item to classify observed against noise samples.

    ``pos_counts[x]`` and ``neg_counts[x]`` are how many times item x
    appeared with label 1 and 0. The loss is the count-weighted mean
    binary cross-entropy, i.e. exactly nce_loss on the expanded sample
    list, so the closed-form optimum applies: with ``activation`` set to
    "k_sigmoid" the trained score converges to log(p1/p0); with "sigmoid"
    it converges to log(p1/p0) - log k.
    """
    pos = np.asarray(pos_counts, dtype=float)
    neg = np.asarray(neg_counts, dtype=float)
    if pos.shape != neg.shape or pos.ndim != 1:
        raise ValueError("count vectors must share one shape")
    if np.any(pos < 0) or np.any(neg < 0) or np.any(pos + neg == 0):
        raise ValueError("each item needs nonnegative counts, not all zero")
    if activation == "k_sigmoid":
        shift = np.log(k) if k > 0 else None
        if shift is None:
            raise ValueError(f"k must be positive, got {k!r}")
    elif activation == "sigmoid":
        shift = 0.0
    else:
        raise ValueError(f"unknown activation {activation!r}")
    total = pos.sum() + neg.sum()

    def objective(theta):
        u = theta - shift
        loss = (pos * softplus(-u) + neg * softplus(u)).sum() / total
        grad = ((pos + neg) * sigmoid(u) - pos) / total
        return loss, grad

    cfg = config or OptimizerConfig(tol=1e-9)
    theta0 = Stream(cfg.seed).uniform(pos.shape[0], -0.1, 0.1)
    theta, _ = minimize(objective, theta0, cfg)
    return theta


def sgns_expected_loss(
    phi: EmbeddingTable,
    psi: EmbeddingTable,
    stats: CorpusStats,
    k: float,
    activation: str = "sigmoid",
    neg_exponent: float = 1.0,
) -> float:
    """Skip-gram negative-sampling loss with expected negative counts.

    The random negative draws of the original algorithm are replaced by
    their expectations k * N_x * q(z), with q the (optionally exponent-
    smoothed) negative-sampling distribution, making the loss a
    deterministic function of the tables. At zero tables the value is
    N (1 + k) log 2.
    """
    loss, _, _ = _sgns_loss_parts(phi.rows, psi.rows, stats, k, activation, neg_exponent)
    return loss


def sgns_loss_grad(
    phi_rows: np.ndarray,
    psi_rows: np.ndarray,
    stats: CorpusStats,
    k: float,
    activation: str = "sigmoid",
    neg_exponent: float = 1.0,
):
    """Loss plus gradients in both tables, for the optimizer."""
    return _sgns_loss_parts(phi_rows, psi_rows, stats, k, activation, neg_exponent)


def _negative_distribution(stats: CorpusStats, neg_exponent: float) -> np.ndarray:
    q = stats.pair_marginal
    if np.any(q == 0.0):
        raise ValueError(
            "negative-sampling distribution has a zero probability; "
            "every vocabulary item must occur in at least one pair"
        )
    if neg_exponent != 1.0:
        q = q**neg_exponent
        q = q / q.sum()
    return q


def _sgns_loss_parts(phi_rows, psi_rows, stats, k, activation, neg_exponent):
    if not k > 0.0:
        raise ValueError(f"k must be positive, got {k!r}")
    n = stats.space.n
    if phi_rows.shape[0] != n or psi_rows.shape[0] != n:
        raise ValueError("embedding tables must have one row per vocabulary item")
    if phi_rows.shape[1] != psi_rows.shape[1]:
        raise ValueError("target and context tables must share a dimension")
    q = _negative_distribution(stats, neg_exponent)
    w_pos = stats.counts
    w_neg = k * np.outer(stats.counts.sum(axis=1), q)
    z = phi_rows @ psi_rows.T
    if activation == "k_sigmoid":
        z = z - np.log(k)
    elif activation != "sigmoid":
        raise ValueError(f"unknown activation {activation!r}")
    loss = float((w_pos * softplus(-z) + w_neg * softplus(z)).sum())
    dz = (w_pos + w_neg) * sigmoid(z) - w_pos
    return loss, dz @ psi_rows, dz.T @ phi_rows


def train_sgns(
    stats: CorpusStats,
    d: int,
    k: float,
    config: OptimizerConfig | None = None,
    activation: str = "sigmoid",
    neg_exponent: float = 1.0,
):
    """Minimize the expected skip-gram loss; returns (target, context) tables.

    With d at least the vocabulary size and every pair count positive,
    the product of the trained tables converges to PMI - log k entrywise
    (plain sigmoid) or to unshifted PMI (k-shifted sigmoid).
    """
    n = stats.space.n
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    cfg = config or OptimizerConfig(tol=1e-9, max_iter=20000)
    phi0 = EmbeddingTable.random(n, d, cfg.seed)
    psi0 = EmbeddingTable.random(n, d, cfg.seed + 1)
    split = n * d

    def objective(flat):
        phi_rows = flat[:split].reshape(n, d)
        psi_rows = flat[split:].reshape(n, d)
        loss, dphi, dpsi = _sgns_loss_parts(
            phi_rows, psi_rows, stats, k, activation, neg_exponent
        )
        return loss, np.concatenate((dphi.reshape(-1), dpsi.reshape(-1)))

    x0 = np.concatenate((phi0.flat(), psi0.flat()))
    x, _ = minimize(objective, x0, cfg)
    return (
        EmbeddingTable(x[:split].reshape(n, d)),
        EmbeddingTable(x[split:].reshape(n, d)),
    )


# ---------------------------------------------------------------------------
# positive-pair processes


@dataclass
class PairProcess:
    """A finite positive-pair generating process.

    Built from a source distribution p and an augmentation conditional
    (row-stochastic); the joint p_plus(a, b) = sum_x p(x) A[x,a] A[x,b]
    is symmetric and its marginal is the view distribution A^T p, stored
    as ``marginal``. When the augmentation preserves the source
    distribution (every process used in the exactness tests does), the
    marginal equals p and ``marginal_shifted`` is False.

    ``k_plus`` holds p_plus(a,b) / (marginal(a) marginal(b)), the odds a
    pair is positive relative to independence; ``abar`` is the
    symmetrically normalized pair matrix p_plus / sqrt(marg marg'). Both
    are positive semidefinite by construction.
    """

    space: FiniteSpace
    augment: np.ndarray
    p_plus: np.ndarray
    marginal: np.ndarray
    k_plus: SymMatrix
    abar: SymMatrix
    marginal_shifted: bool

    @property
    def n(self) -> int:
        return self.space.n


def pair_process(space: FiniteSpace, augment) -> PairProcess:
    """Build a PairProcess, validating stochasticity and the pair identities."""
    a = np.asarray(augment, dtype=float)
    n = space.n
    if a.shape != (n, n):
        raise ValueError(f"augment shape {a.shape} does not match space size {n}")
    if np.any(a < 0.0):
        raise ValueError("augmentation probabilities must be nonnegative")
    rowsum = a.sum(axis=1)
    bad = np.nonzero(np.abs(rowsum - 1.0) > 1e-12)[0]
    if bad.size:
        raise ValueError(
            f"augment row {bad[0]} sums to {rowsum[bad[0]]!r}, not 1"
        )
    p_plus = symmetrize(a.T @ (space.p[:, None] * a))
    marginal = a.T @ space.p
    if np.abs(p_plus.sum(axis=1) - marginal).max() > 1e-12:
        raise ValueError("pair joint marginal does not match view distribution")
    if np.any(marginal <= 0.0):
        dead = np.nonzero(marginal <= 0.0)[0]
        raise ValueError(
            f"item {space.items[dead[0]]!r} is never produced by the augmentation"
        )
    root = np.sqrt(marginal)
    k_plus = SymMatrix(symmetrize(p_plus / np.outer(marginal, marginal)))
    abar = SymMatrix(symmetrize(p_plus / np.outer(root, root)))
    shifted = bool(np.abs(marginal - space.p).max() > 1e-12)
    return PairProcess(
        space=space,
        augment=a,
        p_plus=p_plus,
        marginal=marginal,
        k_plus=k_plus,
        abar=abar,
        marginal_shifted=shifted,
    )


# ---------------------------------------------------------------------------
# InfoNCE and SimCLR


class EnumerationBudgetError(ValueError):
    """Raised when exact enumeration would exceed the tuple budget."""


def _logsumexp(z: np.ndarray, axis: int = -1) -> np.ndarray:
    m = z.max(axis=axis, keepdims=True)
    return (m + np.log(np.exp(z - m).sum(axis=axis, keepdims=True))).squeeze(axis)


def infonce_loss(scores: np.ndarray, anchor: int, positive: int, negatives) -> float:
    """Cross-entropy of picking the positive among the candidates.

    ``scores`` is a full score table s(x, z); candidates are the positive
    followed by the negatives, all scored against the anchor.
    """
    negatives = list(negatives)
    if positive in negatives:
        raise ValueError("positive must not appear among the negatives")
    if not negatives:
        raise ValueError("need at least one negative")
    s = np.asarray(scores, dtype=float)
    logits = s[anchor, [positive] + negatives]
    return float(_logsumexp(logits) - logits[0])


def _check_batch(process: PairProcess, b: int, budget: int | None) -> int:
    if b < 2:
        raise ValueError(
            f"batch size {b} leaves no negatives; the loss needs B >= 2"
        )
    tuples = process.n ** (2 * b)
    if budget is not None and tuples > budget:
        raise EnumerationBudgetError(
            f"exact enumeration needs |X|^(2B) = {tuples} tuples, over the "
            f"budget of {budget}; use simclr_loss_mc for a seeded estimate"
        )
    return tuples


def expected_simclr_loss(scores: np.ndarray, process: PairProcess, b: int) -> float:
    """Exact expected SimCLR loss by enumerating every batch outcome.

    One batch draws a positive pair from p_plus and 2B - 2 negatives
    i.i.d. from the marginal; the anchor must pick its partner out of the
    2B - 1 candidates. A constant score table gives log(2B - 1) exactly.
    """
    loss, _ = simclr_loss_grad(scores, process, b)
    return loss


def simclr_loss_grad(scores: np.ndarray, process: PairProcess, b: int):
    """Expected SimCLR loss and its gradient in the score table.

    All |X|^(2B-2) negative tuples are enumerated in one shot. For each
    the candidate log-sum-exp splits into the positive's logit and the
    tuple's own log-sum-exp, and every exponential is taken relative to
    the max over its own candidate set, so no score range can overflow.
    """
    _check_batch(process, b, ENUMERATION_BUDGET)
    s = np.asarray(scores, dtype=float)
    n = process.n
    if s.shape != (n, n):
        raise ValueError(f"score table shape {s.shape} does not match |X| = {n}")
    p_pair = process.p_plus
    n_neg = 2 * b - 2
    tuples = np.asarray(
        list(itertools.product(range(n), repeat=n_neg)), dtype=int
    ).reshape(-1, n_neg)
    w_neg = np.prod(process.marginal[tuples], axis=1) if n_neg else np.ones(1)

    neg_logits = s[:, tuples]  # (anchor, tuple, slot)
    m_neg = neg_logits.max(axis=2)
    e_slot = np.exp(neg_logits - m_neg[:, :, None])
    s_neg = e_slot.sum(axis=2)
    # lse[a, p, t] over {positive logit, tuple slots}, shifted by its own max
    m_all = np.maximum(s[:, :, None], m_neg[:, None, :])
    lse = m_all + np.log(
        np.exp(s[:, :, None] - m_all)
        + s_neg[:, None, :] * np.exp(m_neg[:, None, :] - m_all)
    )
    loss = float(((p_pair * (lse - s[:, :, None]).transpose(2, 0, 1)).sum(axis=(1, 2)) * w_neg).sum())

    sm_pos = np.exp(s[:, :, None] - lse)  # probability mass on the positive
    grad = p_pair * ((sm_pos * w_neg).sum(axis=2) - 1.0)
    # leftover mass 1 - sm_pos splits over slots by the within-tuple softmax
    a_mass = ((1.0 - sm_pos) * p_pair[:, :, None]).sum(axis=1) * w_neg
    slot_frac = e_slot / s_neg[:, :, None]
    onehot = np.zeros((tuples.shape[0], n_neg, n))
    onehot[np.arange(tuples.shape[0])[:, None], np.arange(n_neg)[None, :], tuples] = 1.0
    grad += np.einsum("at,atj,tjz->az", a_mass, slot_frac, onehot)
    return loss, grad


def simclr_loss_mc(
    scores: np.ndarray, process: PairProcess, b: int, n_samples: int, seed: int = 0
):
    """Monte Carlo estimate of the expected SimCLR loss.

    Returns (mean, standard error) over n_samples simulated batches drawn
    with the package stream, so estimates are seed-reproducible.
    """
    _check_batch(process, b, None)
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    s = np.asarray(scores, dtype=float)
    n = process.n
    stream = Stream(seed)
    flat = process.p_plus.reshape(-1)
    pair_cdf = np.cumsum(flat)
    pair_cdf[-1] = 1.0
    neg_cdf = np.cumsum(process.marginal)
    neg_cdf[-1] = 1.0
    n_neg = 2 * b - 2
    u = stream.uniform(n_samples * (1 + n_neg))
    pair_draws = np.searchsorted(pair_cdf, u[:n_samples], side="right")
    anchors, positives = np.divmod(pair_draws, n)
    neg_draws = np.searchsorted(
        neg_cdf, u[n_samples:], side="right"
    ).reshape(n_samples, n_neg)
    logits = np.empty((n_samples, 1 + n_neg))
    logits[:, 0] = s[anchors, positives]
    for j in range(n_neg):
        logits[:, 1 + j] = s[anchors, neg_draws[:, j]]
    losses = _logsumexp(logits, axis=1) - logits[:, 0]
    mean = float(losses.mean())
    stderr = float(losses.std(ddof=1) / np.sqrt(n_samples))
    return mean, stderr


def bilinear_scores(f: EmbeddingTable, g: EmbeddingTable, tau: float) -> np.ndarray:
    """Untied score table s(x, z) = f(x) . g(z) / tau."""
    if not tau > 0.0:
        raise ValueError(f"temperature must be positive, got {tau!r}")
    return f.rows @ g.rows.T / tau


def cosine_scores(phi: EmbeddingTable, tau: float) -> np.ndarray:
    """Tied score table s(x, z) = cos(phi(x), phi(z)) / tau."""
    if not tau > 0.0:
        raise ValueError(f"temperature must be positive, got {tau!r}")
    norms = np.linalg.norm(phi.rows, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("cosine score undefined: an embedding row is zero")
    unit = phi.rows / norms[:, None]
    return unit @ unit.T / tau


def row_normalized(table: np.ndarray) -> np.ndarray:
    """Rows rescaled to sum to 1 (rows must have positive sums)."""
    t = np.asarray(table, dtype=float)
    sums = t.sum(axis=1, keepdims=True)
    if np.any(sums <= 0.0):
        raise ValueError("row normalization needs positive row sums")
    return t / sums


def infonce_tv_gap(scores: np.ndarray, process: PairProcess, b: int) -> float:
    """Worst total-variation gap between model and true candidate conditionals.

    Enumerates every anchor and candidate tuple of a batch. The true
    conditional probability that candidate i is the anchor's partner is
    K_plus(anchor, c_i) normalized over the candidates; the model's is the
    softmax of the scores. Returns the maximum TV distance over tuples.
    """
    _check_batch(process, b, ENUMERATION_BUDGET)
    s = np.asarray(scores, dtype=float)
    k_plus = process.k_plus.values
    n = process.n
    worst = 0.0
    n_cands = 2 * b - 1
    for anchor in range(n):
        for cands in itertools.product(range(n), repeat=n_cands):
            idx = list(cands)
            model = softmax(s[anchor, idx])
            truth = k_plus[anchor, idx]
            denom = truth.sum()
            if denom == 0.0:
                continue
            tv = 0.5 * float(np.abs(model - truth / denom).sum())
            worst = max(worst, tv)
    return worst


def train_infonce(
    process: PairProcess,
    d: int,
    tau: float = 0.5,
    b: int = 2,
    config: OptimizerConfig | None = None,
    mode: str = "untied",
):
    """Minimize the exact expected SimCLR loss over encoder tables.

    In untied mode the score is f(x) . g(z) / tau with separate tables;
    with d >= |X| this can represent any score table, and at convergence
    exp(s) matches K_plus up to per-row scale. Tied mode trains one table
    under the cosine score; it demonstrates the practical parameterization
    but can only reach the optimum when log K_plus is representable as a
    shifted unit-vector Gram, so no exactness is promised. Returns
    (f, g) in untied mode, a single table in tied mode.
    """
    n = process.n
    cfg = config or OptimizerConfig(tol=1e-8, max_iter=20000)
    if mode == "untied":
        f0 = EmbeddingTable.random(n, d, cfg.seed)
        g0 = EmbeddingTable.random(n, d, cfg.seed + 1)
        split = n * d

        def objective(flat):
            f_rows = flat[:split].reshape(n, d)
            g_rows = flat[split:].reshape(n, d)
            s = f_rows @ g_rows.T / tau
            loss, ds = simclr_loss_grad(s, process, b)
            return loss, np.concatenate(
                ((ds @ g_rows / tau).reshape(-1), (ds.T @ f_rows / tau).reshape(-1))
            )

        x, _ = minimize(objective, np.concatenate((f0.flat(), g0.flat())), cfg)
        return (
            EmbeddingTable(x[:split].reshape(n, d)),
            EmbeddingTable(x[split:].reshape(n, d)),
        )
    if mode == "tied":
        phi0 = EmbeddingTable.random(n, d, cfg.seed)

        def objective(flat):
            rows = flat.reshape(n, d)
            norms = np.linalg.norm(rows, axis=1)
            if np.any(norms == 0.0):
                raise ValueError("cosine score undefined: an embedding row is zero")
            unit = rows / norms[:, None]
            s = unit @ unit.T / tau
            loss, ds = simclr_loss_grad(s, process, b)
            du = (ds + ds.T) @ unit / tau
            dr = (du - unit * (du * unit).sum(axis=1, keepdims=True)) / norms[:, None]
            return loss, dr.reshape(-1)

        x, _ = minimize(objective, phi0.flat(), cfg)
        return EmbeddingTable(x.reshape(n, d))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# spectral contrastive loss


def spectral_loss(phi: EmbeddingTable, process: PairProcess) -> float:
    """-2 E_pair[phi(x).phi(x')] + E_indep[(phi(z).phi(z'))^2], exactly.

    Both expectations are finite sums over the process tables. Up to an
    additive constant independent of phi, this equals the squared
    Frobenius error of F F^T against the normalized pair matrix, where F
    carries rows sqrt(marginal(x)) phi(x).
    """
    loss, _ = spectral_loss_grad(phi.rows, process)
    return loss


def spectral_loss_grad(phi_rows: np.ndarray, process: PairProcess):
    """Spectral loss value and gradient in the embedding rows."""
    rows = np.asarray(phi_rows, dtype=float)
    if rows.shape[0] != process.n:
        raise ValueError("table must have one row per item")
    root = np.sqrt(process.marginal)
    f = root[:, None] * rows
    gram = f @ f.T
    pair_term = float((process.p_plus * (rows @ rows.T)).sum())
    loss = -2.0 * pair_term + float((gram * gram).sum())
    grad = -4.0 * process.p_plus @ rows + 4.0 * root[:, None] * (gram @ f)
    return loss, grad


def train_spectral(
    process: PairProcess, d: int, config: OptimizerConfig | None = None
) -> EmbeddingTable:
    """Minimize the spectral contrastive loss.

    At the optimum, F (rows scaled by sqrt(marginal)) satisfies that
    F F^T is the best rank-d approximation of the normalized pair matrix,
    so verification compares Gram matrices, which are rotation-invariant.
    """
    n = process.n
    if not 1 <= d <= n:
        raise ValueError(f"d must be in [1, {n}], got {d}")
    cfg = config or OptimizerConfig(tol=1e-9, max_iter=20000)
    phi0 = EmbeddingTable.random(n, d, cfg.seed)

    def objective(flat):
        loss, grad = spectral_loss_grad(flat.reshape(n, d), process)
        return loss, grad.reshape(-1)

    x, _ = minimize(objective, phi0.flat(), cfg)
    return EmbeddingTable(x.reshape(n, d))


# ---------------------------------------------------------------------------
# graph quantities and probing


def dirichlet_conductance(process: PairProcess, subset) -> float:
    """Cross-boundary pair mass of S over its marginal mass.

    With the pair joint as edge weights, this is the chance a positive
    pair started in S and escaped it, normalized by the mass of S.
    """
    idx = np.asarray(sorted(set(int(i) for i in subset)), dtype=int)
    n = process.n
    if idx.size == 0 or idx.size == n:
        raise ValueError("subset must be nonempty and proper")
    if idx.min() < 0 or idx.max() >= n:
        raise ValueError(f"subset indices must lie in [0, {n})")
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    cross = float(process.p_plus[np.ix_(mask, ~mask)].sum())
    return cross / float(process.marginal[mask].sum())


def _partitions_into(items: list, blocks: int):
    """Set partitions of items into exactly `blocks` nonempty blocks."""
    n = len(items)
    if blocks < 1 or blocks > n:
        return
    if blocks == 1:
        yield [list(items)]
        return
    head, rest = items[0], items[1:]
    for part in _partitions_into(rest, blocks - 1):
        yield [[head]] + part
    for part in _partitions_into(rest, blocks):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1 :]


def sparsest_partition(process: PairProcess, parts: int) -> float:
    """Minimum over i-partitions of the worst block conductance.

    Brute force over all set partitions of X into exactly ``parts``
    blocks, so the space is capped at 10 items.
    """
    n = process.n
    if not 1 <= parts <= n:
        raise ValueError(f"parts must be in [1, {n}], got {parts}")
    if n > 10:
        raise ValueError(f"brute-force partition search is capped at 10 items, got {n}")
    if parts == 1:
        return 0.0
    best = np.inf
    for partition in _partitions_into(list(range(n)), parts):
        worst = max(dirichlet_conductance(process, block) for block in partition)
        best = min(best, worst)
    return float(best)


@dataclass
class ProbeTask:
    """Ground-truth labels over a finite space for linear probing."""

    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if self.n_classes < 2:
            raise ValueError("probing needs at least 2 classes")
        present = set(self.labels.tolist())
        missing = set(range(self.n_classes)) - present
        if missing or not present <= set(range(self.n_classes)):
            raise ValueError(
                f"labels must cover classes 0..{self.n_classes - 1} exactly; "
                f"missing {sorted(missing)}"
            )


def linear_probe_error(
    phi: EmbeddingTable,
    task: ProbeTask,
    p,
    config: OptimizerConfig | None = None,
) -> float:
    """p-weighted error of a linear softmax classifier on the embeddings.

    The classifier is trained by the package optimizer on the p-weighted
    cross-entropy, then scored by argmax. Because training is a surrogate
    for the definition's exact minimization over weight matrices, the
    returned value is an upper bound on the true linear probing error.
    """
    p = np.asarray(p, dtype=float)
    n, d = phi.rows.shape
    if task.labels.shape[0] != n or p.shape[0] != n:
        raise ValueError("embeddings, labels, and weights must share length")
    c = task.n_classes
    onehot = np.zeros((n, c))
    onehot[np.arange(n), task.labels] = 1.0
    cfg = config or OptimizerConfig(tol=1e-8, max_iter=5000)
    w0 = Stream(cfg.seed).uniform(c * d, -0.1, 0.1)

    def objective(flat):
        w = flat.reshape(c, d)
        logits = phi.rows @ w.T
        probs = softmax(logits)
        safe = np.maximum(probs[np.arange(n), task.labels], 1e-300)
        loss = float(-(p * np.log(safe)).sum())
        grad = ((probs - onehot) * p[:, None]).T @ phi.rows
        return loss, grad.reshape(-1)

    w, _ = minimize(objective, w0, cfg)
    logits = phi.rows @ w.reshape(c, d).T
    predicted = np.argmax(logits, axis=1)
    return float(p[predicted != task.labels].sum())
