"""Named verification suites behind `kc verify`.

Each suite re-derives a theoretical optimum with an independent oracle
(closed form, brute force, or the dense eigensolver) and compares the
trained or sampled result against it at a pinned tolerance. Every check
is normalized to "observed <= tolerance": quantities that are naturally
lower bounds (cosines, monotone orderings) are reported as deficits or
regression amounts so one rule covers the whole report.

Reports carry no timestamps, so a suite re-run at the same seed is
byte-identical; provenance lives in the RunManifest instead.
"""

from __future__ import annotations

import json

import numpy as np

from .contrastive import (
    EmbeddingTable,
    bilinear_scores,
    corpus_stats,
    infonce_tv_gap,
    pair_process,
    row_normalized,
    shifted_pmi_matrix,
    spectral_loss,
    train_infonce,
    train_nce,
    train_sgns,
    train_spectral,
)
from .eigenfunctions import train_eigenfunctions
from .encoders import OptimizerConfig
from .kernel_approx import (
    nystrom_eigenfunction,
    nystrom_fit,
    nystrom_gram_approx,
    rff_features,
    rff_sample,
    sample_landmarks,
)
from .kernels import (
    FiniteSpace,
    gaussian_kernel,
    gram,
    mercer_decompose,
    table_kernel,
)
from .linear_dr import low_rank_factor
from .manifold import (
    build_graph,
    graph_laplacian,
    laplacian_eigenmaps,
    lle_weights,
    shortest_paths,
)
from .rng import Stream

__all__ = ["SUITE_NAMES", "UnknownSuiteError", "run_suite", "report_json"]


class UnknownSuiteError(ValueError):
    """Asked for a verification suite that does not exist."""


def _check(name: str, observed: float, tolerance: float) -> dict:
    observed = float(observed)
    return {
        "name": name,
        "observed": observed,
        "tolerance": float(tolerance),
        "passed": bool(observed <= tolerance),
    }


def _report(suite: str, seed: int, checks: list) -> dict:
    return {
        "suite": suite,
        "seed": int(seed),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def _suite_sgns_pmi(seed: int) -> dict:
    """SGNS factorization lands on the (shifted) PMI matrix.

    The corpus is chosen so every ordered pair of the three-word
    vocabulary co-occurs, keeping PMI finite everywhere; with d equal to
    the vocabulary size the factorization is unconstrained.
    """
    tokens = "a a b a c a b b c b c c a c b".split()
    stats = corpus_stats(tokens, window=1)
    cfg = OptimizerConfig(seed=seed, tol=1e-11, max_iter=30000)
    checks = []
    for k, activation in ((1.0, "sigmoid"), (4.0, "sigmoid"), (4.0, "k_sigmoid")):
        phi, psi = train_sgns(stats, d=stats.space.n, k=k, config=cfg, activation=activation)
        product = phi.rows @ psi.rows.T
        shift = k if activation == "sigmoid" else 1.0
        target = shifted_pmi_matrix(stats, shift)
        dev = float(np.abs(product - target).max())
        checks.append(_check(f"k={k:g} {activation} max PMI deviation", dev, 1e-3))
    return _report("sgns-pmi", seed, checks)


def _suite_classification(seed: int) -> dict:
    """NCE's fitted score equals the log count ratio, shifted per activation."""
    pos = np.array([6.0, 2.0, 4.0])
    neg = np.array([4.0, 12.0, 8.0])  # k positives' worth of noise per item set
    k = 2.0
    p1 = pos / pos.sum()
    p0 = neg / neg.sum()
    log_ratio = np.log(p1 / p0)
    cfg = OptimizerConfig(seed=seed, tol=1e-12, max_iter=20000)
    theta_k = train_nce(pos, neg, k, activation="k_sigmoid", config=cfg)
    theta_s = train_nce(pos, neg, k, activation="sigmoid", config=cfg)
    checks = [
        _check(
            "k_sigmoid score vs log(p1/p0)",
            np.abs(theta_k - log_ratio).max(),
            1e-3,
        ),
        _check(
            "sigmoid score vs log(p1/p0) - log k",
            np.abs(theta_s - (log_ratio - np.log(k))).max(),
            1e-3,
        ),
    ]
    return _report("classification", seed, checks)


def _eight_item_process():
    p = np.array([3.0, 2.0, 1.0, 1.0, 1.0, 2.0, 3.0, 3.0])
    p = p / p.sum()
    n = 8
    augment = 0.6 * np.eye(n) + 0.4 / n
    return pair_process(FiniteSpace(items=list("abcdefgh"), p=p), augment)


def _suite_spectral_ey(seed: int) -> dict:
    """Spectral loss is the factorization error up to a constant; training
    recovers the best rank-d factor of the normalized pair matrix."""
    process = _eight_item_process()
    abar = process.abar.values
    n = process.n
    stream = Stream(seed)
    diffs = []
    root = np.sqrt(process.marginal)
    for _ in range(20):
        rows = stream.uniform(n * n, -2.0, 2.0).reshape(n, n)
        f = root[:, None] * rows
        err = float(np.square(abar - f @ f.T).sum())
        diffs.append(spectral_loss(EmbeddingTable(rows), process) - err)
    diffs = np.asarray(diffs)
    rel_var = float(diffs.var() / diffs.mean() ** 2)

    cfg = OptimizerConfig(seed=seed, tol=1e-12, max_iter=40000)
    full = train_spectral(process, d=n, config=cfg)
    f_full = root[:, None] * full.rows
    full_err = float(np.linalg.norm(abar - f_full @ f_full.T))

    rank1 = train_spectral(process, d=1, config=cfg)
    f_one = root[:, None] * rank1.rows
    target = low_rank_factor(process.abar, 1)
    rank1_err = float(np.linalg.norm(target @ target.T - f_one @ f_one.T))

    checks = [
        _check("loss minus factor error, relative variance", rel_var, 1e-18),
        _check("full-rank F F^T vs normalized pair matrix", full_err, 1e-3),
        _check("rank-1 F F^T vs Eckart-Young factor", rank1_err, 1e-3),
    ]
    return _report("spectral-ey", seed, checks)


def _suite_infonce_kplus(seed: int) -> dict:
    """Trained InfoNCE conditionals match the positive-pair kernel's."""
    p = np.array([0.4, 0.3, 0.2, 0.1])
    augment = np.full((4, 4), 0.1) + 0.6 * np.eye(4)
    process = pair_process(FiniteSpace(items=list("wxyz"), p=p), augment)
    cfg = OptimizerConfig(seed=seed, tol=1e-9, max_iter=40000)
    f, g = train_infonce(process, d=4, tau=1.0, b=2, config=cfg, mode="untied")
    scores = bilinear_scores(f, g, tau=1.0)
    tv = infonce_tv_gap(scores, process, b=2)
    model_cond = row_normalized(np.exp(scores))
    true_cond = row_normalized(process.k_plus.values)
    checks = [
        _check("worst-case conditional TV gap", tv, 1e-2),
        _check(
            "normalized exp-scores vs normalized K_plus",
            np.abs(model_cond - true_cond).max(),
            1e-2,
        ),
    ]
    return _report("infonce-kplus", seed, checks)


def _nystrom_table(seed: int):
    pts = np.sort(Stream(seed).uniform(16, 0.0, 6.0))[:, None]
    table = gram(gaussian_kernel(0.5), pts)
    return table_kernel(table), table


def _suite_nystrom(seed: int) -> dict:
    """Full landmark sampling reproduces the weighted Mercer decomposition,
    and reconstruction error shrinks as landmarks are added."""
    kernel, table = _nystrom_table(seed)
    n = 16
    weights = np.full(n, 1.0 / n)
    eigenvalues, functions = mercer_decompose(table, weights)
    model = nystrom_fit(kernel, list(range(n)), d=n)
    eig_dev = float(np.abs(model.eigenvalues / n - eigenvalues).max())

    floor = 1e-5 * float(eigenvalues[0])
    fun_dev = 0.0
    for i in range(model.usable_rank):
        if eigenvalues[i] <= floor:
            break
        ext = np.asarray([nystrom_eigenfunction(model, i, z) for z in range(n)])
        ref = functions[:, i]
        if np.dot(ext, ref) < 0.0:
            ext = -ext
        fun_dev = max(fun_dev, float(np.abs(ext - ref).max()))

    medians = []
    for m in (4, 8, 16):
        errs = []
        for trial in range(20):
            idx = sample_landmarks(n, m, seed + 100 + trial)
            sub = nystrom_fit(kernel, idx.tolist(), d=m)
            approx = nystrom_gram_approx(sub, list(range(n)))
            errs.append(float(np.abs(approx - table.values).max()))
        medians.append(float(np.median(errs)))
    regression = max(0.0, max(b - a for a, b in zip(medians, medians[1:])))

    checks = [
        _check("full-sampling eigenvalue deviation", eig_dev, 1e-8),
        _check("full-sampling eigenfunction deviation", fun_dev, 1e-8),
        _check("median reconstruction error regression over M", regression, 1e-12),
    ]
    return _report("nystrom", seed, checks)


def _suite_rff(seed: int) -> dict:
    """Random features hit the Gaussian kernel within the additive bound."""
    kernel = gaussian_kernel(1.0)
    model = rff_sample(1.0, 2000, 2, seed)
    stream = Stream(seed + 1)
    pts = stream.uniform(400, -1.5, 1.5).reshape(100, 2, 2)
    worst = 0.0
    for x, z in pts:
        approx = float(np.dot(rff_features(model, x), rff_features(model, z)))
        exact = np.exp(-float(np.square(x - z).sum()) / 2.0)
        worst = max(worst, abs(approx - exact))

    x = np.zeros(2)
    z = np.array([np.sqrt(2.0 * np.log(2.0)), 0.0])
    exact = 0.5
    failures = 0
    trials = 1000
    for t in range(trials):
        m = rff_sample(1.0, 500, 2, seed + 10 + t)
        approx = float(np.dot(rff_features(m, x), rff_features(m, z)))
        if abs(approx - exact) >= 0.1:
            failures += 1
    bound = 2.0 * np.exp(-500 * 0.01 / 2.0) + 0.01
    checks = [
        _check("max kernel error at d=2000 over 100 pairs", worst, 0.15),
        _check("failure rate at eps=0.1, d=500", failures / trials, bound),
    ]
    return _report("rff", seed, checks)


def _suite_manifold(seed: int) -> dict:
    """Geodesics, reconstruction-weight identities, and Laplacian constraints."""
    theta = np.linspace(0.0, np.pi, 200)
    circle = np.column_stack((np.cos(theta), np.sin(theta)))
    g = build_graph(circle, eps=0.15)
    geo = shortest_paths(g).values
    arc = np.abs(theta[:, None] - theta[None, :])
    mask = ~np.eye(200, dtype=bool)
    geo_rel = float((np.abs(geo - arc)[mask] / arc[mask]).max())

    jitter = Stream(seed).uniform(80, -0.2, 0.2)
    t = np.linspace(0.8, 5.5, 80) + jitter * 0.05
    cloud = np.column_stack((t * np.cos(t), t * np.sin(t), np.sin(3 * t)))
    w = lle_weights(cloud, k=6)
    rowsum_dev = float(np.abs(w.sum(axis=1) - 1.0).max())
    iw = np.eye(80) - w
    m1 = float(np.abs(iw.T @ (iw @ np.ones(80))).max())

    line = np.arange(12.0)[:, None]
    emb = laplacian_eigenmaps(line, d=2, t=1.0, eps=1.5)
    lap = graph_laplacian(build_graph(line, eps=1.5, weight="gaussian", t=1.0))
    dmat = np.diag(lap.degrees)
    ortho = float(np.abs(emb.T @ dmat @ emb - np.eye(2)).max())
    centering = float(np.abs(emb.T @ lap.degrees).max())
    diffs = np.diff(emb[:, 0])
    monotone_violation = max(0.0, min(float(diffs.max()), float((-diffs).max())))

    checks = [
        _check("half-circle geodesic relative error", geo_rel, 0.05),
        _check("LLE weight row-sum residual", rowsum_dev, 1e-8),
        _check("LLE M1 residual", m1, 1e-10),
        _check("eigenmap D-orthonormality residual", ortho, 1e-8),
        _check("eigenmap D-centering residual", centering, 1e-8),
        _check("path-graph monotonicity violation", monotone_violation, 0.0),
    ]
    return _report("manifold", seed, checks)


def _suite_eigenfun(seed: int) -> dict:
    """Sequential training recovers the top of the Mercer spectrum."""
    pts = np.sort(Stream(seed).uniform(8, 0.0, 4.0))[:, None]
    table = gram(gaussian_kernel(1.0), pts)
    weights = np.full(8, 1.0 / 8.0)
    eigenvalues, functions = mercer_decompose(table, weights)
    gaps = (eigenvalues[:3] - eigenvalues[1:4]) / eigenvalues[0]
    if gaps.min() < 0.05:
        raise RuntimeError(
            f"suite construction error: spectral gaps {gaps} too small for recovery"
        )
    cfg = OptimizerConfig(seed=seed, tol=1e-12, max_iter=40000)
    result = train_eigenfunctions(table, weights, d=3, config=cfg)
    est_dev = float(np.abs(result.estimates - eigenvalues[:3]).max())
    cos_deficit = 0.0
    for j in range(3):
        cos = abs(float((result.values[:, j] * weights) @ functions[:, j]))
        cos_deficit = max(cos_deficit, 1.0 - cos)
    ordering = result.estimates
    regression = max(0.0, float((ordering[1:] - ordering[:-1]).max()))
    checks = [
        _check("eigenvalue estimate deviation", est_dev, 1e-2),
        _check("weighted cosine deficit", cos_deficit, 1e-2),
        _check("estimate ordering regression", regression, 1e-3),
    ]
    return _report("eigenfun", seed, checks)


_SUITES = {
    "sgns-pmi": _suite_sgns_pmi,
    "infonce-kplus": _suite_infonce_kplus,
    "spectral-ey": _suite_spectral_ey,
    "nystrom": _suite_nystrom,
    "rff": _suite_rff,
    "manifold": _suite_manifold,
    "eigenfun": _suite_eigenfun,
    "classification": _suite_classification,
}

SUITE_NAMES = tuple(_SUITES)


def run_suite(name: str, seed: int = 0) -> dict:
    """Run one named suite; the report says what was checked and how close."""
    if name not in _SUITES:
        known = ", ".join(SUITE_NAMES)
        raise UnknownSuiteError(f"unknown suite {name!r}; choose one of: {known}")
    return _SUITES[name](int(seed))


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
