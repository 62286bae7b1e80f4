"""Unroll a swiss roll four ways and score each against the known chart.

The sampler hands back the latent coordinates (arc length, height), so
instead of eyeballing plots we can correlate each method's output with
the truth. PCA is the straw man: the roll's wrapping means a linear
projection cannot separate turns that sit above each other.

LLE deserves a footnote on this dataset. With 8 neighbors in 3-D every
point sits in the affine hull of its neighborhood, so the reconstructions
are exact and the embedding is a linear view of the ambient cloud rather
than an unrolling; its scores land near PCA's for the same reason.

Act two moves LLE to its home turf, a flat sheet in 3-D, where the
exactly reconstructed coordinates are the answer it returns. The chart
comes back only up to rotation (any rotation of it reconstructs equally
well), so the score there is the residual of regressing each latent
coordinate on the embedding plane, not a per-axis correlation.
"""

import numpy as np

from kernelcontrast.linear_dr import pca_fit, pca_transform
from kernelcontrast.manifold import (
    isomap,
    laplacian_eigenmaps,
    lle_embed,
    lle_weights,
    swiss_roll,
)
from kernelcontrast.rng import Stream


def best_corr(column, latent):
    """Max |correlation| of one embedding column against either latent axis."""
    return max(
        abs(float(np.corrcoef(column, latent[:, j])[0, 1])) for j in range(2)
    )


def main():
    data, latent = swiss_roll(300, noise=0.0, seed=3, t_range=(3.0, 9.0), height=6.0)
    print(f"swiss roll: {data.shape[0]} points, arc length spans "
          f"{latent[:, 0].min():.1f} .. {latent[:, 0].max():.1f}")
    print()

    model = pca_fit(data, 2)
    runs = {"pca": pca_transform(model, data)}
    runs["isomap"] = isomap(data, 2, knn=6)
    runs["lle"] = lle_embed(lle_weights(data, k=8), 2)
    runs["eigenmaps"] = laplacian_eigenmaps(data, 2, t=2.0, knn=8)

    print(f"{'method':<10} {'corr(axis0)':>12} {'corr(axis1)':>12}")
    for name, emb in runs.items():
        print(f"{name:<10} {best_corr(emb[:, 0], latent):12.3f} "
              f"{best_corr(emb[:, 1], latent):12.3f}")
    print()
    print("isomap's first coordinate is the arc length; pca cannot get there")
    print("because the roll overlaps itself in any linear view.")

    # act two: LLE on a flat sheet, its home turf
    u = Stream(8).uniform(200, -1.0, 1.0)
    v = Stream(9).uniform(200, -1.0, 1.0)
    sheet = np.column_stack((u, v, 0.4 * u - 0.2 * v))
    w = lle_weights(sheet, k=6)
    recon = float(np.median(np.linalg.norm(w @ sheet - sheet, axis=1)))
    emb = lle_embed(w, 2)
    coords = np.column_stack((u - u.mean(), v - v.mean()))
    q, _ = np.linalg.qr(emb)
    resid = coords - q @ (q.T @ coords)
    r2 = 1.0 - (resid**2).sum(axis=0) / (coords**2).sum(axis=0)
    print()
    print(f"flat sheet: median LLE reconstruction error {recon:.1e}")
    print(f"sheet coordinates regressed on the embedding plane: "
          f"R^2 {r2[0]:.6f} / {r2[1]:.6f}")
    print("the chart is recovered exactly, up to an in-plane rotation.")


if __name__ == "__main__":
    main()
