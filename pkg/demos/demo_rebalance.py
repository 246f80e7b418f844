"""Class rebalancing on a lopsided two-blob problem.

Shows what each method does to a 20:160 imbalance: ADASYN concentrates
synthetic minority points where majority neighbors crowd in, SMOTE-Tomek
additionally deletes majority points that sit nose-to-nose with minority
ones across the class border.

Usage: python demos/demo_rebalance.py
"""

import numpy as np

from veriscore.rebalance import rebalance_dataset, tomek_links


def describe(name: str, ds) -> None:
    n_pos = int((ds.y == 1).sum())
    n_neg = int((ds.y == 0).sum())
    kinds = {str(k): int((ds.provenance == k).sum()) for k in np.unique(ds.provenance)}
    print(f"  {name:10s} -> {n_pos} minority / {n_neg} majority, provenance {kinds}")


def main() -> None:
    rng = np.random.default_rng(4)
    X = np.vstack([
        rng.normal(0.0, 0.8, size=(20, 2)),   # minority, overlaps the majority edge
        rng.normal(1.8, 1.0, size=(160, 2)),
    ])
    y = np.array([1] * 20 + [0] * 160)
    print(f"before: {int((y == 1).sum())} minority / {int((y == 0).sum())} majority")

    links = tomek_links(X, y)
    print(f"\n{len(links)} tomek links straddle the border:")
    for i, j in links:
        print(f"  rows {i:3d} (label {y[i]}) <-> {j:3d} (label {y[j]})")

    print("\nafter rebalance:")
    for method in ("adasyn", "smotetomek"):
        describe(method, rebalance_dataset(X, y, method=method, k=5, seed=0))

    # every ADASYN synthetic interpolates two minority originals
    ds = rebalance_dataset(X, y, method="adasyn", k=5, seed=0)
    synth = ds.X[ds.provenance == "adasyn"]
    minority = X[y == 1]
    span = (minority.min(axis=0), minority.max(axis=0))
    inside = np.all((synth >= span[0]) & (synth <= span[1]), axis=1).mean()
    print(f"\n{synth.shape[0]} synthetics, {inside:.0%} inside the minority bounding box")


if __name__ == "__main__":
    main()
