"""Picking the cluster count with the knee rule.

Plants 8 well-separated Gaussian blobs, sweeps k from 2 to 12, and shows
the inertia profile the knee rule reads: near-linear decline until the
true count, then flat, with the bend picked out by the largest second
difference.

Usage: python demos/demo_cluster.py
"""

import numpy as np

from veriscore.cluster import choose_k

TRUE_K = 8


def main() -> None:
    rng = np.random.default_rng(3)
    centers = 10.0 * np.eye(TRUE_K)
    X = np.vstack([c + rng.normal(0, 0.5, size=(50, TRUE_K)) for c in centers])

    report = choose_k(X, list(range(2, 13)), seed=0, n_seeds=5)
    print(f"{X.shape[0]} points, {TRUE_K} planted blobs\n")
    print("   k     inertia   second difference")
    peak = max(report.second_differences)
    for i, k in enumerate(report.k_values):
        dd = ""
        if 0 < i < len(report.k_values) - 1:
            v = report.second_differences[i - 1]
            bar = "#" * max(0, int(30 * v / peak))
            dd = f"{v:12.1f}  {bar}"
        print(f"  {k:2d}  {report.inertias[i]:10.1f}{dd}")

    print(f"\nchosen k = {report.chosen_k} (no_clear_knee={report.no_clear_knee}, "
          f"variance explained {report.variance_explained:.3f})")


if __name__ == "__main__":
    main()
