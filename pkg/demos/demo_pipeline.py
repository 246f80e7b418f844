"""End-to-end run on a generated corpus.

Generates a small synthetic platform snapshot, runs every pipeline stage
through the CLI, then prints the headline numbers from the artifacts.
Finishes in well under a minute; analysis iteration counts are trimmed
via --set overrides because 150 users need far less sampling than the
defaults assume.

Usage: python demos/demo_pipeline.py [workdir]
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = [sys.executable, "-m", "veriscore.cli"]

FAST = [
    "--set", "topics.n_sweeps=60",
    "--set", "topics.fold_in_sweeps=20",
    "--set", "span.n_sweeps=40",
    "--set", "importance.n_repeats=12",
    "--set", "selection.n_iter=12",
    "--set", "cluster.n_seeds=4",
]


def run(*args):
    sys.stdout.flush()  # keep headers ahead of child output under piping
    proc = subprocess.run(CLI + list(args), text=True)
    if proc.returncode != 0:
        sys.exit(proc.returncode)


def main() -> None:
    work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="veriscore_demo_"))
    data = work / "data"
    out = work / "out"

    print(f"== generating a 150-user corpus under {data}")
    run("generate-demo", "--out", str(data), "--n-users", "150", "--seed", "7")

    print("\n== running every stage")
    run("all", "--config", str(data / "config.toml"), "--output-dir", str(out), *FAST)

    metrics = json.loads((out / "metrics.json").read_text())
    print("\n== held-out classification")
    for name in ("gbdt", "logistic"):
        m = metrics[name]
        print(f"  {name:8s} auc={m['auc']:.3f} accuracy={m['accuracy']:.3f} f1={m['f1']:.3f}")

    importance = (out / "importance.csv").read_text().splitlines()
    print("\n== top five features by permuted-retrain rank")
    for line in importance[1:6]:
        feature, mean_imp, mean_rank, _ = line.split(",")
        print(f"  {feature:32s} mean_rank={float(mean_rank):6.2f} importance={float(mean_imp):.4f}")

    meta = json.loads((out / "cluster_meta.json").read_text())
    print(f"\n== clustering chose k={meta['chosen_k']} (no_clear_knee={meta['no_clear_knee']})")

    manifest = json.loads((out / "run_manifest.json").read_text())
    total = sum(s["wall_time_s"] for s in manifest["stages"].values())
    print(f"\n== {len(manifest['stages'])} stages, {total:.1f}s total; artifacts in {out}")


if __name__ == "__main__":
    main()
