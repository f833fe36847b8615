"""Classification scenario grid: logistic GLM vs uniform vs F-weighted RSSL vs random forest.

    python3 scripts/run_classification_grid.py --replications 20 --out runs/classification
"""

import argparse
import json
from pathlib import Path

from rssl.evaluation import BenchSettings, avte, comparison_csv, comparison_rows, format_comparison
from rssl.forest import ForestConfig
from rssl.synthetic import scenario_grid
from rssl.weighting import Scheme


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--learners", type=int, default=450)
    ap.add_argument("--trees", type=int, default=450)
    ap.add_argument("--replications", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("runs/classification"))
    args = ap.parse_args()

    settings = BenchSettings(learners=args.learners, forest=ForestConfig(trees=args.trees), replications=args.replications)
    methods = ["single", "uniform", "adaptive-fstat", "rf"]
    reports = []
    for cfg in scenario_grid("classification", seed=args.seed):
        print(f"running {cfg.name}", flush=True)
        reports.append(avte(cfg, methods, settings, args.seed))
    rows = comparison_rows(reports, [Scheme.FSTAT])
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "table.txt").write_text(format_comparison(rows, reports[0].task), encoding="utf-8")
    (args.out / "table.csv").write_text(comparison_csv(rows), encoding="utf-8")
    (args.out / "reports.json").write_text(
        json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True), encoding="utf-8"
    )
    print(format_comparison(rows, reports[0].task))


if __name__ == "__main__":
    main()
