"""Regenerate the bundled 20-entity smoke dataset (long format + targets)."""

import argparse
from pathlib import Path

from freshx import ingest
from freshx.synth import gen_two_class

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "freshx" / "data"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=DATA_DIR)
    parser.add_argument("--seed", type=int, default=20160718)
    args = parser.parse_args()
    dataset, target = gen_two_class(20, 64, 2.0, args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    ingest.write_long_format(dataset, args.out_dir / "smoke_long.csv")
    ingest.write_targets(target, dataset.entity_order, args.out_dir / "smoke_targets.csv")
    print(f"wrote smoke data to {args.out_dir}")


if __name__ == "__main__":
    main()
