"""Run the bundled use case (optimization + infrastructure layers) and print the result."""
import argparse
from importlib import resources

from iacopt import load_catalogue, optimize
from iacopt.moea import AlgoParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--catalogue", help="catalogue JSON (default: bundled reference catalogue)")
    args = ap.parse_args()

    data = resources.files("iacopt") / "data"
    text = (data / "use_case.doml").read_text()
    catalogue = load_catalogue(args.catalogue or data / "reference_catalogue.json")
    result = optimize(text, catalogue, AlgoParams(seed=args.seed))
    print(result.text)
    print(result.report.summary())


if __name__ == "__main__":
    main()
