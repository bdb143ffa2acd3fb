"""Cross-validated accuracy per hidden size on a synthetic cohort, with the one-SE choice."""
import argparse

from rbfn import encode, select_hidden_size
from rbfn.synthetic import SyntheticSpec, generate_patients


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--grid", default="2,5,10,20,40,80")
    ap.add_argument("--folds", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    records = generate_patients(SyntheticSpec(n=args.n, seed=args.seed, label_noise=args.noise))
    m, y = encode(records, "prolong")
    sel = select_hidden_size(m, y, [int(g) for g in args.grid.split(",")], args.folds, args.seed)
    print(f"{'J':>4}  {'mean acc':>8}  {'se':>6}")
    for J, mean, se, _ in sel.table:
        mark = "  <- chosen" if J == sel.chosen else ""
        print(f"{J:>4}  {mean:8.4f}  {se:6.4f}{mark}")


if __name__ == "__main__":
    main()
