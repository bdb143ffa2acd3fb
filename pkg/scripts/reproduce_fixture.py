"""Fit J=10 on the 10-patient table and print per-patient predictions."""
import argparse

import numpy as np

from rbfn import TrainConfig, encode, fixture_path, predict_proba, read_csv, train


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hidden", type=int, default=10)
    ap.add_argument("--centers", default="kmeans", choices=["kmeans", "random_subset"])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    records = read_csv(fixture_path())
    m, y = encode(records, "prolong")
    model = train(m, y, TrainConfig(n_hidden=args.hidden, center_strategy=args.centers, seed=args.seed))
    proba = predict_proba(model, m.values)
    print(f"{'id':<3} {'table':<6} {'pred':<6} " + " ".join(f"p[{c}]" for c in model.class_names))
    for rec, p in zip(records, proba):
        pred = model.class_names[int(np.argmax(p))]
        print(f"{rec.id:<3} {rec.prolong:<6} {pred:<6} " + " ".join(f"{v:7.4f}" for v in p))
    acc = np.mean(np.argmax(proba, axis=1) == y.indices)
    print(f"training accuracy: {acc:.3f}")


if __name__ == "__main__":
    main()
