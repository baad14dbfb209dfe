"""Fit the bundled linear priority models on impartial-culture profiles.

Each alternative of each sampled profile is one example: its feature vector
(see ``STV_FEATURES`` / ``RP_FEATURES``) labelled by whether it is a
PUT-winner.  A logistic regression then gives the bias and weights.

    python3 scripts/fit_linear_model.py --rule stv --profiles 400 --write
"""
import argparse
from pathlib import Path

import numpy as np
from sklearn.linear_model import LogisticRegression

from putwin.priority import LinearModel
from putwin.profiles import impartial_culture
from putwin.rp import RP_FEATURES, put_rp, rp_features
from putwin.stv import STV_FEATURES, put_stv, stv_features
from putwin.trace import Budget

DATA = Path(__file__).resolve().parent.parent / "src" / "putwin" / "data"
RULES = {
    "stv": (stv_features, put_stv, STV_FEATURES),
    "rp": (rp_features, put_rp, RP_FEATURES),
}


def samples(rule, m, n, count, seed):
    features, solve, _ = RULES[rule]
    rng = np.random.default_rng(seed)
    X, y = [], []
    for _ in range(count):
        p = impartial_culture(m, n, rng)
        res = solve(p, budget=Budget(time_limit=60))
        if not res.complete:
            continue
        X.extend(features(p))
        y.extend(int(c in res.winners) for c in range(m))
    return np.array(X), np.array(y)


def fit(X, y) -> LinearModel:
    clf = LogisticRegression().fit(X, y)
    return LinearModel(float(clf.intercept_[0]), tuple(float(w) for w in clf.coef_[0]))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rule", choices=sorted(RULES), required=True)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--profiles", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--write", action="store_true", help="overwrite the bundled weight file")
    args = ap.parse_args(argv)

    X, y = samples(args.rule, args.m, args.n, args.profiles, args.seed)
    model = fit(X, y)
    names = RULES[args.rule][2]
    print(f"{len(y)} examples, {y.mean():.1%} positive")
    print(f"bias {model.bias:+.4f}")
    for name, w in zip(names, model.weights):
        print(f"{name:>24} {w:+.4f}")
    if args.write:
        path = DATA / f"{args.rule}_linear.txt"
        header = "".join(f"# {i}: {name}\n" for i, name in enumerate(("bias", *names)))
        path.write_text(header + model.dumps())
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
