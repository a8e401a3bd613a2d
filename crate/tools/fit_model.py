"""Fit the bundled RBF support vector regressor from a feature table.

Usage:
    cargo run --release -p lab-core --example training_set > tools/training.csv
    python3 tools/fit_model.py tools/training.csv crates/core/models/lab_vmaf_v1.json

Features are min-max scaled to [-1, 1]; targets likewise, with the inverse
mapping stored as score_slope / score_intercept.
"""

import json
import sys

import numpy as np
import pandas as pd
from sklearn.svm import SVR

FEATURES = ["vif_scale0", "vif_scale1", "vif_scale2", "vif_scale3", "dlm", "motion"]
GAMMA = 0.05
C = 4.0
EPSILON = 0.02


def main(table_path, model_path):
    df = pd.read_csv(table_path)
    x = df[FEATURES].to_numpy(dtype=float)
    y = df["target"].to_numpy(dtype=float)

    lo, hi = x.min(axis=0), x.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    slope = 2.0 / span
    intercept = -1.0 - lo * slope
    xn = x * slope + intercept

    y_lo, y_hi = 0.0, 100.0
    score_slope = (y_hi - y_lo) / 2.0
    score_intercept = (y_hi + y_lo) / 2.0
    yn = (y - score_intercept) / score_slope

    svr = SVR(kernel="rbf", gamma=GAMMA, C=C, epsilon=EPSILON)
    svr.fit(xn, yn)
    pred = svr.predict(xn) * score_slope + score_intercept
    rmse = float(np.sqrt(np.mean((pred - y) ** 2)))
    corr = float(np.corrcoef(pred, y)[0, 1])
    print(f"support vectors: {len(svr.support_)}  rmse: {rmse:.3f}  pearson: {corr:.4f}", file=sys.stderr)

    model = {
        "version": "lab-vmaf-svr/1",
        "feature_names": FEATURES,
        "norm": [
            {"slope": float(s), "intercept": float(i), "clip_low": None, "clip_high": None}
            for s, i in zip(slope, intercept)
        ],
        "gamma": GAMMA,
        "bias": float(svr.intercept_[0]),
        "support_vectors": [[float(v) for v in row] for row in svr.support_vectors_],
        "dual_coefs": [float(c) for c in svr.dual_coef_[0]],
        "score_slope": score_slope,
        "score_intercept": score_intercept,
        "score_clip": [0.0, 100.0],
        "score_transform": None,
    }
    with open(model_path, "w") as fh:
        json.dump(model, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
