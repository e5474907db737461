#!/usr/bin/env python3
"""Regenerate the bundled toy dataset and synthetic backtest panel under data/."""
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"


def write_csv(path, header, rows, fmt="{:.10g}"):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt.format(v) if not isinstance(v, str) else v for v in row) + "\n")


def toy(rng):
    p, n = 40, 6
    x = rng.standard_normal((p, 2))
    sectors = rng.integers(0, 4, p)
    names = [f"s{j:02d}" for j in range(p)]
    same = (sectors[:, None] == sectors[None, :]).astype(float)
    np.fill_diagonal(same, 0.0)
    sigma = np.eye(p) + 0.3 * same / same.sum(axis=1).max() * 3
    sigma += 0.2 * np.outer(x[:, 0], x[:, 0]) / p
    root = np.linalg.cholesky(sigma)
    y = rng.standard_normal((n, p)) @ root.T
    d = ROOT / "toy"
    write_csv(d / "responses.csv", names, y)
    write_csv(d / "covariates.csv", ["size", "value"], x)
    write_csv(d / "sectors.csv", ["subject", "label"], [[n_, f"sector{s}"] for n_, s in zip(names, sectors)])
    with open(d / "edges.txt", "w") as f:
        f.write("# supplier links\n")
        for j in range(0, p - 1, 3):
            f.write(f"{j} {j + 1}\n")


def panel(rng):
    t, p = 96, 24
    names = [f"a{j:02d}" for j in range(p)]
    f = rng.normal(0.005, 0.04, (t, 3))
    b = rng.normal(1.0, 0.4, (p, 3)) * np.array([1.0, 0.5, 0.3])
    eps = rng.normal(0.0, 0.03, (t, p))
    r = f @ b.T + eps
    d = ROOT / "panel"
    write_csv(d / "returns.csv", names, r)
    write_csv(d / "factors.csv", ["mkt", "smb", "hml"], f)
    write_csv(d / "characteristics.csv", ["beta_mkt", "beta_smb", "beta_hml"], b)
    write_csv(d / "caps.csv", ["cap"], rng.lognormal(2.0, 1.0, (p, 1)))
    write_csv(d / "sectors.csv", ["subject", "label"], [[n_, f"ind{j % 5}"] for j, n_ in enumerate(names)])


if __name__ == "__main__":
    rng = np.random.default_rng(20240611)
    toy(rng)
    panel(rng)
