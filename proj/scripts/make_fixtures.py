#!/usr/bin/env python3
"""Regenerate the synthetic sector fixtures under tests/fixtures/.

Each fixture is a close-price panel for ten NSE-style tickers covering a
2016-2020 training window plus a Jan-Jul 2021 holdout, engineered so that:

  * realized annual return / volatility per ticker equal the published
    sector figures exactly (sample statistics, 250-day annualization);
  * the training-return correlation matrix has a prescribed spectrum, so
    seven components reach the 80% explained-variance threshold with the
    published cumulative figure;
  * the holdout entry/exit prices reproduce the published six-month returns
    for the optimum-risk and eigen portfolios that the pipeline itself
    selects at seed 42.

The last property requires the built CLI: the script runs `analyze` on a
stub panel, reads the selected weights from report.json, then solves for
exit prices hitting the target returns.

Usage: python3 scripts/make_fixtures.py --cli build/tools/frontierlab
"""

import argparse
import datetime as dt
import json
import pathlib
import subprocess
import sys
import tempfile

import numpy as np
from scipy import stats as sps

TRAIN_START = dt.date(2016, 1, 1)
TRAIN_END = dt.date(2020, 12, 31)
TEST_START = dt.date(2021, 1, 1)
TEST_END = dt.date(2021, 7, 1)

SEED = 42          # pipeline seed the holdout targets are calibrated for
SAMPLES = 10000

SECTORS = {
    "auto": {
        "tickers": ["MARUTI", "M&M", "TATAMOTORS", "BAJAJ-AUTO", "HEROMOTOCO",
                    "EICHERMOT", "BHARATFORG", "BALKRISIND", "ASHOKLEY", "MRF"],
        "annual_return": [15.41, 8.88, -15.46, 8.40, 3.00, 6.13, 8.26, 4.11, 7.65, 13.88],
        "annual_risk": [31.36, 31.79, 47.34, 26.10, 30.38, 34.31, 37.52, 36.80, 44.54, 27.45],
        "entry": [7691, 732, 187, 3481, 3103, 2543, 538, 1642, 99, 76022],
        "exit": [7584, 779, 344, 4205, 2923, 2675, 766, 2275, 122, 81018],
        "cum7": 0.8393,
        "target_opt": 0.1817,
        "target_eigen": 0.2152,
    },
    "banking": {
        "tickers": ["HDFCBANK", "ICICIBANK", "KOTAKBANK", "AXISBANK", "SBIN",
                    "INDUSINDBK", "AUBANK", "BANDHANBNK", "FEDERALBNK", "IDFCFIRSTB"],
        "annual_return": [25.27, 24.43, 29.65, 9.95, 3.78, 0.06, 9.51, -13.86, 4.76, -11.11],
        "annual_risk": [23.61, 36.66, 28.30, 38.86, 37.79, 46.37, 42.28, 61.56, 40.81, 40.39],
        "entry": [1425, 528, 1994, 624, 279, 900, 875, 400, 68, 37],
        "exit": [1487, 631, 1716, 746, 420, 1008, 1023, 326, 86, 54],
        "cum7": 0.8755,
        "target_opt": 0.0866,
        "target_eigen": 0.1854,
    },
    "consumer_durable": {
        "tickers": ["TITAN", "CROMPTON", "HAVELLS", "VOLTAS", "DIXON",
                    "BATAINDIA", "RELAXO", "KAJARIACER", "RAJESHEXPO", "WHIRLPOOL"],
        "annual_return": [57.34, 32.59, 30.16, 31.92, 95.09, 40.60, 43.73, 15.52, 8.82, 36.53],
        "annual_risk": [33.71, 32.94, 30.98, 32.65, 40.75, 29.48, 30.83, 32.79, 28.01, 32.49],
        "entry": [1559, 378, 910, 831, 2724, 1574, 828, 709, 485, 2615],
        "exit": [1740, 429, 989, 1013, 4412, 1597, 1139, 988, 565, 2287],
        "cum7": 0.8047,
        "target_opt": 0.2777,
        "target_eigen": 0.1849,
    },
    "fmcg": {
        "tickers": ["HINDUNILVR", "ITC", "NESTLEIND", "TATACONSUM", "BRITANNIA",
                    "DABUR", "GODREJCP", "MARICO", "JUBLFOOD", "COLPAL"],
        "annual_return": [32.35, -2.71, 32.27, 65.03, 27.76, 18.25, 11.98, 12.30, 60.71, 15.14],
        "annual_risk": [23.20, 27.57, 24.90, 35.26, 26.46, 24.87, 30.25, 24.83, 38.90, 22.61],
        "entry": [2388, 214, 18451, 602, 3568, 534, 738, 406, 2793, 1578],
        "exit": [2478, 203, 17646, 756, 3596, 590, 888, 535, 3113, 1708],
        "cum7": 0.8105,
        "target_opt": 0.0953,
        "target_eigen": 0.1073,
    },
    "healthcare": {
        "tickers": ["SUNPHARMA", "DRREDDY", "DIVISLAB", "CIPLA", "APOLLOHOSP",
                    "LUPIN", "AUROPHARMA", "LAURUSLABS", "BIOCON", "CADILAHC"],
        "annual_return": [0.38, 19.25, 51.37, 14.17, 21.83, -6.65, 17.53, 91.03, 34.08, 15.85],
        "annual_risk": [32.93, 28.93, 36.07, 27.98, 33.73, 31.45, 41.47, 35.94, 35.05, 33.91],
        "entry": [596, 5241, 3849, 827, 2415, 1001, 928, 353, 466, 478],
        "exit": [684, 5559, 4436, 978, 3678, 1146, 968, 667, 406, 639],
        "cum7": 0.8398,
        "target_opt": 0.3628,
        "target_eigen": 0.1980,
    },
    "it": {
        "tickers": ["INFY", "TCS", "TECHM", "WIPRO", "HCLTECH",
                    "LTI", "MPHASIS", "MINDTREE", "COFORGE", "OFSS"],
        "annual_return": [27.77, 25.78, 20.24, 23.30, 24.81, 57.38, 32.93, 38.71, 59.47, 3.30],
        "annual_risk": [28.54, 25.81, 31.01, 25.47, 27.54, 33.15, 33.65, 35.94, 43.22, 27.45],
        "entry": [1260, 2928, 978, 388, 951, 3699, 1530, 1659, 2722, 3243],
        "exit": [1560, 3342, 1085, 539, 986, 4017, 2172, 2581, 4194, 3620],
        "cum7": 0.8258,
        "target_opt": 0.2871,
        "target_eigen": 0.2565,
    },
    "metal": {
        "tickers": ["TATASTEEL", "JSWSTEEL", "HINDALCO", "ADANIENT", "VEDL",
                    "COALINDIA", "SAIL", "NMDC", "JINDALSTEL", "APLAPOLLO"],
        "annual_return": [22.03, 27.62, 16.13, 89.18, -1.10, -17.21, 21.70, 1.24, 59.25, 64.77],
        "annual_risk": [38.05, 36.24, 41.66, 51.25, 47.41, 29.39, 46.27, 39.23, 57.06, 37.88],
        "entry": [643, 390, 238, 491, 160, 135, 75, 116, 270, 860],
        "exit": [1164, 681, 379, 1490, 263, 146, 127, 184, 395, 1643],
        "cum7": 0.8976,
        "target_opt": 0.9841,
        "target_eigen": 0.7402,
    },
}


def weekdays(start, end):
    day, out = start, []
    while day <= end:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def build_spectrum(n, cum7):
    """Descending positive eigenvalues for an n=10 correlation matrix whose
    seventh cumulative explained-variance ratio equals cum7, with the sixth
    strictly below 0.80 so that exactly 7 components are selected."""
    assert n == 10 and 0.80 <= cum7 < 1.0
    tail_sum = n * (1.0 - cum7)          # eigenvalues 8..10
    tail_mean = tail_sum / 3.0
    lam7 = max(n * cum7 - 8.0, tail_mean) * 1.08 + 0.02

    head_sum = n * cum7 - lam7           # eigenvalues 1..6, each > lam7
    extra = head_sum - 6.0 * lam7
    assert extra > 0, "head eigenvalues cannot stay above lam7"
    decay = 0.45 ** np.arange(6)
    head = lam7 + extra * decay / decay.sum()

    spread = 0.45 * min(0.98 * lam7 - tail_mean, tail_mean)
    assert spread > 0
    tail = np.array([tail_mean + spread, tail_mean, tail_mean - spread])

    lam = np.concatenate([head, [lam7], tail])
    lam *= n / lam.sum()
    assert np.all(np.diff(lam) < 0) and lam[-1] > 0
    cum = np.cumsum(lam) / n
    assert cum[5] < 0.799 and abs(cum[6] - cum7) < 1e-6
    return lam


def exact_standardized(T, corr, rng):
    """T x n matrix with exact zero column means, unit sample stdevs, and
    sample correlation equal to `corr` (whitening construction)."""
    n = corr.shape[0]
    x = rng.standard_normal((T, n))
    x -= x.mean(axis=0)
    sample_cov = x.T @ x / (T - 1)
    white = x @ np.linalg.inv(np.linalg.cholesky(sample_cov)).T
    z = white @ np.linalg.cholesky(corr).T
    return z


def fmt(x):
    return repr(float(x))


def write_panel(path, dates, tickers, prices):
    with open(path, "w") as f:
        f.write("date," + ",".join(tickers) + "\n")
        for d, row in zip(dates, prices):
            f.write(d.isoformat() + "," + ",".join(fmt(v) for v in row) + "\n")


def write_config(path, name, tickers):
    cfg = {
        "sector_name": name,
        "tickers": tickers,
        "train_start": TRAIN_START.isoformat(),
        "train_end": TRAIN_END.isoformat(),
        "test_start": TEST_START.isoformat(),
        "test_end": TEST_END.isoformat(),
    }
    path.write_text(json.dumps(cfg, indent=2) + "\n")


def run_analyze(cli, config_path, data_path, out_dir):
    cmd = [str(cli), "analyze", "--config", str(config_path), "--data", str(data_path),
           "--seed", str(SEED), "--samples", str(SAMPLES), "--out", str(out_dir)]
    subprocess.run(cmd, check=True, capture_output=True)


def read_weights(report_path, tickers):
    report = json.loads(report_path.read_text())
    opt = report["frontier"]["opt_risk"]["weights"]
    eig = report["pca"]["best"]["weights"]
    w_opt = np.array([opt[t] for t in tickers])
    w_eig = np.array([eig[t] for t in tickers])
    return w_opt, w_eig, report


def make_sector(name, spec, cli, out_dir, rng):
    tickers = spec["tickers"]
    n = len(tickers)
    mu_daily = np.array(spec["annual_return"]) / 100.0 / 250.0
    sigma_daily = np.array(spec["annual_risk"]) / 100.0 / np.sqrt(250.0)
    entry = np.array(spec["entry"], dtype=float)
    exit_published = np.array(spec["exit"], dtype=float)

    train_dates = weekdays(TRAIN_START, TRAIN_END)
    test_dates = weekdays(TEST_START, TEST_END)
    T = len(train_dates) - 1

    lam = build_spectrum(n, spec["cum7"])
    corr = sps.random_correlation.rvs(lam * (n / lam.sum()), random_state=rng)
    z = exact_standardized(T, corr, rng)
    returns = mu_daily + z * sigma_daily
    assert np.all(1.0 + returns > 0.2), "implausible daily move in synthetic returns"

    train_prices = entry * np.cumprod(np.vstack([np.ones(n), 1.0 + returns]), axis=0)
    assert np.all(train_prices > 0)

    config_path = out_dir / f"{name}.json"
    write_config(config_path, name, tickers)

    # Phase A: stub holdout (flat at the entry prices) to extract the weights
    # the pipeline selects from the training data.
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        stub_prices = np.vstack([train_prices, np.tile(entry, (len(test_dates), 1))])
        write_panel(tmp / "stub.csv", train_dates + test_dates, tickers, stub_prices)
        run_analyze(cli, config_path, tmp / "stub.csv", tmp / "out")
        w_opt, w_eig, _ = read_weights(tmp / "out" / name / "report.json", tickers)

    # Phase B: nudge the published gross returns so both selected portfolios
    # hit their target holdout returns exactly (least-squares correction
    # subject to the two linear constraints).
    g0 = exit_published / entry
    A = np.vstack([w_opt, w_eig])
    b = np.array([1.0 + spec["target_opt"], 1.0 + spec["target_eigen"]])
    g = g0 + A.T @ np.linalg.solve(A @ A.T, b - A @ g0)
    assert np.all(g > 0.2), "exit-price solve produced implausible gross returns"

    steps = np.linspace(0.0, 1.0, len(test_dates))
    test_prices = entry * np.power.outer(g, steps).T
    test_prices[0] = entry
    test_prices[-1] = entry * g

    data_path = out_dir / f"{name}.csv"
    write_panel(data_path, train_dates + test_dates, tickers, np.vstack([train_prices, test_prices]))

    # Validation run on the final fixture.
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        run_analyze(cli, config_path, data_path, tmp / "out")
        w_opt2, w_eig2, report = read_weights(tmp / "out" / name / "report.json", tickers)
        assert np.allclose(w_opt, w_opt2, atol=0) and np.allclose(w_eig, w_eig2, atol=0), \
            "weights changed between stub and final runs"

        ret = np.array(report["stats"]["annual_return"]) * 100.0
        vol = np.array(report["stats"]["annual_volatility"]) * 100.0
        assert np.allclose(ret, spec["annual_return"], atol=1e-7)
        assert np.allclose(vol, spec["annual_risk"], atol=1e-7)

        k = report["pca"]["selected_components"]
        cum = report["pca"]["cumulative_explained"][k - 1]
        assert k == 7, f"{name}: expected 7 components, got {k}"
        assert abs(cum - spec["cum7"]) < 5e-3, f"{name}: cumulative {cum} vs {spec['cum7']}"

        opt_ret = report["backtest"]["opt_risk"]["total_return"]
        eig_ret = report["backtest"]["eigen"]["total_return"]
        assert abs(opt_ret - spec["target_opt"]) < 1e-9
        assert abs(eig_ret - spec["target_eigen"]) < 1e-9

    best = report["pca"]["best"]["component_index"]
    print(f"{name:18s} T={T:4d}  k={k} cum7={cum:.4f}  "
          f"opt={opt_ret*100:6.2f}% eigen={eig_ret*100:6.2f}% (component {best})")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cli", default="build/tools/frontierlab",
                    help="path to the built frontierlab binary")
    ap.add_argument("--out", default="tests/fixtures")
    args = ap.parse_args()

    cli = pathlib.Path(args.cli).resolve()
    if not cli.exists():
        sys.exit(f"CLI not found at {cli}; build the project first")
    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    for i, (name, spec) in enumerate(SECTORS.items()):
        rng = np.random.default_rng(1000 + i)
        make_sector(name, spec, cli, out_dir, rng)
    print(f"fixtures written to {out_dir}/")


if __name__ == "__main__":
    main()
