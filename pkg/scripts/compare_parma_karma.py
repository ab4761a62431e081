"""PQ norms of PARMA and KARMA over seeded synthetic scenarios.

    python scripts/compare_parma_karma.py --coupling 0.8 --seeds 20
    python scripts/compare_parma_karma.py --coupling 0.0 --lags 0,0,0,0
"""

import argparse

import numpy as np

from karma.core import StructuralIndices
from karma.kalman import PredictorConfig
from karma.pipeline import compare
from karma.synth import ScenarioSpec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--coupling", type=float, default=0.8)
    ap.add_argument("--lags", default="0,1,2,3")
    ap.add_argument("--channels", type=int, default=4)
    ap.add_argument("--length", type=int, default=500)
    ap.add_argument("--horizon", type=int, default=20)
    ap.add_argument("--orders", default="0,1,1,1", help="p,na,nb,nc")
    ap.add_argument("--alpha", type=float, default=1000.0)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()

    lags = tuple(int(v) for v in args.lags.split(","))
    indices = StructuralIndices(*(int(v) for v in args.orders.split(",")))
    config = PredictorConfig(alpha=args.alpha)
    train_len = args.length - args.horizon

    rows = []
    print(f"{'seed':>4} {'PARMA':>8} {'KARMA':>8}  {'MSE PARMA':>9} {'MSE KARMA':>9}")
    for seed in range(args.seeds):
        spec = ScenarioSpec(ny=args.channels, N=args.length, coupling=args.coupling, lags=lags, seed=seed)
        data = generate(spec)
        res = compare(data, train_len, args.horizon, indices, config=config)
        truth = data.values[train_len:]
        p, k = res["parma"], res["karma"]
        mse = [float(np.mean((r.predictions - truth) ** 2)) for r in (p, k)]
        rows.append((p.report.pq_norm, k.report.pq_norm, *mse))
        print(f"{seed:>4} {rows[-1][0]:8.2f} {rows[-1][1]:8.2f}  {mse[0]:9.3f} {mse[1]:9.3f}")
    rows = np.array(rows)
    wins = int(np.sum(rows[:, 1] > rows[:, 0]))
    print(f"mean  {rows[:, 0].mean():8.2f} {rows[:, 1].mean():8.2f}  {rows[:, 2].mean():9.3f} {rows[:, 3].mean():9.3f}")
    print(f"KARMA ahead on PQ norm in {wins}/{args.seeds} seeds")


if __name__ == "__main__":
    main()
