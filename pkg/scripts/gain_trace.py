"""Trace the adaptive predictor's gain and covariances on one synthetic scenario.

Prints, at a few checkpoints, the Frobenius norm of the gain, the trace of
the state covariance, and the diagonals of the exogenous and endogenous
covariance estimates. Useful to see how the self-estimated endogenous noise
settles and drags the gain with it.
"""

import argparse

import numpy as np

from karma.arma import fit_arma
from karma.armax import fit_armax
from karma.kalman import PredictorConfig, kf_init, kf_step_detail
from karma.pipeline import rough_innovations
from karma.preprocess import fit_deterministic, remove_deterministic
from karma.realization import realize
from karma.synth import ScenarioSpec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--coupling", type=float, default=0.8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--length", type=int, default=2000)
    ap.add_argument("--alpha", type=float, default=1000.0)
    args = ap.parse_args()

    data = generate(ScenarioSpec(N=args.length, coupling=args.coupling, lags=(0, 1, 2, 3), seed=args.seed))
    resid = remove_deterministic(data, fit_deterministic(data, 0))
    models = [fit_arma(resid.channel(j), 1, 1) for j in range(resid.ny)]
    u = rough_innovations(models, resid.values)
    ss = realize(fit_armax(resid, resid.with_values(u), 1, 1, 1))
    config = PredictorConfig(alpha=args.alpha)
    state = kf_init(ss, config)
    checkpoints = {1, 10, 100, 1000} | {args.length}
    print(f"{'k':>6} {'|gain|':>9} {'tr P':>10}  exo diag / endo diag")
    for k in range(args.length):
        d = kf_step_detail(state, ss, resid.values[k], u[k], config)
        state = d.state
        if k + 1 in checkpoints:
            exo = np.round(np.diag(state.noise.exo), 3).tolist()
            endo = np.round(np.diag(state.noise.endo), 4).tolist()
            print(f"{k + 1:>6} {np.linalg.norm(d.gain):9.4f} {np.trace(state.P_hat):10.4f}  {exo} / {endo}")
    print("innovation variances of the per-channel ARMA fits:", np.round([m.noise_variance for m in models], 3).tolist())


if __name__ == "__main__":
    main()
