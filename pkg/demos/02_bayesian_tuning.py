"""Walkthrough: Bayesian optimization with the forest surrogate.

Shows the pieces individually (sampling, encoding, surrogate fit, log
expected improvement) on a 1-D toy problem, then runs the full
suggest/evaluate loop and compares against random search.

Run:  python demos/02_bayesian_tuning.py
"""

import numpy as np

from claimsift import (
    ConfigSpace,
    ParamSpec,
    Trial,
    encode_config,
    fit_surrogate,
    log_ei,
    optimize,
    sample_config,
    surrogate_predict,
)

space = ConfigSpace((ParamSpec(name="x", kind="linear_float", low=0.0, high=1.0),))
objective = lambda cfg: -((cfg["x"] - 0.7) ** 2)

# --- the ingredients ---------------------------------------------------------
rng = np.random.default_rng(0)
config = sample_config(space, rng)
print(f"random sample: {config}, encoded: {encode_config(space, config)}")

history = [
    Trial(config={"x": float(v)}, objective=objective({"x": float(v)}), seed=0, index=i)
    for i, v in enumerate(np.linspace(0, 1, 12))
]
surrogate = fit_surrogate(history, space, seed=0)
for probe in (0.2, 0.7):
    mean, std = surrogate_predict(surrogate, {"x": probe})
    incumbent = max(t.objective for t in history)
    print(f"x={probe}: surrogate mean={mean:+.4f} std={std:.4f} "
          f"log-EI vs incumbent={log_ei(mean, std, incumbent):+.3f}")

# --- the loop ----------------------------------------------------------------
best, hist = optimize(objective, space, n_trials=60, seed=1)
print(f"\nBO best after 60 trials: x={best.config['x']:.4f} (objective {best.objective:.6f})")

random_best = max(
    objective(sample_config(space, np.random.default_rng(99))) for _ in range(60)
)
print(f"random search best over an equal budget: {random_best:.6f}")
print(f"incumbent trace (every 10th trial): "
      + ", ".join(f"{max(t.objective for t in hist[:k]):.4f}" for k in range(10, 61, 10)))
