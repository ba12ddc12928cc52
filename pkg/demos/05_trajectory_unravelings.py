"""Three unravelings of the same decay channel, three entanglement costs.

A quantum-trajectory simulation decomposes the dissipative evolution into
stochastic pure-state trajectories.  The decomposition is not unique: any
unitary remixing of the Kraus pair gives another valid unraveling with
identical observable statistics but different per-trajectory entanglement.

  naive       jump/no-jump operators; trajectories are Dicke states and
              pick up ~log N bits of block entanglement at the burst
  phi_random  fixed theta_F = pi/4 mixing, random phase each step
  phi_opt     same mixing, phase chosen each step to minimize the expected
              post-operation block entropy — trajectories hug the coherent-
              state manifold and stay nearly separable

Run:  python3 demos/05_trajectory_unravelings.py      (about two minutes)
"""

import numpy as np

from dicke_css import ModelParams, ensemble_run, evolve_exact

params = ModelParams(n_emitters=20)
DT, T_MAX, NTRAJ, SEED = 1e-2, 6.0, 100, 7

stats = {}
for strategy in ("naive", "phi_random", "phi_opt"):
    stats[strategy] = ensemble_run(params, DT, T_MAX, strategy,
                                   n_traj=NTRAJ, seed=SEED)
    s = stats[strategy]
    print(f"{strategy:11s} peak TE {s.te_mean.max():7.4f} bits   "
          f"min mean Bloch length {s.xi_mean.min():.4f}")

# --- identical physics: populations agree with the exact solver ------------
exact = evolve_exact(params, stats["naive"].times)
print("\nmax deviation of ensemble populations from the exact solution")
for strategy, s in stats.items():
    dev = max(np.abs(s.pops_mean[i] - e.probs).max()
              for i, e in enumerate(exact))
    print(f"  {strategy:11s} {dev:.4f}   (Monte Carlo noise at "
          f"{NTRAJ} trajectories)")

# --- different entanglement: TE time series --------------------------------
print("\ntrajectory entanglement over time (bits):")
print("   t     naive   phi_random  phi_opt")
for i in range(0, len(stats["naive"].times), 5):
    t = stats["naive"].times[i]
    print(f"{t:6.2f} {stats['naive'].te_mean[i]:8.4f} "
          f"{stats['phi_random'].te_mean[i]:10.4f} "
          f"{stats['phi_opt'].te_mean[i]:9.4f}")
print("\nthe optimized unraveling represents the same mixed-state dynamics "
      "with\nnear-product trajectories: a certificate that the decay "
      "generates no\nentanglement of formation, and a recipe for cheap "
      "classical simulation.")
