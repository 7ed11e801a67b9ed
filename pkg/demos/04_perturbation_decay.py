"""Exponential return to the stationary state.

Perturb the dormant tumor, integrate, and watch every deviation norm decay
like C e^{-mu t}.  The fitted rate mu is a property of the linearization:
it should not depend on the perturbation amplitude, and only weakly on the
shape or on the diffusion ratio eps.
"""
from spheroid import (Grid, SolverConfig, admissible_init, default_model,
                      fit_decay, simulate, solve_stationary)
from spheroid.records import DeviationRecord

model = default_model()
grid = Grid(201)

print("computing the stationary reference ...")
stationary = solve_stationary(model, grid, cross_check=False)

delta = 0.01
init = admissible_init(stationary, delta, shape="poly")
config = SolverConfig(eps=0.0, dt=0.02, t_end=60.0, output_interval=0.2)

print(f"perturbing with amplitude {delta} and integrating to t={config.t_end} ...")
result = simulate(model, init, grid, config, stationary)

print("\nfitted decay rate per deviation norm:")
for name in DeviationRecord.NORM_FIELDS:
    series = [(rec.t, getattr(rec, name)) for rec in result.records]
    try:
        fit = fit_decay(series)
        print(f"  {name:18s} mu = {fit.mu:.4f}   C = {fit.prefactor:.2e}   "
              f"R^2 = {fit.r_squared:.5f}")
    except Exception:
        print(f"  {name:18s} at the noise floor (already converged)")

crossing = next((rec.t for rec in result.records
                 if rec.max_norm() < delta / 10), None)
print(f"\nall norms below delta/10 = {delta / 10:g} from t = {crossing}")
print(f"final max deviation at t={result.final_state.t:.0f}: "
      f"{result.records[-1].max_norm():.2e}")

# The same experiment with slow nutrient diffusion (eps > 0) returns to the
# same stationary state at nearly the same rate.
config_eps = SolverConfig(eps=0.05, dt=0.02, t_end=60.0, output_interval=0.2)
result_eps = simulate(model, init, grid, config_eps, stationary)
series = [(rec.t, rec.z_dev) for rec in result_eps.records]
fit = fit_decay(series)
print(f"\nwith eps = 0.05: mu(z) = {fit.mu:.4f} "
      f"(quasi-static gave {fit_decay([(r.t, r.z_dev) for r in result.records]).mu:.4f})")
