"""Self-convergence orders of the scheme.

Three matched-refinement studies: grid refinement with only diffusion
active (central stencil, expect order 2), grid refinement with only
transport active (interpolation-limited semi-Lagrangian, expect >= 1.5),
and time-step refinement with the time-centered splitting (expect order 2).
"""
from spheroid import default_model
from spheroid.analysis import CONVERGENCE_THRESHOLDS, standard_convergence_suite

model = default_model()

print("running the three standard studies (takes a minute) ...\n")
studies = standard_convergence_suite(model)

for study in studies:
    print(f"{study.kind}:")
    for (coarse, fine), diff, order in zip(
            zip(study.levels[:-1], study.levels[1:]), study.diffs, study.orders):
        print(f"  {coarse} -> {fine}: diff = {diff:.3e}   order = {order:.2f}")
    threshold = CONVERGENCE_THRESHOLDS[study.kind]
    verdict = "meets" if study.observed_order >= threshold else "BELOW"
    print(f"  observed order {study.observed_order:.2f} {verdict} "
          f"threshold {threshold}\n")
