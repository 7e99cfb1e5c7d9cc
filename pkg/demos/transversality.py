"""Random k-parameter families hit a stratum only when k reaches its codimension."""
from eqcodim.genericity import GeneralizedKernel, monte_carlo, witness_certificate
from eqcodim.strata import top_label

for d, k in [(1, 1), (2, 1), (2, 2)]:
    frac, _ = monte_carlo("R", 2, GeneralizedKernel(d), k, 200, 0)
    print(f"R^2, dim ker >= {d}, {k} parameter(s): hit fraction {frac:.3f}")

cert = witness_certificate(top_label("R", 2, "nilpotent"))
print(f"witness family for the 2x2 Jordan block: {cert.passed}/{cert.trials} perturbations still meet the stratum")
