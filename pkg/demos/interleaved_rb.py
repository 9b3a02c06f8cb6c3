"""
Interleaved benchmarking of the entangling gate
===============================================

The reference campaign fixes the per-Clifford decay alpha; interleaving
the gate of interest after every random Clifford yields a second decay
alpha_C, and the ratio isolates the gate's own error:

    r_C = (d - 1) / d * (1 - alpha_C / alpha)

Running both campaigns with injected depolarizing noise makes the books
easy to check: alpha must fit to p_c and alpha_C to p_c * p_g.
"""

from rbsim import fit, rb
from rbsim.cliffords import ZX_UNITARY, clifford_table

table = clifford_table()
p_c, p_g = 0.8752, 0.91293
noise = rb.InjectedNoiseModel(
    table,
    noise=rb.depolarizing_ptm(p_c),
    gate_noise=rb.depolarizing_ptm(p_g),
)

cfg = rb.RBConfig(lengths=tuple(range(1, 13)), n_sequences=20,
                  shots=None, seed=8)
reference = rb.fit_dataset(rb.run_rb(cfg, table, noise))
interleaved = rb.fit_dataset(
    rb.run_interleaved(cfg, table, noise, gate=ZX_UNITARY)
)

print(f"reference   alpha   {reference.alpha:.6f}   (injected {p_c})")
print(f"interleaved alpha_C {interleaved.alpha:.6f}   "
      f"(injected {p_c * p_g:.6f})")

estimate = fit.interleaved_error(
    reference.alpha, interleaved.alpha,
    alpha_sigma=reference.alpha_sigma,
    alpha_c_sigma=interleaved.alpha_sigma,
)
print(f"\ngate error r_C = {estimate.r_c:.6f} "
      f"(closed form {(3 / 4) * (1 - p_g):.6f})")
print(f"gate fidelity  = {1 - estimate.r_c:.6f}")
