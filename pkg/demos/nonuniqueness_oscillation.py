"""When the subproblems lose unique solvability, convergence can fail.

The two-block sweep needs each subproblem's curvature H_ii + beta A_i'A_i + R_i
to be positive definite. This demo builds an instance where block 1's
curvature has a null direction, extracts a certified witness vector, and then
shows two equally legitimate trajectories from the same start: one settles,
the other adds the witness at every even step — every step of it still
satisfies subproblem optimality exactly, yet it oscillates forever.
"""

import numpy as np

import coupled_splitting as cs


def main():
    # block 1 never appears in the coupling or the constraint
    inst = cs.ProblemInstance(
        blocks=cs.BlockStructure(dims=(1, 1), m=1),
        H=np.diag([0.0, 1.0]),
        g=np.zeros(2),
        A=np.array([[0.0, 1.0]]),
        b=np.array([1.0]),
    )
    report = cs.check_uniqueness_condition(inst)
    print(f"uniqueness condition satisfied: {report.satisfied}")

    cert = cs.divergence_witness(inst, beta=1.0)
    print(f"witness direction: {np.array2string(cert.ybar, precision=4)}")
    print(f"smallest curvature eigenvalue: {cert.min_eigenvalue:.2e}")
    print(f"worst annihilation defect: {max(cert.checks.values()):.2e}\n")

    cfg = cs.SolverConfig(variant="admm_cyclic_n", beta=1.0, gamma=1.0)
    res = cs.oscillation_demo(inst, cfg, cert.ybar, k_max=30)
    base, pert = res.baseline, res.perturbed

    print(f"baseline  final x: {np.array2string(base.x, precision=4)}  status: {base.status}")
    print(f"perturbed final x: {np.array2string(pert.x, precision=4)}  status: {pert.status}")
    print(f"the perturbed path jumps by the witness at every even step, so its")
    print(f"consecutive iterates stay {np.linalg.norm(cert.ybar):.1f} apart "
          f"(gap persists: {res.gap_persists})")
    print(f"yet every perturbed step passes the optimality recheck: "
          f"defect {res.max_optimality_defect:.2e}")


if __name__ == "__main__":
    main()
