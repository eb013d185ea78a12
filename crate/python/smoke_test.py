"""Smoke test for the central_spin_py extension.

Build first:  maturin develop --release -m crates/py/Cargo.toml
"""

import math

import central_spin_py as cs


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    times = [0.1 * k for k in range(701)]

    hom = cs.Homogeneous(8, field=1.0, coupling=1.0, longitudinal=1.0, theta=math.pi / 2)
    assert hom.n == 8
    close(sum(hom.weights()), 1.0, 1e-14)
    close(hom.polarization(0.0), 0.5, 0.0)
    sz = hom.polarization_series(times)

    # closed form against exact diagonalization for uniform couplings
    exact = cs.ExactDynamics(cs.Profile.uniform(8), field=1.0, theta=math.pi / 2)
    traj = exact.trajectory(times)
    worst = max(abs(a - b) for a, b in zip(sz, traj["sz0"]))
    assert worst < 1e-9, worst
    assert traj["conserved"]
    assert all(abs(p - 1.0) < 1e-10 for p in traj["pbath"])

    rho = hom.density_matrix(12.3)
    close(rho["rho_upup"], traj["rho_upup"][123], 1e-9)
    assert 0.5 - 1e-12 <= rho["purity"] <= 1.0 + 1e-12
    assert 0.0 <= rho["entropy"] <= math.log(2) + 1e-12

    report = cs.detect_revivals(times, sz)
    assert report["revival_times"], report
    print("N=8 revivals at", [round(t, 2) for t in report["revival_times"]])

    phi, fid, t = hom.best_phase([k * 0.05 for k in range(100, 300)])
    print(f"best phase {phi:.3f} with fidelity {fid:.3f} at t={t:.2f}")
    assert 0.5 <= fid <= 1.0

    steep = cs.ExactDynamics(cs.Profile.exponential(8, 5.0), field=1.0)
    assert min(steep.trajectory(times)["pbath"]) < 0.99

    w = cs.jc_inversion([0.0, 1.0], 100, 0.0, 0.1, 0.0, 2 * math.asin(0.3))
    close(w[0], 1.0, 1e-12)

    close(math.exp(cs.log_binomial(10, 3)), 120.0, 1e-9)

    try:
        cs.Homogeneous(4, theta=4.0)
    except ValueError:
        pass
    else:
        raise AssertionError("theta outside [0, pi] accepted")

    try:
        cs.ExactDynamics(cs.Profile.uniform(9), ed_cap=8)
    except ValueError:
        pass
    else:
        raise AssertionError("ED capacity not enforced")

    print("smoke test passed")


if __name__ == "__main__":
    main()
