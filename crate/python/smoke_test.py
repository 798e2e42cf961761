"""Smoke test for the pyschrodhelm extension module."""
import math

import pyschrodhelm as sh


def main():
    k_hat = sh.shifted_wavenumber(10.0, 1.0 / 16)
    assert abs(k_hat - 9.838032466572187) < 1e-12

    sys = sh.HelmholtzSystem(10.0, n=5)
    assert sys.dim == 32 and len(sys.nodes) == 32
    x = sys.solve()
    u = sys.exact()
    err = math.sqrt(sum(abs(a - b) ** 2 for a, b in zip(x, u)) / sum(abs(b) ** 2 for b in u))
    assert err < 0.05, err
    smin, smax = sys.singular_values()
    assert 0 < smin < smax and abs(smax / smin - sys.condition_number()) < 1e-8 * smax / smin
    pmin, pmax = sys.singular_values("real")
    assert pmax / pmin < smax / smin

    assert sh.stopping_time(1.0, math.exp(-1.0)) == 1.0

    report = sh.run_experiment(m=7, checkpoints=4, psi="cubic")
    metrics = report["metrics"]
    assert len(report["v"]) == 16 and len(report["checkpoints"]) == 4
    assert metrics["err_x_l2"] < 0.05, metrics["err_x_l2"]

    try:
        sh.run_experiment(epsilon=2)
    except ValueError:
        pass
    else:
        raise AssertionError("epsilon=2 accepted")
    print(f"smoke ok: err_x_l2={metrics['err_x_l2']:.3e} kappa_a={metrics['kappa_a']:.2f}")


if __name__ == "__main__":
    main()
