"""Smoke test for the compiled `fadres` extension module.

    pip install --no-build-isolation crates/py
    python crates/py/python/smoke_test.py
"""

import cmath
import math

import fadres


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert fadres.loop_integral(0) == 1
    for t0 in (0.1, 0.5, 2.0):
        i = fadres.loop_integral(t0)
        assert close(i.imag, 2 * t0**3 / (1 + t0 * t0) ** 2, 1e-14), (t0, i)

    eta = fadres.amplification(-0.95, 0.12)
    assert close(eta, -25.556 - 2.210j, 1e-4), eta

    assert close(fadres.exchange_kernel(2.0, 0.0), -math.exp(-2.0), 1e-14)

    assert fadres.xi(0.0, 0.1, 3.0) == 1
    x = fadres.xi(-0.95, 0.12, 2.85)
    assert x.real < 0 and x.imag < 0 and 50 <= abs(x) <= 160, x
    assert fadres.classify(x) == "repulsive"
    assert fadres.classify(fadres.xi(-0.95, 0.12, 2.5)) == "amplified_attraction"
    assert fadres.classify(1 + 0j) == "suppressed"
    for v in ("summed", "diagonal", "offdiag"):
        assert fadres.xi(0.0, 0.3, 1.5, variant=v) == 1

    assert fadres.big_xi(0.0, 2.0) == 1
    assert abs(fadres.big_xi(-0.95, 2.5)) > abs(fadres.big_xi(-0.95, 5.0))

    poles = fadres.pair_poles(-2.0)
    bound = [p for p in poles if p.kind == "bound"]
    assert len(bound) == 1 and close(bound[0].location, 1j * (1 + math.sqrt(2)), 1e-10), poles
    pair = fadres.pair_poles(-0.75)
    assert [p.kind for p in pair] == ["resonance", "resonance"]
    assert close(pair[0].location, pair[1].location.conjugate() * -1, 1e-12)
    assert cmath.isclose(pair[0].location, complex(math.sqrt(0.1875), -0.25), rel_tol=1e-10)

    found = fadres.find_resonances(-0.95, 0.12)
    assert len(found) == 1 and 2.4 <= found[0].rho_star <= 2.9, found
    assert fadres.find_resonances(0.0, 0.12) == []

    samples = fadres.scan_surface(-0.95, (0.05, 0.6, 4), (2.0, 3.5, 7))
    assert len(samples) == 28
    assert [s[:2] for s in samples[:2]] == [(0.05, 2.0), (0.05, 2.25)]
    assert samples == fadres.scan_surface(-0.95, (0.05, 0.6, 4), (2.0, 3.5, 7))

    regions = fadres.find_resonance_regions(-0.97, (0.001, 0.6, 60), (1.0, 30.0, 120))
    assert any(lo <= 4 and hi >= 2 for _, (lo, hi), _ in regions), regions

    assert fadres.rho_to_distance(2.5, 1e-22) == (2.5e22, 5e22)
    assert fadres.t0_to_momentum(0.1, 1e-22) == 1e-23

    for bad in (lambda: fadres.xi(-0.95, 0.12, 2.85, variant="both"), lambda: fadres.rho_to_distance(1.0, -1.0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        fadres.xi(-1.0, 0.0, 2.0)
    except fadres.NumericalError:
        pass
    else:
        raise AssertionError("expected NumericalError at the threshold pole")

    print(f"fadres {fadres.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
