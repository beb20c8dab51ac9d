"""Smoke test for the Python extension.

Build and install first, e.g.

    pip install maturin
    maturin develop --release -m crates/python/Cargo.toml

then run ``python python/smoke_test.py``.
"""

import cmath
import json
import math
import os
import tempfile

import adsb_hqnn_py as q


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def check_statevector():
    s = q.Statevector(1)
    s.rx(0, math.pi)
    amp = s.amplitudes()
    assert close(amp[0], 0) and close(amp[1], -1j), amp

    bell = q.Statevector(2)
    bell.ry(0, math.pi / 2)
    bell.cnot(0, 1)
    h = 1 / math.sqrt(2)
    for got, want in zip(bell.amplitudes(), [h, 0, 0, h]):
        assert cmath.isclose(got, want, abs_tol=1e-12), bell.amplitudes()
    assert close(bell.norm_sqr(), 1.0)
    assert all(close(z, 0.0) for z in bell.expval_z_all())

    try:
        bell.cnot(1, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("control == target accepted")


def check_vqc():
    n, layers = 2, 1
    weights = [0.1 * (k + 1) for k in range(n * layers * 3)]
    x = [0.3, -0.7]
    out, dw, dx = q.vqc_gradient(n, layers, weights, x)
    assert out == q.vqc_forward(n, layers, weights, x)
    assert len(dw) == n and len(dw[0]) == len(weights)
    h = 1e-6
    for i in range(n):
        xp, xm = list(x), list(x)
        xp[i] += h
        xm[i] -= h
        fp = q.vqc_forward(n, layers, weights, xp)
        fm = q.vqc_forward(n, layers, weights, xm)
        for w in range(n):
            fd = (fp[w] - fm[w]) / (2 * h)
            assert abs(fd - dx[w][i]) < 1e-6, (fd, dx[w][i])


def check_metrics():
    m = q.classification_metrics([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert (m["tp"], m["fp"], m["fn"], m["tn"]) == (2, 1, 1, 1)
    assert close(m["accuracy"], 0.6)
    assert close(m["precision"], 2 / 3)


def check_pipeline():
    names, rows, labels = q.synthetic_flights(20, 10, 1)
    assert len(rows) == 30 and sum(labels) == 10 and len(names) == 8

    with tempfile.TemporaryDirectory() as out:
        report = json.loads(
            q.train(model="fnn", attack_samples=30, qubits=2, epochs=2, seed=3, out=out)
        )
        assert report["config"]["model"] == "fnn"
        assert report["features"]["dropped"] == ["icao24", "baroaltitude"]
        again = json.loads(q.evaluate(os.path.join(out, "checkpoint.json")))
        assert again["test_confusion"] == report["test_confusion"]

    defaults = json.loads(q.default_config())
    assert defaults["epochs"] == 150 and defaults["qubits"] == 6


if __name__ == "__main__":
    check_statevector()
    check_vqc()
    check_metrics()
    check_pipeline()
    print("python smoke test passed")
