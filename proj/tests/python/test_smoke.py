"""Smoke tests for the python bindings: the core pipeline end to end."""

import json
import math

import numpy as np
import pytest

import losslim


def skew_example():
    return losslim.StateSpace(
        A=np.array([[0.0, -1.0], [1.0, 0.0]]),
        B=np.array([[1.0], [0.0]]),
        C=np.array([[1.0, 0.0]]),
        D=np.array([[0.0]]),
    )


def test_norms_first_order_lag():
    sys = losslim.StateSpace(
        A=np.array([[-1.0]]),
        B=np.array([[1.0]]),
        C=np.array([[1.0]]),
        D=np.array([[0.0]]),
    )
    assert losslim.h2_norm(sys) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-10)
    assert losslim.hinf_norm(sys, tol=1e-8) == pytest.approx(1.0, rel=1e-6)


def test_certificate_and_limits():
    sys = skew_example()
    cert = losslim.find_certificate(sys)
    assert np.allclose(cert["P"], np.eye(2), atol=1e-10)
    assert losslim.h2_limit(sys) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert losslim.hinf_limit(sys) == pytest.approx(math.sqrt(2.0), rel=1e-12)

    damped = losslim.StateSpace(
        A=np.array([[-1.0]]),
        B=np.array([[1.0]]),
        C=np.array([[1.0]]),
        D=np.array([[0.0]]),
    )
    with pytest.raises(losslim.LosslimError):
        losslim.find_certificate(damped)


def test_swing_limits_and_controllers():
    M = np.array([6.0, 3.0])
    L = np.array([[1.0], [-1.0]])
    sys = losslim.swing_statespace(M, L)
    assert losslim.h2_limit_swing(M) == pytest.approx(1.0, abs=1e-12)

    structured = losslim.structured_h2_controller(sys)
    assert structured.kind == "structured_h2"
    cl = losslim.closed_loop(sys, structured)
    assert losslim.h2_norm(cl) == pytest.approx(1.0, rel=1e-8)

    static = losslim.static_hinf_controller(sys)
    cl_inf = losslim.closed_loop(sys, static)
    assert losslim.hinf_norm(cl_inf, tol=1e-7) == pytest.approx(
        math.sqrt(2.0), abs=1e-4
    )

    gp = losslim.build_generalized_plant(sys)
    riccati = losslim.riccati_h2_controller(gp)
    assert losslim.h2_norm(losslim.close_loop(gp, riccati)) == pytest.approx(
        1.0, rel=1e-8
    )


def test_riccati_fixed_point():
    M = np.array([2.0, 3.0])
    L = np.array([[1.0], [-1.0]])
    sys = losslim.swing_statespace(M, L)
    X = losslim.solve_care(sys.A, sys.B, sys.C.T @ sys.C)
    assert np.allclose(X, np.diag([2.0, 3.0, 1.0]), atol=1e-8)


def test_network_generation_and_gains():
    cfg = json.dumps(
        {
            "n_clusters": 3,
            "total_buses": 9,
            "cluster_roles": ["wind_solar", "hydro", "load"],
            "fixed_cluster_sizes": [3, 3, 3],
            "seed": 5,
        }
    )
    net_a = losslim.generate_network_json(cfg)
    net_b = losslim.generate_network_json(cfg)
    assert net_a == net_b  # determinism

    model = losslim.swing_model_from_network_json(net_a)
    assert len(model["generator_ids"]) == 6
    assert model["sys"].n == 11

    gains = losslim.network_gains_json(net_a, "h2")
    values = np.asarray(gains["values"])
    assert values.shape == (6, 6)
    sys = model["sys"]
    full = losslim.h2_norm(
        losslim.closed_loop(sys, losslim.structured_h2_controller(sys))
    )
    assert np.sum(values**2) == pytest.approx(full**2, rel=1e-8)

    report = losslim.jensen_report(np.asarray(model["M"]))
    assert report["gap"] >= 0.0


def test_lumping():
    cfg = json.dumps(
        {
            "n_clusters": 3,
            "total_buses": 12,
            "cluster_roles": ["conventional", "hydro", "load"],
            "seed": 2,
        }
    )
    net = losslim.generate_network_json(cfg)
    lumped = losslim.lump_network_json(net)
    model = losslim.swing_model_from_network_json(lumped)
    assert len(model["generator_ids"]) == 2
