"""Estimator front end: parameter plumbing, fitted attributes, validation."""

import math
import warnings

import numpy as np
import pytest
from sklearn.base import clone

from dkaffine import ExtendedDavisKahan
from dkaffine.separation import make_comparison
from dkaffine.solvers import assemble_bound


def test_get_set_params_round_trip():
    est = ExtendedDavisKahan(j=2, r=3, reverse_phi=True, cert_gap=1e-9)
    params = est.get_params()
    assert params["j"] == 2 and params["r"] == 3
    assert params["reverse_phi"] is True and params["cert_gap"] == 1e-9
    est.set_params(j=0, r=1)
    assert est.j == 0 and est.r == 1
    copy = clone(est)
    assert copy.get_params() == est.get_params()


def test_fit_exact_affine_pair():
    est = ExtendedDavisKahan(j=0, r=1)
    out = est.fit(np.diag([0.0, 1.0, 2.0]), np.diag([0.0, 2.0, 4.0]))
    assert out is est
    assert est.n_ == 3
    assert est.bound_ == 0.0
    assert est.bound_raw_ == 0.0
    assert est.standard_bound_ == pytest.approx(1.0)
    assert est.trivial_bound_ == 1.0
    assert est.c1_ == pytest.approx(2.0)
    assert est.c0_ == pytest.approx(0.0, abs=1e-12)
    assert est.variant_ == "delta_1_plus"
    assert est.supremum_ is False
    assert est.rho1_ == pytest.approx(0.0, abs=1e-12)
    assert est.rho2_ == pytest.approx(0.0, abs=1e-12)
    assert est.report_.best is not None


def test_fit_trivial_fallback_attributes():
    est = ExtendedDavisKahan(j=1, r=1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est.fit(np.eye(3), np.diag([1.0, 1.0, 3.0]))
    assert est.bound_ == 1.0
    assert math.isnan(est.c1_) and math.isnan(est.c0_)
    assert est.variant_ == ""
    assert est.supremum_ is False
    assert est.standard_bound_ == math.inf


def test_fit_matches_direct_assembly():
    rng = np.random.default_rng(51)
    a = rng.normal(size=(8, 8))
    b = rng.normal(size=(8, 8))
    phi, psi = (a + a.T) / 2, (b + b.T) / 2
    est = ExtendedDavisKahan(j=2, r=2, reverse_phi=True).fit(phi, psi)
    report = assemble_bound(make_comparison(phi, psi, 2, 2, reverse_phi=True))
    assert est.bound_ == report.extended_bound_rescaled
    assert est.standard_bound_ == report.standard_dk_rescaled
    assert est.rho1_ == report.rho1_rescaled
    assert est.rho2_ == report.rho2


def test_fit_attaches_optional_checks():
    est = ExtendedDavisKahan(j=0, r=1, check_dinkelbach=True, check_oracle=True)
    est.fit(np.diag([0.0, 1.0, 2.0]), np.diag([0.0, 2.0, 4.0]))
    assert est.report_.dinkelbach_checks is not None
    assert est.report_.oracle_checks is not None


def test_fit_validation_errors():
    sym = np.diag([1.0, 2.0, 3.0])
    skew = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        ExtendedDavisKahan().fit(skew, np.eye(2))
    fitted = ExtendedDavisKahan(symmetrize=True).fit(skew, np.diag([1.0, 2.0]))
    assert 0.0 <= fitted.bound_ <= 1.0
    with pytest.raises(ValueError):
        ExtendedDavisKahan().fit(sym, np.eye(4))
    with pytest.raises(ValueError):
        ExtendedDavisKahan(j=3, r=1).fit(sym, sym)
    with pytest.raises(ValueError):
        ExtendedDavisKahan(j=0, r=3).fit(sym, sym)
