import logging
import math

import numpy as np
import pytest

from adiatherm.closed_forms import (
    MficCoefficients,
    TransferMatrix2,
    chi_f_mfic_closed,
    chi_f_tfic_closed,
    delta_v_mfic_closed,
    delta_v_tfic_closed,
    f_mfic,
    f_mfic_asymptotics,
    f_n_tfic,
    f_tfic_asymptotics,
    gamma_n_mfic,
    gamma_n_tfic,
    ising_transfer_matrix,
    mfic_coefficients,
    mfic_transfer_matrix,
    q_open_chain,
    two_eig_trace,
    two_eig_trace_log,
    z0_ising,
)
from adiatherm.models import SpinChainModel, build_h0, build_v
from adiatherm.operators import eigh
from adiatherm.susceptibility import chi_f_ground, chi_f_thermal, delta_v_thermal

import oracle

logger = logging.getLogger(__name__)


class TestPartitionFunctions:
    def test_z0_free_spins(self):
        assert z0_ising(2, 0.0, 1.0) == pytest.approx(4.0)

    def test_z0_against_enumeration(self):
        assert z0_ising(3, 0.5, 1.0) == pytest.approx(
            oracle.ring_partition_function(3, 0.5), rel=1e-13
        )

    def test_z0_log_path_matches_direct(self):
        n, beta = 20, 1.0
        direct = 2.0**n * (math.cosh(beta) ** n + math.sinh(beta) ** n)
        assert z0_ising(n, beta, 1.0) == pytest.approx(direct, rel=1e-12)

    def test_q_open_free_spins(self):
        assert q_open_chain(3, 0.0) == pytest.approx(4.0)

    def test_q_open_against_enumeration(self):
        # three open spins coupled at 2K with K = beta J = 0.3
        expected = oracle.open_chain_partition_function(3, 0.6)
        assert q_open_chain(4, 0.6) == pytest.approx(expected, rel=1e-13)

    def test_fluctuation_bracket_in_unit_interval(self):
        for n in (3, 5, 9):
            for beta in (0.1, 0.8, 2.5):
                ratio = 2.0 * q_open_chain(n, 2 * beta) / z0_ising(n, 2 * beta, 1.0)
                assert 0.0 < ratio < 1.0

    def test_size_validation(self):
        with pytest.raises(ValueError, match="n_sites"):
            z0_ising(1, 1.0, 1.0)
        with pytest.raises(ValueError, match="n_sites"):
            q_open_chain(2, 1.0)
        with pytest.raises(ValueError, match="n_sites"):
            delta_v_tfic_closed(2, 1.0, 1.0)
        with pytest.raises(ValueError, match="n_sites"):
            chi_f_mfic_closed(2, 1.0, 1.0, 0.7)


class TestTficClosedForms:
    def test_delta_v_infinite_temperature(self):
        assert delta_v_tfic_closed(6, 0.0, 1.0) == 0.0

    def test_delta_v_ground_limit(self):
        assert delta_v_tfic_closed(6, 100.0, 1.0) == pytest.approx(math.sqrt(12.0), rel=1e-12)

    def test_delta_v_matches_ed(self):
        model = SpinChainModel("tfic", 6)
        spec = eigh(build_h0(model))
        assert delta_v_tfic_closed(6, 0.7, 1.0) == pytest.approx(
            delta_v_thermal(spec, build_v(model), 0.7), rel=1e-10
        )

    def test_chi_limits(self):
        assert chi_f_tfic_closed(8, 0.0, 1.0) == 0.0
        assert chi_f_tfic_closed(8, 50.0, 1.0) == pytest.approx(2.0, rel=1e-10)

    def test_chi_matches_ed(self):
        model = SpinChainModel("tfic", 8)
        spec = eigh(build_h0(model))
        assert chi_f_tfic_closed(8, 1.0, 1.0) == pytest.approx(
            chi_f_thermal(spec, build_v(model), 1.0), rel=1e-9
        )

    def test_f_n_is_threshold_ratio(self):
        # f_N = (deltaV/chi_F) / (Gamma_N/alpha) is an algebraic identity
        n, beta = 7, 0.9
        ratio = delta_v_tfic_closed(n, beta, 1.0) / chi_f_tfic_closed(n, beta, 1.0)
        assert f_n_tfic(n, beta, 1.0) == pytest.approx(ratio / gamma_n_tfic(n, 1.0), rel=1e-12)

    def test_f_n_thermodynamic_limit(self):
        coth1 = 1.0 / math.tanh(1.0)
        assert coth1 == pytest.approx(1.3130352854993312, abs=1e-15)
        assert abs(f_n_tfic(400, 0.5, 1.0) - coth1) < 1e-40 + 2 * math.tanh(1.0) ** 398

    def test_f_n_rejects_infinite_temperature(self):
        with pytest.raises(ValueError, match="beta"):
            f_n_tfic(6, 0.0, 1.0)

    def test_low_temperature_asymptote_bound(self):
        # coth(x) - 1 - 2 e^{-2x} = 2 e^{-4x}/(1 - e^{-2x}) exactly
        # (geometric tail), so the bound is met with equality
        beta = 2.0
        coth = 1.0 / math.tanh(2 * beta)
        tail = 2 * math.exp(-8 * beta) / (1 - math.exp(-4 * beta))
        assert abs(coth - f_tfic_asymptotics(beta, 1.0, "low")) == pytest.approx(tail, rel=1e-9)

    def test_high_temperature_asymptote_bound(self):
        for x in (0.02, 0.05, 0.1):
            beta = x / 2
            diff = abs(1.0 / math.tanh(x) - f_tfic_asymptotics(beta, 1.0, "high"))
            assert diff <= x / 3.0

    def test_unknown_regime_rejected(self):
        with pytest.raises(ValueError, match="regime"):
            f_tfic_asymptotics(1.0, 1.0, "warm")


class TestTwoEigTrace:
    def test_power_zero_gives_trace(self):
        t = ising_transfer_matrix(0.7)
        m = np.array([[1.0, 2.0], [2.0, -0.5]])
        assert two_eig_trace(t, m, 0) == pytest.approx(0.5, rel=1e-14)

    def test_power_one_gives_tm_trace(self):
        t = ising_transfer_matrix(0.7)
        m = np.array([[1.0, 2.0], [2.0, -0.5]])
        assert two_eig_trace(t, m, 1) == pytest.approx(np.trace(t.entries @ m), rel=1e-13)

    def test_random_power_against_dense(self):
        rng = np.random.default_rng(41)
        g = rng.uniform(0.5, 2.0, size=(2, 2))
        sym = (g + g.T) / 2.0
        from adiatherm.closed_forms import _transfer_from_entries

        t = _transfer_from_entries(sym)
        m = rng.standard_normal((2, 2))
        dense = np.trace(np.linalg.matrix_power(sym, 7) @ m)
        assert two_eig_trace(t, m, 7) == pytest.approx(dense, rel=1e-12)

    def test_log_path_matches_rescaled_dense_at_large_power(self):
        n, beta = 200, 2.0
        t = ising_transfer_matrix(2 * beta)
        m = np.array([[0.3, 1.1], [1.1, 2.0]])
        sign, log_abs = two_eig_trace_log(t, m, n - 2)
        scaled = t.entries / t.eigen_plus
        dense = np.trace(np.linalg.matrix_power(scaled, n - 2) @ m)
        log_dense = (n - 2) * math.log(t.eigen_plus) + math.log(abs(dense))
        assert sign == math.copysign(1.0, dense)
        assert log_abs == pytest.approx(log_dense, rel=1e-10)

    def test_degenerate_eigenvalues_rejected(self):
        t = TransferMatrix2(entries=np.eye(2) + 1.0, eigen_plus=3.0, eigen_minus=1.0)
        assert two_eig_trace(t, np.eye(2), 3) == pytest.approx(28.0)
        split = 1e-14
        nearly = TransferMatrix2(
            entries=np.array([[2.0 + split, 1e-200], [1e-200, 2.0 - split]]),
            eigen_plus=2.0 + split,
            eigen_minus=2.0 - split,
        )
        with pytest.raises(ValueError, match="degenerate"):
            two_eig_trace(nearly, np.eye(2), 3)


class TestMficCoefficients:
    def test_boundary_vector_trace(self):
        co = mfic_coefficients(0.8, 1.0, 0.7)
        # c+ + c- = Tr(u u^T) = 2 cosh H
        assert co.c_plus + co.c_minus == pytest.approx(2 * math.cosh(co.H), rel=1e-12)

    def test_determinant_identity(self):
        co = mfic_coefficients(1.1, 1.0, 1.3)
        det = math.exp(2 * co.K) - math.exp(-2 * co.K)
        assert co.lambda_plus * co.lambda_minus == pytest.approx(det, rel=1e-12)

    def test_small_field_reduces_to_ising(self):
        co = mfic_coefficients(0.9, 1.0, 1e-6)
        assert co.lambda_plus == pytest.approx(2 * math.cosh(co.K), abs=1e-5)
        assert co.c_plus == pytest.approx(2.0, abs=1e-5)

    @pytest.mark.parametrize("bad", [0.0, 2.0, -2.0, 1e-10])
    def test_excluded_fields_rejected(self, bad):
        with pytest.raises(ValueError, match="B != 0"):
            mfic_coefficients(1.0, 1.0, bad)

    def test_transfer_matrix_entries(self):
        t = mfic_transfer_matrix(0.5, 1.0, 0.7)
        k, h = 1.0, 0.7
        assert t.entries[0, 0] == pytest.approx(math.exp(k - h))
        assert t.entries[1, 1] == pytest.approx(math.exp(k + h))
        assert t.entries[0, 1] == pytest.approx(math.exp(-k))


class TestMficClosedForms:
    def test_delta_v_small_field_matches_tfic(self):
        a = delta_v_mfic_closed(6, 1.0, 1.0, 1e-6)
        b = delta_v_tfic_closed(6, 1.0, 1.0)
        assert abs(a / b - 1.0) < 1e-5

    def test_delta_v_matches_ed(self):
        model = SpinChainModel("mfic", 6, B=0.7)
        spec = eigh(build_h0(model))
        assert delta_v_mfic_closed(6, 1.0, 1.0, 0.7) == pytest.approx(
            delta_v_thermal(spec, build_v(model), 1.0), rel=1e-9
        )

    def test_infinite_temperature_limits(self):
        assert delta_v_mfic_closed(5, 0.0, 1.0, 0.7) == 0.0
        assert chi_f_mfic_closed(5, 0.0, 1.0, 0.7) == 0.0

    def test_chi_matches_ed(self):
        model = SpinChainModel("mfic", 6, B=0.7)
        spec = eigh(build_h0(model))
        assert chi_f_mfic_closed(6, 1.0, 1.0, 0.7) == pytest.approx(
            chi_f_thermal(spec, build_v(model), 1.0), rel=1e-9
        )

    def test_chi_ground_limit(self):
        model = SpinChainModel("mfic", 5, B=0.7)
        spec = eigh(build_h0(model))
        assert chi_f_mfic_closed(5, 40.0, 1.0, 0.7) == pytest.approx(
            chi_f_ground(spec, build_v(model)), rel=1e-6
        )


class TestMficTemperatureFactor:
    def test_approaches_one_at_low_temperature(self):
        for n in (6, None):
            assert f_mfic(n, 30.0, 1.0, 0.7) == pytest.approx(1.0, abs=1e-9)

    def test_finite_n_approaches_thermodynamic(self):
        assert f_mfic(200, 1.5, 1.0, 0.7) == pytest.approx(
            f_mfic(None, 1.5, 1.0, 0.7), rel=1e-12
        )

    def test_low_temperature_asymptote(self):
        beta, b = 2.5, 0.7
        diff = abs(f_mfic(None, beta, 1.0, b) - f_mfic_asymptotics(beta, 1.0, b, "low"))
        assert diff <= 50.0 * math.exp(-4 * beta * (2 + b))

    def test_high_temperature_asymptote(self):
        beta, b = 0.01, 0.7
        rel = abs(f_mfic(None, beta, 1.0, b) / f_mfic_asymptotics(beta, 1.0, b, "high") - 1.0)
        assert rel <= 0.05

    def test_finite_n_is_threshold_ratio(self):
        n, beta, b = 6, 0.8, 1.3
        ratio = delta_v_mfic_closed(n, beta, 1.0, b) / chi_f_mfic_closed(n, beta, 1.0, b)
        assert f_mfic(n, beta, 1.0, b) == pytest.approx(
            ratio / gamma_n_mfic(n, 1.0, b), rel=1e-12
        )

    def test_monotonicity_sweep_recorded(self):
        # the transverse-drive factor coth(2 beta J) is strictly decreasing;
        # the mixed-field factor may lose monotonicity at intermediate
        # temperatures, so any non-monotonic window is logged, not asserted
        betas = np.geomspace(0.02, 5.0, 120)
        tfic_vals = [1.0 / math.tanh(2 * b) for b in betas]
        assert all(y < x for x, y in zip(tfic_vals, tfic_vals[1:]))
        for b_field in (0.3, 0.7, 1.3, 1.9):
            vals = np.array([f_mfic(None, b, 1.0, b_field) for b in betas])
            rising = np.where(np.diff(vals) > 0)[0]
            if rising.size:
                lo, hi = betas[rising[0]], betas[rising[-1] + 1]
                logger.info(
                    "mfic B=%.1fJ: non-monotonic window betaJ in [%.3f, %.3f]", b_field, lo, hi
                )

    def test_master_equivalence_grid(self):
        # closed forms vs exact diagonalization across the full small grid
        for n in (3, 4, 5, 6, 7, 8):
            model = SpinChainModel("tfic", n)
            spec = eigh(build_h0(model))
            v = build_v(model)
            for beta in (0.1, 0.3, 1.0, 3.0):
                assert delta_v_thermal(spec, v, beta) == pytest.approx(
                    delta_v_tfic_closed(n, beta, 1.0), rel=1e-9
                )
                assert chi_f_thermal(spec, v, beta) == pytest.approx(
                    chi_f_tfic_closed(n, beta, 1.0), rel=1e-9
                )
