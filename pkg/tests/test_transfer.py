import math

import numpy as np
import pytest

from rmfnet.fixedpoint import SolverConfig
from rmfnet.model import NetworkSpec
from rmfnet.rmf import rmf_rhs
from rmfnet.transfer import (
    TransferQuery,
    saturation_bound,
    sqrt_asymptote,
    transfer_eval,
    transfer_sweep,
)

CFG = SolverConfig(quad_rel_tol=1e-12, quad_abs_tol=1e-14)


def two_input_query(rate, weight, tau=1.0):
    return TransferQuery(tau, 1.0, 1.0, ((rate, weight), (rate, weight)))


class TestTransferEval:
    def test_no_inputs_base_rate(self):
        q = TransferQuery(1.0, 1.0, 1.0, ())
        assert transfer_eval(q, CFG) == pytest.approx(1.0, rel=1e-12)

    def test_matches_pinned_network_component(self):
        q = two_input_query(1.0, 1.0)
        spec = NetworkSpec(
            3, (1.0,) * 3, (1.0,) * 3, (1.0,) * 3, ((0, 1, 1.0), (0, 2, 1.0))
        )
        pinned = rmf_rhs(spec, np.array([1.0, 1.0, 1.0]), CFG)[0]
        assert transfer_eval(q, CFG) == pytest.approx(pinned, rel=1e-10)

    def test_strictly_increasing_in_rates(self):
        vals = [transfer_eval(two_input_query(x, 1.0), CFG) for x in (0.5, 1.0, 2.0)]
        assert vals[0] < vals[1] < vals[2]

    def test_counting_neuron_query(self):
        q = TransferQuery(math.inf, 1.0, 1.0, ((1.0, 1.0),))
        spec = NetworkSpec(2, (math.inf,) * 2, (1.0,) * 2, (1.0,) * 2, ((0, 1, 1.0),))
        pinned = rmf_rhs(spec, np.array([1.0, 1.0]), CFG)[0]
        assert transfer_eval(q, CFG) == pytest.approx(pinned, rel=1e-10)

    def test_invalid_query(self):
        with pytest.raises(ValueError):
            TransferQuery(1.0, 1.0, 0.0, ())
        with pytest.raises(ValueError):
            TransferQuery(1.0, 0.5, 1.0, ())
        with pytest.raises(ValueError):
            TransferQuery(-1.0, 1.0, 1.0, ())
        with pytest.raises(ValueError):
            TransferQuery(1.0, 1.0, 1.0, ((-1.0, 1.0),))


class TestSqrtAsymptote:
    def test_arithmetic(self):
        q = TransferQuery(1.0, 1.0, 1.0, ((math.pi / 2, 1.0),))
        assert sqrt_asymptote(q) == pytest.approx(1.0, rel=1e-14)

    def test_homogeneity(self):
        q1 = two_input_query(5.0, 1.0)
        q2 = two_input_query(10.0, 1.0)
        assert sqrt_asymptote(q2) / sqrt_asymptote(q1) == pytest.approx(
            math.sqrt(2.0), rel=1e-14
        )

    def test_large_rate_ratio(self):
        q = two_input_query(1e4, 1.0)
        ratio = transfer_eval(q, CFG) / sqrt_asymptote(q)
        assert 0.9 <= ratio <= 1.1

    def test_sublinearity(self):
        # F(k beta) / F(beta) <= sqrt(k) (1 + eps) in the large-rate regime
        base = transfer_eval(two_input_query(2e3, 1.0), CFG)
        for k in (4.0, 16.0):
            scaled = transfer_eval(two_input_query(k * 2e3, 1.0), CFG)
            assert scaled / base <= math.sqrt(k) * 1.01

    def test_all_zero_interaction_rejected(self):
        with pytest.raises(ValueError):
            sqrt_asymptote(TransferQuery(1.0, 1.0, 1.0, ((1.0, 0.0),)))


class TestSaturationBound:
    def test_equal_base_and_reset_simplifies(self):
        bound, corrected = saturation_bound(two_input_query(1.0, 1e4))
        assert bound == 3.0
        assert corrected == pytest.approx(3.0 * (1.0 - 2.0 / 1e4), rel=1e-12)

    def test_no_inputs(self):
        bound, corrected = saturation_bound(TransferQuery(1.0, 1.0, 1.0, ()))
        assert bound == 1.0 and corrected == 1.0

    def test_zero_weight_disables_correction(self):
        bound, corrected = saturation_bound(
            TransferQuery(1.0, 1.0, 1.0, ((1.0, 0.0),))
        )
        assert bound == 2.0 and corrected is None

    def test_large_weight_regime(self):
        q = two_input_query(1.0, 1e4)
        f = transfer_eval(q, CFG)
        _, corrected = saturation_bound(q)
        assert abs(f - corrected) / corrected < 0.05

    def test_upper_bound_grid(self):
        # output stays below the bound for all large weights, b = r
        for w in (100.0, 1e3, 1e4):
            for rate in (0.5, 1.0, 3.0):
                q = two_input_query(rate, w)
                f = transfer_eval(q, CFG)
                bound, _ = saturation_bound(q)
                assert f <= bound * 1.01

    def test_reset_below_base_log_space_form(self):
        # cross-check the generic formula against direct quadrature of the
        # saturated renewal density: rate of a neuron whose every input
        # spike forces an output spike
        from scipy.integrate import quad

        tau, b, r = 2.0, 1.5, 0.5
        rates = (1.0, 2.0)
        q = TransferQuery(tau, b, r, tuple((x, 1e5) for x in rates))
        bound, _ = saturation_bound(q)
        total = b + sum(rates)
        # survival of the saturated neuron: all inputs spike it instantly,
        # so the interval ends at rate b(t) + sum(beta): integrate the
        # renewal survival exp(-integral of (relaxing hazard + sum rates))
        def surv(t):
            haz = b * t + (b - r) * tau * (math.exp(-t / tau) - 1.0)
            return math.exp(-haz - sum(rates) * t)

        mean = quad(surv, 0, 200, epsabs=1e-13, epsrel=1e-12, limit=300)[0]
        assert bound == pytest.approx(1.0 / mean, rel=1e-9)

    def test_infinite_tau_rejected(self):
        with pytest.raises(ValueError):
            saturation_bound(TransferQuery(math.inf, 1.0, 1.0, ((1.0, 1.0),)))


class TestSweep:
    def test_rate_sweep_rows(self):
        q = two_input_query(1.0, 1.0)
        rows = transfer_sweep(q, "rates", [1.0, 10.0, 100.0], CFG)
        assert len(rows) == 3
        values = [r[0] for r in rows]
        assert values == [1.0, 10.0, 100.0]
        fs = [r[1] for r in rows]
        assert fs[0] < fs[1] < fs[2]

    def test_weight_sweep_saturates(self):
        q = two_input_query(1.0, 1.0)
        rows = transfer_sweep(q, "weights", np.geomspace(1.0, 1e4, 5), CFG)
        fs = [r[1] for r in rows]
        bounds = [r[3] for r in rows]
        assert all(b == 3.0 for b in bounds)
        assert fs[-1] == pytest.approx(3.0, rel=1e-3)

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            transfer_sweep(two_input_query(1.0, 1.0), "phase", [1.0])
