"""Cycle assembly: stage populations, heats, work, efficiency and flags."""

import numpy as np
import pytest

from xxz_engine import (
    CycleKind,
    CycleSpec,
    SystemParams,
    cycle_thermo,
    efficiency,
    eigenenergies,
    evaluate_cycle,
    gibbs_state,
    positive_work_condition,
    stage_entropy_production,
    stage_populations,
    stage_states,
    stage_temperatures,
    unity_efficiency_condition,
    w_max,
)

STROKES = dict(delta_c=0.10, delta_h=0.99, kappa=0.05)


def make_spec(kind, B, T_M, dT, **overrides):
    fields = dict(STROKES)
    fields.update(overrides)
    return CycleSpec(kind=kind, B=B, T_M=T_M, dT=dT, **fields)


def test_stage_temperatures_floor():
    assert stage_temperatures(make_spec("qoc", 0.0, 1.2, 2.4)) == (2.4, 0.005)
    assert stage_temperatures(make_spec("qoc", 0.0, 6.0, 0.0)) == (6.0, 6.0)
    assert stage_temperatures(make_spec("qoc", 0.0, 6.0, 12.0)) == (12.0, 0.005)


def test_asymmetric_cold_stage_pins_singlet():
    p_c, _ = stage_populations(make_spec("gqoc-asym", 0.5, 1.2, 2.4))
    assert p_c.probability(3) > 0.99


def test_qoc_hot_stage_approaches_maximal_mixing():
    # the singlet sits ~1.5 below the other levels, so at T_hot = 12 the
    # Gibbs skew is ~0.03; it keeps shrinking as the mean temperature grows
    _, p_h = stage_populations(make_spec("qoc", 0.5, 6.0, 12.0))
    skew = np.abs(p_h.as_array() - 0.25).max()
    assert skew < 0.035
    _, hotter = stage_populations(make_spec("qoc", 0.5, 24.0, 48.0))
    assert np.abs(hotter.as_array() - 0.25).max() < skew / 3.0


def test_zero_gradient_reduces_stages_to_gibbs():
    for kind in ("gqoc-sym", "gqoc-asym"):
        spec = make_spec(kind, 0.4, 1.5, 0.0)
        p_c, p_h = stage_populations(spec)
        eigen_c = eigenenergies(SystemParams(B=0.4, J=1.0, delta=0.10))
        eigen_h = eigenenergies(SystemParams(B=0.4, J=1.0, delta=0.99))
        assert np.abs(p_c.as_array() - gibbs_state(eigen_c, 1.5).as_array()).max() < 1e-10
        assert np.abs(p_h.as_array() - gibbs_state(eigen_h, 1.5).as_array()).max() < 1e-10


def test_identical_stage_populations_do_no_work():
    eigen_c = eigenenergies(SystemParams(B=0.3, J=1.0, delta=0.10))
    eigen_h = eigenenergies(SystemParams(B=0.3, J=1.0, delta=0.99))
    same = gibbs_state(eigen_c, 1.0)
    q12, q34, w = cycle_thermo(same, same, eigen_c, eigen_h)
    assert q12 == 0.0 and q34 == 0.0 and w == 0.0


def test_equal_spectra_do_no_work():
    eigen = eigenenergies(SystemParams(B=0.3, J=1.0, delta=0.10))
    p_a = gibbs_state(eigen, 0.4)
    p_b = gibbs_state(eigen, 3.0)
    _, _, w = cycle_thermo(p_a, p_b, eigen, eigen)
    assert w == 0.0


def test_first_law_is_bit_exact():
    result = evaluate_cycle(make_spec("gqoc-asym", 0.5, 1.2, 2.4))
    assert result.w == result.q12 + result.q34


def test_work_identity_against_population_differences():
    for kind in ("qoc", "gqoc-sym", "gqoc-asym"):
        result = evaluate_cycle(make_spec(kind, 0.7, 1.2, 2.4))
        predicted = w_max(0.10, 0.99) * (result.xi34 - result.xi12)
        assert abs(result.w - predicted) < 1e-12


def test_efficiency_cases():
    assert efficiency(1.0, 1.0, 2.0) == 1.0
    assert efficiency(-1.0, 2.0, 1.0) == 0.5
    assert efficiency(1.0, -2.0, -1.0) is None
    assert efficiency(-1.0, -1.0, -2.0) is None


def test_positive_work_condition_matches_work_sign():
    for kind in ("qoc", "gqoc-sym", "gqoc-asym"):
        for B in (-1.3, -0.5, 0.0, 0.6, 1.4, 2.5):
            result = evaluate_cycle(make_spec(kind, B, 1.2, 2.4))
            xi12, xi34, satisfied = positive_work_condition(result.p_c, result.p_h)
            assert satisfied == (result.w > 0.0)
            assert xi12 == result.xi12 and xi34 == result.xi34


def test_positive_work_condition_trivial_case():
    eigen = eigenenergies(SystemParams(B=0.3, J=1.0, delta=0.10))
    same = gibbs_state(eigen, 1.0)
    xi12, xi34, satisfied = positive_work_condition(same, same)
    assert xi12 == 0.0 and xi34 == 0.0 and not satisfied


def test_w_max_values():
    assert w_max(0.10, 0.99) == pytest.approx(0.445, abs=1e-15)
    assert w_max(0.0, 2.0) == 1.0
    with pytest.raises(ValueError):
        w_max(0.5, 0.5)


def test_asymmetric_cycle_example_produces_work():
    result = evaluate_cycle(make_spec("gqoc-asym", 0.5, 1.2, 2.4))
    assert result.w > 0.0
    assert result.positive_work
    assert result.eta is not None and 0.0 < result.eta <= 1.0


def test_symmetric_cycle_example_wastes_work():
    result = evaluate_cycle(make_spec("gqoc-sym", 0.5, 1.2, 2.4))
    assert result.w < 0.0
    assert not result.positive_work
    assert result.eta is None


def test_peak_work_near_saturation_value():
    result = evaluate_cycle(make_spec("gqoc-asym", 0.5, 6.0, 12.0))
    assert result.w > 0.4  # within reach of the 0.445 ceiling


def test_unity_flag_is_both_heats_positive():
    wmax = w_max(0.10, 0.99)
    for kind in ("qoc", "gqoc-asym"):
        for B in (-2.5, -2.2, -1.0, 0.0, 1.0, 2.2, 2.5):
            result = evaluate_cycle(make_spec(kind, B, 6.0, 12.0))
            expected = result.q12 > 0.0 and result.q34 > 0.0
            assert unity_efficiency_condition(result, wmax) == expected
            assert result.unity == expected
            if expected:
                assert result.eta == 1.0


def test_qoc_operating_regime_releases_cold_heat():
    # wherever the plain Otto cycle does work, it absorbs q34, releases q12,
    # and the absorbed heat dominates
    for T_M in (0.21, 1.2, 6.0):
        for k in range(61):
            B = -3.0 + 0.1 * k
            result = evaluate_cycle(make_spec("qoc", B, T_M, 2.0 * T_M))
            if result.w > 0.0:
                assert result.q34 > 0.0 > result.q12
                assert result.q34 > abs(result.q12)


def test_unity_never_holds_with_released_cold_heat():
    result = evaluate_cycle(make_spec("qoc", 0.5, 6.0, 12.0))
    assert result.q12 < 0.0
    assert not result.unity


def test_field_reversal_symmetry():
    for kind in ("qoc", "gqoc-sym", "gqoc-asym"):
        for B in (0.3, 0.77, 1.5, 2.2):
            forward = evaluate_cycle(make_spec(kind, B, 1.2, 2.4))
            mirrored = evaluate_cycle(make_spec(kind, -B, 1.2, 2.4))
            assert abs(forward.w - mirrored.w) < 1e-10
            assert abs(forward.q12 - mirrored.q12) < 1e-10


def test_stage_entropy_production_signs():
    stage_c, stage_h = stage_states(make_spec("gqoc-asym", 0.5, 1.2, 2.4))
    assert stage_entropy_production(stage_c) > 0.0
    assert stage_entropy_production(stage_h) > 0.0
    qoc_c, qoc_h = stage_states(make_spec("qoc", 0.5, 1.2, 2.4))
    assert stage_entropy_production(qoc_c) == 0.0
    assert stage_entropy_production(qoc_h) == 0.0


def test_spec_validation():
    with pytest.raises(ValueError):
        make_spec("qoc", 0.0, 1.2, 2.4, delta_c=0.99, delta_h=0.10)
    with pytest.raises(ValueError):
        make_spec("qoc", 0.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        make_spec("qoc", 0.0, 1.2, -0.1)
    with pytest.raises(ValueError):
        CycleSpec(kind="bogus", B=0.0, T_M=1.0, dT=0.0, **STROKES)
    with pytest.raises(ValueError):
        make_spec("qoc", 0.0, 0.001, 0.0)  # hot stage below the floor


def test_kind_accepts_strings():
    spec = make_spec("qoc", 0.0, 1.2, 2.4)
    assert spec.kind is CycleKind.QOC
