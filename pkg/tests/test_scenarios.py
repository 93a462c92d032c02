"""End-to-end scenario reports: frozen spot values and report plumbing."""

import dataclasses
import json
import math

import pytest

from pointerlab.scenarios import DEFAULTS, SCENARIOS, ScenarioConfig, run_scenario

REPORT_KEYS = {
    "scenario",
    "config",
    "readouts",
    "predictions",
    "defects",
    "checks",
    "readability",
    "schmidt",
    "purity",
    "pass",
    "notes",
    "runtime_seconds",
}

TAN_PI_8 = 0.41421356237309503


def test_registry_and_defaults_line_up():
    assert set(SCENARIOS) == set(DEFAULTS)
    assert len(SCENARIOS) == 7


def test_all_defaults_pass(default_reports):
    failed = {
        name: [k for k, ok in report.checks.items() if not ok]
        for name, report in default_reports.items()
        if not report.passed
    }
    assert not failed


def test_reports_serialize_to_json(default_reports):
    for report in default_reports.values():
        d = report.to_dict()
        assert set(d) == REPORT_KEYS
        json.loads(json.dumps(d))  # strict JSON, no NaN/inf leakage


def test_runs_are_deterministic():
    a = run_scenario("weak-noselect").to_dict()
    b = run_scenario("weak-noselect").to_dict()
    a.pop("runtime_seconds")
    b.pop("runtime_seconds")
    assert a == b


def test_unknown_scenario_rejected():
    with pytest.raises(KeyError):
        run_scenario("weak-unselect")


def test_unknown_grid_profile_rejected():
    cfg = dataclasses.replace(DEFAULTS["weak-noselect"], grid_profile="ultrafine")
    with pytest.raises(ValueError, match="profile"):
        run_scenario("weak-noselect", cfg)


class TestWeakNoselect:
    def test_mean_frozen(self, default_reports):
        # impulse 0.2 times <sigma_z> = 1/2 at theta = pi/3
        report = default_reports["weak-noselect"]
        assert report.readouts["mean_a"] == pytest.approx(0.1, abs=1e-8)
        assert report.predictions["mean_a"] == pytest.approx(0.1, abs=1e-12)

    def test_record_is_weakly_entangled(self, default_reports):
        report = default_reports["weak-noselect"]
        assert report.schmidt["rank"] == 2
        assert report.purity < 1.0 - 1e-6


class TestWeakPostselect:
    def test_probability_frozen(self, default_reports):
        report = default_reports["weak-postselect"]
        # (1 + sin(pi/4) exp(-(gt)^2/2)) / 2 at gt = 0.01
        assert report.readouts["probability"] == pytest.approx(0.85353571, abs=1e-8)

    def test_normalized_mean_tracks_weak_value(self, default_reports):
        report = default_reports["weak-postselect"]
        assert report.predictions["weak_value_re"] == pytest.approx(TAN_PI_8, abs=1e-12)
        assert report.predictions["weak_value_im"] == pytest.approx(0.0, abs=1e-12)
        readout = report.readouts["normalized_mean_a"]
        assert readout == pytest.approx(0.01 * TAN_PI_8, rel=1e-4)

    def test_scaling_checks_active(self, default_reports):
        checks = default_reports["weak-postselect"].checks
        assert checks["probability_first_order_scaling"]
        assert checks["normalized_mean_a_first_order_scaling"]


class TestSimultaneous:
    def test_record_entangled(self, default_reports):
        readability = default_reports["simultaneous"].readability
        assert readability["status"] == "entangled"
        assert readability["ppt_min"] < -1e-6

    def test_cross_moment_beyond_first_order(self, default_reports):
        report = default_reports["simultaneous"]
        assert report.checks["cross_moment_beyond_first_order"]
        assert report.readouts["cross_moment"] == pytest.approx(
            report.predictions["cross_moment"], abs=1e-3
        )


class TestWeakOrders:
    def test_defect_ratios_frozen(self, default_reports):
        report = default_reports["weak-orders"]
        assert report.readouts["defect_ratio_order1"] == pytest.approx(4.0, abs=0.5)
        assert report.readouts["defect_ratio_order2"] == pytest.approx(8.0, abs=1.0)

    def test_coupling_strength_ladder(self, default_reports):
        report = default_reports["weak-orders"]
        assert report.defects["first_order_certificate"] < 1e-8
        assert report.readouts["ppt_min_strong_coupling"] < -1e-4
        assert abs(report.readouts["ppt_min_weak_coupling"]) < 1e-8


class TestEigenstate:
    def test_purity_frozen(self, default_reports):
        report = default_reports["eigenstate"]
        expected = 0.5 * (1.0 + math.exp(-0.25))
        assert report.readouts["purity"] == pytest.approx(expected, abs=1e-6)
        assert report.readouts["mean_a"] == pytest.approx(0.0, abs=1e-9)

    def test_true_eigenstate_input_stays_sharp(self):
        cfg = dataclasses.replace(DEFAULTS["eigenstate"], theta_i=math.pi / 2)
        report = run_scenario("eigenstate", cfg)
        assert report.passed
        assert report.readouts["mean_a"] == pytest.approx(0.5, abs=1e-9)
        assert report.readouts["purity"] == pytest.approx(1.0, abs=1e-9)
        assert report.schmidt["rank"] == 1


class TestEpr:
    def test_anticorrelation_frozen(self, default_reports):
        report = default_reports["epr"]
        assert report.readouts["correlation"] == pytest.approx(-1.0, abs=1e-12)
        assert report.readouts["mean_a"] == pytest.approx(0.0, abs=1e-9)
        assert report.readouts["mean_b"] == pytest.approx(0.0, abs=1e-9)

    def test_record_separable_with_flat_weights(self, default_reports):
        readability = default_reports["epr"].readability
        assert readability["status"] == "separable"
        assert sorted(readability["weights"]) == pytest.approx([0.25] * 4, abs=1e-10)

    def test_product_input_concentrates_weights(self):
        cfg = dataclasses.replace(DEFAULTS["epr"], theta_i=0.0)
        report = run_scenario("epr", cfg)
        assert report.passed
        assert report.readouts["mean_b"] == pytest.approx(-0.5, abs=1e-9)
        weights = report.readability["weights"]
        assert sorted(weights) == pytest.approx([0.5, 0.5], abs=1e-10)


class TestSequential:
    def test_second_stage_mean_frozen(self, default_reports):
        report = default_reports["sequential"]
        assert report.readouts["mean_b"] == pytest.approx(0.25, abs=1e-9)

    def test_first_stage_readout_is_damped(self, default_reports):
        report = default_reports["sequential"]
        assert report.readouts["mean_a"] == pytest.approx(
            report.predictions["mean_a_damped"], abs=1e-8
        )
        assert report.readouts["mean_a"] < report.predictions["mean_a_first_order"]

    def test_conditioning_moves_the_other_dial(self, default_reports):
        report = default_reports["sequential"]
        assert report.checks["conditioned_readout_shifts"]
        deviation = abs(report.readouts["conditioned_mean_a"] - report.readouts["mean_a"])
        assert deviation > 1e-3

    def test_record_separable(self, default_reports):
        readability = default_reports["sequential"].readability
        assert readability["status"] == "separable"
        assert readability["method"] == "sequential-branches"
