"""Command-line front end: envelopes, exit codes, determinism, replay.

Each invocation must print exactly one JSON document shaped as
{"command", "config", "inputs", "result"} with every numeric field an
exact rational string.  Exit codes: 0 success, 2 precondition violation,
3 budget exhaustion (with partial results), 1 internal error.
"""

from __future__ import annotations

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from fatcantor import Box, CantorSchedule, Gen, base_expr
from fatcantor.serialize import box_to_json, expr_to_json


def run_cli(*args: str):
    proc = subprocess.run(
        [sys.executable, "-m", "fatcantor", *args],
        capture_output=True,
        text=True,
        timeout=120,
    )
    return proc


def run_json(*args: str):
    proc = run_cli(*args)
    assert proc.stdout, f"no stdout; stderr: {proc.stderr}"
    return proc.returncode, json.loads(proc.stdout)


def assert_no_floats(doc, path="$"):
    if isinstance(doc, float):
        raise AssertionError(f"float leaked into JSON at {path}: {doc}")
    if isinstance(doc, dict):
        for k, v in doc.items():
            assert_no_floats(v, f"{path}.{k}")
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            assert_no_floats(v, f"{path}[{i}]")


@pytest.fixture()
def expr_file(tmp_path):
    path = tmp_path / "expr.json"
    path.write_text(json.dumps(expr_to_json(base_expr(CantorSchedule(1)))))
    return str(path)


@pytest.fixture()
def target_file(tmp_path):
    path = tmp_path / "target.json"
    path.write_text(json.dumps(box_to_json(Box.interval(Fraction(0), Fraction(1, 2)))))
    return str(path)


# ---------------------------------------------------------------------------
# envelopes and exit codes
# ---------------------------------------------------------------------------


class TestEnvelope:
    def test_cantor_info_has_the_standard_envelope(self):
        code, doc = run_json("cantor-info", "--stage", "4")
        assert code == 0
        assert set(doc) == {"command", "config", "inputs", "result"}
        assert doc["command"] == "cantor-info"
        assert doc["config"]["d"] == 1
        assert doc["config"]["c"] == "1/1"
        assert doc["config"]["rho"] == "1/4"
        assert "seed" in doc["config"]
        assert doc["result"]["limit_measure"] == "1/2"
        assert doc["result"]["stage_measure"] == "17/32"
        assert_no_floats(doc)

    def test_every_command_output_is_float_free(self, expr_file, target_file, tmp_path):
        invocations = [
            ("cantor-info",),
            ("measure", "--expr-file", expr_file, "--stage", "3"),
            ("split-check", "--expr-file", expr_file, "--threshold", "1/2"),
            ("rn-enumerate", "--expr-file", expr_file, "--n", "2"),
            ("cover-search", "--target-file", expr_file, "--expr-file", expr_file, "--stage", "2"),
            ("uncovered-box", "--expr-file", expr_file, "--stage-cap", "8"),
            ("infinite-cube", "--pool-size", "2", "--stage-cap", "8"),
            ("pack", "--sides", "1/2,1/4,1/4"),
            ("hausdorff-bound", "--delta", "1/8"),
            ("corollary-demo", "--delta", "1/4"),
            ("range-solve", "--x", "1/2", "--stage", "6"),
            ("tile-check", "--q", "3/2"),
        ]
        for argv in invocations:
            code, doc = run_json(*argv)
            assert code == 0, (argv, doc)
            assert set(doc) >= {"command", "config", "inputs", "result"}
            assert_no_floats(doc)

    def test_unknown_flags_exit_two(self):
        proc = run_cli("cantor-info", "--frobnicate")
        assert proc.returncode == 2

    def test_unknown_command_exits_two(self):
        proc = run_cli("no-such-command")
        assert proc.returncode == 2

    def test_bad_schedule_exits_two(self):
        proc = run_cli("cantor-info", "--rho", "1/2")
        assert proc.returncode == 2
        assert proc.stderr  # human-readable diagnostic

    def test_infeasible_pack_family_exits_two(self):
        proc = run_cli("pack", "--sides", "1/4,1/8")
        assert proc.returncode == 2

    def test_budget_exhaustion_exits_three_with_partial_results(self, tmp_path):
        # a 16-element quartered pool cannot be separated at stage cap 1
        from fatcantor import quartered_translate_pool

        pool = quartered_translate_pool(CantorSchedule(1), 16)
        path = tmp_path / "pool.json"
        path.write_text(json.dumps([expr_to_json(e) for e in pool]))
        code, doc = run_json("uncovered-box", "--expr-file", str(path), "--stage-cap", "1")
        assert code == 3
        assert doc["result"]["found"] is False
        assert doc["result"]["needs_deeper_stage"]["deepest_stage"] == 1

    def test_range_solve_budget_exit(self):
        proc = run_cli("range-solve", "--target", "1/3", "--max-iter", "2")
        assert proc.returncode == 3
        doc = json.loads(proc.stdout)
        assert doc["result"]["error"]["kind"] == "budget"
        assert "partial" in doc["result"]["error"]


# ---------------------------------------------------------------------------
# representative results
# ---------------------------------------------------------------------------


class TestResults:
    def test_measure_reports_the_frozen_bracket(self, expr_file):
        code, doc = run_json("measure", "--expr-file", expr_file, "--stage", "4")
        assert code == 0
        assert doc["result"]["bounds"]["lower"] == "1/2"
        assert doc["result"]["bounds"]["upper"] == "17/32"

    def test_split_check_reports_equality(self, expr_file):
        code, doc = run_json(
            "split-check", "--expr-file", expr_file, "--threshold", "1/2", "--stage", "4"
        )
        assert code == 0
        assert doc["result"]["report"]["equal"] is True

    def test_pack_covers_the_advertised_interval(self):
        code, doc = run_json("pack", "--sides", "1/2,1/4,1/4")
        assert code == 0
        target = doc["result"]["layout"]["target"]
        assert target == {"lo": ["0/1"], "hi": ["1/2"]}

    def test_uncovered_box_with_no_elements_kept_exit_zero(self):
        code, doc = run_json("uncovered-box", "--stage-cap", "4")
        assert code == 0
        assert doc["result"]["found"] is True

    def test_corollary_demo_reports_all_checks(self):
        code, doc = run_json("corollary-demo", "--delta", "1/4")
        assert code == 0
        checks = doc["result"]["report"]["checks"]
        assert checks["sum_exceeds_half_a"] is True
        assert checks["covers_target"] is True

    def test_out_flag_writes_the_document(self, tmp_path):
        out = tmp_path / "report.json"
        proc = run_cli("cantor-info", "--out", str(out))
        assert proc.returncode == 0
        doc = json.loads(out.read_text())
        assert doc["command"] == "cantor-info"

    def test_seed_is_echoed(self):
        code, doc = run_json("cantor-info", "--seed", "1234")
        assert code == 0
        assert doc["config"]["seed"] == 1234


# ---------------------------------------------------------------------------
# determinism and replay
# ---------------------------------------------------------------------------


class TestDeterminismAndReplay:
    def test_reruns_are_byte_identical(self):
        a = run_cli("corollary-demo", "--delta", "1/4")
        b = run_cli("corollary-demo", "--delta", "1/4")
        assert a.stdout == b.stdout
        assert a.stdout.endswith("\n")

    def test_verify_replay_accepts_all_core_commands(self, expr_file):
        invocations = [
            ("cantor-info",),
            ("measure", "--expr-file", expr_file, "--stage", "3"),
            ("split-check", "--expr-file", expr_file, "--threshold", "1/3"),
            ("uncovered-box", "--expr-file", expr_file, "--stage-cap", "8"),
            ("pack", "--sides", "1/2,1/4,1/4"),
            ("corollary-demo", "--delta", "1/4"),
            ("range-solve", "--target", "1/4"),
            ("tile-check", "--q", "2"),
        ]
        for argv in invocations:
            code, doc = run_json(*argv, "--verify")
            assert code == 0, (argv, doc)
            assert doc["result"]["verification"] == {"requested": True, "ok": True}

    def test_verification_flag_defaults_to_not_requested(self):
        code, doc = run_json("cantor-info")
        assert doc["result"]["verification"]["requested"] is False
