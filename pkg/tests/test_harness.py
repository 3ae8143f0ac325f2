from __future__ import annotations

import csv
import io
import json
from dataclasses import replace

import pytest

from nspcheck.harness import (SCAN_COLUMNS, Campaign, audit_betti, boundary_codimension,
                              dump_counterexamples, known_threshold, rows_to_csv, run_corollary14_campaign,
                              run_theorem13_campaign, scan, restriction_codim_range, to_json, trial_seed,
                              verify_known_thresholds, write_dataset)
from nspcheck.models import parse_curve, parse_model
from nspcheck.subsystems import Generic

P = 32003


def test_trial_seeds_are_deterministic_and_distinct():
    seeds = [trial_seed(7, i) for i in range(100)]
    assert seeds == [trial_seed(7, i) for i in range(100)]
    assert len(set(seeds)) == 100
    assert trial_seed(8, 0) != trial_seed(7, 0)


def test_boundaries():
    pol = parse_model("p2:d=4")
    C = parse_curve("conic", pol.model)
    assert boundary_codimension(pol, C) == 8
    pol = parse_model("p2:d=3")
    assert boundary_codimension(pol, C) == 5
    pol = parse_model("hirzebruch:e=1,a=2,b=3")
    C = parse_curve(None, pol.model)
    assert boundary_codimension(pol, C) == 4
    lo, hi = restriction_codim_range(pol, C, P)
    assert lo == 1 and pol.h0 - hi >= 6


def test_known_thresholds_values():
    assert known_threshold(parse_model("p2:d=3")) == 6
    assert known_threshold(parse_model("hirzebruch:e=0,a=2,b=2")) == 5
    assert known_threshold(parse_model("hirzebruch:e=1,a=2,b=3")) == 5


@pytest.mark.parametrize("model,curve", [("p2:d=3", None), ("hirzebruch:e=1,a=2,b=3", "section:seed=0")])
def test_restriction_campaign_small(model, curve):
    res = run_theorem13_campaign(Campaign(model, curve, trials=6, seed=11))
    s = res["summary"]
    assert s["trials"] == 6 and s["counterexamples"] == 0
    for r in res["records"]:
        assert r["status"] == "ok"
        assert r["restriction_codim"] <= r["m"] - 2
        assert r["betti"][0][0] == 1 and r["betti"][1][0] == r["t"]
        if r["hypothesis_applies"]:
            assert r["nsp_holds"] and r["reg"] <= r["t"] + 2


def test_degenerate_complete_trial():
    res = run_corollary14_campaign(Campaign("p2:d=3", trials=2, seed=0, codims=(0, 0)))
    for r in res["records"]:
        assert r["t"] == 0 and r["subsystem"] == "complete"
        assert r["hypothesis_applies"] and r["nsp_holds"]


def test_boundary_campaign_summary():
    res = run_corollary14_campaign(Campaign("p2:d=4", trials=3, seed=2))
    s = res["summary"]
    assert s["boundary_codim"] == 8 and s["dim_v_at_boundary"] == 7
    assert s["lambda_identity"] and s["counterexamples"] == 0
    assert s["dimension_bounds"] == {"vector_space_2d": 8, "projective_2d_minus_1": 7}
    assert all(r["t"] == 8 and r["nsp_holds"] for r in res["records"])


def test_campaign_beyond_boundary_records_only():
    res = run_corollary14_campaign(Campaign("p2:d=3", trials=2, seed=0, codims=(6, 6)))
    assert all(not r["hypothesis_applies"] for r in res["records"])
    assert res["summary"]["counterexamples"] == 0


def test_campaign_is_deterministic_across_jobs(tmp_path):
    c = Campaign("p2:d=3", trials=4, seed=5)
    a = to_json(run_theorem13_campaign(c))
    b = to_json(run_theorem13_campaign(c))
    par = run_theorem13_campaign(replace(c, jobs=2))
    par["campaign"]["jobs"] = 1
    assert a == b == to_json(par)


def test_campaign_output_file(tmp_path):
    out = tmp_path / "camp.json"
    run_theorem13_campaign(Campaign("p2:d=3", trials=2, seed=1, output=str(out)))
    data = json.loads(out.read_text())
    assert data["summary"]["trials"] == 2
    assert not list(tmp_path.glob("counterexample-*"))


def test_counterexample_dump(tmp_path):
    c = Campaign("p2:d=3", trials=1, seed=0)
    res = run_theorem13_campaign(c)
    rec = dict(res["records"][0], status="counterexample")
    paths = dump_counterexamples(c, [rec], tmp_path)
    payload = json.loads(paths[0].read_text())
    assert payload["record"]["seed"] == rec["seed"]
    assert len(payload["basis"]) == rec["dim_v"]
    assert payload["campaign"]["prime"] == P


def test_runtime_cap_marks_trials_capped():
    res = run_theorem13_campaign(Campaign("p2:d=4", trials=2, seed=0, cap_seconds=1e-9))
    assert all(r["status"] == "capped" for r in res["records"])
    assert res["summary"]["counterexamples"] == 0


def test_errors_are_recorded_not_fatal():
    res = run_theorem13_campaign(Campaign("p2:d=3", trials=2, seed=0, codims=(20, 20)))
    assert all(r["status"] == "error" and r["error"] for r in res["records"])


def test_thresholds_holds_only_and_capped():
    rep = verify_known_thresholds(window=3, full=False)
    assert rep["all_pass"]
    assert all("first_failure" not in f for f in rep["fixtures"])
    rep = verify_known_thresholds(window=3, cap_seconds=1e-9)
    assert all(f["status"] == "capped" for f in rep["fixtures"])


# --------------------------------------------------------------------------
# scans


def test_scan_rows_and_schema():
    rows = scan("p2:d=3", [1, 2, 3], [0], seed=3)
    assert len(rows) == 3
    text = rows_to_csv(rows)
    parsed = list(csv.reader(io.StringIO(text, newline="")))
    assert tuple(parsed[0]) == SCAN_COLUMNS
    assert all(len(r) == len(SCAN_COLUMNS) for r in parsed)
    assert text.count("\r\n") == 4
    for r in rows:
        assert set(r) == set(SCAN_COLUMNS)
        assert r["restriction_codim"] == r["rc_target"] == 0


def test_scan_empty_grid_is_header_only(tmp_path):
    rows = scan("p2:d=3", [], [0, 1])
    out = tmp_path / "empty.csv"
    write_dataset(rows, out)
    assert out.read_bytes() == (",".join(SCAN_COLUMNS) + "\r\n").encode()


def test_scan_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_dataset(scan("hirzebruch:e=1,a=2,b=3", [1, 2], [0, 1], seed=9), a)
    write_dataset(scan("hirzebruch:e=1,a=2,b=3", [1, 2], [0, 1], seed=9), b)
    assert a.read_bytes() == b.read_bytes()
    j1, j2 = tmp_path / "a.json", tmp_path / "b.json"
    write_dataset(scan("p2:d=3", [1], [0, 1], seed=9), j1, "json")
    write_dataset(scan("p2:d=3", [1], [0, 1], seed=9), j2, "json")
    assert j1.read_bytes() == j2.read_bytes()


def test_scan_infeasible_cells_are_recorded():
    rows = scan("p2:d=3", [1], [3])
    assert rows[0]["status"] == "error" and "InfeasibleConstraint" in rows[0]["error"]


def test_audit_betti():
    rep = audit_betti("p2:d=3", Generic(1, 2), 2, 3, n_primes=3)
    assert rep["agree"] and len(rep["primes"]) == 3
