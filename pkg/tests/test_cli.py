"""Command-line front end: exit codes, file outputs, and report formats."""

import csv
import dataclasses
import io
import json

import pytest

import anchorsched as asd
from anchorsched.cli import console_main

VALID_META = {"label": "manual", "seed": 0, "prng": "philox"}


def _write(tmp_path, inst, name="inst.json"):
    path = tmp_path / name
    asd.write_instance(dataclasses.replace(inst, meta=VALID_META), path)
    return path


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def test_generate_writes_named_files(tmp_path, capsys):
    rc = console_main(
        [
            "generate",
            "--label",
            "SP_pQCri_dUnif_G1",
            "--n",
            "8",
            "--seed",
            "3",
            "--count",
            "2",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    for seed in (3, 4):
        path = tmp_path / f"SP_pQCri_dUnif_G1_n8_s{seed}.json"
        assert path.exists()
        assert str(path) in lines
        inst = asd.read_instance(path)
        assert inst.meta["seed"] == seed


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        rc = console_main(
            ["generate", "--label", "ER_pRand_dRand_G2", "--n", "6",
             "--seed", "1", "--out", str(out)]
        )
        assert rc == 0
    name = "ER_pRand_dRand_G2_n6_s1.json"
    assert (a / name).read_bytes() == (b / name).read_bytes()


def test_generate_seed_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ANCHORSCHED_SEED", "17")
    rc = console_main(
        ["generate", "--label", "SP_pRand_dRand_G1", "--n", "5",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    capsys.readouterr()
    assert (tmp_path / "SP_pRand_dRand_G1_n5_s17.json").exists()
    monkeypatch.setenv("ANCHORSCHED_SEED", "not-a-number")
    rc = console_main(
        ["generate", "--label", "SP_pRand_dRand_G1", "--n", "5",
         "--out", str(tmp_path)]
    )
    assert rc == 4
    monkeypatch.delenv("ANCHORSCHED_SEED")
    rc = console_main(
        ["generate", "--label", "SP_pRand_dRand_G1", "--n", "5",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    assert (tmp_path / "SP_pRand_dRand_G1_n5_s0.json").exists()


def test_generate_bad_label_exit_code(tmp_path):
    rc = console_main(
        ["generate", "--label", "nope", "--n", "5", "--out", str(tmp_path)]
    )
    assert rc == 4


def test_missing_subcommand_exits_parse():
    assert console_main([]) == 4
    assert console_main(["frobnicate"]) == 4


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def test_solve_json_output(tmp_path, capsys, fig_budget):
    path = _write(tmp_path, fig_budget)
    rc = console_main(["solve", str(path)])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["status"] == "Optimal"
    assert data["objective"] == pytest.approx(4.0)
    assert len(data["anchored"]) == 4
    assert len(data["start"]) == 7
    assert data["method"] == "dom"
    ld = asd.worst_case_longest_paths(fig_budget.graph, fig_budget.delta)
    assert asd.is_x_anchored(
        fig_budget.graph, ld, data["start"], data["anchored"]
    )


def test_solve_methods_agree(tmp_path, capsys, fig_budget):
    path = _write(tmp_path, fig_budget)
    values = {}
    for method in ("auto", "std", "dom", "lay", "brute"):
        rc = console_main(["solve", str(path), "--method", method])
        assert rc == 0
        values[method] = json.loads(capsys.readouterr().out)["objective"]
    assert all(v == pytest.approx(4.0) for v in values.values()), values


def test_solve_pretty_and_out_file(tmp_path, capsys, fig_box):
    path = _write(tmp_path, fig_box)
    out = tmp_path / "sol.json"
    rc = console_main(["solve", str(path), "--pretty", "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "status" in text and "Optimal" in text and "anchored" in text
    saved = json.loads(out.read_text())
    assert saved["objective"] == pytest.approx(4.0)
    assert saved["method"] == "box"


def test_solve_export_lp(tmp_path, capsys, fig_budget):
    path = _write(tmp_path, fig_budget)
    lp = tmp_path / "model.lp"
    rc = console_main(["solve", str(path), "--export-lp", str(lp)])
    assert rc == 0
    capsys.readouterr()
    text = lp.read_text()
    assert "Maximize" in text and "Subject To" in text
    model = asd.parse_lp_file(lp)
    res = asd.solve_mip(model)
    assert res.value == pytest.approx(4.0)


def test_solve_cuts_restriction(tmp_path, capsys, fig_budget):
    path = _write(tmp_path, fig_budget)
    assert console_main(["solve", str(path), "--method", "std", "--cuts"]) == 4
    rc = console_main(["solve", str(path), "--method", "dom", "--cuts"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["method"] == "dom_cuts" and data["objective"] == pytest.approx(4.0)


def test_solve_exit_codes(tmp_path, capsys, fig_budget, fig_box):
    infeasible = _write(
        tmp_path, dataclasses.replace(fig_budget, deadline=3.5), "tight.json"
    )
    assert console_main(["solve", str(infeasible), "--method", "dom"]) == 2
    capsys.readouterr()
    box = _write(tmp_path, fig_box, "box.json")
    assert console_main(["solve", str(box), "--method", "lay"]) == 3
    broken = tmp_path / "broken.json"
    broken.write_text("{oops")
    assert console_main(["solve", str(broken)]) == 4
    assert console_main(["solve", str(tmp_path / "absent.json")]) == 4


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


@pytest.fixture()
def bench_dir(tmp_path):
    d = tmp_path / "bench"
    rc = console_main(
        ["generate", "--label", "SP_pQCri_dUnif_G1", "--n", "8",
         "--seed", "0", "--count", "2", "--out", str(d)]
    )
    assert rc == 0
    return d


def test_bench_csv_output(bench_dir, capsys):
    rc = console_main(["bench", str(bench_dir), "--methods", "dom,brute"])
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert {r["method"] for r in rows} == {"dom", "brute"}
    for row in rows:
        assert row["label"] == "SP_pQCri_dUnif_G1"
        assert row["solved_count"] == "2"
        assert float(row["mean_time_solved_s"]) >= 0.0
    by_method = {r["method"]: r for r in rows}
    assert float(by_method["dom"]["mean_opt"]) == pytest.approx(
        float(by_method["brute"]["mean_opt"])
    )
    # deadline preprocessing makes the relaxation exact on this class
    assert float(by_method["dom"]["mean_lpgap"]) == pytest.approx(0.0, abs=1e-9)
    assert by_method["brute"]["mean_lpgap"] == ""  # no relaxation for brute


def test_bench_out_file_and_table(bench_dir, tmp_path, capsys):
    out = tmp_path / "bench.csv"
    rc = console_main(
        ["bench", str(bench_dir), "--methods", "dom", "--out", str(out)]
    )
    assert rc == 0
    capsys.readouterr()
    header = out.read_text().splitlines()[0]
    assert header == (
        "label,method,solved_count,mean_time_solved_s,"
        "mean_final_gap_unsolved,mean_lpgap,mean_opt"
    )
    rc = console_main(["bench", str(bench_dir), "--methods", "dom", "--pretty"])
    assert rc == 0
    table = capsys.readouterr().out
    assert "mean_lpgap" in table and "SP_pQCri_dUnif_G1" in table


def test_bench_parallel_matches_serial(bench_dir, capsys):
    rc = console_main(["bench", str(bench_dir), "--methods", "dom,lay"])
    assert rc == 0
    serial = capsys.readouterr().out
    rc = console_main(["bench", str(bench_dir), "--methods", "dom,lay", "--jobs", "2"])
    assert rc == 0
    parallel = capsys.readouterr().out

    def _strip_times(text):
        rows = list(csv.reader(io.StringIO(text)))
        return [
            [c for i, c in enumerate(r) if i != 3]  # drop mean_time_solved_s
            for r in rows
        ]

    assert _strip_times(serial) == _strip_times(parallel)


def test_bench_rejects_bad_flags(bench_dir, tmp_path):
    assert console_main(["bench", str(bench_dir), "--methods", "dom,magic"]) == 4
    assert console_main(["bench", str(bench_dir), "--methods", "std", "--cuts"]) == 4
    empty = tmp_path / "empty"
    empty.mkdir()
    assert console_main(["bench", str(empty), "--methods", "dom"]) == 4


def test_bench_counts_unsupported_as_unsolved(tmp_path, capsys, fig_box):
    d = tmp_path / "mixed"
    d.mkdir()
    _write(d, fig_box, "box.json")
    rc = console_main(["bench", str(d), "--methods", "lay"])
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows[0]["solved_count"] == "0"


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _solution_file(tmp_path, start, anchored, name="sol.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"start": start, "anchored": anchored}))
    return path


WORKED_START = [0.0, 0.0, 0.0, 1.5, 3.0, 2.5, 4.5]


def test_verify_accepts_anchored_baseline(tmp_path, capsys, fig_box):
    inst = _write(tmp_path, fig_box)
    sol = _solution_file(tmp_path, WORKED_START, [1, 2, 4])
    rc = console_main(["verify", str(inst), str(sol)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "[verify] schedule: PASS" in out
    assert "[verify] deadline: PASS" in out
    assert "[verify] anchored: PASS" in out
    assert "[verify] OK" in out


def test_verify_rejects_overreaching_set(tmp_path, capsys, fig_box):
    inst = _write(tmp_path, fig_box)
    sol = _solution_file(tmp_path, WORKED_START, [1, 2, 4, 5])
    rc = console_main(["verify", str(inst), str(sol)])
    out = capsys.readouterr().out
    assert rc == 2
    assert "[verify] anchored: FAIL" in out


def test_verify_empty_set_passes(tmp_path, capsys, fig_box):
    inst = _write(tmp_path, fig_box)
    sol = _solution_file(tmp_path, WORKED_START, [])
    assert console_main(["verify", str(inst), str(sol)]) == 0
    assert "[verify] OK" in capsys.readouterr().out


def test_verify_flags_deadline_and_schedule_breaks(tmp_path, capsys, fig_box):
    inst = _write(tmp_path, fig_box)
    broken = list(WORKED_START)
    broken[3] = 0.0  # job 3 now starts before its predecessor finishes
    sol = _solution_file(tmp_path, broken, [])
    rc = console_main(["verify", str(inst), str(sol)])
    out = capsys.readouterr().out
    assert rc == 2 and "[verify] schedule: FAIL" in out
    slow = [1.5 * v for v in WORKED_START]  # valid schedule, misses deadline
    sol = _solution_file(tmp_path, slow, [], "slow.json")
    rc = console_main(["verify", str(inst), str(sol)])
    out = capsys.readouterr().out
    assert rc == 2 and "[verify] deadline: FAIL" in out


def test_verify_parse_errors(tmp_path, capsys, fig_box):
    inst = _write(tmp_path, fig_box)
    short = _solution_file(tmp_path, [0.0, 1.0], [], "short.json")
    assert console_main(["verify", str(inst), str(short)]) == 4
    out_of_range = _solution_file(tmp_path, WORKED_START, [9], "bad.json")
    assert console_main(["verify", str(inst), str(out_of_range)]) == 4
    garbage = tmp_path / "garbage.json"
    garbage.write_text("[1, 2]")
    assert console_main(["verify", str(inst), str(garbage)]) == 4
