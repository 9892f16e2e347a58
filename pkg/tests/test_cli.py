"""Command-line verbs on toy fixtures."""

import json

import pytest

from gridexit.cli import load_config_file, main
from gridexit.taskio import save_task

from conftest import make_toy_suite


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Toy tasks and a validated solver archive on disk."""
    root = tmp_path_factory.mktemp("cli")
    tasks, solvers = make_toy_suite()
    task_dir = root / "tasks"
    for task in tasks:
        save_task(task, task_dir)
    archive = root / "solvers.jsonl"
    with open(archive, "w") as fh:
        for e in solvers:
            fh.write(json.dumps({"task_id": e.task_id,
                                 "program": e.program_text}) + "\n")
    return root, task_dir, archive, tasks


def test_unknown_verb_fails():
    with pytest.raises(SystemExit):
        main(["warp"])


def test_dsl_doc(capsys):
    assert main(["dsl-doc"]) == 0
    out = capsys.readouterr().out
    assert "vmirror" in out and "ZERO" in out


def test_exec_prints_per_example(workspace, capsys, tmp_path):
    root, task_dir, archive, tasks = workspace
    program = tmp_path / "p.dsl"
    program.write_text("O = vmirror(I)")
    code = main(["exec", "--program", str(program),
                 "--task", str(task_dir / "leftright.json")])
    assert code == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert len(lines) == 2
    assert all(l["status"] == "ok" and l["matches_target"] for l in lines)


def test_exec_missing_file_is_error(tmp_path, capsys):
    code = main(["exec", "--program", str(tmp_path / "nope.dsl"),
                 "--task", str(tmp_path / "nope.json")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_evolve(workspace, tmp_path, capsys):
    root, task_dir, archive, tasks = workspace
    out_dir = tmp_path / "evolved"
    code = main(["evolve", "--archive", str(archive), "--tasks", str(task_dir),
                 "--samples", "100", "--seed", "0",
                 "--out-dir", str(out_dir)])
    assert code == 0
    assert (out_dir / "augmented.jsonl").exists()
    kept = len((out_dir / "augmented.jsonl").read_text().splitlines())
    assert 0 < kept <= 100


def test_baseline_d1_solves_toys(workspace, tmp_path, capsys):
    root, task_dir, archive, tasks = workspace
    out_dir = tmp_path / "bl"
    code = main(["baseline", "--mode", "d1", "--search-set", str(task_dir),
                 "--archive", str(archive), "--tasks", str(task_dir),
                 "--seed", "0", "--meta-iters", "1",
                 "--out-dir", str(out_dir)])
    assert code == 0
    metrics = [json.loads(l) for l in
               (out_dir / "metrics.jsonl").read_text().splitlines()]
    assert metrics[0]["programs_sampled"] == 24 * len(tasks)
    assert (out_dir / "solutions.jsonl").exists()


def test_baseline_random_deterministic(workspace, tmp_path):
    root, task_dir, archive, tasks = workspace
    outputs = []
    for d in ("r1", "r2"):
        out_dir = tmp_path / d
        code = main(["baseline", "--mode", "random",
                     "--search-set", str(task_dir), "--seed", "7",
                     "--meta-iters", "1", "--samples-per-iter", "300",
                     "--out-dir", str(out_dir)])
        assert code == 0
        outputs.append((out_dir / "metrics.jsonl").read_bytes()
                       + (out_dir / "solutions.jsonl").read_bytes())
    assert outputs[0] == outputs[1]


def test_run_eval_compare_pipeline(workspace, tmp_path, capsys):
    root, task_dir, archive, tasks = workspace
    out_dir = tmp_path / "run"
    code = main(["run", "--search-set", str(task_dir),
                 "--archive", str(archive), "--tasks", str(task_dir),
                 "--policy-endpoint", "builtin:random", "--seed", "0",
                 "--meta-iters", "2", "--n-rho", "8",
                 "--r-t", "30", "--r-p", "90", "--n-m", "60",
                 "--fuel-per-line", "200000",
                 "--out-dir", str(out_dir)])
    assert code == 0
    assert (out_dir / "config.json").exists()
    assert (out_dir / "metrics.jsonl").exists()
    capsys.readouterr()

    code = main(["eval", "--protocol", "pass3",
                 "--solutions", str(out_dir / "solutions.jsonl"),
                 "--tasks", str(task_dir),
                 "--out", str(tmp_path / "verdicts.jsonl")])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["total"] == len(tasks)

    code = main(["eval", "--protocol", "eval412",
                 "--solutions", str(out_dir / "solutions.jsonl"),
                 "--tasks", str(task_dir)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["total"] == sum(len(t.tests) for t in tasks)

    code = main(["compare", "--a", str(out_dir / "solutions.jsonl"),
                 "--b", str(out_dir / "solutions.jsonl"),
                 "--tasks", str(task_dir),
                 "--lengths", str(tmp_path / "lengths.csv")])
    assert code == 0
    cmp = json.loads(capsys.readouterr().out)
    assert cmp["only_a"] == 0 and cmp["only_b"] == 0
    assert (tmp_path / "lengths.csv").exists()


def test_run_with_config_file_and_overrides(workspace, tmp_path):
    root, task_dir, archive, tasks = workspace
    config = tmp_path / "run.cfg"
    config.write_text("\n".join([
        "# desk-scale settings",
        "n_rho = 4",
        "meta_iterations = 1",
        "r_t = 20",
        "r_p = 40",
        "n_m = 30",
        "fuel_per_line = 200000",
        'wall_per_line = null',
    ]))
    out_dir = tmp_path / "cfg-run"
    code = main(["run", "--config", str(config),
                 "--search-set", str(task_dir),
                 "--archive", str(archive), "--tasks", str(task_dir),
                 "--seed", "1", "--meta-iters", "2",
                 "--out-dir", str(out_dir)])
    assert code == 0
    snapshot = json.loads((out_dir / "config.json").read_text())
    assert snapshot["n_rho"] == 4           # from file
    assert snapshot["meta_iterations"] == 2  # flag overrides file
    assert snapshot["rng_seed"] == 1


def test_config_rejects_unknown_keys(tmp_path, capsys, workspace):
    root, task_dir, archive, tasks = workspace
    config = tmp_path / "bad.cfg"
    config.write_text("warp_speed = 9")
    code = main(["run", "--config", str(config),
                 "--search-set", str(task_dir),
                 "--out-dir", str(tmp_path / "x")])
    assert code == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_config_file_parsing(tmp_path):
    config = tmp_path / "c.cfg"
    config.write_text("a = 3\nb = 0.5  # trailing comment\nc = hello\n\n")
    assert load_config_file(config) == {"a": 3, "b": 0.5, "c": "hello"}


def test_codec_stats_utility(workspace, tmp_path, capsys):
    root, task_dir, archive, tasks = workspace
    from gridexit.codec_stats import main as codec_main, measure_dir
    stats = measure_dir(task_dir)
    assert stats["grids"] == sum(2 * (len(t.demos) + len(t.tests))
                                 for t in tasks)
    assert 0.0 <= stats["sparse_shorter_chars_fraction"] <= 1.0
    assert codec_main([str(task_dir)]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed == stats


def test_ablation_flags_reach_config(workspace, tmp_path):
    root, task_dir, archive, tasks = workspace
    out_dir = tmp_path / "abl"
    code = main(["run", "--search-set", str(task_dir),
                 "--archive", str(archive), "--tasks", str(task_dir),
                 "--seed", "0", "--meta-iters", "1", "--n-rho", "4",
                 "--r-t", "20", "--r-p", "40", "--n-m", "0",
                 "--fuel-per-line", "200000",
                 "--ablation", "no-priority", "--ablation", "one-demo",
                 "--out-dir", str(out_dir)])
    assert code == 0
    snapshot = json.loads((out_dir / "config.json").read_text())
    assert snapshot["ablation"]["no_priority"] is True
    assert snapshot["ablation"]["one_demo"] is True
    assert snapshot["ablation"]["no_exit"] is False
