"""Task files, solver archives, and the stratified split."""

import json

import pytest

from gridexit.taskio import (ArchiveError, SolverArchive, SolverEntry,
                             TaskFormatError, load_archive, load_evolved,
                             load_task, load_task_dir, program_line_count,
                             save_archive, save_evolved, save_task,
                             split_train_valid)


def _write_task(tmp_path, name="mini", grid=None):
    grid = grid or [[1]]
    payload = {"train": [{"input": grid, "output": grid}],
               "test": [{"input": grid, "output": grid}]}
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(payload))
    return path


class TestLoadTask:
    def test_minimal(self, tmp_path):
        task = load_task(_write_task(tmp_path))
        assert task.task_id == "mini"
        assert len(task.demos) == 1 and len(task.tests) == 1
        assert task.demos[0][0] == ((1,),)

    def test_oversize_grid_rejected(self, tmp_path):
        path = _write_task(tmp_path, grid=[[0] * 31])
        with pytest.raises(TaskFormatError, match="not a valid grid"):
            load_task(path)

    def test_missing_section(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"train": []}))
        with pytest.raises(TaskFormatError, match="train"):
            load_task(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(TaskFormatError, match="malformed JSON"):
            load_task(path)

    def test_dir_loading_sorted(self, tmp_path):
        _write_task(tmp_path, "bb")
        _write_task(tmp_path, "aa")
        tasks = load_task_dir(tmp_path)
        assert [t.task_id for t in tasks] == ["aa", "bb"]

    def test_save_then_load(self, tmp_path, toy_suite):
        tasks, _ = toy_suite
        save_task(tasks[0], tmp_path)
        again = load_task(tmp_path / f"{tasks[0].task_id}.json")
        assert again == tasks[0]


class TestArchive:
    def test_roundtrip(self, tmp_path, toy_suite, registry):
        tasks, solvers = toy_suite
        by_id = {t.task_id: t for t in tasks}
        path = tmp_path / "solvers.jsonl"
        save_archive(solvers, path, by_id, registry)
        archive = load_archive(path, by_id, registry)
        assert list(archive) == solvers

    def test_validation_names_offender(self, tmp_path, toy_suite, registry):
        tasks, solvers = toy_suite
        by_id = {t.task_id: t for t in tasks}
        bad = list(solvers)
        bad[1] = SolverEntry(bad[1].task_id, "O = rot90(I)")
        with pytest.raises(ArchiveError, match=bad[1].task_id):
            save_archive(bad, tmp_path / "bad.jsonl", by_id, registry)

    def test_unparseable_program_rejected(self, tmp_path, toy_suite, registry):
        tasks, _ = toy_suite
        by_id = {t.task_id: t for t in tasks}
        entry = SolverEntry(tasks[0].task_id, "O = warp(I)")
        with pytest.raises(ArchiveError, match="does not parse"):
            save_archive([entry], tmp_path / "x.jsonl", by_id, registry)


class TestSplit:
    def _archive(self, sizes):
        entries = []
        k = 0
        for line_count, how_many in sizes.items():
            body = "\n".join(f"x{j} = rot90(I)" if j == 1 else
                             f"x{j} = rot90(x{j-1})"
                             for j in range(1, line_count))
            for _ in range(how_many):
                text = (body + "\n" if body else "") + (
                    f"O = rot90(x{line_count-1})" if line_count > 1
                    else "O = rot90(I)")
                entries.append(SolverEntry(f"task{k:03d}", text))
                k += 1
        return SolverArchive(tuple(entries))

    def test_eighty_percent_per_stratum(self):
        archive = self._archive({2: 10})
        train, valid = split_train_valid(archive, rng_seed=0)
        assert (len(train), len(valid)) == (8, 2)

    def test_round_half_up(self):
        # (8n + 5) // 10: one-member strata go to train
        archive = self._archive({2: 1, 3: 1, 4: 3})
        train, valid = split_train_valid(archive, rng_seed=0)
        # strata: 1 -> 1/0, 1 -> 1/0, 3 -> ceil-ish 2/1... (8*3+5)//10 = 2
        assert (len(train), len(valid)) == (4, 1)

    def test_partition(self):
        archive = self._archive({2: 7, 3: 9, 5: 4})
        train, valid = split_train_valid(archive, rng_seed=3)
        train_ids = {e.task_id for e in train}
        valid_ids = {e.task_id for e in valid}
        assert train_ids & valid_ids == set()
        assert train_ids | valid_ids == {e.task_id for e in archive}

    def test_stratified_by_line_count(self):
        archive = self._archive({2: 5, 8: 5})
        train, valid = split_train_valid(archive, rng_seed=1)
        for part in (train, valid):
            by_lines = {}
            for e in part:
                by_lines.setdefault(program_line_count(e.program_text),
                                    0)
                by_lines[program_line_count(e.program_text)] += 1
        # each stratum contributes 4 train / 1 valid
        train_counts = {}
        for e in train:
            n = program_line_count(e.program_text)
            train_counts[n] = train_counts.get(n, 0) + 1
        assert train_counts == {2: 4, 8: 4}

    def test_deterministic(self):
        archive = self._archive({2: 9, 4: 6, 6: 2})
        a = split_train_valid(archive, rng_seed=5)
        b = split_train_valid(archive, rng_seed=5)
        assert a == b
        c = split_train_valid(archive, rng_seed=6)
        assert a != c  # different seed shuffles membership


class TestEvolvedPersistence:
    def test_roundtrip(self, tmp_path, registry, toy_suite):
        import random
        from gridexit.mutation import MutationConfig, evolve_tasks
        from gridexit.dsl import parse_program
        tasks, solvers = toy_suite
        by_id = {t.task_id: t for t in tasks}
        seeds = [(e.task_id, parse_program(e.program_text, registry),
                  by_id[e.task_id].demos) for e in solvers]
        evolved = evolve_tasks(seeds, MutationConfig(num_samples=60),
                               random.Random(0), registry)
        path = tmp_path / "augmented.jsonl"
        save_evolved(evolved, path)
        again = load_evolved(path, registry)
        assert len(again) == len(evolved)
        for a, b in zip(evolved, again):
            assert a.program == b.program
            assert a.examples == b.examples
            assert a.parent_task == b.parent_task
            assert a.generation == b.generation
