import csv
import json

from statebound.cli import main
from statebound.gen import gen_lotus
from statebound.io import serialize_system


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTopo:
    def test_lotus3(self, capsys):
        code, out, _ = run(capsys, "topo", "--gen", "lotus", "--n", "3")
        assert code == 0
        assert "d=2 rd=2 td=3 exp=3" in out

    def test_clique2(self, capsys):
        code, out, _ = run(capsys, "topo", "--gen", "clique", "--m", "2")
        assert code == 0
        assert "d=1 rd=3 td=3 exp=3" in out

    def test_zero_action_file(self, capsys, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text('{"variables": ["a"], "actions": []}', encoding="utf-8")
        code, out, _ = run(capsys, "topo", "--input", str(path))
        assert code == 0
        assert "d=0 rd=0 td=0 exp=0" in out

    def test_witness_lines(self, capsys):
        code, out, _ = run(capsys, "topo", "--gen", "clique", "--m", "2", "--witness")
        assert code == 0
        assert "rd witness:" in out and "td walk:" in out

    def test_csv_written(self, capsys, tmp_path):
        target = tmp_path / "t.csv"
        code, _, _ = run(
            capsys, "topo", "--gen", "star", "--n", "3", "--csv", str(target)
        )
        assert code == 0
        rows = list(csv.DictReader(target.open()))
        assert rows[0]["base"] == "topo" and rows[0]["problem"] == "star_3"

    def test_cap_exceeded_machine_readable(self, capsys):
        code, _, err = run(
            capsys, "topo", "--gen", "clique", "--m", "4", "--max-vars", "2"
        )
        assert code == 4
        reason = json.loads(err.strip())
        assert reason["error"] == "state-space-too-large"


class TestRd:
    def test_clique_factored(self, capsys):
        code, out, _ = run(
            capsys, "rd", "--gen", "clique", "--m", "2", "--encoding", "factored"
        )
        assert code == 0
        assert "rd=3 (exact)" in out
        assert out.count("k=") == 4

    def test_lotus7_binary(self, capsys):
        code, out, _ = run(
            capsys,
            "rd", "--gen", "lotus", "--n", "7",
            "--encoding", "factored", "--schedule", "binary",
        )
        assert code == 0 and "rd=2 (exact)" in out

    def test_bruteforce_flag(self, capsys):
        code, out, _ = run(capsys, "rd", "--gen", "lotus", "--n", "3", "--bruteforce")
        assert code == 0 and "rd=2 (bruteforce)" in out

    def test_emit_smt(self, capsys, tmp_path):
        out_dir = tmp_path / "scripts"
        code, out, _ = run(
            capsys,
            "rd", "--gen", "lotus", "--n", "3",
            "--emit-smt", str(out_dir), "--max-k", "3",
        )
        assert code == 0
        names = sorted(p.name for p in out_dir.iterdir())
        assert names == ["phi2_k1.smt2", "phi2_k2.smt2", "phi2_k3.smt2"]
        assert "(check-sat)" in (out_dir / "phi2_k2.smt2").read_text()

    def test_emit_smt_explicit_naming(self, capsys, tmp_path):
        out_dir = tmp_path / "scripts"
        code, _, _ = run(
            capsys,
            "rd", "--gen", "clique", "--m", "2",
            "--encoding", "explicit", "--emit-smt", str(out_dir), "--max-k", "2",
        )
        assert code == 0
        assert sorted(p.name for p in out_dir.iterdir()) == [
            "phi1_k1.smt2",
            "phi1_k2.smt2",
        ]

    def test_missing_solver_is_hard_failure(self, capsys):
        code, _, err = run(
            capsys,
            "rd", "--gen", "clique", "--m", "2",
            "--solver-cmd", "/nonexistent/solver",
        )
        assert code == 4
        assert json.loads(err.strip())["error"] == "solver-failure"


class TestBound:
    def test_clique_b1(self, capsys):
        code, out, _ = run(
            capsys, "bound", "--gen", "clique", "--m", "2", "--base", "b1", "--bruteforce"
        )
        assert code == 0 and "total=3" in out

    def test_star_b1_no_solver_queries(self, capsys, tmp_path):
        target = tmp_path / "b.csv"
        code, out, _ = run(
            capsys,
            "bound", "--gen", "star", "--n", "3",
            "--base", "b1", "--csv", str(target),
        )
        assert code == 0 and "total=1" in out
        rows = list(csv.DictReader(target.open()))
        assert rows[0]["rd_queries"] == "0"

    def test_batch_and_jobs_determinism(self, capsys, tmp_path):
        batch = tmp_path / "problems"
        batch.mkdir()
        for n in (1, 2, 3):
            (batch / f"lotus_{n}.json").write_text(
                serialize_system(gen_lotus(n), "json"), encoding="utf-8"
            )
        csv_one = tmp_path / "jobs1.csv"
        csv_two = tmp_path / "jobs2.csv"
        code1, _, _ = run(
            capsys,
            "bound", "--batch", str(batch), "--base", "b1",
            "--bruteforce", "--csv", str(csv_one), "--jobs", "1",
        )
        code2, _, _ = run(
            capsys,
            "bound", "--batch", str(batch), "--base", "b1",
            "--bruteforce", "--csv", str(csv_two), "--jobs", "2",
        )
        assert code1 == code2 == 0

        def stable(path):
            rows = list(csv.DictReader(path.open()))
            timing = ("rd_time_ms", "td_time_ms", "total_time_ms")
            return [{k: v for k, v in row.items() if k not in timing} for row in rows]

        assert stable(csv_one) == stable(csv_two)

    def test_batch_continues_past_bad_file(self, capsys, tmp_path):
        batch = tmp_path / "problems"
        batch.mkdir()
        (batch / "good.json").write_text(
            serialize_system(gen_lotus(2), "json"), encoding="utf-8"
        )
        (batch / "bad.json").write_text("{not json", encoding="utf-8")
        target = tmp_path / "out.csv"
        code, out, err = run(
            capsys,
            "bound", "--batch", str(batch), "--base", "td",
            "--bruteforce", "--csv", str(target),
        )
        assert code == 3  # parse failure recorded
        assert "good: total=" in out
        assert "bad" in err and "FAILED" in err
        rows = list(csv.DictReader(target.open()))
        assert len(rows) == 1  # the good problem still produced a row

    def test_empty_batch_is_config_error(self, capsys, tmp_path):
        batch = tmp_path / "empty"
        batch.mkdir()
        code, _, _ = run(capsys, "bound", "--batch", str(batch))
        assert code == 2


class TestConjecture:
    def test_star_like_summary(self, capsys):
        code, out, _ = run(
            capsys,
            "conjecture", "--seeds", "1..10", "--vars", "3", "--actions", "4",
        )
        assert code == 0
        assert "counterexamples=0" in out

    def test_vars_cap(self, capsys):
        code, _, _ = run(capsys, "conjecture", "--seeds", "1..2", "--vars", "9")
        assert code == 2

    def test_bad_seed_range(self, capsys):
        code, _, _ = run(capsys, "conjecture", "--seeds", "oops")
        assert code == 2


class TestConfigErrors:
    def test_missing_input_and_gen(self, capsys):
        code, _, _ = run(capsys, "topo")
        assert code == 2

    def test_gen_without_size(self, capsys):
        code, _, _ = run(capsys, "topo", "--gen", "lotus")
        assert code == 2

    def test_unreadable_input(self, capsys):
        code, _, _ = run(capsys, "topo", "--input", "/nonexistent/x.json")
        assert code == 2

    def test_parse_error_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        code, _, err = run(capsys, "topo", "--input", str(bad))
        assert code == 3
        assert json.loads(err.strip())["error"] == "parse-error"
