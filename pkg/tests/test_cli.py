import json
import subprocess
import sys
from fractions import Fraction

import pytest

from dyndense.cli import main
from dyndense.stream import TRACE_COLUMNS, format_stream, gen_random, read_trace

TRIANGLE = "n=3 mode=undirected\n+ 0 1\n+ 1 2\n+ 2 0\nq\n"


@pytest.fixture
def stream_file(tmp_path):
    def write(text: str, name: str = "s.txt") -> str:
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def queries(text: str) -> list[Fraction]:
    return [Fraction(r["density_exact"]) for r in read_trace(text) if r["op_kind"] == "q"]


class TestRun:
    def test_triangle(self, stream_file, capsys):
        assert main(["run", stream_file(TRIANGLE), "--epsilon", "1/2"]) == 0
        out = capsys.readouterr().out
        assert Fraction(1, 2) <= queries(out)[-1] <= 1

    def test_empty_stream(self, stream_file, capsys):
        assert main(["run", stream_file("")]) == 0
        assert capsys.readouterr().out == ",".join(TRACE_COLUMNS) + "\n"

    def test_bad_flag(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["run", "--frobnicate"])
        assert err.value.code == 1
        assert "usage:" in capsys.readouterr().err

    @pytest.mark.parametrize("eps", ["0", "1", "3/2", "abc"])
    def test_bad_epsilon(self, eps, capsys):
        with pytest.raises(SystemExit) as err:
            main(["run", "-", "--epsilon", eps])
        assert err.value.code == 1

    def test_bad_alpha(self):
        with pytest.raises(SystemExit) as err:
            main(["run", "-", "--alpha", "0"])
        assert err.value.code == 1

    def test_parse_error(self, stream_file, capsys):
        assert main(["run", stream_file("n=3\n+ 0 7\n")]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_strict(self, stream_file, capsys):
        path = stream_file("n=3\n- 0 1\nq\n")
        assert main(["run", path, "--strict"]) == 2
        capsys.readouterr()
        assert main(["run", path]) == 0
        captured = capsys.readouterr()
        assert "non-live" in captured.err
        assert len(read_trace(captured.out)) == 2

    def test_mode_mismatch(self, stream_file):
        assert main(["run", stream_file(TRIANGLE), "--mode", "directed"]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.txt")]) == 2

    def test_trace_file_and_determinism(self, stream_file, tmp_path):
        path = stream_file(format_stream(gen_random(6, 40, 1, 0.3, subgraph_every=5)))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["run", path, "--trace", str(a)]) == 0
        assert main(["run", path, "--trace", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert all(r["elapsed_ns"] == "" for r in read_trace(a.read_text()))

    def test_timing(self, stream_file, capsys):
        assert main(["run", stream_file(TRIANGLE), "--timing"]) == 0
        rows = read_trace(capsys.readouterr().out)
        assert all(int(r["elapsed_ns"]) >= 0 for r in rows)

    def test_engines_write_identical_traces(self, stream_file, capsys):
        path = stream_file(format_stream(gen_random(5, 30, 2, 0.3, "weighted", subgraph_every=4)))
        outs = []
        for engine in ("python", "numba"):
            assert main(["run", path, "--engine", engine]) == 0
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]

    def test_directed_subgraph_column(self, stream_file, capsys):
        text = "n=3 mode=directed\n+ 0 1\n+ 0 2\ns\nq\n"
        assert main(["run", stream_file(text), "--grid", "dyadic"]) == 0
        rows = read_trace(capsys.readouterr().out)
        assert rows[2]["subgraph"] == "0 | 1 2"

    def test_insert_only_is_monotone(self, stream_file, capsys):
        path = stream_file(format_stream(gen_random(7, 30, 4, p_delete=0)))
        assert main(["run", path]) == 0
        qs = queries(capsys.readouterr().out)
        assert qs == sorted(qs)


class TestVerify:
    def test_generated_seeds(self, capsys):
        code = main(["verify", "--n", "6", "--steps", "60", "--epsilon", "3/10", "--seeds", "2", "--subgraph-every", "5"])
        out = capsys.readouterr().out
        assert code == 0
        assert "failed=0" in out

    def test_weighted_input(self, stream_file, capsys):
        path = stream_file(format_stream(gen_random(5, 40, 3, 0.3, "weighted", subgraph_every=6)))
        assert main(["verify", path, "--epsilon", "3/10"]) == 0

    def test_directed(self, capsys):
        args = ["verify", "--mode", "directed", "--n", "4", "--steps", "12", "--grid", "dyadic", "--subgraph-every", "4"]
        assert main(args) == 0

    def test_negative_control(self, capsys):
        code = main(["verify", "--n", "8", "--steps", "200", "--epsilon", "3/10", "--alpha", "1", "--seeds", "2"])
        captured = capsys.readouterr()
        assert code == 3
        assert "outside the sandwich" in captured.err

    def test_oracle_guard(self, capsys):
        assert main(["verify", "--n", "21", "--steps", "3"]) == 1
        assert "oracle limit" in capsys.readouterr().err


class TestBench:
    def test_text_report(self, capsys):
        assert main(["bench", "--n", "10", "--steps", "40", "--alpha", "8"]) == 0
        out = capsys.readouterr().out
        for key in ("ops_per_sec", "mean_flips_per_update", "max_flips_per_update", "mean_chain_length", "per_copy"):
            assert key in out

    def test_json_and_determinism(self, capsys):
        args = ["bench", "--n", "12", "--steps", "60", "--alpha", "8", "--json", "--engine", "python"]
        runs = []
        for _ in range(2):
            assert main(args) == 0
            runs.append(json.loads(capsys.readouterr().out))
        assert runs[0]["mean_flips_per_update"] == runs[1]["mean_flips_per_update"]
        assert runs[0]["per_copy"] == runs[1]["per_copy"]
        assert runs[0]["updates"] == 60

    def test_directed(self, capsys):
        args = ["bench", "--mode", "directed", "--n", "3", "--steps", "6", "--alpha", "4", "--json"]
        assert main(args) == 0
        assert json.loads(capsys.readouterr().out)["updates"] == 6


def test_module_entry_point(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text(TRIANGLE)
    res = subprocess.run([sys.executable, "-m", "dyndense", "run", str(p)], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("op_index,")
    bad = subprocess.run([sys.executable, "-m", "dyndense", "nonsense"], capture_output=True, text=True)
    assert bad.returncode == 1
    assert "usage:" in bad.stderr
