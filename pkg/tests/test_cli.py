import csv
import io
import logging

import pytest

from catzx.cli import CSV_COLUMNS, EXIT_OK, EXIT_USAGE, BenchRecord, main, summarize

GHZ = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[0];
cx q[0], q[1];
t q[1];
cx q[1], q[2];
tdg q[2];
h q[2];
"""


def run(argv) -> int:
    with pytest.raises(SystemExit) as info:
        main(argv)
    return info.value.code


def lines_with(text: str, prefix: str):
    return [line for line in text.splitlines() if line.startswith(prefix)]


def test_simulate_empty_circuit(qasm_file, capsys):
    path = qasm_file("qreg q[2];\n")
    assert run(["simulate", "--qasm", path, "--in", "0+", "--out", "0+"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "amplitude_float: 1 0" in out
    assert "decompositions: none" in out
    assert "effective_alpha: n/a" in out


def test_simulate_strategies_agree(qasm_file, capsys):
    path = qasm_file(GHZ)
    found = []
    for strategy in ("cats", "bss", "naive"):
        assert run(["simulate", "--qasm", path, "--in", "000", "--out", "+0-", "--strategy", strategy]) == EXIT_OK
        found.append(lines_with(capsys.readouterr().out, "amplitude:"))
    assert found[0] == found[1] == found[2]


def test_simulate_dump_diagram(qasm_file, capsys):
    path = qasm_file("qreg q[1];\nt q[0];\nh q[0];\nt q[0];\n")
    assert run(["simulate", "--qasm", path, "--in", "+", "--out", "+", "--dump-diagram"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.index("amplitude:") > 0
    assert "t_count: 2" in out


def test_simulate_requires_qasm(capsys):
    assert run(["simulate", "--in", "0", "--out", "0"]) == EXIT_USAGE
    assert "--qasm" in capsys.readouterr().err


@pytest.mark.parametrize(
    "text,spec",
    [("qreg q[1];\nrx(0.3) q[0];\n", "0"), ("qreg q[1];\nh q[0];\n", "01")],
)
def test_simulate_bad_input_is_a_usage_error(qasm_file, caplog, text, spec):
    path = qasm_file(text)
    assert run(["simulate", "--qasm", path, "--in", spec, "--out", spec]) == EXIT_USAGE
    assert "❌" in caplog.text


def test_simulate_missing_file(tmp_path):
    assert run(["simulate", "--qasm", str(tmp_path / "nope.qasm"), "--in", "0", "--out", "0"]) == EXIT_USAGE


def test_bench_with_no_instances_writes_the_header(capsys):
    assert run(["bench", "hiddenshift", "--qubits", "6", "--ccz", "2", "--count", "0"]) == EXIT_OK
    captured = capsys.readouterr()
    assert captured.out == ",".join(CSV_COLUMNS) + "\n"
    assert "records=0" in captured.err


def test_bench_cliffordt_to_file(tmp_path, capsys):
    path = tmp_path / "bench.csv"
    argv = ["bench", "cliffordt", "--qubits", "4", "--tmax", "4", "--step", "3", "--reps", "2", "--seed", "5", "-o", str(path)]
    assert run(argv) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert list(rows[0]) == CSV_COLUMNS
    assert [r["id"] for r in rows] == [
        "cliffordt-q4-t1-r0", "cliffordt-q4-t1-r1", "cliffordt-q4-t4-r0", "cliffordt-q4-t4-r1",
    ]
    assert [r["seed"] for r in rows] == ["5", "6", "7", "8"]
    assert [r["t_count"] for r in rows] == ["1", "1", "4", "4"]
    assert all(r["strategy"] == "cats" and int(r["leaf_terms"]) >= 1 for r in rows)
    assert "records=4" in capsys.readouterr().err


def test_bench_hiddenshift_amplitudes(capsys):
    assert run(["bench", "hiddenshift", "--qubits", "6", "--ccz", "2", "--count", "2"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["id"] for r in rows] == ["hiddenshift-q6-c2-0", "hiddenshift-q6-c2-1"]
    assert all(float(r["amp_re"]) == pytest.approx(1.0) and float(r["amp_im"]) == 0 for r in rows)


def test_bench_rejects_bad_ranges(capsys):
    assert run(["bench", "cliffordt", "--qubits", "4", "--tmax", "0"]) == EXIT_USAGE
    assert run(["bench", "hiddenshift", "--qubits", "5", "--ccz", "2", "--count", "1"]) == EXIT_USAGE


def test_env_file_sets_the_strategy(tmp_path, qasm_file, capsys, caplog):
    caplog.set_level(logging.INFO)
    env = tmp_path / "run.env"
    env.write_text("CATZX_STRATEGY=naive\n")
    path = qasm_file("qreg q[1];\nt q[0];\nh q[0];\nt q[0];\n")
    assert run(["simulate", "--qasm", path, "--in", "+", "--out", "+", "--env", str(env)]) == EXIT_OK
    assert "decompositions: t1=" in capsys.readouterr().out
    assert "[CONFIG] Loaded environment" in caplog.text


def test_flag_overrides_the_env_file(tmp_path, qasm_file, capsys):
    env = tmp_path / "run.env"
    env.write_text("CATZX_STRATEGY=naive\n")
    path = qasm_file("qreg q[1];\nt q[0];\nh q[0];\nt q[0];\n")
    assert run(["simulate", "--qasm", path, "--in", "+", "--out", "+", "--env", str(env), "--strategy", "bss"]) == EXIT_OK
    assert "decompositions: t2=1" in capsys.readouterr().out


def test_invalid_environment_is_a_usage_error(monkeypatch, qasm_file, caplog):
    monkeypatch.setenv("CATZX_WORKERS", "0")
    path = qasm_file("qreg q[1];\n")
    assert run(["simulate", "--qasm", path, "--in", "0", "--out", "0"]) == EXIT_USAGE
    assert "Invalid configuration" in caplog.text


def test_bench_record_row_format():
    record = BenchRecord(
        id="x", qubits=2, t_count=3, strategy="cats", seed=1, wall_ms=1.23456,
        leaf_terms=4, effective_alpha=None, amp_re=0.5, amp_im=-0.25,
    )
    assert record.to_row() == ["x", "2", "3", "cats", "1", "1.235", "4", "", "0.5", "-0.25"]


def test_summary_line():
    record = BenchRecord(
        id="x", qubits=2, t_count=3, strategy="cats", seed=1, wall_ms=10.0,
        leaf_terms=4, effective_alpha=0.5, amp_re=0.0, amp_im=0.0,
    )
    assert summarize([record, record]) == "📊 records=2 mean_log10_ms=1.0000 var_log10_ms=0.0000 median_leaf_terms=4"
    assert summarize([]) == "📊 records=0"


@pytest.mark.parametrize("alpha", [None, 0.396125])
def test_bench_record_reads_back_its_row(alpha):
    record = BenchRecord(
        id="cliffordt-q4-t4-r0", qubits=4, t_count=4, strategy="bss", seed=7, wall_ms=12.5,
        leaf_terms=9, effective_alpha=alpha, amp_re=0.1 + 0.2, amp_im=-1 / 3,
    )
    back = BenchRecord.from_row(record.to_row())
    assert back == record
    assert back.amp_re == 0.1 + 0.2 and back.amp_im == -1 / 3


def test_bench_rows_read_back_from_the_csv(capsys):
    assert run(["bench", "cliffordt", "--qubits", "4", "--tmax", "4", "--step", "3", "--reps", "1"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == CSV_COLUMNS
    records = [BenchRecord.from_row(row) for row in rows[1:]]
    assert [r.t_count for r in records] == [1, 4]
    assert [r.to_row() for r in records] == rows[1:]


def test_bench_record_rejects_short_rows():
    with pytest.raises(ValueError, match="columns"):
        BenchRecord.from_row(["x", "2"])


def test_simulate_angled_gates(qasm_file, capsys):
    path = qasm_file("qreg q[2];\nh q[0];\nrz(pi/4) q[0];\npexp_ZZ(3*pi/4) q[0], q[1];\nh q[0];\n")
    assert run(["simulate", "--qasm", path, "--in", "00", "--out", "00"]) == EXIT_OK
    assert "t_count: 2" in capsys.readouterr().out
