import json
import os

import pytest

from logsched.cli import build_parser, main

FAST = [
    "--servers", "12", "--requests", "120", "--windows", "6", "--objects", "30",
    "--runs", "2", "--base-seed", "5",
]


def run_cli(args, capsys=None):
    code = main(args)
    return code


def read_all(directory):
    out = {}
    for name in sorted(os.listdir(directory)):
        with open(os.path.join(directory, name), "rb") as fp:
            out[name] = fp.read()
    return out


def test_writes_expected_files(tmp_path, capsys):
    out = tmp_path / "res"
    code = main(FAST + ["--algorithms", "rr,nltr:2", "--output-dir", str(out)])
    assert code == 0
    names = sorted(os.listdir(out))
    assert names == [
        "nltr2_avg_loads.csv", "nltr2_avg_loads.json",
        "nltr2_histogram.csv", "nltr2_histogram.json",
        "rr_avg_loads.csv", "rr_avg_loads.json",
        "rr_histogram.csv", "rr_histogram.json",
        "summary.csv", "summary.json",
    ]
    printed = capsys.readouterr().out
    assert "rr:" in printed and "nltr:2:" in printed
    assert "wrote 10 files" in printed


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = FAST + ["--algorithms", "rr,mlml", "--formats", "csv,json,svg"]
    assert main(args + ["--output-dir", str(a)]) == 0
    assert main(args + ["--output-dir", str(b)]) == 0
    files_a, files_b = read_all(a), read_all(b)
    assert files_a.keys() == files_b.keys()
    for name in files_a:
        assert files_a[name] == files_b[name], name


def test_seed_changes_results(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(FAST + ["--algorithms", "rr", "--output-dir", str(a)]) == 0
    args_b = [x if x != "5" else "6" for x in FAST]
    assert main(args_b + ["--algorithms", "rr", "--output-dir", str(b)]) == 0
    assert read_all(a)["rr_avg_loads.csv"] != read_all(b)["rr_avg_loads.csv"]


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "conf.json"
    cfg.write_text(json.dumps({
        "servers": 12, "requests": 80, "windows": 5, "objects": 20,
        "runs": 1, "algorithms": "rr", "output-dir": str(tmp_path / "out"),
    }))
    assert main(["--config", str(cfg)]) == 0
    assert (tmp_path / "out" / "rr_avg_loads.csv").exists()


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "conf.json"
    cfg.write_text(json.dumps({
        "servers": 12, "requests": 80, "windows": 5, "objects": 20,
        "runs": 1, "algorithms": "rr", "output-dir": str(tmp_path / "ignored"),
    }))
    out = tmp_path / "actual"
    assert main(["--config", str(cfg), "--output-dir", str(out)]) == 0
    assert out.exists()
    assert not (tmp_path / "ignored").exists()


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "conf.json"
    cfg.write_text(json.dumps({"serverz": 5}))
    assert main(["--config", str(cfg)]) == 2
    assert "serverz" in capsys.readouterr().err


def test_malformed_config_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "conf.json"
    cfg.write_text("{nope")
    assert main(["--config", str(cfg)]) == 2
    cfg.write_text(json.dumps([1, 2]))
    assert main(["--config", str(cfg)]) == 2


def test_bad_algorithm_is_usage_error(tmp_path, capsys):
    assert main(FAST + ["--algorithms", "quantum", "--output-dir", str(tmp_path)]) == 2
    assert "quantum" in capsys.readouterr().err


def test_bad_values_are_usage_errors(tmp_path):
    assert main(FAST + ["--mix", "1,2", "--output-dir", str(tmp_path)]) == 2
    assert main(FAST + ["--formats", "pdf", "--output-dir", str(tmp_path)]) == 2
    assert main(FAST + ["--straggler-fraction", "2.0", "--output-dir", str(tmp_path)]) == 2
    assert main(FAST + ["--runs", "0", "--output-dir", str(tmp_path)]) == 2
    assert main(FAST + ["--algorithms", "nltr:6", "--output-dir", str(tmp_path)]) == 2


def test_unknown_flag_exits_two(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["--frobnicate"])
    assert exc.value.code == 2


def test_missing_workload_file_is_runtime_error(tmp_path, capsys):
    code = main(FAST + [
        "--algorithms", "rr",
        "--workload-file", str(tmp_path / "absent.txt"),
        "--output-dir", str(tmp_path / "out"),
    ])
    assert code == 1


def test_dump_then_replay_reproduces_results(tmp_path):
    # single run: the dump holds run 0's stream, and a replay feeds the
    # same stream to every run
    dump = tmp_path / "stream.txt"
    a, b = tmp_path / "a", tmp_path / "b"
    args = FAST + ["--runs", "1", "--algorithms", "mlml"]
    assert main(args + ["--dump-workload", str(dump), "--output-dir", str(a)]) == 0
    assert dump.exists()
    assert main(args + ["--workload-file", str(dump), "--output-dir", str(b)]) == 0

    def rows(path):
        # config echo differs (the replay names its workload file), the
        # data rows must not
        with open(path) as fp:
            return [line for line in fp if not line.startswith("#")]

    assert rows(a / "mlml_avg_loads.csv") == rows(b / "mlml_avg_loads.csv")
    assert rows(a / "mlml_histogram.csv") == rows(b / "mlml_histogram.csv")


def test_threshold_inf_accepted(tmp_path):
    out = tmp_path / "out"
    assert main(FAST + ["--algorithms", "trh", "--threshold", "inf", "--output-dir", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["policies"][0]["redirect_fraction"] == 0.0


def test_parser_defaults_match_documented_values():
    args = build_parser().parse_args([])
    assert args.servers == 100
    assert args.requests == 2000
    assert args.windows == 50
    assert args.runs == 1
    assert args.algorithms == "rr,mlml,trh,nltr:1,nltr:2"
    assert args.formats == "csv,json"
    assert args.maintainer is True
    assert args.threshold is None


def test_config_echo_lands_in_outputs(tmp_path):
    out = tmp_path / "out"
    assert main(FAST + ["--algorithms", "rr", "--output-dir", str(out)]) == 0
    csv_head = (out / "rr_avg_loads.csv").read_text().splitlines()[:30]
    assert any(line.startswith("# servers=12") for line in csv_head)
    payload = json.loads((out / "rr_avg_loads.json").read_text())
    assert payload["config"]["servers"] == 12
    assert payload["config"]["base-seed"] == 5
