import csv
import json

import pytest

from linkquery.cli import main

NS = "http://cli.example/"


@pytest.fixture()
def small_web(write_web):
    return write_web(
        {
            NS + "s": (
                f"<{NS}s> <{NS}p> <{NS}a> .\n"
                f"<{NS}s> <{NS}p> <{NS}b> .\n"
            ),
            NS + "a": f"<{NS}a> <{NS}q> <{NS}z> .\n",
            NS + "b": "",
        },
        name="cliweb",
    )


QUERY = f"SELECT ?o WHERE {{ <{NS}s> <{NS}p> ?o . }}"


def test_query_prints_answers_and_footer(small_web, capsys):
    assert main(["query", QUERY, "--resolver", f"fixture:{small_web}"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == f"?o=<{NS}a>"
    assert out[1] == f"?o=<{NS}b>"
    assert out[2].startswith("# results=2 time_s=")
    assert "truncated=False" in out[2]


def test_query_json_output(small_web, capsys):
    assert main(["query", QUERY, "--json", "--setup", "select", "--resolver", f"fixture:{small_web}"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["setup"] == "select"
    assert sorted(a["o"] for a in doc["answers"]) == [f"<{NS}a>", f"<{NS}b>"]
    assert doc["metrics"]["results"] == 2
    assert doc["metrics"]["inferred"] == 0


def test_resolver_from_environment(small_web, capsys, monkeypatch):
    monkeypatch.setenv("LINKQUERY_RESOLVER", f"fixture:{small_web}")
    assert main(["query", QUERY]) == 0
    assert "# results=2" in capsys.readouterr().out


def test_missing_resolver_is_a_usage_error(capsys, monkeypatch):
    monkeypatch.delenv("LINKQUERY_RESOLVER", raising=False)
    assert main(["query", QUERY]) == 2
    assert "no resolver" in capsys.readouterr().err


def test_bad_resolver_spec(capsys):
    assert main(["query", QUERY, "--resolver", "ftp:somewhere"]) == 2
    assert "bad resolver spec" in capsys.readouterr().err


def test_nonexistent_fixture_dir(capsys, tmp_path):
    assert main(["query", QUERY, "--resolver", f"fixture:{tmp_path / 'nope'}"]) == 2


def test_bad_query_text(small_web, capsys):
    assert main(["query", "SELECT ?o WHERE { broken", "--resolver", f"fixture:{small_web}"]) == 2
    assert "bad query" in capsys.readouterr().err


def test_unknown_setup(small_web, capsys):
    assert main(["query", QUERY, "--setup", "turbo", "--resolver", f"fixture:{small_web}"]) == 2
    assert "unknown setup 'turbo'" in capsys.readouterr().err


def test_query_rejects_setup_lists(small_web, capsys):
    assert main(["query", QUERY, "--setup", "base,select", "--resolver", f"fixture:{small_web}"]) == 2


def test_bad_fetch_limit(small_web, capsys):
    assert main(["query", QUERY, "--max-lookups", "0", "--resolver", f"fixture:{small_web}"]) == 2


def test_gen_fixture_single_and_counted(tmp_path, capsys):
    one = tmp_path / "one"
    assert main(["gen-fixture", "--out", str(one), "--seed", "5"]) == 0
    assert (one / "manifest.tsv").exists()
    assert (one / "suite.tsv").exists()
    assert (one / "ground_truth.tsv").exists()

    many = tmp_path / "many"
    assert main(["gen-fixture", "--out", str(many), "--seed", "5", "--count", "2"]) == 0
    assert (many / "web005" / "manifest.tsv").exists()
    assert (many / "web006" / "manifest.tsv").exists()
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_gen_fixture_bad_knobs(tmp_path, capsys):
    assert main(["gen-fixture", "--out", str(tmp_path / "w"), "--hubs", "1"]) == 2


@pytest.fixture(scope="module")
def bench_web(tmp_path_factory):
    out = tmp_path_factory.mktemp("benchweb") / "w"
    assert main(["gen-fixture", "--out", str(out), "--seed", "11"]) == 0
    return out


def test_bench_latex_to_stdout(bench_web, capsys):
    assert (
        main(
            [
                "bench",
                "--suite",
                str(bench_web / "suite.tsv"),
                "--setups",
                "base,select",
                "--resolver",
                f"fixture:{bench_web}",
            ]
        )
        == 0
    )
    out = capsys.readouterr().out
    assert out.startswith("\\begin{tabular}")
    assert "{\\tt base}&" in out and "{\\tt select}&" in out
    assert "Query class \\textbf{entity-s}" in out


def test_bench_csv_files(bench_web, tmp_path):
    table = tmp_path / "table.csv"
    per_query = tmp_path / "runs.csv"
    assert (
        main(
            [
                "bench",
                "--suite",
                str(bench_web / "suite.tsv"),
                "--setups",
                "base",
                "--format",
                "csv",
                "--out",
                str(table),
                "--per-query",
                str(per_query),
                "--resolver",
                f"fixture:{bench_web}",
            ]
        )
        == 0
    )
    with open(table, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert all(r["setup"] == "base" for r in rows)
    with open(per_query, newline="", encoding="utf-8") as fh:
        runs = list(csv.DictReader(fh))
    assert {r["class"] for r in runs} >= {"entity-s", "star-s3"}


def test_bench_unwritable_output_is_an_environment_error(bench_web, capsys, tmp_path):
    code = main(
        [
            "bench",
            "--suite",
            str(bench_web / "suite.tsv"),
            "--setups",
            "base",
            "--out",
            str(tmp_path / "missing" / "x.tex"),
            "--resolver",
            f"fixture:{bench_web}",
        ]
    )
    assert code == 3
    assert "environment error" in capsys.readouterr().err


def test_bench_missing_suite(bench_web, capsys, tmp_path):
    assert (
        main(
            [
                "bench",
                "--suite",
                str(tmp_path / "nope.tsv"),
                "--resolver",
                f"fixture:{bench_web}",
            ]
        )
        == 3
    )


def test_record_then_replay_matches(small_web, tmp_path, capsys):
    archive = tmp_path / "tape.bin"
    assert (
        main(
            [
                "record",
                "--archive",
                str(archive),
                "--query",
                QUERY,
                "--setups",
                "base",
                "--resolver",
                f"fixture:{small_web}",
            ]
        )
        == 0
    )
    recorded = capsys.readouterr().out
    assert f"?o=<{NS}a>" in recorded
    assert "# recorded" in recorded
    assert archive.stat().st_size > 0

    assert main(["query", QUERY, "--resolver", f"replay:{archive}"]) == 0
    replayed = capsys.readouterr().out
    assert f"?o=<{NS}a>" in replayed and f"?o=<{NS}b>" in replayed


def test_record_suite(small_web, tmp_path, capsys):
    suite = tmp_path / "suite.tsv"
    suite.write_text(f"q01\tentity-s\t{QUERY}\n", encoding="utf-8")
    archive = tmp_path / "tape.bin"
    assert (
        main(
            [
                "record",
                "--archive",
                str(archive),
                "--suite",
                str(suite),
                "--setups",
                "base,select",
                "--resolver",
                f"fixture:{small_web}",
            ]
        )
        == 0
    )
    assert "# recorded" in capsys.readouterr().out
