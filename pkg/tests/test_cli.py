import json

import pytest
from click.testing import CliRunner

from fxscout.cli import main
from fxscout.corpus import save_index
from fxscout.effects import read_corpus


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def index_path(small_index, tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "index.json"
    save_index(small_index, path)
    return str(path)


def test_generate_writes_jsonl(runner, tmp_path):
    out = tmp_path / "corpus.jsonl"
    result = runner.invoke(main, ["corpus", "generate", "--size", "12",
                                  "--seed", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "wrote 12 effects" in result.output
    assert len(read_corpus(out)) == 12


def test_generate_rejects_unknown_family(runner, tmp_path):
    result = runner.invoke(main, ["corpus", "generate", "--size", "4",
                                  "--families", "volcano",
                                  "--out", str(tmp_path / "x.jsonl")])
    assert result.exit_code == 2
    assert "error:" in result.output


def test_build_index_and_stats(runner, tmp_path):
    corpus_path = tmp_path / "corpus.jsonl"
    index_out = tmp_path / "index.json"
    runner.invoke(main, ["corpus", "generate", "--size", "8", "--seed", "1",
                         "--out", str(corpus_path)])
    result = runner.invoke(main, ["corpus", "build-index",
                                  "--in", str(corpus_path),
                                  "--out", str(index_out)])
    assert result.exit_code == 0, result.output
    assert "indexed 8 effects" in result.output
    assert index_out.exists()

    result = runner.invoke(main, ["corpus", "stats",
                                  "--index", str(index_out)])
    assert result.exit_code == 0, result.output
    header, *rows = result.output.strip().split("\n")
    assert header == "scope\ttheme\tcount\tduration\tshape\ttrail"
    assert any(row.startswith("between") for row in rows)


def test_build_index_sigma_override(runner, tmp_path):
    corpus_path = tmp_path / "corpus.jsonl"
    runner.invoke(main, ["corpus", "generate", "--size", "4", "--seed", "1",
                         "--out", str(corpus_path)])
    result = runner.invoke(main, ["corpus", "build-index",
                                  "--in", str(corpus_path),
                                  "--out", str(tmp_path / "i.json"),
                                  "--sigma", "2.0"])
    assert result.exit_code == 0
    assert "sigma=2.000000" in result.output
    result = runner.invoke(main, ["corpus", "build-index",
                                  "--in", str(corpus_path),
                                  "--out", str(tmp_path / "i.json"),
                                  "--sigma", "lots"])
    assert result.exit_code == 2


def test_build_index_missing_input(runner, tmp_path):
    result = runner.invoke(main, ["corpus", "build-index",
                                  "--in", str(tmp_path / "missing.jsonl"),
                                  "--out", str(tmp_path / "i.json")])
    assert result.exit_code == 1


def test_search_text_format(runner, index_path, small_index):
    result = runner.invoke(main, ["search", "--index", index_path,
                                  "--text", "golden red expanding ring",
                                  "-w", "1.0", "--k", "3"])
    assert result.exit_code == 0, result.output
    lines = result.output.strip().split("\n")
    assert len(lines) == 3
    rank, effect_id, sim, transformation = lines[0].split("\t")
    assert rank == "1"
    assert effect_id in small_index.ids
    assert 0.0 <= float(sim) <= 1.0
    assert transformation.startswith("identity scale=")


def test_search_json_lines(runner, index_path):
    result = runner.invoke(main, ["search", "--index", index_path,
                                  "--text", "spiral fountain of light",
                                  "--format", "json-lines", "--k", "2"])
    assert result.exit_code == 0, result.output
    docs = [json.loads(line) for line in result.output.strip().split("\n")]
    assert [d["rank"] for d in docs] == [1, 2]
    assert all("similarity" in d and "best_transformation" in d
               for d in docs)


def test_search_kinematics_file(runner, index_path, small_index, tmp_path):
    effect_id = small_index.ids[0]
    kin_path = tmp_path / "kin.json"
    kin_path.write_text(json.dumps(
        small_index.entries[effect_id].representation.kinematics.to_dict()))
    result = runner.invoke(main, ["search", "--index", index_path,
                                  "--kinematics-file", str(kin_path),
                                  "-w", "0.0", "--k", "1"])
    assert result.exit_code == 0, result.output
    assert result.output.split("\t")[1] == effect_id


def test_search_usage_errors(runner, index_path):
    result = runner.invoke(main, ["search", "--index", index_path])
    assert result.exit_code == 2
    result = runner.invoke(main, ["search", "--index", index_path,
                                  "--text", "x", "-w", "1.5"])
    assert result.exit_code == 2


def test_search_missing_index(runner, tmp_path):
    result = runner.invoke(main, ["search",
                                  "--index", str(tmp_path / "no.json"),
                                  "--text", "x"])
    assert result.exit_code == 1


def test_eval_metric_passes_and_is_deterministic(runner, index_path):
    args = ["eval-metric", "--index", index_path, "--pairs", "20",
            "--seed", "5"]
    first = runner.invoke(main, args)
    assert first.exit_code == 0, first.output
    second = runner.invoke(main, args)
    assert first.stdout == second.stdout
    assert "pairs: 20" in first.stdout
    assert "violations: 0" in first.stdout


def test_eval_metric_needs_two_effects(runner, tmp_path, small_index,
                                       providers, config):
    from fxscout.corpus import build_index
    lone = build_index([small_index.entries[small_index.ids[0]].definition],
                       providers, config)
    path = tmp_path / "one.json"
    save_index(lone, path)
    result = runner.invoke(main, ["eval-metric", "--index", str(path)])
    assert result.exit_code == 2


def test_config_file_flows_through(runner, tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"top_k": 2}))
    corpus_path = tmp_path / "corpus.jsonl"
    runner.invoke(main, ["corpus", "generate", "--size", "6", "--seed", "2",
                         "--out", str(corpus_path)])
    index_out = tmp_path / "index.json"
    runner.invoke(main, ["--config", str(config_path), "corpus",
                         "build-index", "--in", str(corpus_path),
                         "--out", str(index_out)])
    result = runner.invoke(main, ["--config", str(config_path), "search",
                                  "--index", str(index_out),
                                  "--text", "ring of sparks"])
    assert result.exit_code == 0, result.output
    assert len(result.output.strip().split("\n")) == 2


def test_bad_config_rejected(runner, tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text("{not json")
    result = runner.invoke(main, ["--config", str(config_path), "corpus",
                                  "generate", "--size", "1",
                                  "--out", str(tmp_path / "x.jsonl")])
    assert result.exit_code == 2
