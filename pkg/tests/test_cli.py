import json

from commembed.cli import main

KARATE_CFG = """
dataset: karate
methods: [comb.cnm, n2v]
partition_sources: [lpa]
seeds: [0, 1]
walk: {walk_len: 20, walks_per_node: 4}
sgns: {dim: 8, window: 3, epochs: 1}
"""


def test_run_csv_and_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(KARATE_CFG + f"output: {tmp_path / 'out.csv'}\n")
    assert main(["run", "--config", str(cfg)]) == 0
    lines = (tmp_path / "out.csv").read_text().splitlines()
    assert lines[0].startswith("dataset,method,partition_source,seed,K")
    assert len(lines) == 5
    assert main(["run", "--config", str(cfg), "--output", str(tmp_path / "o.json"), "--format", "json"]) == 0
    assert len(json.loads((tmp_path / "o.json").read_text())["records"]) == 4


def test_config_errors_exit_1(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("dataset: karate\nmethods: [nope]\n")
    assert main(["run", "--config", str(cfg)]) == 1
    cfg.write_text("dataset: [karate\n")
    assert main(["run", "--config", str(cfg)]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 1
    assert main(["gen-lfr", "--mu", "1.5", "--out-prefix", str(tmp_path / "x")]) == 1
    try:
        main(["partition", "--method", "infomap", "--edges", "x"])
    except SystemExit as exc:
        assert exc.code == 1


def test_runtime_failure_exit_2(tmp_path):
    bad = tmp_path / "bad.edges"
    bad.write_text("0 1\nfoo bar\n")
    assert main(["stats", "--edges", str(bad)]) == 2
    cfg = tmp_path / "c.yaml"
    cfg.write_text(KARATE_CFG + f"output: {tmp_path / 'nodir' / 'out.csv'}\n")
    assert main(["run", "--config", str(cfg)]) == 2


def test_gen_lfr_stats_partition(tmp_path, capsys):
    prefix = tmp_path / "lfr"
    assert main(["gen-lfr", "--n", "200", "--mu", "0.2", "--seed", "1", "--k-max", "20", "--c-max", "40",
                 "--out-prefix", str(prefix)]) == 0
    gen_stats = json.loads(capsys.readouterr().out)
    assert main(["stats", "--edges", f"{prefix}.edges", "--communities", f"{prefix}.cmty"]) == 0
    assert json.loads(capsys.readouterr().out) == gen_stats
    assert gen_stats["num_nodes"] == 200
    assert main(["partition", "--method", "louvain", "--edges", f"{prefix}.edges", "--out",
                 str(tmp_path / "p.cmty")]) == 0
    members = sorted(int(x) for line in (tmp_path / "p.cmty").read_text().splitlines() for x in line.split())
    assert members == list(range(200))
