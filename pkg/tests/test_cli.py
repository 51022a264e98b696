import json

from sepkit.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_construct_prints_decimal(capsys):
    code, out, _ = run_cli(
        capsys, "construct", "--example", "1", "--sequence", "thue-morse",
        "--depth", "40", "--digits", "10",
    )
    assert code == 0
    assert out.strip() == "0.1354645854"


def test_construct_json_report(capsys):
    code, out, _ = run_cli(
        capsys, "construct", "--example", "1", "--depth", "3", "--digits", "10", "--json",
    )
    assert code == 0
    report = json.loads(out)
    assert report["config"]["command"] == "construct"
    assert report["parameter_decimal"] == "0.1354645854"
    assert [lv["n"] for lv in report["levels"]] == [1, 2, 3]
    assert report["levels"][2]["sigma"] == "212"
    assert report["levels"][2]["J"] == {"lo": "47/350", "hi": "24/175"}
    assert report["levels"][2]["T"] == {"p": "48/343", "q": "-50/49"}


def test_construct_deterministic_output(capsys):
    _, first, _ = run_cli(capsys, "construct", "--example", "2", "--depth", "5", "--json")
    _, second, _ = run_cli(capsys, "construct", "--example", "2", "--depth", "5", "--json")
    assert first == second


def test_verify_overlaps_example2(capsys):
    code, out, _ = run_cli(capsys, "verify", "overlaps", "--example", "2", "--max-level", "2")
    assert code == 0
    report = json.loads(out)
    assert report["results"]["overlaps"] == [{"sigma": "15", "tau": "23", "level": 2}]


def test_bad_example_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, "types", "--example", "does-not-exist")
    assert code == 2


def test_missing_selector_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "wsp")
    assert code == 2
    assert "example" in err


def test_verify_osc_pass_and_fail(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "osc", "--example", "1", "--seed", "3/7:4/7", "--depth", "3",
    )
    assert code == 0
    assert json.loads(out)["results"]["passed"] is True
    code, out, _ = run_cli(
        capsys, "verify", "osc", "--example", "2", "--seed", "7/16:8/16", "--depth", "3",
    )
    assert code == 1
    report = json.loads(out)
    assert report["results"]["violations"][0]["components"] == ["15", "23"]


def test_verify_endpoints_exit_codes(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "endpoints", "--example", "1", "--max-level", "2", "--c", "4/7",
    )
    assert code == 0
    code, _, _ = run_cli(
        capsys, "verify", "endpoints", "--example", "1", "--max-level", "1", "--c", "2",
    )
    assert code == 1


def test_verify_distinctness(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "distinctness", "--example", "1", "--levels", "6",
    )
    assert code == 0
    assert json.loads(out)["results"]["all_distinct"] is True


def test_types_convex(capsys):
    code, out, _ = run_cli(capsys, "types", "--example", "1", "--levels", "3")
    assert code == 0
    assert json.loads(out)["results"]["counts"] == [3, 5, 7]


def test_types_constructed(capsys):
    code, out, _ = run_cli(
        capsys, "types", "--example", "2", "--open-set", "constructed",
        "--seed", "7/16:8/16", "--levels", "3", "--truncation", "5",
    )
    assert code == 0
    assert json.loads(out)["results"]["counts"] == [3, 3, 3]


def test_wsp_report(capsys):
    code, out, _ = run_cli(capsys, "wsp", "--example", "1", "--max-level", "2")
    assert code == 0
    minimum = json.loads(out)["results"]["minimum"]
    assert minimum["level"] == 2
    assert minimum["witness"] == ["13", "21"]
    assert minimum["abs_value"] == {"p": "-6/1", "q": "49/1"}


def test_dimension(capsys):
    code, out, _ = run_cli(capsys, "dimension", "--example", "1", "--digits", "6")
    assert code == 0
    assert json.loads(out)["results"]["decimal"] == "0.564575"


def test_render_files(tmp_path, capsys):
    out_dir = tmp_path / "figs"
    code, out, _ = run_cli(
        capsys, "render", "--example", "1", "--levels", "2", "--out", str(out_dir),
    )
    assert code == 0
    first = (out_dir / "example1-level1.svg").read_bytes()
    assert (out_dir / "example1-level2.svg").exists()
    run_cli(capsys, "render", "--example", "1", "--levels", "2", "--out", str(out_dir))
    assert (out_dir / "example1-level1.svg").read_bytes() == first


def test_oracle_budget_env_undecided(capsys, monkeypatch):
    monkeypatch.setenv("SEPKIT_ORACLE_BUDGET", "3")
    code, _, err = run_cli(
        capsys, "construct", "--example", "1", "--depth", "40", "--digits", "25",
    )
    assert code == 3
    assert "undecided" in err.lower()


def test_exhausted_prefix_is_undecided(capsys):
    code, _, err = run_cli(
        capsys, "construct", "--example", "1", "--sequence", "bits:01", "--depth", "40",
    )
    assert code == 3
    assert "undecided" in err


def test_sequence_from_file(tmp_path, capsys):
    bits = tmp_path / "bits.txt"
    bits.write_text("0 1 1 0\n")
    code, out, _ = run_cli(
        capsys, "construct", "--example", "1", "--sequence", f"file:{bits}",
        "--depth", "4", "--digits", "2",
    )
    assert code == 0


def test_template_file_roundtrip(tmp_path, capsys):
    template = {
        "name": "sevenths",
        "system": {
            "ratio_denominator": 7,
            "offsets": [
                {"p": "0/1", "q": "0/1"},
                {"p": "0/1", "q": "1/1"},
                {"p": "6/7", "q": "0/1"},
            ],
        },
        "initial_sigma": "1",
        "initial_tau": "2",
        "initial_J": {"lo": "0/1", "hi": "1/7"},
        "option1": {"swap": False, "append_sigma": 3, "append_tau": 1},
        "option2": {"swap": True, "append_sigma": 2, "append_tau": 3},
    }
    path = tmp_path / "template.json"
    path.write_text(json.dumps(template))
    code, out, _ = run_cli(
        capsys, "construct", "--template", str(path), "--depth", "40", "--digits", "10",
    )
    assert code == 0
    assert out.strip() == "0.1354645854"


def test_template_and_example_conflict(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text("{}")
    code, _, err = run_cli(
        capsys, "construct", "--example", "1", "--template", str(path),
    )
    assert code == 2
