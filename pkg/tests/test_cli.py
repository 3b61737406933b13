import json

import pytest

from paritrace.cli import main

INTRO = """word-parity
alphabet: a b
states: x y
priorities: x:1 y:2
trans: x a x;
trans: x b y;
trans: y a x;
trans: y b y;
"""

FLAGGED = """word-parity
alphabet: a
states: x
priorities: x:1
final: x
trans: x a x;
"""

DET_WORD = """word-det-exc
alphabet: a
states: x y
priorities: x:2 y:2
trans: x a y;
"""

TREE_AUT = """tree-parity
ranked-alphabet: f/1
states: x
priorities: x:2
trans: x -> f(x);
"""

TREE_INPUT = """tree
root: n
node n = f(n);
"""

HES_TEXT = """ground: p q
u1 =mu u2 | {p}
u2 =nu u1 & {p q}
"""


@pytest.fixture
def intro_file(tmp_path):
    path = tmp_path / "intro.aut"
    path.write_text(INTRO)
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out.strip(), captured.err.strip()


class TestMember:
    def test_accepting_case_with_both(self, capsys, intro_file):
        code, out, _ = run(capsys, ["member", intro_file, "--state", "x", "--lasso", ";ba", "--both"])
        assert code == 0 and out == "true"

    def test_rejecting_case(self, capsys, intro_file):
        code, out, _ = run(capsys, ["member", intro_file, "--state", "x", "--lasso", "b;a"])
        assert code == 0 and out == "false"

    def test_oracle_route(self, capsys, intro_file):
        code, out, _ = run(capsys, ["member", intro_file, "--state", "x", "--lasso", ";ba", "--oracle"])
        assert code == 0 and out == "true"

    def test_json_output(self, capsys, intro_file):
        code, out, _ = run(
            capsys, ["member", intro_file, "--state", "x", "--lasso", ";ba", "--json", "--both"]
        )
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] is True and doc["schema_version"] == 1

    def test_undeclared_state_is_usage_error(self, capsys, intro_file):
        code, _, err = run(capsys, ["member", intro_file, "--state", "zz", "--lasso", ";ba"])
        assert code == 2 and "error" in err

    def test_bad_lasso_is_usage_error(self, capsys, intro_file):
        code, _, err = run(capsys, ["member", intro_file, "--state", "x", "--lasso", "ba"])
        assert code == 2


class TestDecoratedCommands:
    def test_dtr_member(self, capsys, intro_file):
        code, out, _ = run(
            capsys,
            ["dtr-member", intro_file, "--state", "x", "--decorated", "b:1;a:2,b:1"],
        )
        assert code == 0 and out == "true"

    def test_dtr_grade_mismatch(self, capsys, intro_file):
        code, _, err = run(
            capsys, ["dtr-member", intro_file, "--state", "x", "--decorated", ";b:2"]
        )
        assert code == 2 and "grade" in err.lower()

    def test_witness(self, capsys, intro_file):
        code, out, _ = run(capsys, ["witness", intro_file, "--state", "x", "--lasso", ";ba"])
        assert code == 0 and out == "b:1;a:2,b:1"

    def test_witness_none(self, capsys, intro_file):
        code, out, _ = run(capsys, ["witness", intro_file, "--state", "x", "--lasso", "b;a"])
        assert code == 0 and out == "none"

    def test_flatten(self, capsys):
        code, out, _ = run(capsys, ["flatten", "b:1;a:2,b:1"])
        assert code == 0 and out == "b;ab"

    def test_check_decorated(self, capsys):
        code, out, _ = run(capsys, ["check-decorated", "b:1;a:2,b:1", "--grade", "1"])
        assert code == 0 and out == "ok"

    def test_check_decorated_violation(self, capsys):
        code, out, _ = run(capsys, ["check-decorated", ";a:1"])
        assert code == 1 and "violation" in out


class TestOtherCommands:
    def test_solve_hes(self, capsys, tmp_path):
        path = tmp_path / "sys.hes"
        path.write_text(HES_TEXT)
        code, out, _ = run(capsys, ["solve-hes", str(path)])
        assert code == 0
        assert out == "u1 = {p q}\nu2 = {p q}"

    def test_finite_traces(self, capsys, tmp_path):
        path = tmp_path / "flag.aut"
        path.write_text(FLAGGED)
        code, out, _ = run(
            capsys, ["finite-traces", str(path), "--state", "x", "--max-len", "2"]
        )
        assert code == 0 and out.splitlines() == ["<epsilon>", "a", "aa"]

    def test_det_run_bottom(self, capsys, tmp_path):
        path = tmp_path / "det.aut"
        path.write_text(DET_WORD)
        code, out, _ = run(capsys, ["det-run", str(path), "--state", "x"])
        assert code == 0 and out == "bottom"

    def test_tree_member_both(self, capsys, tmp_path):
        aut = tmp_path / "tree.aut"
        aut.write_text(TREE_AUT)
        tree = tmp_path / "in.tree"
        tree.write_text(TREE_INPUT)
        code, out, _ = run(
            capsys, ["tree-member", str(aut), str(tree), "--state", "x", "--both"]
        )
        assert code == 0 and out == "true"

    def test_pinned(self, capsys):
        code, out, _ = run(capsys, ["pinned"])
        assert code == 0 and "ok=True" in out

    def test_fuzz_small(self, capsys):
        code, out, _ = run(capsys, ["fuzz", "--seed", "0", "--trials", "5"])
        assert code == 0 and "ok=True" in out

    def test_fuzz_json_deterministic(self, capsys):
        code1, out1, _ = run(capsys, ["fuzz", "--seed", "0", "--trials", "5", "--json"])
        code2, out2, _ = run(capsys, ["fuzz", "--seed", "0", "--trials", "5", "--json"])
        assert code1 == code2 == 0 and out1 == out2

    def test_fuzz_mutation_config_fails(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {"mutation": "flip-signs", "properties": ["engine-vs-oracle"], "trials": 40}
            )
        )
        code, out, _ = run(capsys, ["fuzz", "--seed", "1", "--config", str(cfg)])
        assert code == 1 and "FAIL" in out

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, ["member", "missing.aut", "--state", "x", "--lasso", ";a"])
        assert code == 2

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["member"])  # missing required flags
        assert exc.value.code == 2


SAMPLES = __import__("pathlib").Path(__file__).parent.parent / "samples"


@pytest.mark.skipif(not SAMPLES.exists(), reason="samples directory not present")
class TestShippedCorpus:
    def test_both_never_disagrees_on_word_samples(self, capsys):
        from paritrace.omega_input import all_lassos, format_lasso
        from paritrace.automata import parse, BuchiWordAutomaton, buchi_to_parity

        for name in ("intro.aut", "appendix.aut", "buchi.aut"):
            path = SAMPLES / name
            aut = parse(path.read_text())
            if isinstance(aut, BuchiWordAutomaton):
                aut = buchi_to_parity(aut)
            for state in aut.states:
                for w in all_lassos(aut.alphabet[:2], 1, 2):
                    code, out, _ = run(
                        capsys,
                        [
                            "member",
                            str(path),
                            "--state",
                            state,
                            "--lasso",
                            format_lasso(w),
                            "--both",
                        ],
                    )
                    assert code == 0 and out in ("true", "false")

    def test_tree_sample_agrees(self, capsys):
        code, out, _ = run(
            capsys,
            [
                "tree-member",
                str(SAMPLES / "tree.aut"),
                str(SAMPLES / "input.tree"),
                "--state",
                "x",
                "--both",
            ],
        )
        assert code == 0 and out == "true"

    def test_det_sample(self, capsys):
        code, out, _ = run(capsys, ["det-run", str(SAMPLES / "det.aut"), "--state", "x"])
        assert code == 0 and out == "a:1;b:2"

    def test_hes_sample(self, capsys):
        code, out, _ = run(capsys, ["solve-hes", str(SAMPLES / "system.hes")])
        assert code == 0 and "u1 = {p q}" in out

    def test_finite_sample(self, capsys):
        code, out, _ = run(
            capsys,
            ["finite-traces", str(SAMPLES / "flagged.aut"), "--state", "x", "--max-len", "3"],
        )
        assert code == 0
        assert out.splitlines() == ["b", "ab", "bb", "aab", "abb", "bbb"]
