import json

import pytest

import example1
from conftest import load_pair_fixture
from tempora.cli import main
from tempora.document import dump_relation, dump_system, quantizer_to_dict
from tempora.harness import GeneratorConfig, generate_system
from tempora.systems import make_system
from tempora.timecore import EXTERNAL, TimeAxis
from test_signalmaps import RAMP_GAMMA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    sys1, sys2, R = load_pair_fixture("nonimpl_async_vs_extsync_cover")
    paths = {"sys1": tmp_path / "s1.json", "sys2": tmp_path / "s2.json", "rel": tmp_path / "r.json"}
    dump_system(sys1, paths["sys1"])
    dump_system(sys2, paths["sys2"])
    dump_relation(R, paths["rel"])
    return paths


@pytest.fixture
def broken(tmp_path):
    # two runs meet in state b at tick 1, but the spliced run a b e is missing
    I, E = TimeAxis(1, 2), TimeAxis(1, 2, EXTERNAL)
    s = make_system(I, E, [((0, 0, 0), ("a", "b", "c"), [((1, 1, 1), (0, 1, 2))]),
                           ((1, 1, 1), ("d", "b", "e"), [((2, 2, 2), (0, 1, 2))])], axiom_class="sync")
    path = tmp_path / "broken.json"
    dump_system(s, path)
    return path


def test_validate(capsys, files, tmp_path):
    code, out, _ = run(capsys, "validate", files["sys1"])
    assert code == 0 and "valid" in out
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": 3}')
    code, _, err = run(capsys, "validate", bad)
    assert code == 2 and "error" in err


def test_check_axiom(capsys, files, broken):
    assert run(capsys, "check-axiom", files["sys1"])[0] == 0
    code, out, _ = run(capsys, "check-axiom", broken)
    assert code == 1 and "Eq.(3)" in out and "missing" in out
    code, out, _ = run(capsys, "check-axiom", broken, "--json")
    rep = json.loads(out)
    assert rep["accepted"] is False and rep["witness"]["x"] == ["a", "b", "e"]


def test_check_axiom_weaker_class(capsys, broken):
    # the splice at a shared tick is required by every class
    assert run(capsys, "check-axiom", broken, "--class", "async")[0] == 1


def test_external_behavior(capsys, files):
    code, out, _ = run(capsys, "external-behavior", files["sys1"], "--json")
    assert code == 0 and json.loads(out)["size"] >= 1


def test_check_relation_accept_and_reject(capsys, files):
    code, out, _ = run(capsys, "check-relation", files["sys1"], files["sys2"], files["rel"])
    assert code == 0 and "accepted" in out
    code, out, _ = run(capsys, "check-relation", files["sys1"], files["sys2"], files["rel"],
                       "--flavor", "ext-sync", "--json")
    rep = json.loads(out)
    assert code == 1 and rep["accepted"] is False and rep["clause"] == "5a"


def test_relation_commands_check_axiom_first(capsys, broken, tmp_path):
    rel = tmp_path / "r.json"
    rel.write_text('{"flavor": "async", "pairs": [["b", "b"]]}')
    code, _, err = run(capsys, "check-relation", broken, broken, rel)
    assert code == 2 and "--no-axiom-check" in err
    code, _, _ = run(capsys, "check-relation", broken, broken, rel, "--no-axiom-check")
    assert code in (0, 1)


def test_synthesize_then_check(capsys, files, tmp_path):
    out_path = tmp_path / "greatest.json"
    code, out, _ = run(capsys, "synthesize", files["sys1"], files["sys2"], "--out", out_path)
    assert code == 0 and "greatest async relation" in out
    assert run(capsys, "check-relation", files["sys1"], files["sys2"], out_path)[0] == 0
    code, out, _ = run(capsys, "inclusion", files["sys1"], files["sys2"])
    assert code == 0 and ("⊆" in out or "=" in out)


def test_synthesize_none(capsys, tmp_path):
    sys1, sys2, _ = load_pair_fixture("inclusion_without_initial_simulation")
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    dump_system(sys1, p1)
    dump_system(sys2, p2)
    code, out, _ = run(capsys, "synthesize", p1, p2, "--flavor", "l-initial", "--l", "0")
    assert code == 1 and "no l-initial relation" in out
    code, out, _ = run(capsys, "inclusion", p1, p2, "--json")
    assert code == 0 and json.loads(out)["subset"] is True


def test_inclusion_rejects(capsys, tmp_path):
    a = generate_system(GeneratorConfig(seed=1, gamma_size=2))
    b = generate_system(GeneratorConfig(seed=2, gamma_size=3))
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    dump_system(a, pa)
    dump_system(b, pb)
    code, out, _ = run(capsys, "inclusion", pa, pb, "--json")
    rep = json.loads(out)
    assert (code == 0) == rep["subset"]


def test_horizon_note(capsys, files):
    _, out, _ = run(capsys, "check-relation", files["sys1"], files["sys2"], files["rel"], "--horizon-note")
    assert "note: verdict is bounded by the horizon" in out


def test_discretize_ramp(capsys, tmp_path):
    csv = tmp_path / "ramp.csv"
    csv.write_text("t,w\n" + "".join(f"{t},{v}\n" for t, v in enumerate(example1.RAMP)))
    q = tmp_path / "q.json"
    q.write_text(json.dumps(quantizer_to_dict(example1.spec())))
    out_path = tmp_path / "ramp.json"
    code, out, _ = run(capsys, "discretize", csv, q, "--out", out_path)
    assert code == 0 and "written" in out
    code, out, _ = run(capsys, "external-behavior", out_path, "--json")
    beh = json.loads(out)["external_behavior"]
    assert [tuple(g) for g in beh] == [RAMP_GAMMA]
    assert run(capsys, "validate", out_path)[0] == 0
    # stdout mode writes the document itself
    code, out, _ = run(capsys, "discretize", csv, q)
    assert code == 0 and json.loads(out)["quantizer"]["mode"] == "point-to-point"


def test_discretize_bad_csv(capsys, tmp_path):
    csv = tmp_path / "bad.csv"
    csv.write_text("0,1\n0.5,2\n0.75,3\n")
    q = tmp_path / "q.json"
    q.write_text(json.dumps(quantizer_to_dict(example1.spec())))
    code, _, err = run(capsys, "discretize", csv, q, "--step", "1/2")
    assert code == 2 and "line 3" in err


def test_harness_command(capsys):
    code, out, _ = run(capsys, "harness", "--suite", "lemma1", "--trials", "3", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["suites"][0]["suite"] == "lemma1" and rep["suites"][0]["trials"] == 3


@pytest.mark.parametrize("argv", [[], ["nope"], ["harness", "--trials", "0"],
                                  ["synthesize", "a", "b", "--l", "-1"], ["check-axiom"]])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as ei:
        main(argv)
    assert ei.value.code == 2
