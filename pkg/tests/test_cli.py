import io
import subprocess
import sys

import pytest

from faircheck.cli import main
from faircheck.mucalc import parse_formula
from faircheck.templates import build_property_formula, instantiate_pattern, load_property
from support import coffee, fixture

AUT = fixture("coffee.aut")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("prop, verdict, code", [
    ("inevitable_delivery_progress.prop", "VIOLATED", 1),
    ("inevitable_delivery_wfa.prop", "VIOLATED", 1),
    ("inevitable_delivery_sfa.prop", "VIOLATED", 1),
    ("inevitable_delivery_whfa.prop", "SATISFIED", 0),
    ("inevitable_delivery_shfa.prop", "SATISFIED", 0),
    ("inevitable_delivery_ja.prop", "VIOLATED", 1),
    ("single_order.prop", "SATISFIED", 0),
    ("possible_delivery.prop", "SATISFIED", 0),
])
def test_check(prop, verdict, code):
    got, out, _ = run("check", AUT, fixture(prop))
    assert got == code
    assert out.splitlines()[0] == verdict
    assert out.splitlines()[1].startswith("formula: ")


def test_with_oracle():
    code, out, _ = run("check", AUT, fixture("inevitable_delivery_sfa.prop"), "--with-oracle")
    assert code == 1
    assert "witness: 0 -order-> 1 -card-> 3 (3 -brew-> 3)^w" in out
    assert "agreement: yes" in out


def test_blocking_override():
    # once deliver may be refused, stopping in state 4 is a complete violating run
    assert run("check", AUT, fixture("inevitable_delivery_whfa.prop"))[0] == 0
    code, out, _ = run("check", AUT, fixture("inevitable_delivery_whfa.prop"),
                       "--blocking", "deliver", "--with-oracle")
    assert code == 1 and "blocking: deliver" in out and "agreement: yes" in out


def test_porcelain():
    code, out, _ = run("check", AUT, fixture("possible_delivery.prop"), "--porcelain")
    assert out.splitlines() == ["verdict\tSATISFIED", "formula\t[!{}*]<!{}* . deliver>tt"]


def test_color(monkeypatch):
    monkeypatch.setenv("FAIRCHECK_COLOR", "1")
    _, out, _ = run("check", AUT, fixture("possible_delivery.prop"))
    assert out.startswith("\033[32mSATISFIED")
    monkeypatch.setenv("FAIRCHECK_COLOR", "0")
    _, out, _ = run("check", AUT, fixture("possible_delivery.prop"))
    assert out.startswith("SATISFIED")


def test_generate_round_trips():
    prop_path = fixture("inevitable_delivery_shfa.prop")
    code, out, _ = run("generate", AUT, prop_path)
    assert code == 0
    lts = coffee()
    prop = load_property(prop_path)
    built = build_property_formula(instantiate_pattern(prop.pattern, lts.alphabet),
                                   prop.criterion_spec(lts.alphabet), lts.alphabet)
    assert parse_formula(out) == built


def test_generate_simplify():
    _, out, _ = run("generate", AUT, fixture("inevitable_delivery_progress.prop"), "--simplify")
    assert out.strip() == "!<!{}* . order>(nu X. [!{}]ff || <!{deliver}>X)"


def test_check_trace():
    code, out, _ = run("check-trace", AUT, fixture("brewloop.trace"),
                       "--criteria", "sfa,whfa", "--blocking", "")
    assert out.splitlines() == ["sfa: holds",
                                "whfa: fails (deliver perpetually ∅-reachable, never occurs)"]
    assert code == 1


def test_check_trace_with_property():
    _, out, _ = run("check-trace", AUT, fixture("payloop.trace"),
                    "--property", fixture("inevitable_delivery_ja.prop"))
    lines = out.splitlines()
    assert "ja: holds" in lines and "violating: yes" in lines


def test_validate_conc(tmp_path):
    code, out, _ = run("validate-conc", AUT, fixture("coffee.conc"))
    assert (code, out.splitlines()[0]) == (0, "valid")
    bad = tmp_path / "bad.conc"
    bad.write_text("card !| to_cash\ncash !| to_card\n")
    code, out, _ = run("validate-conc", AUT, str(bad))
    assert code == 1
    assert "violation: to_cash enabled in 1 but not after 1 -card-> 3" in out


@pytest.mark.parametrize("name, text, message", [
    ("bad.aut", 'des (0,1,2)\n(0,"a,1)\n', "bad.aut:2: unterminated quoted label"),
    ("bad.prop", "scope = global\nbehaviour = respons\n", "bad.prop:2: unknown behaviour"),
    ("raw.prop", "formula = <a>(tt\n", "raw.prop:1: bad formula"),
])
def test_input_errors(tmp_path, name, text, message):
    path = tmp_path / name
    path.write_text(text)
    args = ("check", str(path), fixture("single_order.prop")) if name.endswith(".aut") \
        else ("check", AUT, str(path))
    code, out, err = run(*args)
    assert code == 2 and out == ""
    assert len(err.splitlines()) == 1 and message in err


def test_missing_file():
    code, _, err = run("check", "nowhere.aut", fixture("single_order.prop"))
    assert code == 2 and "nowhere.aut" in err


def test_subset_cap_guard():
    code, _, err = run("check", AUT, fixture("inevitable_delivery_sfa.prop"), "--subset-cap", "3")
    assert code == 3 and "cap" in err


def test_crossval(tmp_path):
    cfg = tmp_path / "h.cfg"
    cfg.write_text("seed = 5\ninstances = 3\ncriteria = progress, wfa\n")
    code, out, _ = run("crossval", str(cfg))
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 3 * 2 * 2 + 1
    assert all(line.startswith("AGREE") for line in lines[:-1])
    assert lines[-1].startswith("summary: 12/12 agree")


def test_crossval_bad_config(tmp_path):
    cfg = tmp_path / "h.cfg"
    cfg.write_text("seed = five\n")
    code, _, err = run("crossval", str(cfg))
    assert code == 2 and "line 1" in err


def test_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "faircheck", "check", AUT,
                           fixture("inevitable_delivery_progress.prop")],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout.startswith("VIOLATED")
