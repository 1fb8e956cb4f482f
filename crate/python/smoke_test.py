import json
from pathlib import Path

import sqzlift

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def report(command, name, **kw):
    code, text = sqzlift.run_file(command, str(FIXTURES / f"{name}.toml"), **kw)
    return code, json.loads(text)


def test_z4_over_z2_has_one_lift():
    code, r = report("lifts", "z4-to-z2-m-z2")
    assert code == 0
    assert r["schema_version"] == sqzlift.SCHEMA_VERSION
    assert r["classes"] == 1


def test_obstruction_vanishes_and_agrees_with_oracle():
    code, r = report("obstruct", "z9-to-z3-m-z3")
    assert code == 0 and r["vanishes"] is True
    code, r = report("torsor", "z9-to-z3-m-z3")
    assert code == 0 and r["ok"] is True


def test_text_input_matches_file_input():
    text = (FIXTURES / "cocycle-z4-over-z2.toml").read_text()
    assert sqzlift.run("check", text) == sqzlift.run_file("check", str(FIXTURES / "cocycle-z4-over-z2.toml"))


def test_malformed_and_exhausted():
    code, text = sqzlift.run("check", "name = 1")
    assert code == 4
    assert json.loads(text)["error"]["kind"] == "malformed_input"
    code, _ = report("oracle", "z8-to-z4-m-z4", budget=1)
    assert code == 3


def test_abelian_group():
    assert sqzlift.abelian_group([2, 4, 0, 3]) == "Z/2 x Z/12 x Z"


if __name__ == "__main__":
    for name, f in list(globals().items()):
        if name.startswith("test_"):
            f()
            print(name, "ok")
