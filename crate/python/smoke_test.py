"""Smoke test for the pyfmre extension module.

Build first:  pip install --no-build-isolation -e crates/py
Then run:     python3 python/smoke_test.py
"""

from pathlib import Path

import pyfmre

CORPUS = Path(__file__).resolve().parent.parent / "corpus" / "list.fm"


def main():
    model = pyfmre.parse(CORPUS.read_text())
    assert model.name == "List"
    assert len(model) == 10 and "St-Queue" in model
    assert model.validate() == []

    info = model.recognize("St-Queue")
    assert info["kind"] == "CONFIGURATION"
    assert info["constraint"] == ["reject(st-beh)"]
    assert "Constraint: Reject st-beh" in info["report"]
    assert model.recognize("static_queue")["included_in"] == ["St-Queue"]

    slices = model.slice("Static-list", "forward", "and")
    assert [sorted(s.feature_names) for s in slices] == [
        ["static-list", "str"],
        ["st-beh", "static-list"],
        ["st-methods", "static-list"],
    ]
    (or_slice,) = model.slice("Static-list", "forward", "or", ["static-queue"])
    assert {"static-list", "static_queue"} <= set(or_slice.feature_names)

    assert model.ancestors("str") == ["List", "St-Queue", "static-list", "static_queue"]
    assert pyfmre.from_json(model.to_json()) == model
    assert pyfmre.parse(model.print_canonical()) == model
    assert model.to_dot().startswith("digraph List {")

    for bad, exc in [(lambda: pyfmre.parse("feature model;"), ValueError),
                     (lambda: pyfmre.from_json("[]"), ValueError),
                     (lambda: model.recognize("nope"), KeyError),
                     (lambda: model.slice("Static-list", "forward", "and", ["str"]), ValueError)]:
        try:
            bad()
        except exc:
            pass
        else:
            raise AssertionError("expected " + exc.__name__)
    print("pyfmre smoke test passed")


if __name__ == "__main__":
    main()
