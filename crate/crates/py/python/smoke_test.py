"""Smoke test for the compiled extension: `maturin develop` first, then run this file."""

import json

import dualinv_py


def main():
    report = json.loads(dualinv_py.run_suite("suite = cayley\nfamily = symplectic\nsamples = 20\nseed = 3\n"))
    assert report["schema_version"] == dualinv_py.SCHEMA_VERSION
    assert report["summary"]["fail"] == 0, report["summary"]

    again = dualinv_py.run_suite("suite = cayley\nfamily = symplectic\nsamples = 20\nseed = 3\n")
    assert json.loads(again) == report

    sp = json.loads(dualinv_py.finite_dual("sp:2:3"))
    assert sp["order"] == 24 and sp["class_count"] == 7
    assert all(row["status"] == "pass" for row in sp["rows"])

    payload = {
        "check": "multiplier-identity",
        "family": "symplectic",
        "dim": 2,
        "prime": 3,
        "precision": 2,
        "level": 1,
        "seed": 3,
        "index": 0,
        "input": "",
        "message": "",
    }
    replayed = json.loads(dualinv_py.replay(json.dumps(payload)))
    assert replayed["summary"]["rows"] == 1

    try:
        dualinv_py.run_suite("level = 2\nprecision = 2\n")
    except ValueError as e:
        assert "level" in str(e)
    else:
        raise AssertionError("invalid level was accepted")

    print("dualinv_py smoke test passed")


if __name__ == "__main__":
    main()
