"""Smoke test for the gapstring_py extension.

Build and install first:
    cd crates/python && maturin build --release -o dist && pip install dist/*.whl
"""

import os
import tempfile

import gapstring_py as gs


def main():
    sets = [[1, 3, 4], [3, 6, 8], [2, 9]]

    ssi = gs.SsiIndex(sets, 10)
    assert len(ssi) == 3
    assert ssi.exists(0, 1, 2) == (1, 3)
    assert ssi.report(0, 1, 2) == [(1, 3), (4, 6)]
    assert ssi.exists(0, 1, 9) is None

    dense = gs.SsiIndex(sets, 10, backend="small-universe", delta=0.0)
    assert dense.report(0, 1, 2) == ssi.report(0, 1, 2)

    gapped = gs.GappedSetIndex(sets, 10)
    assert gapped.report(0, 1, 3, 4) == [(3, 6), (4, 8)]
    assert "plan [3, 4]" in gapped.plan(3, 4)

    text = gs.GappedStringIndex(b"banana")
    assert text.report(b"an", b"na", 1, 3) == [(2, 3), (2, 5), (4, 5)]
    assert gs.suffix_array(b"banana")[0] == [6, 4, 2, 1, 5, 3]

    jumbled = gs.JumbledIndex(b"acaacabd")
    assert jumbled.alphabet == b"abcd"
    assert jumbled.report([4, 1, 2, 1]) == [(1, 8)]

    shift = gs.SmallestShiftIndex([[5, 10], [7]], 10)
    assert shift.query(0, 1) == 2
    assert shift.query(1, 0) == 3

    assert gs.report_3sum([1, 2, 3, 4], 5) == [(1, 4), (2, 3)]

    idx = gs.Index.build("gapped-string", b"banana")
    assert idx.kind == "gapped-string"
    assert idx.query("an na 1 3") == [(2, 3), (2, 5), (4, 5)]
    witness, stats = idx.query_counted("an na 1 3", mode="exists")
    assert witness in [(2, 3), (2, 5), (4, 5)]
    assert stats["ssi_calls"] > 0
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "banana.idx")
        idx.save(path)
        again = gs.Index.load(path)
        assert again.to_bytes() == idx.to_bytes()
        assert again.manifest()["accounting"]["stored_elements"] == 16
    assert idx.verify(trials=200)["passed"] == 200

    try:
        gs.SsiIndex([[1]], 2**41)
    except gs.GuardError:
        pass
    else:
        raise AssertionError("universe guard not raised")
    try:
        idx.query("an na")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed query accepted")
    corrupt = bytearray(idx.to_bytes())
    corrupt[len(corrupt) // 2] ^= 1
    try:
        gs.Index.from_bytes(bytes(corrupt))
    except gs.VerificationError:
        pass
    else:
        raise AssertionError("corruption not detected")

    print("ok")


if __name__ == "__main__":
    main()
