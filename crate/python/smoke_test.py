"""Smoke test for the `retarget` extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import tempfile
from pathlib import Path

import retarget


def main():
    toks = retarget.tokenize("y = x;")
    assert [t[1] for t in toks[:3]] == ["y", "=", "x"], toks

    tr = retarget.Transpiler()
    unit = tr.transpile(retarget.EKG_SOURCE)
    assert unit.entry_symbol == "EKGpeakDet"
    assert "pan_tompkin(sig, fs, qrs_amp_raw, peak, delay);" in unit.source_text
    with tempfile.TemporaryDirectory() as d:
        paths = unit.port(["Android", "iOS", "Linux"], d)
        assert all(Path(p).read_text() == unit.source_text for p in paths)
    assert tr.invocations == 1

    out = retarget.run("function y = f(x)\ny = x;", "f", [3.5])
    assert out == {"y": 3.5}, out

    samples, truth = retarget.synth_ecg("0-30:60", 360)
    peaks = retarget.pan_tompkin(samples, 360)
    assert len(peaks) == len(truth) == 30
    assert all(abs(p - t) <= 18 for p, t in zip(peaks, truth))

    t_n, bpm_n = retarget.heart_rate(samples, 360, "native")
    t_i, bpm_i = retarget.heart_rate(samples, 360, "interp")
    assert (t_n, bpm_n) == (t_i, bpm_i)
    assert all(b == 60.0 for b in bpm_n)
    assert retarget.heart_rate_csv(samples, 360, "interp") == retarget.heart_rate_csv(samples, 360)

    agrees, d_ihr, d_thr = retarget.diff_check(samples, 360)
    assert agrees and d_ihr == 0.0 and d_thr == 0.0

    try:
        retarget.transpile("function y = f(x)\nif x\n")
    except ValueError as e:
        assert "line 2" in str(e) or "3:" in str(e), e
    else:
        raise AssertionError("expected a parse error")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
