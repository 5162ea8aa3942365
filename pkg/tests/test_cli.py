"""End-to-end command-line tests driven through main(argv)."""

import json
import os

import pytest

from entroseal.cli import _parse_epsilon, main

KEY_BYTES = bytes(range(1, 255)) * 2  # 508 bytes = 4064 bits of key material


def run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestParams:
    def test_classical_json(self, capsys):
        rc, out, _ = run(capsys, [
            "params", "--n-bits", "128", "--t", "64",
            "--epsilon", "2^-32", "--format", "json"])
        assert rc == 0
        got = json.loads(out)
        assert got["ell"] == 123
        assert got["lambda"] == 123
        assert got["tail_len"] == 5
        assert got["out_len"] == 128
        assert got["mode"] == "classical"
        assert got["t"] == 64

    def test_quantum_reports_advisory_length(self, capsys):
        rc, out, _ = run(capsys, [
            "params", "--n-bits", "128", "--t", "64", "--epsilon", "2^-32",
            "--mode", "quantum", "--format", "json"])
        assert rc == 0
        got = json.loads(out)
        assert got["ell"] == 131
        assert got["indistinguishability_ell"] == 128
        assert got["out_len"] == 256

    def test_text_format(self, capsys):
        rc, out, _ = run(capsys, [
            "params", "--n-bits", "16", "--t", "8", "--epsilon", "0.25"])
        assert rc == 0
        assert "ell = 7" in out
        assert "lambda = 9" in out

    def test_epsilon_spellings_agree(self):
        assert _parse_epsilon("2^-40") == 2.0 ** -40
        assert _parse_epsilon("2**-40") == 2.0 ** -40
        assert _parse_epsilon("0.125") == 0.125
        with pytest.raises(Exception):
            _parse_epsilon("two")

    def test_bad_epsilon_exits_via_argparse(self, capsys):
        with pytest.raises(SystemExit):
            main(["params", "--n-bits", "8", "--t", "0", "--epsilon", "huh"])
        capsys.readouterr()

    def test_invalid_sizing_is_exit_2(self, capsys):
        rc, _, err = run(capsys, [
            "params", "--n-bits", "8", "--t", "0", "--epsilon", "2^-10"])
        assert rc == 2
        assert "error:" in err


class TestEncryptDecrypt:
    def _write_inputs(self, tmp_path, size=512):
        plain = tmp_path / "plain.bin"
        plain.write_bytes(bytes((7 * i + 3) % 256 for i in range(size)))
        key = tmp_path / "key.bin"
        key.write_bytes(KEY_BYTES)
        return plain, key

    def test_round_trip_512_bytes(self, tmp_path, capsys):
        plain, key = self._write_inputs(tmp_path)
        ct = tmp_path / "out.ese"
        rc, _, err = run(capsys, [
            "encrypt", str(plain), "--key", str(key), "--t", "2048",
            "--epsilon", "2^-40", "--out", str(ct), "--seed", "1"])
        assert rc == 0
        assert "ell=2123" in err
        back = tmp_path / "back.bin"
        rc, _, err = run(capsys, [
            "decrypt", str(ct), "--key", str(key), "--out", str(back)])
        assert rc == 0
        assert back.read_bytes() == plain.read_bytes()

    def test_seed_makes_encryption_reproducible(self, tmp_path, capsys):
        plain, key = self._write_inputs(tmp_path, size=32)
        blobs = []
        for name in ("a.ese", "b.ese"):
            ct = tmp_path / name
            rc, _, _ = run(capsys, [
                "encrypt", str(plain), "--key", str(key), "--t", "128",
                "--epsilon", "2^-20", "--out", str(ct), "--seed", "9"])
            assert rc == 0
            blobs.append(ct.read_bytes())
        assert blobs[0] == blobs[1]

    def test_wrong_key_changes_the_plaintext(self, tmp_path, capsys):
        plain, key = self._write_inputs(tmp_path, size=32)
        ct = tmp_path / "out.ese"
        run(capsys, ["encrypt", str(plain), "--key", str(key), "--t", "128",
                     "--epsilon", "2^-20", "--out", str(ct), "--seed", "3"])
        other = tmp_path / "other.bin"
        other.write_bytes(bytes(b ^ 0x01 for b in KEY_BYTES))
        back = tmp_path / "back.bin"
        rc, _, _ = run(capsys, [
            "decrypt", str(ct), "--key", str(other), "--out", str(back)])
        assert rc == 0
        assert back.read_bytes() != plain.read_bytes()

    def test_short_key_is_exit_3(self, tmp_path, capsys):
        plain, _ = self._write_inputs(tmp_path, size=64)
        stub = tmp_path / "tiny.key"
        stub.write_bytes(b"\x01\x02")
        rc, _, err = run(capsys, [
            "encrypt", str(plain), "--key", str(stub), "--t", "256",
            "--epsilon", "2^-20", "--out", str(tmp_path / "x.ese")])
        assert rc == 3
        assert "16 bits" in err

    def test_garbage_ciphertext_is_exit_4(self, tmp_path, capsys):
        bad = tmp_path / "bad.ese"
        bad.write_bytes(b"not a ciphertext at all")
        key = tmp_path / "key.bin"
        key.write_bytes(KEY_BYTES)
        rc, _, err = run(capsys, [
            "decrypt", str(bad), "--key", str(key),
            "--out", str(tmp_path / "y.bin")])
        assert rc == 4
        assert "malformed" in err

    def test_empty_plaintext_is_exit_2(self, tmp_path, capsys):
        empty = tmp_path / "empty.bin"
        empty.write_bytes(b"")
        key = tmp_path / "key.bin"
        key.write_bytes(KEY_BYTES)
        rc, _, err = run(capsys, [
            "encrypt", str(empty), "--key", str(key), "--t", "0",
            "--epsilon", "0.5", "--out", str(tmp_path / "z.ese")])
        assert rc == 2
        assert "empty" in err

    def test_missing_input_is_exit_5(self, tmp_path, capsys):
        rc, _, err = run(capsys, [
            "decrypt", str(tmp_path / "nope.ese"),
            "--key", str(tmp_path / "nope.key"),
            "--out", str(tmp_path / "o.bin")])
        assert rc == 5
        assert "error:" in err


class TestVerify:
    def test_classical_suite_passes(self, capsys):
        rc, out, err = run(capsys, ["verify", "classical"])
        assert rc == 0
        assert "108/108 checks passed" in err
        assert out.splitlines()[0].startswith("PASS")
        assert not any(line.startswith("FAIL") for line in out.splitlines())

    def test_quantum_suite_passes_json(self, capsys):
        rc, out, err = run(capsys, ["verify", "quantum", "--format", "json"])
        assert rc == 0
        reports = json.loads(out)
        assert len(reports) == 72
        assert all(r["passed"] for r in reports)
        assert "72/72 checks passed" in err

    def test_budget_too_small_is_exit_2(self, capsys):
        rc, _, err = run(capsys, ["verify", "classical", "--budget", "4"])
        assert rc == 2
        assert "error:" in err

    def test_budget_env_var(self, capsys, monkeypatch):
        monkeypatch.setenv("ENTROSEAL_BUDGET", "4")
        rc, _, _ = run(capsys, ["verify", "classical"])
        assert rc == 2
        monkeypatch.setenv("ENTROSEAL_BUDGET", "not-a-number")
        rc, _, err = run(capsys, ["verify", "classical"])
        assert rc == 2
        assert "ENTROSEAL_BUDGET" in err

    def test_explicit_budget_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("ENTROSEAL_BUDGET", "4")
        rc, _, err = run(capsys, [
            "verify", "classical", "--budget", str(1 << 30)])
        assert rc == 0
        assert "108/108" in err


class TestVerifyGf2:
    def test_gf2_suite_passes(self, capsys):
        rc, out, err = run(capsys, ["verify", "gf2"])
        assert rc == 0
        assert "5/5 checks passed" in err
        names = [line.split()[1] for line in out.splitlines()]
        assert "modulus-scan-vs-oracle" in names


class TestBench:
    def test_counts_only_json(self, capsys):
        rc, out, _ = run(capsys, [
            "bench", "--sizes", "16", "--format", "json"])
        assert rc == 0
        rows = json.loads(out)
        assert len(rows) == 4  # 2 backends x (affine, fullmul-quantum)
        affine = [r for r in rows if r["method"] == "affine"]
        assert all(r["and_ratio"] == 1.0 for r in affine)
        assert all(r["wall_ns_median"] is None for r in rows)
        full = [r for r in rows if r["method"] == "fullmul-quantum"]
        assert all(r["and_ratio"] > 1.0 for r in full)

    def test_text_table(self, capsys):
        rc, out, _ = run(capsys, [
            "bench", "--sizes", "16", "--backends", "schoolbook",
            "--methods", "affine"])
        assert rc == 0
        lines = out.splitlines()
        assert lines[0].startswith("method")
        assert len(lines) == 3

    def test_timed_run(self, capsys):
        rc, out, _ = run(capsys, [
            "bench", "--sizes", "16", "--backends", "karatsuba",
            "--reps", "31", "--format", "json"])
        assert rc == 0
        rows = json.loads(out)
        assert all(r["wall_ns_median"] > 0 for r in rows)
        assert all(r["reps"] == 31 for r in rows)

    def test_classical_mode_picks_its_baseline(self, capsys):
        rc, out, _ = run(capsys, [
            "bench", "--sizes", "64", "--t", "32", "--epsilon", "2^-10",
            "--mode", "classical", "--backends", "schoolbook",
            "--format", "json"])
        assert rc == 0
        methods = {r["method"] for r in json.loads(out)}
        assert methods == {"affine", "fullmul-classical"}

    def test_bad_reps_is_exit_2(self, capsys):
        rc, _, err = run(capsys, [
            "bench", "--sizes", "16", "--reps", "5"])
        assert rc == 2
        assert "31" in err
