import io
import random

import pytest

from jonqfpe.cli import main

SEED_HEX = "ab" * 32


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def keyfile(tmp_path, capsys):
    path = tmp_path / "k.key"
    code, _, _ = run(capsys, "keygen", "--factors", "2^3,5^4", "--seed", SEED_HEX, "--out", str(path))
    assert code == 0
    return path


def test_keygen_deterministic_stdout(capsys, keyfile):
    code, out, _ = run(capsys, "keygen", "--factors", "2^3,5^4", "--seed", SEED_HEX)
    assert code == 0
    assert out.encode() == keyfile.read_bytes()
    assert out.startswith("JONQFPE-KEY v1\nN 5000\nfactors 2^3 5^4\ndegree-bound 5\n")


def test_keygen_errors(capsys):
    code, _, err = run(capsys, "keygen", "--factors", "6^2")
    assert code == 2 and "6 is not prime" in err
    code, _, err = run(capsys, "keygen", "--factors", "2^3", "--N", "9")
    assert code == 2
    code, _, err = run(capsys, "keygen", "--factors", "2^3", "--seed", "zz")
    assert code == 3
    code, _, err = run(capsys, "keygen", "--factors", "2^3", "--seed", "ab")
    assert code == 3
    code, _, err = run(capsys, "keygen")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["keygen", "--degree", "x"])
    assert exc.value.code == 2


def test_keygen_warns_p2(capsys):
    code, _, err = run(capsys, "keygen", "--factors", "2^4")
    assert code == 0 and err.startswith("jonqfpe: warning:")


def test_encrypt_decrypt_args(capsys, keyfile):
    code, out, _ = run(capsys, "encrypt", "--key", str(keyfile), "0", "471", "4999")
    assert code == 0
    cs = out.split()
    assert len(cs) == 3
    code, out, _ = run(capsys, "decrypt", "--key", str(keyfile), *cs)
    assert out.split() == ["0", "471", "4999"]


def test_stdin_and_env(capsys, keyfile, monkeypatch):
    monkeypatch.setenv("JONQFPE_KEY", str(keyfile))
    ms = [str(m) for m in range(0, 5000, 37)]
    code, out, _ = run(capsys, "encrypt", stdin="\n".join(ms) + "\n", monkeypatch=monkeypatch)
    assert code == 0
    code, back, _ = run(capsys, "decrypt", "--workers", "2", stdin=out, monkeypatch=monkeypatch)
    assert back.split() == ms


def test_key_errors(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("JONQFPE_KEY", raising=False)
    assert run(capsys, "encrypt", "1")[0] == 3
    assert run(capsys, "encrypt", "--key", str(tmp_path / "missing"), "1")[0] == 3
    bad = tmp_path / "bad.key"
    bad.write_text("JONQFPE-KEY v1\nN 8\n")
    code, _, err = run(capsys, "encrypt", "--key", str(bad), "1")
    assert code == 3 and "invalid key" in err


def test_input_errors(capsys, keyfile):
    assert run(capsys, "encrypt", "--key", str(keyfile), "5000")[0] == 4
    assert run(capsys, "encrypt", "--key", str(keyfile), "12a")[0] == 4
    assert run(capsys, "encrypt", "--key", str(keyfile), "--format", "digits:10:4", "123")[0] == 4
    assert run(capsys, "encrypt", "--key", str(keyfile), "--format", "digits:10:3", "123")[0] == 2
    assert run(capsys, "encrypt", "--key", str(keyfile), "--format", "hex", "1")[0] == 2


def test_digits_format(capsys, keyfile):
    code, out, _ = run(capsys, "encrypt", "--key", str(keyfile), "--format", "digits:10:4", "0007", "4999")
    assert code == 0
    cs = out.split()
    assert all(len(c) == 4 and c.isdigit() for c in cs)
    _, back, _ = run(capsys, "decrypt", "--key", str(keyfile), "--format", "digits:10:4", *cs)
    assert back.split() == ["0007", "4999"]


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--factors", "2^3,3^2", "--seed", SEED_HEX)
    assert code == 0
    assert "permutation 72/72" in out and "result pass" in out
    code, _, err = run(capsys, "selftest", "--preset", "pan16")
    assert code == 2 and "guard" in err


def test_analyze_count(capsys):
    code, out, _ = run(capsys, "analyze", "count", "--prime", "5", "--dim", "4", "--degree", "3", "--machine")
    assert code == 0
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    assert lines["count"] == "5^34*4^4"
    assert lines["value"] == str(5**34 * 4**4)
    assert run(capsys, "analyze", "count", "--prime", "4", "--dim", "2", "--degree", "1")[0] == 2


def test_analyze_census(capsys):
    code, out, _ = run(capsys, "analyze", "census", "--prime", "3", "--dim", "2", "--degree", "2")
    assert code == 0
    assert out.splitlines()[0] == "syntactic=108 functional=108"
    assert run(capsys, "analyze", "census", "--prime", "101", "--dim", "3", "--degree", "1")[0] == 2


def test_analyze_keyspace_and_comparison(capsys):
    code, out, _ = run(capsys, "analyze", "keyspace", "--factors", "2^3", "--degree", "1", "--machine")
    assert code == 0
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    assert lines["full-key-log2"] == "10"
    code, out, _ = run(capsys, "analyze", "paper-comparison", "--machine")
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    assert lines["bound-log2"] == "5478"
    assert lines["printed-prime[603]"] == "composite=3^2*67"


def test_n128_preset_roundtrip(capsys, tmp_path):
    key = tmp_path / "p.key"
    assert run(capsys, "keygen", "--preset", "n128", "--seed", SEED_HEX, "--out", str(key))[0] == 0
    rng = random.Random(9)
    N = 340274423051874795558305386758572502851
    ms = [str(rng.randrange(N)) for _ in range(20)]
    _, out, _ = run(capsys, "encrypt", "--key", str(key), *ms)
    _, back, _ = run(capsys, "decrypt", "--key", str(key), *out.split())
    assert back.split() == ms
