from pathlib import Path

import pytest
from pydantic import ValidationError

from bobtaillab.core import DomainError, Settings, require


def test_env_overrides(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("BOBTAIL_DEFAULT_TRIALS", "500")
    monkeypatch.setenv("BOBTAIL_K_GRID", "1, 3,7")
    monkeypatch.setenv("BOBTAIL_LOG_FILE", "")
    s = Settings()
    assert s.default_trials == 500
    assert s.k_grid == [1, 3, 7]
    assert s.log_file is None


def test_invalid_env_is_rejected(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("BOBTAIL_K_GRID", "0,2")
    with pytest.raises(ValidationError):
        Settings()


def test_hash_spaces() -> None:
    s = Settings(hash_bits=8, sim_hash_bits=16)
    assert s.hash_space == 255
    assert s.sim_hash_space == 65536.0


def test_resolve_output() -> None:
    s = Settings(output_dir=Path("out"))
    assert s.resolve_output(None, default_name="a.csv") == Path("out/a.csv")
    assert s.resolve_output("b.csv", default_name="a.csv") == Path("out/b.csv")
    assert s.resolve_output("sub/c.csv", default_name="a.csv") == Path("sub/c.csv")
    assert s.resolve_output(Path("/tmp/d.csv"), default_name="a.csv") == Path("/tmp/d.csv")


def test_require() -> None:
    require(True, "fine")
    with pytest.raises(DomainError, match="broken"):
        require(False, "broken")
