"""
Tests for bfar_radar.config.

Covers:
- key normalisation
- load_config: comments, whitespace, malformed lines, duplicates, missing file
- resolve_seed precedence: explicit > BFAR_SEED > default
"""

from __future__ import annotations

import pytest

from bfar_radar.config import (
    DEFAULT_SEED,
    SEED_ENV_VAR,
    load_config,
    normalize_key,
    resolve_seed,
)
from bfar_radar.errors import ConfigError


class TestNormalizeKey:
    @pytest.mark.parametrize(
        ("raw", "expected"),
        [
            ("a", "a"),
            (" Window ", "window"),
            ("scan-format", "scan_format"),
            ("OS-Rank", "os_rank"),
        ],
    )
    def test_values(self, raw, expected) -> None:
        assert normalize_key(raw) == expected


class TestLoadConfig:
    def test_parses_values(self, tmp_path) -> None:
        path = tmp_path / "bfar.cfg"
        path.write_text("# detector\na = 1.0\n\nB=20\nscan-format = pgm8\nlabel = x=y\n")
        assert load_config(path) == {
            "a": "1.0",
            "b": "20",
            "scan_format": "pgm8",
            "label": "x=y",
        }

    def test_empty_file(self, tmp_path) -> None:
        path = tmp_path / "empty.cfg"
        path.write_text("\n# nothing here\n")
        assert load_config(path) == {}

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "nope.cfg")

    def test_line_without_equals(self, tmp_path) -> None:
        path = tmp_path / "bad.cfg"
        path.write_text("a = 1\nwindow 40\n")
        with pytest.raises(ConfigError, match=":2: expected key=value"):
            load_config(path)

    def test_empty_key(self, tmp_path) -> None:
        path = tmp_path / "bad.cfg"
        path.write_text(" = 3\n")
        with pytest.raises(ConfigError, match="empty key"):
            load_config(path)

    def test_duplicate_after_normalisation(self, tmp_path) -> None:
        path = tmp_path / "dup.cfg"
        path.write_text("os-rank = 3\nOS_RANK = 4\n")
        with pytest.raises(ConfigError, match="duplicate key 'os_rank'"):
            load_config(path)


class TestResolveSeed:
    def test_explicit_wins(self, monkeypatch) -> None:
        monkeypatch.setenv(SEED_ENV_VAR, "9")
        assert resolve_seed(3) == 3

    def test_environment(self, monkeypatch) -> None:
        monkeypatch.setenv(SEED_ENV_VAR, " 9 ")
        assert resolve_seed(None) == 9

    def test_default(self, monkeypatch) -> None:
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        assert resolve_seed(None) == DEFAULT_SEED == 42

    def test_zero_is_a_seed(self, monkeypatch) -> None:
        monkeypatch.setenv(SEED_ENV_VAR, "9")
        assert resolve_seed(0) == 0

    @pytest.mark.parametrize("raw", ["abc", "1.5", "-1"])
    def test_bad_environment(self, monkeypatch, raw) -> None:
        monkeypatch.setenv(SEED_ENV_VAR, raw)
        with pytest.raises(ConfigError, match=SEED_ENV_VAR):
            resolve_seed(None)

    def test_negative_explicit(self) -> None:
        with pytest.raises(ConfigError):
            resolve_seed(-5)
