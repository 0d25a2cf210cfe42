"""Tests for logging setup."""

import logging

from rich.logging import RichHandler

from eoslab.application.log import LOG_LEVEL_ENV, configure_logging, resolve_level


class TestResolveLevel:
    """Tests for resolve_level."""

    def test_verbosity_flags(self):
        """Test -v counts map to info and debug."""
        assert resolve_level(1, env_level="") == logging.INFO
        assert resolve_level(2, env_level="") == logging.DEBUG
        assert resolve_level(5, env_level="") == logging.DEBUG

    def test_default_is_warning(self):
        """Test that no flag and no override gives warning."""
        assert resolve_level(0, env_level="") == logging.WARNING

    def test_environment_override(self, monkeypatch):
        """Test that the environment level applies without -v."""
        monkeypatch.setenv(LOG_LEVEL_ENV, "debug")
        assert resolve_level(0) == logging.DEBUG

    def test_flag_wins_over_environment(self, monkeypatch):
        """Test that -v takes priority over the environment."""
        monkeypatch.setenv(LOG_LEVEL_ENV, "error")
        assert resolve_level(1) == logging.INFO

    def test_unknown_level_name(self):
        """Test that an unknown name falls back to warning."""
        assert resolve_level(0, env_level="chatty") == logging.WARNING


def test_configure_logging_replaces_handler(monkeypatch):
    """Test that repeated setup keeps a single rich handler."""
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
    configure_logging(0)
    logger = configure_logging(1)
    handlers = [h for h in logger.handlers if isinstance(h, RichHandler)]
    assert len(handlers) == 1
    assert logger.level == logging.INFO
    assert not logger.propagate
