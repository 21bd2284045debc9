"""Shared fixtures."""

from collections import ChainMap

from pytest import fixture

from posilab.util.config import Config


@fixture(autouse=True)
def default_config():
    """Run every test against the default configuration."""
    yield
    setattr(type(Config()), "_singleton", None)
    Config.conf = ChainMap(Config.defaults)
