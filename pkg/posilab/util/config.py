"""Configuration access and handling module.

- stores all config-values imported from Env-Variables or specifically specified
- offers class Config, that sets and stores config-values in class-variables

  Typical usage example:

  eps = Config.conf["eps"]
"""

import logging
import os
from collections import ChainMap

from posilab import __version__
from posilab.util import singleton
from posilab.util.consts import DEFAULT_EPS, DEFAULT_LADDER

log = logging.getLogger(__name__)


@singleton
class Config:
    """Store config-values in class-variables."""

    # Empty ChainMap before initialization
    defaults = {
        "development_mode": False,
        "eps": DEFAULT_EPS,
        "backend": "exact",
        "ladder": DEFAULT_LADDER,
        "decay_slope": -0.5,
        "decay_cap": 1e-3,
        "stagnation_ratio": 0.1,
    }
    conf: ChainMap = ChainMap(defaults)

    def __init__(self, **cli_args):
        """Init config from cli, environment and default values.

        Chains cli-arguments with environment arguments and default values.
        Cli-arguments set to None are treated as not given.

        Args:
            cli_args: cli-config as keyword arguments

        """
        env_vars = {}

        if tmp := os.environ.get("POSILAB_DEVELOPMENT_MODE"):
            # with ensured types
            env_vars["development_mode"] = tmp == "True"

        if tmp := os.environ.get("POSILAB_EPS"):
            try:
                eps = float(tmp)
            except ValueError:
                eps = -1.0
            if eps > 0:
                env_vars["eps"] = eps
            else:
                log.warning("Ignoring invalid POSILAB_EPS value %r", tmp)

        if tmp := os.environ.get("POSILAB_BACKEND"):
            if tmp in ("exact", "float"):
                env_vars["backend"] = tmp
            else:
                log.warning("Ignoring invalid POSILAB_BACKEND value %r", tmp)

        cli_args = {key: value for key, value in cli_args.items() if value is not None}
        Config.conf = ChainMap(cli_args, env_vars, Config.defaults)


def print_config():
    """Print startup info message displaying version and configuration values."""
    print("\n" + "=" * 20 + f" Posilab v. {__version__} " + "=" * 20)
    for key, value in Config.conf.items():
        name = key.replace("_", " ")
        name = name.capitalize()
        if "mode" in name:
            state = "active" if value else "inactive"
        elif isinstance(value, tuple):
            state = ",".join(str(item) for item in value)
        else:
            state = str(value)
        print(f"{name}: {state}")
    print()
