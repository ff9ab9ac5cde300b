import importlib
import importlib.util
import logging
import os
import sys
from typing import Optional

import numpy as np

__all__ = ["setup_environment", "worker_count", "substream_seed"]

THREADS_ENV_KEY = "QSOLAB_THREADS"
ENV_MODULE_KEY = "QSOLAB_ENV_MODULE"


def worker_count(requested: Optional[int] = None) -> int:
    """
    Size of the census worker pool: ``requested`` if given, else ``$QSOLAB_THREADS``,
    else the CPU count. The environment variable also caps an explicit request.
    """
    cap = os.environ.get(THREADS_ENV_KEY)
    count = requested if requested is not None else (int(cap) if cap else os.cpu_count() or 1)
    if cap:
        count = min(count, int(cap))
    return max(1, int(count))


def substream_seed(seed: int, index: int) -> int:
    """
    The seed of substream ``index`` of the master ``seed``. Substreams depend only
    on ``(seed, index)``, so any single census row can be recomputed on its own.
    """
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1)[0])


# from https://stackoverflow.com/questions/67631/how-to-import-a-module-given-the-full-path
def _import_file(module_name, file_path, make_importable=False):
    spec = importlib.util.spec_from_file_location(module_name, file_path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    if make_importable:
        sys.modules[module_name] = module
    return module


def _configure_libraries():
    """
    Configurations for some libraries.
    """

    def get_version(module, digit=2):
        return tuple(map(int, module.__version__.split(".")[:digit]))

    # fmt: off
    assert get_version(np) >= (1, 17), "Requires numpy>=1.17 (Generator API)"
    import scipy
    assert get_version(scipy) >= (1, 7), "Requires scipy>=1.7 (binomtest)"
    import yaml
    assert get_version(yaml) >= (5, 1), "Requires pyyaml>=5.1"
    # fmt: on


_ENV_SETUP_DONE = False


def setup_environment():
    """Perform environment setup work. The default setup is a no-op, but this
    function allows the user to specify a Python source file or a module in
    the $QSOLAB_ENV_MODULE environment variable, that performs
    custom setup work that may be necessary to their computing environment.
    """
    global _ENV_SETUP_DONE
    if _ENV_SETUP_DONE:
        return
    _ENV_SETUP_DONE = True

    _configure_libraries()

    custom_module_path = os.environ.get(ENV_MODULE_KEY)
    if custom_module_path:
        setup_custom_environment(custom_module_path)


def setup_custom_environment(custom_module):
    """
    Load custom environment setup by importing a Python source file or a
    module, and run the setup function.
    """
    if custom_module.endswith(".py"):
        module = _import_file("qsolab.utils.env.custom_module", custom_module)
    else:
        module = importlib.import_module(custom_module)
    assert hasattr(module, "setup_environment") and callable(module.setup_environment), (
        "Custom environment module defined in {} does not have the "
        "required callable attribute 'setup_environment'."
    ).format(custom_module)
    logging.getLogger(__name__).info("Running custom environment setup from {}".format(custom_module))
    module.setup_environment()
