from iopath.common.file_io import HTTPURLHandler, PathHandler
from iopath.common.file_io import PathManager as PathManagerBase

__all__ = ["PathManager", "PathHandler"]


PathManager = PathManagerBase()
"""
The qsolab PathManager. Operator files, partitions, census CSVs and logs are
all opened through it, so any registered iopath handler (http, s3, ...) can
serve them.
"""

PathManager.register_handler(HTTPURLHandler())
