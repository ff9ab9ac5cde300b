from .lazy import LazyCall, LazyConfig
from .instantiate import dump_dataclass, instantiate
