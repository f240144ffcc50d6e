"""HTTP adapters exposing model engines behind the vadkit wire protocol."""
from .engines import (
    BUILTIN_CAPTIONER_TAGS,
    EngineError,
    EngineSet,
    load_engines,
    register_engine,
)
from .server import AdapterConfig, create_app, serve

__version__ = "0.1.0"
