"""Text formats: instance files, the exchange string and DOT."""

from .dot import to_dot
from .exchange import ExchangeError, canonical, from_exchange, isomorphic, to_exchange
from .instance_file import InstanceFileError, emit_instance, parse_instance

__all__ = [name for name in dir() if not name.startswith("_")]
