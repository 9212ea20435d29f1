from .client import RpcClient, connect, proxy_handler
from .framing import FramingError, decode_frame, encode_frame, read_frame, try_decode, write_frame
from .server import RpcService, ServerHandle, serve, serve_http, serve_stdio, serve_tcp

__all__ = [
    "FramingError",
    "RpcClient",
    "RpcService",
    "ServerHandle",
    "connect",
    "decode_frame",
    "encode_frame",
    "proxy_handler",
    "read_frame",
    "serve",
    "serve_http",
    "serve_stdio",
    "serve_tcp",
    "try_decode",
    "write_frame",
]
