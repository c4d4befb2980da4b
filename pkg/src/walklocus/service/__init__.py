"""HTTP service wrapping the toolkit; `create_app` builds the ASGI app."""

from .app import create_app

__all__ = ["create_app"]
