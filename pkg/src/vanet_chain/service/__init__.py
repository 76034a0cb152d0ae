"""HTTP service wrapping the analytic and simulation pipeline."""

from .app import app, create_app

__all__ = ["app", "create_app"]
