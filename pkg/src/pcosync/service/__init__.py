"""Request/response models, handlers, and the FastAPI app.

The handlers are plain functions from request model to response model; the
CLI calls them in-process by default and the HTTP app is a thin routing
layer over the same functions, so both surfaces stay behaviorally
identical.
"""

from .app import create_app  # noqa: F401
