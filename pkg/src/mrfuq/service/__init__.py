from . import handlers, schemas
from .app import app, create_app
