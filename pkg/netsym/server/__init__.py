# ================================================
# File: netsym/server/__init__.py
# ================================================
from .app import create_app, run
