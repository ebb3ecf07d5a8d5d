# ================================================
# File: netsym/server/app.py
# ================================================
import sys
from typing import Optional

from aiohttp import web

from ..config import SERVER_HOST, SERVER_PORT
from ..jobs.manager import JobManager, get_manager
from ..utils.helpers import log

# Route modules register themselves on this table when imported.
routes = web.RouteTableDef()

JOB_MANAGER = web.AppKey("job_manager", JobManager)


def create_app(manager: Optional[JobManager] = None) -> web.Application:
    from . import routes as _route_modules  # noqa: F401

    app = web.Application()
    app[JOB_MANAGER] = manager if manager is not None else get_manager()
    app.add_routes(routes)
    return app

def run(host: str = SERVER_HOST, port: int = SERVER_PORT) -> None:
    log("Server", f"Serving on http://{host}:{port}/netsym")
    try:
        web.run_app(create_app(), host=host, port=port, print=None)
    except OSError as e:
        print("*" * 80, file=sys.stderr)
        print(f"[Netsym Server] ERROR: Could not listen on {host}:{port}: {e}", file=sys.stderr)
        print("Check that the port is free, or pick another with --port.", file=sys.stderr)
        print("*" * 80, file=sys.stderr)
        raise
