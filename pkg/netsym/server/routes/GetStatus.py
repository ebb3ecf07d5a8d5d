# ================================================
# File: netsym/server/routes/GetStatus.py
# ================================================
from aiohttp import web

from ..app import JOB_MANAGER, routes
from ..utils import internal_error_response

@routes.get("/netsym/status")
async def route_get_status(request):
    try:
        return web.json_response(request.app[JOB_MANAGER].get_status())
    except Exception as e:
        return internal_error_response("getting status", e)
