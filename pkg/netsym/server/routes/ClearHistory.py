# ================================================
# File: netsym/server/routes/ClearHistory.py
# ================================================
import asyncio

from aiohttp import web

from ..app import JOB_MANAGER, routes
from ..utils import internal_error_response

@routes.post("/netsym/clear_history")
async def route_clear_history(request):
    try:
        result = await asyncio.to_thread(request.app[JOB_MANAGER].clear_history)
        return web.json_response(result, status=200 if result.get("success") else 500)
    except Exception as e:
        return internal_error_response("clearing history", e)
