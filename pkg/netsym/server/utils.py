# ================================================
# File: netsym/server/utils.py
# ================================================
import json
from typing import Any, Dict

from aiohttp import web

from ..errors import NetsymError
from ..utils.helpers import warn


async def get_request_json(request: web.Request) -> Dict[str, Any]:
    """Request body as a JSON object; HTTPBadRequest otherwise."""
    try:
        data = await request.json()
    except (json.JSONDecodeError, UnicodeDecodeError, ValueError) as e:
        raise web.HTTPBadRequest(reason=f"Invalid JSON format: {e}")
    if not isinstance(data, dict):
        raise web.HTTPBadRequest(reason="Request body must be a JSON object.")
    return data

def error_response(err: NetsymError) -> web.Response:
    return web.json_response(err.to_dict(), status=err.status_code)

def http_error_response(http_err: web.HTTPException) -> web.Response:
    return web.json_response(
        {"error": http_err.reason, "details": http_err.text or "No details", "status_code": http_err.status},
        status=http_err.status,
    )

def internal_error_response(action: str, e: Exception) -> web.Response:
    warn("Server", f"Error {action}: {e}")
    return web.json_response(
        {"error": "Internal Server Error", "details": f"Failed {action}: {e}", "status_code": 500},
        status=500,
    )
