# ================================================
# File: netsym/server/routes/RetryJob.py
# ================================================
import asyncio

from aiohttp import web

from ..app import JOB_MANAGER, routes
from ..utils import get_request_json, http_error_response, internal_error_response

@routes.post("/netsym/retry")
async def route_retry_job(request):
    """Re-queues a failed or cancelled job from history."""
    try:
        data = await get_request_json(request)
        job_id = data.get("job_id")
        if not job_id:
            raise web.HTTPBadRequest(reason="Missing 'job_id'")
        result = await asyncio.to_thread(request.app[JOB_MANAGER].retry, job_id)
        return web.json_response(result, status=200 if result.get("success") else 404)
    except web.HTTPException as http_err:
        return http_error_response(http_err)
    except Exception as e:
        return internal_error_response("retrying job", e)
