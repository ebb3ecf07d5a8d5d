# ================================================
# File: netsym/server/routes/CancelJob.py
# ================================================
from aiohttp import web

from ..app import JOB_MANAGER, routes
from ..utils import get_request_json, http_error_response, internal_error_response

@routes.post("/netsym/cancel")
async def route_cancel_job(request):
    try:
        data = await get_request_json(request)
        job_id = data.get("job_id")
        if not job_id:
            raise web.HTTPBadRequest(reason="Missing 'job_id'")
        if not request.app[JOB_MANAGER].cancel(job_id):
            raise web.HTTPNotFound(reason=f"Job ID {job_id} not found in queue or running jobs.")
        return web.json_response({
            "status": "cancelled",
            "message": f"Cancellation requested for job ID: {job_id}.",
            "job_id": job_id,
        })
    except web.HTTPException as http_err:
        return http_error_response(http_err)
    except Exception as e:
        return internal_error_response("cancelling job", e)
