# ================================================
# File: netsym/server/routes/SubmitJob.py
# ================================================
from aiohttp import web

from ...errors import NetsymError
from ..app import JOB_MANAGER, routes
from ..utils import error_response, get_request_json, http_error_response, internal_error_response

@routes.post("/netsym/jobs")
async def route_submit_job(request):
    """Queues {"kind", "payload"}; returns the job id."""
    try:
        data = await get_request_json(request)
        kind = data.get("kind")
        if not kind:
            raise web.HTTPBadRequest(reason="Missing 'kind'")
        job_id = request.app[JOB_MANAGER].submit(kind, data.get("payload", {}))
        return web.json_response({"status": "queued", "job_id": job_id})
    except NetsymError as e:
        return error_response(e)
    except web.HTTPException as http_err:
        return http_error_response(http_err)
    except Exception as e:
        return internal_error_response("queueing job", e)

@routes.get("/netsym/jobs/{job_id}")
async def route_get_job(request):
    """Full record of one job, result included once it has finished."""
    job_id = request.match_info["job_id"]
    job = request.app[JOB_MANAGER].get_job(job_id)
    if job is None:
        return web.json_response(
            {"error": "Not Found", "details": f"Job ID {job_id} not found.", "status_code": 404}, status=404)
    return web.json_response(job)
