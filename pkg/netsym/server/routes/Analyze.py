# ================================================
# File: netsym/server/routes/Analyze.py
# ================================================
import asyncio
from typing import Any, Callable, Dict

from aiohttp import web

from ... import analysis
from ...errors import InvalidConfig, NetsymError
from ...jobs.tasks import dim_field, int_field, network_of
from ..app import routes
from ..utils import error_response, get_request_json, http_error_response, internal_error_response

# Quick structural analyses answered inline; long ones go through /netsym/jobs.
ANALYZERS: Dict[str, Callable[[Dict[str, Any]], Dict[str, Any]]] = {
    "closure": lambda p: analysis.closure_report(network_of(p)),
    "fundamental": lambda p: analysis.fundamental_report(network_of(p)),
    "synchrony": lambda p: analysis.synchrony_report(network_of(p), bool(p.get("fundamental", False)), dim_field(p)),
    "decompose": lambda p: analysis.decompose_report(network_of(p), dim_field(p), int_field(p, "seed")),
    "classify": lambda p: analysis.classify_report(network_of(p), dim_field(p), int_field(p, "seed"),
                                                   int_field(p, "summand")),
    "enumerate-monoids": lambda p: analysis.enumerate_report(int_field(p, "n", 2)),
}

@routes.post("/netsym/analyze")
async def route_analyze(request):
    """Runs one structural analysis on the posted network and returns its report."""
    try:
        data = await get_request_json(request)
        operation = data.get("operation")
        analyzer = ANALYZERS.get(operation)
        if analyzer is None:
            raise InvalidConfig(f"Unknown operation '{operation}'.", {"operations": sorted(ANALYZERS)})
        report = await asyncio.to_thread(analyzer, data)
        return web.json_response({"operation": operation, "report": report})
    except NetsymError as e:
        return error_response(e)
    except web.HTTPException as http_err:
        return http_error_response(http_err)
    except Exception as e:
        return internal_error_response("running analysis", e)
