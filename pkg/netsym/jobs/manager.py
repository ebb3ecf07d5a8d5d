# ================================================
# File: netsym/jobs/manager.py
# ================================================
import atexit
import datetime
import json
import os
import threading
import time
import traceback
from typing import Any, Dict, List, Optional

from ..config import JOB_HISTORY_FILE, JOB_HISTORY_LIMIT, JOB_KINDS, MAX_CONCURRENT_JOBS
from ..errors import InvalidConfig, NetsymError
from ..utils.helpers import log, warn
from .tasks import run_job

TERMINAL = ("completed", "failed", "cancelled")

def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


class JobManager:
    """
    Runs analysis jobs from a queue with at most max_concurrent in flight.
    Finished jobs move to a history that is persisted as JSON.

    A running computation cannot be interrupted; cancelling it marks the job
    and its result is discarded when the worker returns.
    """

    def __init__(self, max_concurrent: int = MAX_CONCURRENT_JOBS, history_path: Optional[str] = JOB_HISTORY_FILE,
                 history_limit: int = JOB_HISTORY_LIMIT, start: bool = True):
        self.queue: List[Dict[str, Any]] = []
        self.active_jobs: Dict[str, Dict[str, Any]] = {}
        self.history: List[Dict[str, Any]] = []
        self.lock = threading.Lock()
        self.max_concurrent = max(1, max_concurrent)
        self.history_path = history_path
        self.history_limit = max(1, history_limit)
        self.running = True
        self._counter = 0
        self._load_history_from_file()
        self._process_thread = threading.Thread(target=self._process_queue, daemon=True)
        if start:
            log("Jobs", f"Job manager starting (max concurrent: {self.max_concurrent}).")
            self._process_thread.start()

    def submit(self, kind: str, payload: Dict[str, Any]) -> str:
        if kind not in JOB_KINDS:
            raise InvalidConfig(f"Unknown job kind '{kind}'.", {"kinds": sorted(JOB_KINDS)})
        if not isinstance(payload, dict):
            raise InvalidConfig("Job payload must be a JSON object.")
        with self.lock:
            self._counter += 1
            job_id = f"job_{int(time.time() * 1000)}_{self._counter}_{kind}"
            self.queue.append({
                "id": job_id,
                "kind": kind,
                "payload": payload,
                "status": "queued",
                "added_time": _now(),
                "start_time": None,
                "end_time": None,
                "error": None,
                "result": None,
                "cancel_requested": False,
            })
        log("Jobs", f"Queued {kind} job {job_id}.")
        return job_id

    def cancel(self, job_id: str) -> bool:
        """True when the job was removed from the queue or flagged while running."""
        with self.lock:
            for i, job in enumerate(self.queue):
                if job["id"] == job_id:
                    cancelled = self.queue.pop(i)
                    cancelled["status"] = "cancelled"
                    cancelled["end_time"] = _now()
                    cancelled["error"] = {"error": "Cancelled from queue", "code": "cancelled"}
                    self._add_to_history(cancelled)
                    log("Jobs", f"Cancelled queued job {job_id}.")
                    return True

            job = self.active_jobs.get(job_id)
            if job is None:
                log("Jobs", f"Could not cancel {job_id}: not queued or running.")
                return False
            if job["status"] in TERMINAL:
                return False
            job["cancel_requested"] = True
            log("Jobs", f"Cancellation requested for running job {job_id}.")
            return True

    def retry(self, job_id: str) -> Dict[str, Any]:
        """Re-queues a failed or cancelled job from history under a new id."""
        with self.lock:
            original = next((job for job in self.history if job.get("id") == job_id), None)
            if original is None:
                return {"success": False, "error": f"Job '{job_id}' not found in history."}
            if original.get("status") not in ("failed", "cancelled"):
                return {"success": False,
                        "error": f"Cannot retry a job with status '{original.get('status')}'."}
            kind, payload = original["kind"], json.loads(json.dumps(original["payload"]))
            self.history = [job for job in self.history if job.get("id") != job_id]
            self._save_history_to_file()
        new_id = self.submit(kind, payload)
        return {"success": True, "message": "Job re-queued.", "job_id": new_id}

    def get_status(self) -> Dict[str, List[Dict[str, Any]]]:
        """Queue, active jobs and history without payloads or results."""
        exclude = ("payload", "result")
        with self.lock:
            strip = lambda job: {k: v for k, v in job.items() if k not in exclude}
            return {
                "queue": [strip(job) for job in self.queue],
                "active": [strip(job) for job in self.active_jobs.values()],
                "history": [strip(job) for job in self.history[:self.history_limit]],
            }

    def get_job(self, job_id: str) -> Optional[Dict[str, Any]]:
        with self.lock:
            for job in self.queue + list(self.active_jobs.values()) + self.history:
                if job["id"] == job_id:
                    return dict(job)
        return None

    def wait(self, job_id: str, timeout: float = 60.0, poll: float = 0.05) -> Optional[Dict[str, Any]]:
        """Blocks until the job is in history or timeout seconds pass."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self.lock:
                done = next((job for job in self.history if job["id"] == job_id), None)
                if done is not None:
                    return dict(done)
            time.sleep(poll)
        return None

    # --- History persistence ---

    def _load_history_from_file(self) -> None:
        if not self.history_path or not os.path.exists(self.history_path):
            self.history = []
            return
        try:
            with open(self.history_path, "r", encoding="utf-8") as f:
                loaded = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            warn("Jobs", f"Failed to read job history ({self.history_path}): {e}. Starting fresh.")
            self.history = []
            return
        if not isinstance(loaded, list):
            warn("Jobs", f"Job history ({self.history_path}) is not a list. Starting fresh.")
            self.history = []
            return
        valid = [job for job in loaded if isinstance(job, dict) and "id" in job and "kind" in job]
        if len(valid) < len(loaded):
            warn("Jobs", f"{len(loaded) - len(valid)} malformed history entries dropped.")
        self.history = valid[:self.history_limit]
        log("Jobs", f"Loaded {len(self.history)} jobs from {self.history_path}.")

    def _save_history_to_file(self) -> None:
        # caller holds self.lock
        if not self.history_path:
            return
        temp_path = self.history_path + ".tmp"
        try:
            os.makedirs(os.path.dirname(os.path.abspath(self.history_path)), exist_ok=True)
            with open(temp_path, "w", encoding="utf-8") as f:
                json.dump(self.history[:self.history_limit], f, indent=2, ensure_ascii=False)
            os.replace(temp_path, self.history_path)
        except (OSError, TypeError, ValueError) as e:
            warn("Jobs", f"Failed to save job history ({self.history_path}): {e}")
            if os.path.exists(temp_path):
                try:
                    os.remove(temp_path)
                except OSError:
                    pass

    def _add_to_history(self, job: Dict[str, Any]) -> None:
        # caller holds self.lock
        entry = dict(job)
        entry["end_time"] = entry.get("end_time") or _now()
        self.history.insert(0, entry)
        del self.history[self.history_limit:]
        self._save_history_to_file()

    def clear_history(self) -> Dict[str, Any]:
        with self.lock:
            count = len(self.history)
            self.history = []
            if self.history_path and os.path.exists(self.history_path):
                try:
                    os.remove(self.history_path)
                except OSError as e:
                    return {"success": False,
                            "error": f"History cleared from memory, but could not delete file: {e}"}
        if count:
            return {"success": True, "message": f"Cleared {count} history items."}
        return {"success": True, "message": "History was already empty."}

    # --- Worker loop ---

    def _process_queue(self) -> None:
        while self.running:
            processed = False
            with self.lock:
                finished = [job_id for job_id, job in self.active_jobs.items() if job["status"] in TERMINAL]
                for job_id in finished:
                    self._add_to_history(self.active_jobs.pop(job_id))
                    processed = True

                while len(self.active_jobs) < self.max_concurrent and self.queue:
                    job = self.queue.pop(0)
                    job["status"] = "running"
                    job["start_time"] = _now()
                    self.active_jobs[job["id"]] = job
                    threading.Thread(target=self._run_wrapper, args=(job,), daemon=True).start()
                    processed = True

            if not processed:
                time.sleep(0.05 if self.active_jobs else 0.5)
        log("Jobs", "Job manager stopped.")

    def _run_wrapper(self, job: Dict[str, Any]) -> None:
        job_id = job["id"]
        result, error, status = None, None, "failed"
        try:
            result = run_job(job["kind"], job["payload"])
            status = "completed"
        except NetsymError as e:
            error = e.to_dict()
            log("Jobs", f"Job {job_id} failed: {e.message}")
        except Exception as e:
            traceback.print_exc()
            error = {"error": "Internal error", "code": "internal", "details": str(e), "status_code": 500}

        with self.lock:
            if job.get("cancel_requested"):
                status, result = "cancelled", None
                error = {"error": "Cancelled while running", "code": "cancelled"}
            job.update(status=status, result=result, error=error, end_time=_now())
        log("Jobs", f"Job {job_id} {status}.")

    def shutdown(self, timeout: float = 2.0) -> None:
        self.running = False
        if self._process_thread.is_alive():
            self._process_thread.join(timeout)


_manager: Optional[JobManager] = None
_manager_lock = threading.Lock()

def get_manager() -> JobManager:
    """Process-wide manager, started on first use."""
    global _manager
    with _manager_lock:
        if _manager is None:
            _manager = JobManager()
            atexit.register(_manager.shutdown)
        return _manager
