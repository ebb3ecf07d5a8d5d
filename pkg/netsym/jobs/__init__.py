from .manager import JobManager, get_manager
from .tasks import run_job
