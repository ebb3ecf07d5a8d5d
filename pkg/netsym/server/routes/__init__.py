# ================================================
# File: netsym/server/routes/__init__.py
# ================================================
# Importing a route module registers its handlers on server.app.routes.
from . import Analyze
from . import CancelJob
from . import ClearHistory
from . import GetStatus
from . import RetryJob
from . import SubmitJob
