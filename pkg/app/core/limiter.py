from slowapi import Limiter
from slowapi.util import get_remote_address

from app.core.config import settings

# Applied to every route that executes a simulation.
limiter = Limiter(key_func=get_remote_address, enabled=settings.rate_limit_enabled)
