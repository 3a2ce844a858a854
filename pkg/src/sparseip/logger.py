import logging

logger = logging.getLogger("sparseip")
