"""
Logging and error helpers shared by the tool modules.
"""

import logging
from datetime import datetime
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

PREVIEW_CHARS = 200


def timestamp() -> str:
    return datetime.now().isoformat()


def log_tool_call(tool_name: str, **kwargs):
    logger.info(f"⚡ TOOL_CALL: {tool_name} - Params: {kwargs}")


def log_tool_response(tool_name: str, result: Any, error: Optional[Exception] = None):
    if error:
        logger.error(f"❌ ERROR - Function: {tool_name}")
        logger.error(f"📤 ERROR_RESPONSE - Error: {str(error)}")
        logger.error(f"📤 ERROR_RESPONSE - Type: {type(error).__name__}")
        logger.error(f"📤 ERROR_RESPONSE - Timestamp: {timestamp()}")
    else:
        logger.info(f"✅ TOOL_RESPONSE: {tool_name} - Result: {str(result)[:PREVIEW_CHARS]}")


def handle_tool_error(error: Exception, operation: str) -> Dict[str, Any]:
    """Error dictionary returned to the client instead of raising into the transport"""
    logger.error(f"Error in {operation}: {str(error)}", exc_info=True)
    return {
        "success": False,
        "error": True,
        "message": f"Failed to {operation}: {str(error)}",
        "error_type": type(error).__name__,
        "timestamp": timestamp(),
    }


def ok(message: str, **payload) -> Dict[str, Any]:
    return {"success": True, "message": message, **payload, "timestamp": timestamp()}
