import sys
from datetime import datetime


def get_datetime_string() -> str:
    return datetime.now().strftime('%Y-%m-%d %H:%M:%S')

def create_message(sender: str, message: str) -> str:
    return f"{get_datetime_string()} {sender}: {message}"

def emit(sender: str, message: str) -> None:
    """Writes a log line to stderr; stdout is reserved for reports."""
    print(create_message(sender, message), file=sys.stderr)
