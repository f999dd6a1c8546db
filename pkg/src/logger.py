import logging
import os
from datetime import datetime
from typing import Optional

def setup_logger(base_folder: str, level: Optional[str] = None) -> logging.Logger:
    # Get current date and time
    today_date = datetime.today().strftime('%Y-%m-%d')
    current_time = datetime.now().strftime('%H-%M')

    # Set up folder
    today_logs_folder = os.path.join(base_folder, today_date)
    if not os.path.exists(today_logs_folder):
        os.makedirs(today_logs_folder)

    # Create log file
    log_file = os.path.join(today_logs_folder, f"run_{current_time}.log")

    # Create and configure logger
    logger = logging.getLogger()
    logger.setLevel(level or os.getenv('CNOTSIM_LOG_LEVEL', 'INFO'))

    # A second setup in the same process replaces the previous handlers
    for handler in list(logger.handlers):
        if getattr(handler, '_cnotsim', False):
            logger.removeHandler(handler)
            handler.close()

    # Create handlers
    file_handler = logging.FileHandler(log_file)
    console_handler = logging.StreamHandler()

    # Create formatters and add it to handlers
    formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')
    for handler in (file_handler, console_handler):
        handler.setFormatter(formatter)
        handler._cnotsim = True  # type: ignore[attr-defined]
        logger.addHandler(handler)

    return logger

# This function can be called to get a logger for any module
def get_logger() -> logging.Logger:
    return logging.getLogger()
