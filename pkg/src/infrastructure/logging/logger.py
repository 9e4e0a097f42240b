"""
Sistema de logging para HOM Tomography Lab.
"""
import logging
import os
import sys
from datetime import datetime
from pathlib import Path

LOG_DIR_ENV = "HOMTOMO_LOG_DIR"


class Logger:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Logger, cls).__new__(cls)
            cls._instance._initialize_logger()
        return cls._instance

    def _initialize_logger(self):
        """Initialize the logger with console and (when possible) file handlers"""
        self.logger = logging.getLogger("HOMTomoLab")
        self.logger.setLevel(logging.DEBUG)
        self.log_file = None

        # Prevent adding handlers if they already exist for this logger
        if self.logger.hasHandlers():
            return

        formatter = logging.Formatter(
            "[%(levelname)s] [%(asctime)s] %(message)s", datefmt="%H:%M:%S"
        )

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        console_handler.setLevel(logging.INFO)
        self.logger.addHandler(console_handler)

        log_dir = self._resolve_log_dir()
        try:
            os.makedirs(log_dir, exist_ok=True)
            timestamp = datetime.now().strftime("%Y%m%d")
            self.log_file = log_dir / f"log_{timestamp}.log"
            file_handler = logging.FileHandler(self.log_file, encoding="utf-8")
            file_handler.setFormatter(formatter)
            file_handler.setLevel(logging.DEBUG)
            self.logger.addHandler(file_handler)
        except OSError as e:
            self.logger.warning(f"File logging disabled, cannot write to {log_dir}: {e}")

    @staticmethod
    def _resolve_log_dir() -> Path:
        override = os.environ.get(LOG_DIR_ENV)
        if override:
            return Path(override)
        if getattr(sys, 'frozen', False):
            # Junto al ejecutable
            return Path(sys.executable).parent / "logs"
        # Raíz del proyecto en desarrollo
        return Path(__file__).resolve().parent.parent.parent.parent / "logs"

    def set_console_level(self, level: int):
        """Change the console verbosity (the file handler keeps DEBUG).

        Args:
            level (int): A ``logging`` level such as ``logging.WARNING``.
        """
        for handler in self.logger.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)

    def debug(self, msg: str):
        """Log debug message.

        Args:
            msg (str): Message to log.
        """
        self.logger.debug(msg)

    def info(self, msg: str):
        """Log info message.

        Args:
            msg (str): Message to log.
        """
        self.logger.info(msg)

    def warning(self, msg: str):
        """Log warning message.

        Args:
            msg (str): Message to log.
        """
        self.logger.warning(msg)

    def error(self, msg: str):
        """Log error message.

        Args:
            msg (str): Message to log.
        """
        self.logger.error(msg)


# Create singleton instance
logger = Logger()
