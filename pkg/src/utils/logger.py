import sys
from typing import TextIO, Optional

from colorama import Fore, Style


class Logger:
    """Colored, tagged console logger for command output"""

    def __init__(self, verbose: bool = False, stream: Optional[TextIO] = None):
        self.verbose    = verbose
        self.stream     = stream

    def _emit(self, color: str, tag: str, message: str) -> None:
        stream = self.stream or sys.stdout
        print(f"{color}[{tag}] {message}{Style.RESET_ALL}", file=stream)

    def info(self, message: str) -> None:
        """Information message"""
        self._emit(Fore.BLUE, "INFO", message)

    def success(self, message: str) -> None:
        """Success message"""
        self._emit(Fore.GREEN, "OK", message)

    def warning(self, message: str) -> None:
        """Warning message"""
        self._emit(Fore.YELLOW, "WARN", message)

    def error(self, message: str) -> None:
        """Error message, written to stderr unless a stream was given"""
        stream = self.stream or sys.stderr
        print(f"{Fore.RED}[ERROR] {message}{Style.RESET_ALL}", file=stream)

    def debug(self, message: str) -> None:
        """Debug message (only in verbose mode)"""
        if self.verbose:
            self._emit(Fore.CYAN, "DEBUG", message)

    def table_row(self, message: str) -> None:
        """Plain result line, no tag"""
        stream = self.stream or sys.stdout
        print(message, file=stream)


class NullLogger(Logger):
    """Logger that discards everything; default for library calls"""

    def _emit(self, color: str, tag: str, message: str) -> None:
        return None

    def error(self, message: str) -> None:
        return None

    def table_row(self, message: str) -> None:
        return None
