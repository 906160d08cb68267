import time
from datetime import timedelta
from typing import Optional


class Timer:
    def __init__(self, logger=None):
        self.logger = logger
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None

    def _emit(self, message):
        if self.logger is not None:
            self.logger.info(message)

    def start(self, start_message):
        self._emit(start_message)
        self.start_time = time.perf_counter()
        self.end_time = None

    def stop(self, stop_message):
        self._emit(stop_message)
        self.end_time = time.perf_counter()

    def elapsed(self, elapsed_message):
        if self.start_time is None:
            return "Timer has not been started."
        if self.end_time is None:
            return "Timer has not been stopped."
        elapsed_time = timedelta(seconds=self.end_time - self.start_time)
        return f"{elapsed_message} {elapsed_time}"
