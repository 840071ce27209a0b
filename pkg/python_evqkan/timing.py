"""
timing.py
-monotonic millis() and micros() timestamps used to time optimization attempts.

Only differences between two readings are meaningful. The clock never jumps
backwards, so it is safe for measuring elapsed wall time even when the system
clock is adjusted during a long run.
"""

import time


def micros():
    "return a timestamp in microseconds (us)"
    return time.perf_counter_ns() * 1e-3


def millis():
    "return a timestamp in milliseconds (ms)"
    return time.perf_counter_ns() * 1e-6


def elapsed_seconds(start_ms, time_function_ms=millis):
    "seconds passed since start_ms, measured with time_function_ms"
    return (time_function_ms() - start_ms) / 1000
