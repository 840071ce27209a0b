import unittest
from unittest.mock import Mock, patch

import python_evqkan.timing as timing


class TestTiming(unittest.TestCase):

    def test_monotonic(self):
        first = timing.millis()
        second = timing.millis()
        self.assertGreaterEqual(second, first)

    def test_units(self):
        with patch("python_evqkan.timing.time.perf_counter_ns", return_value=2_500_000):
            self.assertAlmostEqual(timing.millis(), 2.5)
            self.assertAlmostEqual(timing.micros(), 2500.0)

    def test_elapsed_seconds(self):
        self.assertEqual(timing.elapsed_seconds(1000.0, Mock(return_value=4000.0)), 3.0)


if __name__ == '__main__':
    unittest.main()
