"""
Test module for logger.py
"""
import logging
import unittest
from unittest.mock import patch

from lcstat import logger as lcstat_logger


@patch("lcstat.logger.LOGGER_NAME", "lcstat-test-logger")
@patch("lcstat.logger.logger", None)
class LoggerTests(unittest.TestCase):
    def _level_for(self, level):
        with patch("lcstat.logger.LOGGING_LEVEL", level):
            return lcstat_logger.get_logger().level

    def test_levels(self):
        """
        Asserts that named and numeric levels are honored and that a missing or
        unknown level turns the logger off.
        """
        self.assertEqual(logging.DEBUG, self._level_for("debug"))
        lcstat_logger.logger = None
        self.assertEqual(15, self._level_for("15"))
        lcstat_logger.logger = None
        self.assertEqual(logging.CRITICAL + 1, self._level_for("verbose"))
        lcstat_logger.logger = None
        self.assertEqual(logging.INFO, self._level_for(" Info "))
        lcstat_logger.logger = None
        self.assertEqual(logging.CRITICAL + 1, self._level_for(None))

    def test_stderr_handler(self):
        """
        Asserts that an enabled logger gets exactly one formatted stderr handler and a
        silent one gets none.
        """
        with patch("lcstat.logger.LOGGER_NAME", "lcstat-handler-logger"), patch(
            "lcstat.logger.LOGGING_LEVEL", "info"
        ):
            lcstat_logger.get_logger()
            lcstat_logger.logger = None
            handlers = lcstat_logger.get_logger().handlers
        self.assertEqual(1, len(handlers))
        self.assertIsInstance(handlers[0], logging.StreamHandler)
        self.assertEqual(lcstat_logger.LOG_FORMAT, handlers[0].formatter._fmt)

        lcstat_logger.logger = None
        with patch("lcstat.logger.LOGGER_NAME", "lcstat-silent-logger"):
            self._level_for(None)
            self.assertEqual([], lcstat_logger.get_logger().handlers)

    def test_singleton(self):
        """
        Asserts that get_logger builds the logger once and reuses it.
        """
        first = lcstat_logger.get_logger()
        self.assertIs(first, lcstat_logger.get_logger())
        self.assertEqual("lcstat-test-logger", first.name)


if __name__ == "__main__":
    unittest.main()
