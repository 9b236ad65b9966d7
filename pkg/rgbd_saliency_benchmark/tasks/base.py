"""
Base Tasks
==========

Every runnable unit of the benchmark (dataset evaluation, gradient checks,
kernel demos and the self-test) is a task built on :class:`BaseTaskInitializer`.
The base class stores the configuration dictionary, prepares the package
logger and defines the ``start`` / ``process`` / ``store_entry`` life cycle
that concrete tasks implement.

**Configuration**

.. code-block:: yaml

    max_workers: 1        # default worker count for parallel stages
    log_level: INFO       # package logger level
    log_path: False       # file to mirror the log into, False to disable
    seed: 42              # seed shared by every stochastic stage

**Example Usage**

.. code-block:: python

   from rgbd_saliency_benchmark.tasks.base import BaseTaskInitializer

   class MyTask(BaseTaskInitializer):
       def start(self):
           self.logger.info("Running")
           return 0
"""
import logging
import os
from abc import ABC, abstractmethod

LOGGER_NAME = "rgbd_saliency_benchmark"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(conf):
    """
    Configure the package logger once per process.

    Logs go to standard error so that command output on standard output stays
    byte-deterministic. When ``log_path`` is set, the log is mirrored into that
    file.

    Args:
        conf (dict): Configuration with optional ``log_level`` and ``log_path``.

    Returns:
        logging.Logger: The package logger.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(conf.get('log_level', 'INFO'))
    formatter = logging.Formatter(LOG_FORMAT)

    if not any(getattr(h, '_sodbench', False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(formatter)
        handler._sodbench = True
        logger.addHandler(handler)

    log_path = conf.get('log_path', False)
    if log_path:
        log_path = os.path.expanduser(log_path)
        known = {getattr(h, 'baseFilename', None) for h in logger.handlers}
        if os.path.abspath(log_path) not in known:
            directory = os.path.dirname(log_path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            file_handler = logging.FileHandler(log_path)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
    return logger


def resolve_workers(value, conf):
    """
    Worker count from an explicit value, ``SODBENCH_THREADS`` or ``max_workers``.
    """
    if value is not None:
        return max(1, int(value))
    env_value = os.environ.get('SODBENCH_THREADS')
    if env_value:
        return max(1, int(env_value))
    return max(1, int(conf.get('max_workers', 1)))


class BaseTaskInitializer(ABC):
    """
    Common ancestor of all benchmark tasks.

    Attributes:
        conf (dict): Task configuration.
        logger (logging.Logger): Package logger.
    """

    def __init__(self, conf):
        """
        Initialize the task.

        Args:
            conf (dict): Configuration dictionary.
        """
        self.conf = conf
        self.logger = setup_logger(conf)

    @abstractmethod
    def start(self):
        """Run the task and return a process exit code."""

    def process(self, item):
        """Process a single unit of work. Tasks override it when they fan out."""
        raise NotImplementedError

    def store_entry(self, record):
        """Persist the task result. Tasks override it when they write outputs."""
        raise NotImplementedError
