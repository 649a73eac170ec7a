"""
Worker Pool

run_tasks numbers the items of a source, passes them through a TaskQueue
to worker threads and merges the results back in item order, so block
flips, chunk sums and sweep cells come out the same for any worker count.
The first failing task cancels everything still queued.
"""

import logging
import threading
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

from .work_queue import Task, TaskQueue

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


class TaskProducer(threading.Thread):
    """
    Submits Task(index, item) for every source item, then closes the queue.

    An exception from the source cancels the queue and is kept in error.
    """

    def __init__(self, queue: TaskQueue, source: Iterable[Any], name: str = "TaskProducer"):
        super().__init__(name=name, daemon=True)
        self._queue = queue
        self._source = source
        self.submitted = 0
        self.error: Optional[Exception] = None

    def run(self) -> None:
        try:
            for index, item in enumerate(self._source):
                if not self._queue.submit(Task(index, item)):
                    break
                self.submitted += 1
        except Exception as exc:
            self.error = exc
            self._queue.cancel()
        finally:
            self._queue.close()


class OrderedResults:
    """Handler results and failures keyed by task index."""

    def __init__(self):
        self._values: Dict[int, Any] = {}
        self._failures: Dict[int, Exception] = {}
        self._lock = threading.Lock()

    def record(self, index: int, value: Any) -> None:
        with self._lock:
            self._values[index] = value

    def record_failure(self, index: int, error: Exception) -> None:
        with self._lock:
            self._failures[index] = error

    def first_failure(self) -> Optional[Exception]:
        """The failure with the lowest task index, if any."""
        with self._lock:
            if not self._failures:
                return None
            return self._failures[min(self._failures)]

    def merged(self, count: int) -> List[Any]:
        """
        Values of tasks 0..count-1 in index order.

        Raises:
            LookupError: If a task in that range has no value.
        """
        with self._lock:
            missing = [index for index in range(count) if index not in self._values]
            if missing:
                raise LookupError(f"No result for {len(missing)} task(s), first {missing[0]}")
            return [self._values[index] for index in range(count)]

    def __len__(self) -> int:
        with self._lock:
            return len(self._values)


class TaskWorker(threading.Thread):
    """
    Applies the handler to tasks until the queue runs dry or is cancelled.
    A failing handler cancels the queue.

    Attributes:
        handled (int): Tasks run, failed ones included.
    """

    def __init__(
        self,
        queue: TaskQueue,
        handler: Callable[[Any], Any],
        results: OrderedResults,
        name: str = "TaskWorker"
    ):
        super().__init__(name=name, daemon=True)
        self._queue = queue
        self._handler = handler
        self._results = results
        self.handled = 0

    def run(self) -> None:
        while True:
            task = self._queue.take()
            if task is None:
                return
            try:
                self._results.record(task.index, self._handler(task.payload))
            except Exception as exc:
                logger.debug("%s: task %d failed: %s", self.name, task.index, exc)
                self._results.record_failure(task.index, exc)
                self._queue.cancel()
            self.handled += 1


def run_tasks(
    items: Iterable[T],
    handler: Callable[[T], R],
    workers: int = 1,
    capacity: Optional[int] = None
) -> List[R]:
    """
    Apply handler to every item and return the results in item order.

    With workers == 1 the items are handled inline on the calling thread.
    Otherwise a failure cancels the tasks not yet started; tasks before the
    failing one were already taken and still finish.

    Raises:
        ValueError: If workers < 1.
        Exception: The source's exception, else the lowest-index exception
            raised by handler, once every thread has stopped.
    """
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    if workers == 1:
        return [handler(item) for item in items]

    queue: TaskQueue = TaskQueue(capacity or 2 * workers)
    results = OrderedResults()
    producer = TaskProducer(queue, items)
    pool = [TaskWorker(queue, handler, results, name=f"TaskWorker-{i}") for i in range(workers)]

    for worker in pool:
        worker.start()
    producer.start()
    producer.join()
    for worker in pool:
        worker.join()

    if producer.error is not None:
        raise producer.error
    error = results.first_failure()
    if error is not None:
        logger.debug("run_tasks: stopped after %d of %d submitted tasks (%d discarded)",
                     sum(worker.handled for worker in pool), producer.submitted, queue.dropped)
        raise error
    return results.merged(producer.submitted)
