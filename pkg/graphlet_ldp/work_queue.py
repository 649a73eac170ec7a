"""
Task Queue

Bounded hand-off of numbered tasks (randomized-response blocks, subset
chunks, sweep cells) from a producer thread to worker threads.

close() lets the workers drain what is queued; cancel() discards it and
releases every waiting thread.
"""

import logging
import threading
from collections import deque
from dataclasses import dataclass
from typing import Deque, Generic, Optional, TypeVar

logger = logging.getLogger(__name__)

P = TypeVar('P')


@dataclass(frozen=True)
class Task(Generic[P]):
    """
    Attributes:
        index: Position of the payload in its source; results merge in this order.
        payload: Block number, subset chunk or sweep cell.
    """
    index: int
    payload: P


class TaskQueue(Generic[P]):
    """
    FIFO of at most capacity pending tasks.

    Attributes:
        capacity (int): Maximum number of pending tasks.
        dropped (int): Tasks discarded by cancel().
    """

    def __init__(self, capacity: int = 16):
        """
        Raises:
            ValueError: If capacity is less than 1.
        """
        if capacity < 1:
            raise ValueError(f"capacity must be at least 1, got {capacity}")
        self.capacity = capacity
        self.dropped = 0
        self._tasks: Deque[Task[P]] = deque()
        self._changed = threading.Condition()
        self._closed = False
        self._cancelled = False

    def submit(self, task: Task[P]) -> bool:
        """
        Queue a task, waiting for a free slot.

        Returns:
            True if queued; False once the queue is closed or cancelled.
        """
        with self._changed:
            self._changed.wait_for(
                lambda: len(self._tasks) < self.capacity or self._closed or self._cancelled
            )
            if self._closed or self._cancelled:
                return False
            self._tasks.append(task)
            self._changed.notify_all()
            return True

    def take(self) -> Optional[Task[P]]:
        """Oldest pending task; None when closed and drained, or cancelled."""
        with self._changed:
            self._changed.wait_for(lambda: self._tasks or self._closed or self._cancelled)
            if self._cancelled or not self._tasks:
                return None
            task = self._tasks.popleft()
            self._changed.notify_all()
            return task

    def close(self) -> None:
        """Refuse further submissions; pending tasks are still handed out."""
        with self._changed:
            self._closed = True
            self._changed.notify_all()

    def cancel(self) -> int:
        """Discard pending tasks and stop handing out new ones. Returns the number discarded."""
        with self._changed:
            discarded = len(self._tasks)
            self._tasks.clear()
            self._cancelled = True
            self.dropped += discarded
            self._changed.notify_all()
        if discarded:
            logger.debug("Cancelled %d pending tasks", discarded)
        return discarded

    @property
    def cancelled(self) -> bool:
        with self._changed:
            return self._cancelled

    def __len__(self) -> int:
        with self._changed:
            return len(self._tasks)
