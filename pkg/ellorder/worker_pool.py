import traceback
from dataclasses import dataclass
from multiprocessing.pool import ThreadPool
from typing import Any, Callable, List, Sequence

from .utils.messages import emit


@dataclass
class FailMessage:
    sender_id: int
    text: str
    exception: str = None


class TaskFailed(Exception):
    pass


class _Task:
    '''Runs one (index, parameter) pair and turns any exception into a FailMessage.'''
    def __init__(self, function: Callable[[Any], Any]):
        if not callable(function):
            raise TypeError(f"the 'function' specified was not callable.")
        self.function = function

    def __call__(self, indexed_parameter):
        index, parameter = indexed_parameter
        try:
            return self.function(parameter)
        except Exception as exception:
            return FailMessage(index, f"task {index} raised {exception.__class__.__name__}", traceback.format_exc())


class WorkerPool:
    '''
    Thread pool for independent Monte-Carlo tasks.
    Results come back in the order of the parameters, so merged estimates do not depend on
    scheduling; numpy releases the GIL in the heavy kernels, so threads suffice.
    '''
    def __init__(self, n_jobs: int = 1, verbose: int = 0):
        if not isinstance(n_jobs, int):
            raise TypeError(f"the n_jobs specified was of wrong type {type(n_jobs)}, expected {int}.")
        if n_jobs < 1:
            raise ValueError(f"the n_jobs specified must be at least 1, got {n_jobs}.")
        if not isinstance(verbose, int):
            raise TypeError(f"the verbose specified was of wrong type {type(verbose)}, expected {int}.")
        self.n_jobs = n_jobs
        self.verbose = verbose

    def _print(self, message: str) -> None:
        if self.verbose < 2:
            return
        emit(self.__class__.__name__, message)

    def _on_fail_message(self, message: FailMessage) -> None:
        emit(self.__class__.__name__, f"fail message received from task {message.sender_id}: {message.text}.")
        if message.exception:
            emit(self.__class__.__name__, f"exception: {message.exception}")

    def map(self, function: Callable[[Any], Any], parameters: Sequence[Any]) -> List[Any]:
        if not callable(function):
            raise TypeError("'function' is not callable")
        if not isinstance(parameters, (list, tuple)):
            raise TypeError("'parameters' is not a sequence")
        task = _Task(function)
        indexed = list(enumerate(parameters))
        self._print(f"running {len(indexed)} tasks on {self.n_jobs} threads...")
        if self.n_jobs == 1 or len(indexed) < 2:
            results = [task(item) for item in indexed]
        else:
            with ThreadPool(processes=min(self.n_jobs, len(indexed))) as pool:
                results = list(pool.imap(task, indexed))
        failures = [result for result in results if isinstance(result, FailMessage)]
        for failure in failures:
            self._on_fail_message(failure)
        if failures:
            raise TaskFailed(f"{len(failures)} of {len(indexed)} tasks failed; first: {failures[0].text}.")
        self._print("all tasks were executed successfully.")
        return results
