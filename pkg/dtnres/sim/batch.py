# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Evaluate indicators and refinements in process or over worker processes.
"""

import multiprocessing as mp
from functools import partial
from typing import List, Sequence

import more_itertools

from dtnres.linalg import random_vector
from dtnres.nep import ResonanceOperator
from dtnres.sim.simsolver import Cell, SimConfig, indicator, refine_candidate


class IndicatorWorker:
    """ Owns an operator and evaluates work units against it. """

    def __init__(self, op: ResonanceOperator, config: SimConfig) -> None:
        self.op = op
        self.config = config
        self._vectors = {}

    def vector(self, seed: int):
        if seed not in self._vectors:
            self._vectors[seed] = random_vector(self.op.ndof, seed)

        return self._vectors[seed]

    def indicators(self, cells: Sequence[Cell], seed: int) -> List[float]:
        f = self.vector(seed)
        return [indicator(self.op, cell, self.config, f) for cell in cells]

    def refine(self, centers: Sequence[complex]) -> list:
        return [refine_candidate(self.op, center, self.config) for center in centers]

    def close(self) -> None:
        self._vectors.clear()


def _child(worker_fn, parent_pipe, pipe):
    """
    Event loop run by the child processes
    """
    worker = None
    try:
        parent_pipe.close()
        worker = worker_fn()

        while True:
            command = pipe.recv()
            # command is a tuple like ("call", "method_name", args)
            if command[0] == "call":
                result = getattr(worker, command[1])(*command[2])
            elif command[0] == "stop":
                break

            pipe.send(result)

    except (EOFError, KeyboardInterrupt):
        pass
    finally:
        if worker is not None:
            worker.close()

        pipe.close()


class _ChildWorker:
    """
    Wrapper for a worker in a child process.
    """
    def __init__(self, worker_fn):
        self._pipe, child_pipe = mp.Pipe()
        self._process = mp.Process(target=_child, args=(worker_fn, self._pipe, child_pipe))
        self._process.daemon = True
        self._process.start()
        child_pipe.close()

    def call(self, method, *args):
        self._pipe.send(("call", method, args))

    def result(self):
        return self._pipe.recv()

    def close(self):
        if self._process is None:
            return

        try:
            self._pipe.send(("stop",))
        except (BrokenPipeError, OSError):
            pass

        self._pipe.close()
        self._process.join(timeout=5)
        if self._process.is_alive():
            self._process.terminate()

        self._process = None

    def __del__(self):
        self.close()


class SyncIndicatorBatch:
    """ Evaluates everything in the calling process. """

    def __init__(self, op: ResonanceOperator, config: SimConfig) -> None:
        self.worker = IndicatorWorker(op, config)

    def indicators(self, cells: Sequence[Cell], seed: int) -> List[float]:
        return self.worker.indicators(cells, seed)

    def refine(self, centers: Sequence[complex]) -> list:
        return self.worker.refine(centers)

    def close(self) -> None:
        self.worker.close()

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()


class AsyncIndicatorBatch:
    """
    Spreads work over `workers` child processes.

    Work is cut in contiguous chunks, one per child, and the results are
    concatenated in submission order: the outcome does not depend on the
    number of workers.
    """

    def __init__(self, op: ResonanceOperator, config: SimConfig, workers: int) -> None:
        self.workers = workers
        self.children = [_ChildWorker(partial(IndicatorWorker, op, config)) for _ in range(workers)]

    def _map(self, method: str, items: Sequence, *args) -> list:
        if len(items) == 0:
            return []

        chunks = [list(chunk) for chunk in more_itertools.divide(min(self.workers, len(items)), items)]
        for child, chunk in zip(self.children, chunks):
            child.call(method, chunk, *args)

        results = [child.result() for child, _ in zip(self.children, chunks)]
        return list(more_itertools.flatten(results))

    def indicators(self, cells: Sequence[Cell], seed: int) -> List[float]:
        return self._map("indicators", cells, seed)

    def refine(self, centers: Sequence[complex]) -> list:
        return self._map("refine", centers)

    def close(self) -> None:
        for child in self.children:
            child.close()

        self.children = []

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()


def make_batch(op: ResonanceOperator, config: SimConfig):
    """ In-process batch for a single worker, worker processes otherwise. """
    if config.workers <= 1:
        return SyncIndicatorBatch(op, config)

    return AsyncIndicatorBatch(op, config, config.workers)
