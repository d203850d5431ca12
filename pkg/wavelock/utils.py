"""Shared helpers: console output, formatting and the worker pool.

Attributes
----------
THREADS_ENVIRONMENT_VARIABLE : str
    Name of the environment variable that caps the number of workers used for
    DE fitness evaluations and sweep trials.

"""


import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional

import numpy as np


THREADS_ENVIRONMENT_VARIABLE = "WAVELOCK_THREADS"
CSV_FLOAT_FORMAT = ".17g"


def console_out(msg, heading=False, subheading=False, prefix="", suffix="", *,
                trailing_blank_line=False):
    msg = f"{prefix}{msg}{suffix}"
    msg_len = len(msg)
    if heading:
        seperator = '=' * msg_len
        output_msg = (f"\n{seperator}\n{msg}\n{seperator}\n")
    elif subheading:
        seperator = '-' * msg_len
        output_msg = (f"\n{msg}\n{seperator}")
    else:
        output_msg = msg
    if trailing_blank_line:
        output_msg += "\n"
    print(output_msg)


def format_time(time):
    """Nicely format a time for console output with correct units.

    Args
    ----
    time : float
        Time (in seconds) for formatting.

    Returns
    -------
    str
        Time formatted with units.

    """
    if time >= 1.0:
        if time < 60:
            return f"{time:.2f}s"
        elif time < 3600:
            return f"{time//60:.0f}min {time%60:.2f}s"
        else:
            return f"{time//3600:.0f}h {(time%3600)//60:.0f}min {time%60:.2f}s"
    else:
        prefixes = ("m", "u", "n", "p")
        time_formatted = time
        for prefix in prefixes:
            time_formatted = time_formatted * 1000
            if time_formatted > 1:
                return f"{time_formatted:.2f}{prefix}s"
        msg = f"Insufficient time prefixes for {time}s"
        raise ValueError(msg)


def format_float(value):
    """Fixed 17-significant-digit representation used by every CSV export."""
    return format(float(value), CSV_FLOAT_FORMAT)


def number_workers_from_environment(default=1):
    """Read the worker cap from `WAVELOCK_THREADS`.

    Raises
    ------
    ValueError
        If the variable is set to something other than a positive integer.

    """
    raw = os.environ.get(THREADS_ENVIRONMENT_VARIABLE)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        msg = (f"`{THREADS_ENVIRONMENT_VARIABLE}` must be a positive integer, "
               f"got {raw!r}.")
        raise ValueError(msg)
    return value


def parallel_map(func: Callable, items: Iterable,
                 number_workers: Optional[int] = 1) -> List:
    """Map `func` over `items`, preserving input order in the output.

    Results are always returned in input order so that any subsequent
    reduction is independent of the number of workers.

    """
    items = list(items)
    if not number_workers or number_workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    max_workers = min(int(number_workers), len(items))
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(func, items))


def spawn_seeds(seed, number):
    """Derive `number` independent integer seeds from a base seed."""
    children = np.random.SeedSequence(seed).spawn(number)
    return [int(child.generate_state(1)[0]) for child in children]

