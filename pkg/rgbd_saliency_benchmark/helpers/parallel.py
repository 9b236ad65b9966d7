from concurrent.futures import ThreadPoolExecutor, as_completed


def ordered_map(fn, items, workers=1):
    """
    Apply ``fn`` to every item, optionally on a thread pool.

    Results are returned in the order of ``items`` whatever the completion
    order, so any reduction performed afterwards is independent of the worker
    count.

    Args:
        fn (callable): Function of one item.
        items (Sequence): Items to process.
        workers (int): Thread count; values ``<= 1`` run sequentially.

    Returns:
        list: ``[fn(item) for item in items]``.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    results = [None] * len(items)
    max_threads = min(workers, len(items))
    with ThreadPoolExecutor(max_workers=max_threads) as executor:
        futures = {executor.submit(fn, item): index for index, item in enumerate(items)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results
