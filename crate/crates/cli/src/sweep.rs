//! Deterministic fan-out for parameter sweeps: work items are distributed
//! round-robin over scoped threads and results are reassembled by index, so
//! the output ordering never depends on scheduling.

pub fn parallel_map<T, U, F>(items: &[T], threads: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let mut slots: Vec<Option<U>> = Vec::with_capacity(items.len());
    slots.resize_with(items.len(), || None);

    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(threads);
        for w in 0..threads {
            let f = &f;
            handles.push(scope.spawn(move || {
                let mut part = Vec::new();
                let mut i = w;
                while i < items.len() {
                    part.push((i, f(&items[i])));
                    i += threads;
                }
                part
            }));
        }
        for h in handles {
            for (i, v) in h.join().expect("sweep worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("missing slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<usize> = (0..101).collect();
        let serial = parallel_map(&items, 1, |&x| x * x);
        let threaded = parallel_map(&items, 4, |&x| x * x);
        assert_eq!(serial, threaded);
        assert_eq!(serial[100], 10000);
    }
}
