use std::thread;

/// Map `f` over `items` on up to `threads` scoped threads; results come back
/// in input order whatever the thread count.
pub fn ordered_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let f = &f;
    let mut tagged: Vec<(usize, R)> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                s.spawn(move || {
                    items
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(threads)
                        .map(|(i, x)| (i, f(x)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    tagged.sort_by_key(|p| p.0);
    tagged.into_iter().map(|p| p.1).collect()
}

/// Worker cap from INEQ_FORGE_THREADS, defaulting to the hardware count.
pub fn thread_cap() -> Result<usize, String> {
    match std::env::var("INEQ_FORGE_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("INEQ_FORGE_THREADS must be a positive integer, got `{v}`")),
        },
        Err(_) => Ok(thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_thread_count() {
        let xs: Vec<u64> = (0..37).collect();
        let one = ordered_map(&xs, 1, |x| x * x);
        for t in [2, 3, 8, 64] {
            assert_eq!(ordered_map(&xs, t, |x| x * x), one);
        }
        assert!(ordered_map(&Vec::<u64>::new(), 4, |x| *x).is_empty());
    }
}
