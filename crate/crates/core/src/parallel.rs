//! Bounded worker pool for independent jobs.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Maps `f` over `0..n` on at most `workers` threads, returning results in
/// index order. The first error (by index) wins.
pub fn map_indexed<T, F>(workers: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("worker pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(&f).collect::<Vec<_>>())
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let serial = map_indexed(1, 50, |i| Ok(i * i)).unwrap();
        let parallel = map_indexed(4, 50, |i| Ok(i * i)).unwrap();
        assert_eq!(serial, parallel);
        assert!(map_indexed(3, 10, |i| if i == 7 { Err(Error::arg("x")) } else { Ok(i) }).is_err());
    }
}
