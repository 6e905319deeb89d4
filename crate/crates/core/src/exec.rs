//! Sequential or data-parallel execution of the checker's inner loops.
//!
//! With the `parallel` feature disabled every policy runs sequentially.

/// Frontiers smaller than this are expanded sequentially even under
/// [`ExecPolicy::Parallel`].
pub const PAR_THRESHOLD: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel
    }

    /// `items.iter().map(f).collect()`, in parallel when the policy allows
    /// and the input is large enough. Output order matches input order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.map_min(items, PAR_THRESHOLD, f)
    }

    /// Like [`ExecPolicy::map`] with an explicit size threshold.
    pub fn map_min<T, R, F>(self, items: &[T], min_len: usize, f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() && items.len() >= min_len.max(2) {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        let _ = min_len;
        items.iter().map(f).collect()
    }

    /// Runs two closures, concurrently under the parallel policy.
    pub fn join<A, B, RA, RB>(self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return rayon::join(a, b);
        }
        (a(), b())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let xs: Vec<u64> = (0..10_000).collect();
        let seq = ExecPolicy::Sequential.map(&xs, |x| x * x);
        let par = ExecPolicy::Parallel.map(&xs, |x| x * x);
        assert_eq!(seq, par);
    }
}
