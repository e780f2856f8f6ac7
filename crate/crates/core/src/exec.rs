//! Sequential / data-parallel execution switch.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent evaluations (audit rows, curve points) are scheduled.
///
/// `Parallel` uses rayon when the `parallel` feature is enabled and silently
/// degrades to sequential otherwise. Output order and values are identical
/// either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

pub(crate) fn map_ordered<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let xs: Vec<u32> = (0..1000).collect();
        let a = map_ordered(&xs, Execution::Sequential, |x| x * 3);
        let b = map_ordered(&xs, Execution::Parallel, |x| x * 3);
        assert_eq!(a, b);
        assert_eq!(a[999], 2997);
    }
}
