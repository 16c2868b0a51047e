//! Work distribution. The core crate only ships a sequential executor; the
//! `orthocount` crate adds a threaded one. Every algorithm merges results in
//! input order, so output never depends on the executor.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Applies `f` to every item and returns the results in input order.
    fn map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(&self, items: &[T], f: F) -> Vec<R>;

    fn workers(&self) -> usize;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(&self, items: &[T], f: F) -> Vec<R> {
        items.iter().map(f).collect()
    }

    fn workers(&self) -> usize {
        1
    }
}
