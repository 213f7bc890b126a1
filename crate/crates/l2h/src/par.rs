//! Thin dispatch layer between the rayon and sequential execution paths.
//!
//! Every parallel reduction in the crate is associative over exact values,
//! so the `parallel` feature changes wall-clock time but never output bytes.

#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Map over index chunks of `0..n` and fold the chunk results. `merge` must
/// be associative and commutative.
#[cfg(feature = "parallel")]
pub fn chunk_reduce<A, F, M>(n: usize, chunk: usize, identity: impl Fn() -> A + Sync + Send, f: F, merge: M) -> A
where
    A: Send,
    F: Fn(std::ops::Range<usize>) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    use rayon::prelude::*;
    let ranges: Vec<std::ops::Range<usize>> = (0..n)
        .step_by(chunk.max(1))
        .map(|s| s..(s + chunk).min(n))
        .collect();
    ranges
        .into_par_iter()
        .map(f)
        .reduce(&identity, &merge)
}

#[cfg(not(feature = "parallel"))]
pub fn chunk_reduce<A, F, M>(n: usize, chunk: usize, identity: impl Fn() -> A, f: F, merge: M) -> A
where
    F: Fn(std::ops::Range<usize>) -> A,
    M: Fn(A, A) -> A,
{
    let mut acc = identity();
    let mut s = 0;
    while s < n {
        let e = (s + chunk.max(1)).min(n);
        acc = merge(acc, f(s..e));
        s = e;
    }
    acc
}
