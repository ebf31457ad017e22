//! Sequential and data-parallel execution lanes for per-mode loops.
//!
//! Every kernel routed through here is elementwise: one slot of the output
//! depends on the same slot of the inputs and on broadcast scalars only, so
//! the parallel lane is bitwise identical to the sequential one. Reductions
//! (norms, inner products, quadrature) are deliberately NOT routed through
//! this module; they stay sequential so summation order is fixed.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this length the parallel lane falls back to the sequential loop;
/// fork-join overhead dominates for desk-scale grids.
pub const PAR_MIN_LEN: usize = 8192;

pub fn for_each_slot_seq<T, F>(data: &mut [T], f: F)
where
    F: Fn(usize, &mut T),
{
    for (i, x) in data.iter_mut().enumerate() {
        f(i, x);
    }
}

#[cfg(feature = "parallel")]
pub fn for_each_slot_par<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync,
{
    data.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

/// Dispatching wrapper: parallel when the feature is on and the slice is
/// long enough to amortize the fork, sequential otherwise.
pub fn for_each_slot<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if data.len() >= PAR_MIN_LEN {
            for_each_slot_par(data, f);
            return;
        }
    }
    for_each_slot_seq(data, f);
}

pub fn for_each_slot_pair_seq<A, B, F>(a: &mut [A], b: &mut [B], f: F)
where
    F: Fn(usize, &mut A, &mut B),
{
    assert_eq!(a.len(), b.len(), "paired slices must have equal length");
    for (i, (x, y)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
        f(i, x, y);
    }
}

#[cfg(feature = "parallel")]
pub fn for_each_slot_pair_par<A, B, F>(a: &mut [A], b: &mut [B], f: F)
where
    A: Send,
    B: Send,
    F: Fn(usize, &mut A, &mut B) + Sync,
{
    assert_eq!(a.len(), b.len(), "paired slices must have equal length");
    a.par_iter_mut()
        .zip(b.par_iter_mut())
        .enumerate()
        .for_each(|(i, (x, y))| f(i, x, y));
}

pub fn for_each_slot_pair<A, B, F>(a: &mut [A], b: &mut [B], f: F)
where
    A: Send,
    B: Send,
    F: Fn(usize, &mut A, &mut B) + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if a.len() >= PAR_MIN_LEN {
            for_each_slot_pair_par(a, b, f);
            return;
        }
    }
    for_each_slot_pair_seq(a, b, f);
}

/// Runs independent jobs and collects results in input order. Used by the
/// sweep driver; each job owns its state so ordering is the only shared
/// concern.
pub fn run_jobs<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
