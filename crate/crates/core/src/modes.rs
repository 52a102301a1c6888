//! Numeric mode search: a dense grid scan followed by golden-section
//! refinement of every interior local maximum.

use crate::real::Real;
use crate::roots::golden_max;

/// Grid resolution used by [`numeric_modes`].
pub const MODE_GRID: usize = 4096;

/// Strict local maxima of `f` on `[lo, hi]`, ascending.
///
/// `f` may be a density or a log density. Endpoints are never reported, and
/// maxima closer than `1e-6 (hi - lo)` to each other are merged.
pub fn numeric_modes<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T) -> Vec<T> {
    numeric_modes_with(f, lo, hi, MODE_GRID)
}

pub fn numeric_modes_with<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, grid: usize) -> Vec<T> {
    let n = grid.max(8);
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    let xs: Vec<T> = (0..n).map(|i| lo + step * T::from_usize_lossy(i)).collect();
    let vs: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    let mut modes: Vec<T> = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if vs[i] >= vs[i - 1] && vs[i] > vs[i + 1] {
            // Walk back across a flat run so the bracket contains the whole plateau.
            let mut j = i;
            while j > 1 && vs[j - 1] == vs[i] {
                j -= 1;
            }
            let x = golden_max(&f, xs[j - 1], xs[i + 1], T::epsilon().sqrt() * T::lit(1e-2));
            let tol = (hi - lo) * T::lit(1e-6);
            if modes.last().is_none_or(|&m| (x - m).abs() > tol) {
                modes.push(x);
            }
        }
        i += 1;
    }
    modes
}

/// Checks that `x` is a strict local maximum of `f` by a two-sided
/// comparison at offset `h`.
pub fn is_local_max<T: Real, F: Fn(T) -> T>(f: F, x: T, h: T) -> bool {
    let fx = f(x);
    fx > f(x - h) && fx > f(x + h)
}
