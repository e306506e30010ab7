use crate::error::{domain, Result};

/// Default vertical-spread tolerance.
pub const DEFAULT_EPSILON: f64 = 0.0025;

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&v| v < x);
    if i == 0 {
        return ys[0];
    }
    if i == xs.len() {
        return ys[xs.len() - 1];
    }
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

/// Maximal contiguous `x` window over which the spread `max − min` across
/// curves stays within `epsilon`.
///
/// Curves are interpolated linearly onto the union of their abscissae
/// within the common support; window edges are interpolated to where the
/// spread reaches `epsilon`. With `anchor`, the window containing it is
/// returned, otherwise the widest one. `None` when no point qualifies.
pub fn collapse_spread(curves: &[(Vec<f64>, Vec<f64>)], epsilon: f64, anchor: Option<f64>) -> Result<Option<(f64, f64)>> {
    if curves.len() < 2 {
        return domain("need at least two curves");
    }
    for (xs, ys) in curves {
        if xs.is_empty() || xs.len() != ys.len() || xs.windows(2).any(|w| w[1] <= w[0]) {
            return domain("curves need matching, strictly increasing abscissae");
        }
    }
    let lo = curves.iter().map(|c| c.0[0]).fold(f64::NEG_INFINITY, f64::max);
    let hi = curves.iter().map(|c| *c.0.last().unwrap()).fold(f64::INFINITY, f64::min);
    if lo > hi {
        return domain("curves have disjoint supports");
    }
    let mut grid: Vec<f64> = curves.iter().flat_map(|c| c.0.iter().copied()).filter(|&x| x >= lo && x <= hi).collect();
    grid.extend([lo, hi]);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let spread: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let v = curves.iter().map(|c| interp(&c.0, &c.1, x));
            let (mn, mx) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
            mx - mn
        })
        .collect();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if spread[i] <= epsilon {
            let s = i;
            while i + 1 < grid.len() && spread[i + 1] <= epsilon {
                i += 1;
            }
            runs.push((s, i));
        }
        i += 1;
    }
    let edge = |inside: usize, outside: usize| {
        let (si, so) = (spread[inside], spread[outside]);
        grid[inside] + (grid[outside] - grid[inside]) * (epsilon - si) / (so - si)
    };
    let windows: Vec<(f64, f64)> = runs
        .iter()
        .map(|&(s, e)| {
            let a = if s > 0 { edge(s, s - 1) } else { grid[s] };
            let b = if e + 1 < grid.len() { edge(e, e + 1) } else { grid[e] };
            (a, b)
        })
        .collect();
    Ok(match anchor {
        Some(x0) => windows.into_iter().find(|w| w.0 <= x0 && x0 <= w.1),
        None => windows.into_iter().fold(None, |best: Option<(f64, f64)>, w| match best {
            Some(b) if b.1 - b.0 >= w.1 - w.0 => Some(b),
            _ => Some(w),
        }),
    })
}
