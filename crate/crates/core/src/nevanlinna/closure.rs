//! Discrete surrogates of the essential closure (clac) and the "uncountable
//! closure" (clc) of a set sampled on a uniform grid.
//!
//! Both rules look at the window `[i − w, i + w]`. A point qualifies only if it
//! is flagged itself or has flagged points on *both* sides within the window
//! (a side falling off the grid counts as satisfied), so closures never grow
//! outward past a set's extremities. The density is always taken relative to
//! the full window length `2w + 1`, which keeps isolated points at the grid edge
//! from being promoted.
//!
//! clc is a heuristic: no finite sample can certify uncountability, so its
//! output is only ever reported as an sc *candidate*.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSet {
    pub grid_start: f64,
    pub grid_step: f64,
    pub flags: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClosureConfig {
    /// Half-width `w` of the neighbourhood, in grid points.
    pub window: usize,
    /// clac: flagged fraction of the window must exceed this.
    pub density_floor: f64,
    /// clc: at least this many flagged points in the window.
    pub count_floor: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        Self {
            window: 3,
            density_floor: 0.2,
            count_floor: 5,
        }
    }
}

impl GridSet {
    pub fn new(grid_start: f64, grid_step: f64, flags: Vec<bool>) -> Self {
        assert!(grid_step > 0.0, "grid_step must be positive");
        Self {
            grid_start,
            grid_step,
            flags,
        }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }

    pub fn point(&self, i: usize) -> f64 {
        self.grid_start + i as f64 * self.grid_step
    }

    fn with_flags(&self, flags: Vec<bool>) -> GridSet {
        GridSet {
            grid_start: self.grid_start,
            grid_step: self.grid_step,
            flags,
        }
    }

    /// Maximal runs of flagged points as closed intervals `[x_first, x_last]`.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        runs(&self.flags)
            .into_iter()
            .map(|(s, e)| (self.point(s), self.point(e)))
            .collect()
    }

    /// Union with another set on the same grid.
    pub fn union(&self, other: &GridSet) -> GridSet {
        assert_eq!(self.len(), other.len());
        self.with_flags(self.flags.iter().zip(&other.flags).map(|(a, b)| *a || *b).collect())
    }

    /// Points of `self` not in `other`.
    pub fn minus(&self, other: &GridSet) -> GridSet {
        assert_eq!(self.len(), other.len());
        self.with_flags(self.flags.iter().zip(&other.flags).map(|(a, b)| *a && !*b).collect())
    }

    /// Morphological dilation by `w` grid points.
    pub fn dilate(&self, w: usize) -> GridSet {
        let n = self.len();
        let mut out = vec![false; n];
        for (i, _) in self.flags.iter().enumerate().filter(|(_, f)| **f) {
            for o in out.iter_mut().take((i + w + 1).min(n)).skip(i.saturating_sub(w)) {
                *o = true;
            }
        }
        self.with_flags(out)
    }
}

/// Index ranges `(first, last)` of maximal runs of `true`.
pub fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &f) in flags.iter().enumerate() {
        match (f, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, flags.len() - 1));
    }
    out
}

struct Window {
    count: usize,
    sides: bool,
}

fn window_stats(flags: &[bool], prefix: &[usize], i: usize, w: usize) -> Window {
    let n = flags.len();
    let lo = i.saturating_sub(w);
    let hi = (i + w).min(n - 1);
    let count = prefix[hi + 1] - prefix[lo];
    let left = i < w || prefix[i] - prefix[lo] > 0;
    let right = i + w >= n || prefix[hi + 1] - prefix[i + 1] > 0;
    Window {
        count,
        sides: flags[i] || (left && right),
    }
}

fn prefix_counts(flags: &[bool]) -> Vec<usize> {
    let mut p = Vec::with_capacity(flags.len() + 1);
    p.push(0);
    for &f in flags {
        p.push(p.last().unwrap() + usize::from(f));
    }
    p
}

fn dense(win: &Window, w: usize, cfg: &ClosureConfig) -> bool {
    win.sides && (win.count as f64) > cfg.density_floor * (2 * w + 1) as f64
}

/// Discrete essential closure.
pub fn clac(s: &GridSet, cfg: &ClosureConfig) -> GridSet {
    let w = cfg.window.max(1);
    if s.is_empty() {
        return s.clone();
    }
    let prefix = prefix_counts(&s.flags);
    let flags = (0..s.len())
        .map(|i| dense(&window_stats(&s.flags, &prefix, i, w), w, cfg))
        .collect();
    s.with_flags(flags)
}

/// Discrete "uncountable" closure: a count floor, or the clac density rule
/// (so that `clac ⊆ clc` holds by construction).
pub fn clc(s: &GridSet, cfg: &ClosureConfig) -> GridSet {
    let w = cfg.window.max(1);
    if s.is_empty() {
        return s.clone();
    }
    let prefix = prefix_counts(&s.flags);
    let flags = (0..s.len())
        .map(|i| {
            let win = window_stats(&s.flags, &prefix, i, w);
            (win.sides && win.count >= cfg.count_floor) || dense(&win, w, cfg)
        })
        .collect();
    s.with_flags(flags)
}
