use crate::error::{Error, Result};

/// Relative tolerance on node spacing when validating an explicit time list.
const UNIFORM_RTOL: f64 = 1e-9;

/// A uniform time grid `start, start + h, ..., start + steps * h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    steps: usize,
}

impl TimeGrid {
    /// Grid on `[0, t_end]` with `steps` intervals.
    pub fn uniform(t_end: f64, steps: usize) -> Result<Self> {
        Self::spanning(0.0, t_end, steps)
    }

    pub fn spanning(start: f64, end: f64, steps: usize) -> Result<Self> {
        if steps < 1 {
            return Err(Error::InvalidGrid("need at least 2 nodes".into()));
        }
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(Error::InvalidGrid(format!("end {end} must exceed start {start}")));
        }
        Ok(TimeGrid { start, step: (end - start) / steps as f64, steps })
    }

    /// Validates an explicit, strictly increasing, uniformly spaced list of times.
    pub fn from_times(times: &[f64]) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid("need at least 2 nodes".into()));
        }
        let steps = times.len() - 1;
        let grid = Self::spanning(times[0], times[steps], steps)?;
        for (k, &t) in times.iter().enumerate() {
            if (t - grid.node(k)).abs() > UNIFORM_RTOL * grid.step.max(1.0) {
                return Err(Error::InvalidGrid(format!(
                    "non-uniform spacing at node {k} (t = {t}, expected {})",
                    grid.node(k)
                )));
            }
        }
        Ok(grid)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.node(self.steps)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of nodes, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.steps {
            // Pin the last node so that t_end round-trips exactly.
            self.start + self.step * self.steps as f64
        } else {
            self.start + self.step * k as f64
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.node(k))
    }

    /// Same span, twice as many steps.
    pub fn refined(&self) -> Self {
        TimeGrid { start: self.start, step: self.step / 2.0, steps: self.steps * 2 }
    }

    /// The sub-grid of nodes `from..=to`.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if to <= from || to > self.steps {
            return Err(Error::InvalidGrid(format!("bad slice {from}..={to}")));
        }
        Ok(TimeGrid { start: self.node(from), step: self.step, steps: to - from })
    }

    /// Index of the interval containing `t`, clamped to the grid.
    pub fn interval_of(&self, t: f64) -> usize {
        let x = ((t - self.start) / self.step).floor();
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.steps - 1)
        }
    }
}

/// Cumulative integral of `f` at every node: composite Simpson with the
/// interval midpoint as the middle abscissa.
pub fn cumulative_simpson(grid: &TimeGrid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let h = grid.step();
    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    let mut acc = 0.0;
    let mut f_left = f(grid.node(0));
    for k in 0..grid.steps() {
        let t0 = grid.node(k);
        let f_mid = f(t0 + 0.5 * h);
        let f_right = f(grid.node(k + 1));
        acc += h / 6.0 * (f_left + 4.0 * f_mid + f_right);
        out.push(acc);
        f_left = f_right;
    }
    out
}

/// Single-panel Simpson estimate of the integral of `f` over `[a, b]`.
pub fn simpson_panel(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}
