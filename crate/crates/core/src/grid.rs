//! Uniform truncation of the half-line and cell-averaged densities on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::Profile;
use crate::quadrature::gauss_legendre_mean;

/// Uniform grid on `[0, x_max]` with `cells` cells; centres at `(i + 1/2)·dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_max: f64,
    cells: usize,
}

impl Grid {
    pub fn new(x_max: f64, cells: usize) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::Grid(format!("x_max must be positive and finite, got {x_max}")));
        }
        if cells == 0 {
            return Err(Error::Grid("a grid needs at least one cell".into()));
        }
        Ok(Grid { x_max, cells })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dx(&self) -> f64 {
        self.x_max / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    /// Position of interface `j`, `0 ≤ j ≤ cells`.
    pub fn interface(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cells).map(move |i| self.center(i))
    }

    /// Same cell count, domain stretched by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Grid::new(self.x_max * factor, self.cells)
    }

    pub(crate) fn same_as(&self, other: &Grid) -> bool {
        self.cells == other.cells && (self.x_max - other.x_max).abs() <= 1e-12 * self.x_max
    }
}

/// Nonnegative cell averages of a density at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    grid: Grid,
    values: Vec<f64>,
    time: f64,
}

impl DensityField {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::Grid(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.cells()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!("density value {v} in cell {i} is not a finite nonnegative number")));
        }
        if !(time >= 0.0 && time.is_finite()) {
            return Err(Error::domain(format!("time stamp {time} must be finite and nonnegative")));
        }
        Ok(DensityField { grid, values, time })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<f64>, time: f64) -> Self {
        DensityField { grid, values, time }
    }

    pub fn zeros(grid: Grid) -> Self {
        DensityField {
            grid,
            values: vec![0.0; grid.cells()],
            time: 0.0,
        }
    }

    /// Cell averages of `f` by three-point Gauss–Legendre on every cell.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let dx = grid.dx();
        let values = (0..grid.cells())
            .map(|i| {
                let a = i as f64 * dx;
                gauss_legendre_mean(&f, a, a + dx)
            })
            .collect();
        DensityField::new(grid, values, 0.0)
    }

    pub fn from_profile<P: Profile + ?Sized>(grid: Grid, profile: &P) -> Result<Self> {
        let dx = grid.dx();
        let values = (0..grid.cells())
            .map(|i| profile.cell_average(i as f64 * dx, (i + 1) as f64 * dx))
            .collect();
        DensityField::new(grid, values, 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn mass(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DensityField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            time: self.time,
        }
    }

    /// Rescales so that the discrete mass equals `mass`.
    pub fn normalized_to(&self, mass: f64) -> Result<Self> {
        let current = self.mass();
        if current <= 0.0 {
            return Err(Error::domain("cannot normalize a field with zero mass"));
        }
        Ok(self.scaled(mass / current))
    }

    /// Convex combination `(1 − w)·self + w·other`, time interpolated alike.
    pub(crate) fn lerp(&self, other: &DensityField, w: f64) -> DensityField {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect();
        DensityField {
            grid: self.grid,
            values,
            time: (1.0 - w) * self.time + w * other.time,
        }
    }

    /// Piecewise-linear interpolant through the cell centres, extended by
    /// the end values and zero beyond `x_max`.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.values.len();
        let dx = self.grid.dx();
        if x < 0.0 || x > self.grid.x_max() {
            return 0.0;
        }
        let s = x / dx - 0.5;
        if s <= 0.0 {
            return self.values[0];
        }
        let i = s.floor() as usize;
        if i + 1 >= n {
            return self.values[n - 1];
        }
        let w = s - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }

    pub fn l1_distance(&self, other: &DensityField) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::domain("L1 distance between fields on different grids"));
        }
        Ok(self.grid.dx() * self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    pub fn sup_distance(&self, other: &DensityField) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::domain("sup distance between fields on different grids"));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let g = Grid::new(2.0, 4).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.center(0), 0.25);
        assert_eq!(g.interface(4), 2.0);
        assert!(Grid::new(0.0, 4).is_err());
        assert!(Grid::new(1.0, 0).is_err());
    }

    #[test]
    fn rejects_negative_values() {
        let g = Grid::new(1.0, 2).unwrap();
        assert!(DensityField::new(g, vec![1.0, -1e-3], 0.0).is_err());
        assert!(DensityField::new(g, vec![1.0], 0.0).is_err());
    }

    #[test]
    fn cell_averages_of_linear_function() {
        let g = Grid::new(1.0, 10).unwrap();
        let f = DensityField::from_fn(g, |x| 2.0 * x).unwrap();
        assert!((f.mass() - 1.0).abs() < 1e-14);
        assert!((f.values()[3] - 2.0 * g.center(3)).abs() < 1e-14);
    }
}
