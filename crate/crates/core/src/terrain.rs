//! Piecewise-constant stair terrain.

use nalgebra::Vector2;

use crate::error::{GaitError, Result};

/// A straight flight of identical stairs.
///
/// The first riser sits at `origin`; `heading` is the world yaw of the
/// walking direction. An ascending flight rises by `height` at every riser
/// and its last tread continues as an unbounded landing. A descending flight
/// starts at `base_height` and drops by `height` per riser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StairProfile {
    pub origin: Vector2<f64>,
    pub heading: f64,
    pub count: usize,
    pub width: f64,
    pub height: f64,
    pub base_height: f64,
    pub ascending: bool,
}

impl StairProfile {
    pub fn ascending(
        origin: Vector2<f64>,
        heading: f64,
        count: usize,
        width: f64,
        height: f64,
    ) -> Self {
        StairProfile {
            origin,
            heading,
            count,
            width,
            height,
            base_height: 0.0,
            ascending: true,
        }
    }

    /// Descending flight starting at `base_height`.
    pub fn descending(
        origin: Vector2<f64>,
        heading: f64,
        count: usize,
        width: f64,
        height: f64,
        base_height: f64,
    ) -> Self {
        StairProfile {
            origin,
            heading,
            count,
            width,
            height,
            base_height,
            ascending: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(GaitError::param(
                "stair_width",
                format!("must be positive, got {}", self.width),
            ));
        }
        if !(self.height.is_finite() && self.height > 0.0) {
            return Err(GaitError::param(
                "stair_height",
                format!("must be positive, got {}", self.height),
            ));
        }
        if self.count == 0 {
            return Err(GaitError::param("stair_count", "must be at least 1"));
        }
        Ok(())
    }

    pub fn direction(&self) -> Vector2<f64> {
        Vector2::new(self.heading.cos(), self.heading.sin())
    }

    /// Distance along the walking direction from the first riser.
    pub fn along(&self, p: &Vector2<f64>) -> f64 {
        (p - self.origin).dot(&self.direction())
    }

    /// Height change across the whole flight (signed).
    pub fn rise(&self) -> f64 {
        let total = self.count as f64 * self.height;
        if self.ascending {
            total
        } else {
            -total
        }
    }

    /// Height at abscissa `u`. A point exactly on a riser takes the upper tread.
    pub fn height_along(&self, u: f64) -> f64 {
        let n = self.count as f64;
        if self.ascending {
            if u < 0.0 {
                self.base_height
            } else {
                self.base_height + self.height * ((u / self.width).floor() + 1.0).min(n)
            }
        } else if u <= 0.0 {
            self.base_height
        } else {
            self.base_height - self.height * (u / self.width).ceil().min(n)
        }
    }

    pub fn height_at(&self, p: &Vector2<f64>) -> f64 {
        self.height_along(self.along(p))
    }

    /// Riser abscissae along the flight.
    pub fn risers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |k| k as f64 * self.width)
    }

    /// Abscissa of the middle of tread `k` (1-based).
    pub fn tread_center(&self, k: usize) -> f64 {
        (k as f64 - 0.5) * self.width
    }
}

/// Ground plane at height zero combined with any number of flights; the
/// surface height is the minimum over all flights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Terrain {
    pub flights: Vec<StairProfile>,
}

impl Terrain {
    pub fn flat() -> Self {
        Terrain::default()
    }

    pub fn single(flight: StairProfile) -> Self {
        Terrain {
            flights: vec![flight],
        }
    }

    pub fn with(mut self, flight: StairProfile) -> Self {
        self.flights.push(flight);
        self
    }

    pub fn height_at(&self, p: &Vector2<f64>) -> f64 {
        if self.flights.is_empty() {
            return 0.0;
        }
        self.flights
            .iter()
            .map(|f| f.height_at(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Fractions in (0, 1) of the segment `a → b` at which it crosses a
    /// riser, sorted and deduplicated.
    pub fn breakpoints_along(&self, a: &Vector2<f64>, b: &Vector2<f64>) -> Vec<f64> {
        let mut out = Vec::new();
        for f in &self.flights {
            let ua = f.along(a);
            let ub = f.along(b);
            let du = ub - ua;
            if du.abs() < 1e-15 {
                continue;
            }
            for r in f.risers() {
                let s = (r - ua) / du;
                if s > 0.0 && s < 1.0 {
                    out.push(s);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        out
    }
}
