use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Cartesian position. Lattice and coverage code works in meters; the
/// acoustic module takes kilometers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance_squared(&self, other: &Point3) -> f64 {
        let d = *self - *other;
        d.x * d.x + d.y * d.y + d.z * d.z
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        self.distance_squared(other).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.distance(&Point3::ORIGIN)
    }

    pub fn midpoint(&self, other: &Point3) -> Point3 {
        self.lerp(other, 0.5)
    }

    pub fn lerp(&self, other: &Point3, t: f64) -> Point3 {
        *self + (*other - *self) * t
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, rhs: f64) -> Point3 {
        Point3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

/// Axis-aligned box the network is deployed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub min: Point3,
    pub max: Point3,
}

impl Region {
    pub fn new(min: Point3, max: Point3) -> Result<Self> {
        if !(max.x >= min.x && max.y >= min.y && max.z >= min.z) {
            return Err(domain(format!(
                "region max corner {max:?} is below min corner {min:?}"
            )));
        }
        Ok(Self { min, max })
    }

    /// Cube of side `side` centered on `center`.
    pub fn cube(center: Point3, side: f64) -> Result<Self> {
        let h = side / 2.0;
        Self::new(
            Point3::new(center.x - h, center.y - h, center.z - h),
            Point3::new(center.x + h, center.y + h, center.z + h),
        )
    }

    pub fn contains(&self, p: &Point3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn center(&self) -> Point3 {
        self.min.midpoint(&self.max)
    }

    pub fn extent(&self) -> Point3 {
        self.max - self.min
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }

    pub fn half_diagonal(&self) -> f64 {
        self.extent().norm() / 2.0
    }

    /// Grows (or shrinks, for negative `by`) every face by `by`. A shrink
    /// past the center collapses to the center point.
    pub fn inflate(&self, by: f64) -> Region {
        let c = self.center();
        let grow = |lo: f64, hi: f64, mid: f64| {
            if hi - lo + 2.0 * by < 0.0 {
                (mid, mid)
            } else {
                (lo - by, hi + by)
            }
        };
        let (x0, x1) = grow(self.min.x, self.max.x, c.x);
        let (y0, y1) = grow(self.min.y, self.max.y, c.y);
        let (z0, z1) = grow(self.min.z, self.max.z, c.z);
        Region {
            min: Point3::new(x0, y0, z0),
            max: Point3::new(x1, y1, z1),
        }
    }

    /// Distance from an inside point to the nearest face.
    pub fn depth_of(&self, p: &Point3) -> f64 {
        [
            p.x - self.min.x,
            self.max.x - p.x,
            p.y - self.min.y,
            self.max.y - p.y,
            p.z - self.min.z,
            self.max.z - p.z,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_region() {
        assert!(Region::new(Point3::new(1.0, 0.0, 0.0), Point3::ORIGIN).is_err());
    }

    #[test]
    fn inflate_and_depth() {
        let r = Region::cube(Point3::ORIGIN, 2.0).unwrap();
        let big = r.inflate(0.5);
        assert_eq!(big.max, Point3::new(1.5, 1.5, 1.5));
        assert_eq!(r.inflate(-5.0).volume(), 0.0);
        assert!((r.depth_of(&Point3::new(0.5, 0.0, 0.0)) - 0.5).abs() < 1e-15);
        assert!((r.half_diagonal() - 3f64.sqrt()).abs() < 1e-15);
    }
}
