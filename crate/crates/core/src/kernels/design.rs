use serde::{Deserialize, Serialize};

use crate::error::{contract, GpError, Result};

const UNIT_NORM_TOL: f64 = 1e-12;

/// A point of the index set, stored by its coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn scalar(x: f64) -> Self {
        Self { coords: vec![x] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Dot product, summed in coordinate order.
    pub fn dot(&self, other: &Point) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Great-circle distance in radians between two unit vectors.
    pub fn geodesic_distance(&self, other: &Point) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

/// Where the points of a design live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "d", rename_all = "lowercase")]
pub enum Geometry {
    /// `R^d`.
    Euclidean(usize),
    /// Unit sphere `S^{d-1}` embedded in `R^d`.
    Sphere(usize),
}

impl Geometry {
    pub fn ambient_dim(&self) -> usize {
        match *self {
            Geometry::Euclidean(d) | Geometry::Sphere(d) => d,
        }
    }
}

/// An ordered finite set of pairwise distinct evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    geometry: Geometry,
    points: Vec<Point>,
}

impl Design {
    pub fn new(geometry: Geometry, points: Vec<Point>) -> Result<Self> {
        let d = geometry.ambient_dim();
        if d == 0 {
            return Err(contract("design dimension must be positive"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.dim() != d {
                return Err(GpError::Geometry(format!(
                    "point {i} has {} coordinates, expected {d}",
                    p.dim()
                )));
            }
            if p.coords.iter().any(|c| !c.is_finite()) {
                return Err(contract(format!("point {i} has non-finite coordinates")));
            }
            if let Geometry::Sphere(_) = geometry {
                if (p.norm() - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(GpError::Geometry(format!(
                        "point {i} has norm {} but lies on the unit sphere",
                        p.norm()
                    )));
                }
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(contract(format!("design points {j} and {i} coincide")));
                }
            }
        }
        Ok(Self { geometry, points })
    }

    /// One-dimensional design from scalar locations.
    pub fn interval(locations: &[f64]) -> Result<Self> {
        Self::new(
            Geometry::Euclidean(1),
            locations.iter().copied().map(Point::scalar).collect(),
        )
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// First `n` points as a design of their own.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n > self.len() {
            return Err(contract(format!("prefix of length {n} exceeds design size {}", self.len())));
        }
        Ok(Self {
            geometry: self.geometry,
            points: self.points[..n].to_vec(),
        })
    }

    /// True when `self` is a strict prefix of `other`.
    pub fn is_strict_prefix_of(&self, other: &Design) -> bool {
        self.geometry == other.geometry
            && self.len() < other.len()
            && other.points[..self.len()] == self.points[..]
    }
}

/// `n` equispaced points on `[0, 1]`, endpoints included (`n ≥ 2`); `n = 1` gives `{0}`.
pub fn equispaced_grid(n: usize) -> Result<Design> {
    match n {
        0 => Err(contract("grid needs at least one point")),
        1 => Design::interval(&[0.0]),
        _ => {
            let h = (n - 1) as f64;
            let locs: Vec<f64> = (0..n).map(|i| i as f64 / h).collect();
            Design::interval(&locs)
        }
    }
}

/// Points of the dyadic refinement of `(0, 1]` in nesting order:
/// `1/2, 1, 1/4, 3/4, 1/8, 3/8, …`. Every power-of-two prefix is the dyadic grid `{j/2^m}`.
pub fn dyadic_sequence(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    for &x in &[0.5, 1.0] {
        if out.len() < len {
            out.push(x);
        }
    }
    let mut level = 2u32;
    while out.len() < len {
        let denom = f64::from(2u32.pow(level));
        let count = 2usize.pow(level - 1);
        for j in 1..=count {
            if out.len() == len {
                break;
            }
            out.push((2 * j - 1) as f64 / denom);
        }
        level += 1;
    }
    out
}

/// Nested dyadic designs on `(0, 1]` of sizes `2, 4, …` up to `max_n`.
pub fn dyadic_designs(max_n: usize) -> Result<Vec<Design>> {
    if max_n < 2 {
        return Err(contract("dyadic designs need max_n >= 2"));
    }
    let full = Design::interval(&dyadic_sequence(max_n))?;
    let mut out = Vec::new();
    let mut n = 2;
    while n <= max_n {
        out.push(full.prefix(n)?);
        n *= 2;
    }
    Ok(out)
}

fn radical_inverse_base2(mut i: u64) -> f64 {
    let mut r = 0.0;
    let mut f = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            r += f;
        }
        i >>= 1;
        f *= 0.5;
    }
    r
}

/// Golden-angle spiral on `S^2` with van der Corput heights.
///
/// Point `i` has height `z = 1 − 2·vdc(i+1)` and longitude `2π·frac(i/φ)`. Heights are
/// distinct and never ±1, so every prefix is a valid design and prefixes stay
/// quasi-uniform.
pub fn sphere_spiral_points(len: usize) -> Vec<Point> {
    let inv_phi = 2.0 / (1.0 + 5f64.sqrt());
    (0..len)
        .map(|i| {
            let z = 1.0 - 2.0 * radical_inverse_base2(i as u64 + 1);
            let lon = 2.0 * std::f64::consts::PI * (i as f64 * inv_phi).fract();
            let r = (1.0 - z * z).sqrt();
            let (x, y) = (r * lon.cos(), r * lon.sin());
            // renormalize so the unit-norm invariant holds to rounding
            let nrm = (x * x + y * y + z * z).sqrt();
            Point::new(vec![x / nrm, y / nrm, z / nrm])
        })
        .collect()
}

/// Nested spiral designs on `S^2` with the given strictly increasing sizes.
pub fn sphere_designs(sizes: &[usize]) -> Result<Vec<Design>> {
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(contract("sphere design sizes must be positive and strictly increasing"));
    }
    let full = Design::new(Geometry::Sphere(3), sphere_spiral_points(*sizes.last().unwrap()))?;
    sizes.iter().map(|&n| full.prefix(n)).collect()
}
